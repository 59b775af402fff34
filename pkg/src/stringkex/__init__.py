"""Stringkex core helpers."""

from .attack import (
    AttackInfeasibleError,
    EffectiveKey,
    eve,
    recover_effective_key,
    recover_shared,
)
from .core import (
    AffineMap,
    RingParams,
    affine_apply,
    affine_of_string,
    fixed_point_spectrum,
    gw_step,
    mod_inverse,
    t_fold,
)
from .protocol import (
    KeyExchangeSession,
    KeyPair,
    ProtocolConfig,
    Transcript,
    derive_public,
    derive_shared,
    gen_generator,
    gen_secret,
    w_transform,
)

__all__ = [
    "AffineMap",
    "AttackInfeasibleError",
    "EffectiveKey",
    "KeyExchangeSession",
    "KeyPair",
    "ProtocolConfig",
    "RingParams",
    "Transcript",
    "affine_apply",
    "affine_of_string",
    "derive_public",
    "derive_shared",
    "eve",
    "fixed_point_spectrum",
    "gen_generator",
    "gen_secret",
    "gw_step",
    "mod_inverse",
    "recover_effective_key",
    "recover_shared",
    "t_fold",
    "w_transform",
]
