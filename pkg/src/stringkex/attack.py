"""Passive recovery of the shared string from the public transcript alone.

Every component of the public key is a single affine image of the generator
symbol, A_k = P_k * g_k + (P_k - 1) / w, so one symbol e_k per component
reproduces the whole hash-chained fold. Nothing here reads a secret.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass

from .core import (
    LengthMismatchError,
    RingParams,
    SymbolString,
    affine_of_string,
    affine_offset,
    gw_step,
    mod_inverse,
)
from .protocol import Transcript

LOGGER = logging.getLogger(__name__)


class AttackInfeasibleError(ArithmeticError):
    def __init__(self, component: int, factor: int, p: int) -> None:
        super().__init__(
            f"component {component}: w*g+1 = {factor} is not invertible mod {p}"
        )
        self.component = component
        self.factor = factor
        self.p = p


@dataclass(frozen=True)
class EffectiveKey:
    """One symbol per component that acts exactly like the hidden secret."""

    e: SymbolString


def recover_effective_key(
    params: RingParams,
    g: Sequence[int],
    public: Sequence[int],
) -> EffectiveKey:
    if len(g) != len(public):
        raise LengthMismatchError(f"g has length {len(g)}, public key {len(public)}")
    e: list[int] = []
    for index, (gk, ak) in enumerate(zip(g, public)):
        factor = (params.w * gk + 1) % params.p
        inverse = mod_inverse(factor, params.p)
        if inverse is None:
            raise AttackInfeasibleError(index, factor, params.p)
        e.append((inverse * (ak - gk)) % params.p)
    return EffectiveKey(e=tuple(e))


def recover_shared(
    params: RingParams,
    key: EffectiveKey,
    peer_public: Sequence[int],
) -> SymbolString:
    if len(key.e) != len(peer_public):
        raise LengthMismatchError(
            f"effective key has length {len(key.e)}, public key {len(peer_public)}"
        )
    return tuple(gw_step(params, ek, bk) for ek, bk in zip(key.e, peer_public))


def eve(params: RingParams, transcript: Transcript) -> SymbolString:
    key = recover_effective_key(params, transcript.generator, transcript.alice_public)
    shared = recover_shared(params, key, transcript.bob_public)
    LOGGER.debug("eve_recovered_shared", extra={"k": len(shared)})
    return shared


def effective_key_from_streams(
    params: RingParams,
    streams: Sequence[Sequence[int]],
) -> EffectiveKey:
    """Collapse each honest stream to its affine offset (P_k - 1) / w mod p.

    Independent of the inverse route above: it needs the streams, so it is
    only usable as a verification oracle, never by an eavesdropper.
    """
    return EffectiveKey(
        e=tuple(affine_offset(params, affine_of_string(params, stream)) for stream in streams)
    )
