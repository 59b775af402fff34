from __future__ import annotations

import logging
import os
import random
from dataclasses import dataclass, field
from enum import Enum
from itertools import islice

from .core import (
    LengthMismatchError,
    ParameterError,
    RingParams,
    SymbolString,
    as_symbols,
    t_fold,
)
from .hashstream import (
    MAX_BYTE_SYMBOL_MODULUS,
    DigestFunction,
    digest_to_symbols,
    get_digest,
    iter_chain,
)

LOGGER = logging.getLogger(__name__)

DEFAULT_P = 256
DEFAULT_W = 2
DEFAULT_K = 127
DEFAULT_DIGEST = "sha512"
ALICE_SECRET_LENGTH = 253
BOB_SECRET_LENGTH = 121
SECRET_LENGTH_RANGE = (16, 256)

Entropy = random.Random


class SessionStateError(RuntimeError):
    """Raised when a key exchange step is attempted out of order."""


@dataclass(frozen=True)
class ProtocolConfig:
    """Agreed public context: ring parameters, the digest R and the length k of g."""

    params: RingParams
    digest: DigestFunction
    k: int

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ParameterError(f"K must be >= 1, got {self.k}")
        if self.params.p > MAX_BYTE_SYMBOL_MODULUS:
            raise ParameterError(
                f"key exchange needs p <= {MAX_BYTE_SYMBOL_MODULUS}, got {self.params.p}"
            )

    @classmethod
    def build(
        cls,
        p: int = DEFAULT_P,
        w: int = DEFAULT_W,
        k: int = DEFAULT_K,
        digest: str = DEFAULT_DIGEST,
    ) -> ProtocolConfig:
        return cls(params=RingParams(p=p, w=w), digest=get_digest(digest), k=k)

    @classmethod
    def from_env(cls) -> ProtocolConfig:
        return cls.build(
            p=int(os.getenv("STRINGKEX_P", str(DEFAULT_P))),
            w=int(os.getenv("STRINGKEX_W", str(DEFAULT_W))),
            k=int(os.getenv("STRINGKEX_K", str(DEFAULT_K))),
            digest=os.getenv("STRINGKEX_DIGEST", DEFAULT_DIGEST),
        )


@dataclass(frozen=True)
class KeyPair:
    secret: SymbolString = field(repr=False)
    public_key: SymbolString


@dataclass(frozen=True)
class Transcript:
    """What a passive observer sees: the generator and both public keys."""

    generator: SymbolString
    alice_public: SymbolString
    bob_public: SymbolString

    def __post_init__(self) -> None:
        lengths = {len(self.generator), len(self.alice_public), len(self.bob_public)}
        if len(lengths) != 1:
            raise LengthMismatchError(
                "transcript fields differ in length: "
                f"g={len(self.generator)} A={len(self.alice_public)} B={len(self.bob_public)}"
            )


def default_entropy(seed: int | None = None) -> Entropy:
    if seed is None:
        return random.SystemRandom()
    return random.Random(seed)


def secret_bytes(secret: SymbolString) -> bytes:
    return bytes(secret)


def key_streams(cfg: ProtocolConfig, s: bytes, count: int | None = None) -> list[SymbolString]:
    """The per-component symbol streams R^(k+1)(s) for k = 0 .. count - 1."""
    if not s:
        raise ParameterError("secret must not be empty")
    total = cfg.k if count is None else count
    return [
        digest_to_symbols(state.current, cfg.params)
        for state in islice(iter_chain(cfg.digest, s), total)
    ]


def w_transform(cfg: ProtocolConfig, x: SymbolString, s: bytes) -> SymbolString:
    if len(x) != cfg.k:
        raise LengthMismatchError(f"input has length {len(x)}, expected K={cfg.k}")
    streams = key_streams(cfg, s)
    return tuple(t_fold(cfg.params, xk, stream) for xk, stream in zip(x, streams))


def gen_generator(cfg: ProtocolConfig, rng: Entropy | None = None) -> SymbolString:
    rng = rng or default_entropy()
    return tuple(rng.randrange(cfg.params.p) for _ in range(cfg.k))


def gen_secret(
    params: RingParams,
    length: int | None = None,
    rng: Entropy | None = None,
) -> SymbolString:
    rng = rng or default_entropy()
    if length is None:
        length = rng.randint(*SECRET_LENGTH_RANGE)
    if length < 1:
        raise ParameterError(f"secret length must be >= 1, got {length}")
    return tuple(rng.randrange(params.p) for _ in range(length))


def derive_public(cfg: ProtocolConfig, g: SymbolString, secret: SymbolString) -> SymbolString:
    return w_transform(cfg, g, secret_bytes(secret))


def derive_shared(
    cfg: ProtocolConfig,
    peer_public: SymbolString,
    secret: SymbolString,
) -> SymbolString:
    return w_transform(cfg, peer_public, secret_bytes(secret))


def generate_keypair(
    cfg: ProtocolConfig,
    g: SymbolString,
    length: int | None = None,
    rng: Entropy | None = None,
) -> KeyPair:
    secret = gen_secret(cfg.params, length, rng)
    return KeyPair(secret=secret, public_key=derive_public(cfg, g, secret))


class SessionState(Enum):
    NEW = "new"
    GENERATOR_SET = "generator_set"
    KEY_PUBLISHED = "key_published"
    SHARED_DERIVED = "shared_derived"


class KeyExchangeSession:
    """One party's side of the exchange, enforcing the step order.

    The generator is agreed first, then the party publishes its key, and only
    once the peer's key has been received can the shared string be derived.
    """

    def __init__(
        self,
        cfg: ProtocolConfig,
        secret: SymbolString | None = None,
        rng: Entropy | None = None,
        secret_length: int | None = None,
    ) -> None:
        self.cfg = cfg
        self.rng = rng or default_entropy()
        if secret is None:
            secret = gen_secret(cfg.params, secret_length, self.rng)
        elif not secret:
            raise ParameterError("secret must not be empty")
        self._secret = as_symbols(cfg.params, secret)
        self.state = SessionState.NEW
        self.generator: SymbolString | None = None
        self.public_key: SymbolString | None = None
        self.peer_public: SymbolString | None = None
        self.shared: SymbolString | None = None

    @property
    def secret(self) -> SymbolString:
        return self._secret

    def _require(self, *states: SessionState) -> None:
        if self.state not in states:
            expected = ", ".join(state.value for state in states)
            raise SessionStateError(f"session is {self.state.value}, expected {expected}")

    def agree_generator(self, g: SymbolString | None = None) -> SymbolString:
        self._require(SessionState.NEW)
        if g is None:
            g = gen_generator(self.cfg, self.rng)
        g = as_symbols(self.cfg.params, g)
        if len(g) != self.cfg.k:
            raise LengthMismatchError(f"generator has length {len(g)}, expected K={self.cfg.k}")
        self.generator = g
        self.state = SessionState.GENERATOR_SET
        return g

    def publish(self) -> SymbolString:
        self._require(SessionState.GENERATOR_SET)
        assert self.generator is not None
        self.public_key = derive_public(self.cfg, self.generator, self._secret)
        self.state = SessionState.KEY_PUBLISHED
        return self.public_key

    def receive_peer(self, peer_public: SymbolString) -> None:
        self._require(SessionState.GENERATOR_SET, SessionState.KEY_PUBLISHED)
        peer_public = as_symbols(self.cfg.params, peer_public)
        if len(peer_public) != self.cfg.k:
            raise LengthMismatchError(
                f"peer key has length {len(peer_public)}, expected K={self.cfg.k}"
            )
        self.peer_public = peer_public

    def derive(self) -> SymbolString:
        self._require(SessionState.KEY_PUBLISHED)
        if self.peer_public is None:
            raise SessionStateError("peer public key not received")
        self.shared = derive_shared(self.cfg, self.peer_public, self._secret)
        self.state = SessionState.SHARED_DERIVED
        LOGGER.debug("session_shared_derived", extra={"k": self.cfg.k})
        return self.shared
