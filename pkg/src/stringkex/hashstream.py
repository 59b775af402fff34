from __future__ import annotations

import hashlib
from collections.abc import Iterator
from dataclasses import dataclass
from typing import Protocol

from .core import ParameterError, RingParams, SymbolString

MAX_BYTE_SYMBOL_MODULUS = 256


class DigestFunction(Protocol):
    name: str
    digest_size: int

    def digest(self, data: bytes) -> bytes: ...


@dataclass(frozen=True)
class HashlibDigest:
    """A fixed-length hash from :mod:`hashlib` used as the transformation R."""

    name: str
    digest_size: int

    @classmethod
    def named(cls, name: str) -> HashlibDigest:
        return cls(name=name, digest_size=hashlib.new(name).digest_size)

    def digest(self, data: bytes) -> bytes:
        return hashlib.new(self.name, data).digest()


@dataclass(frozen=True)
class StubDigest:
    """Single byte (sum(data) + 1) mod 256, small enough to fold by hand."""

    name: str = "stub"
    digest_size: int = 1

    def digest(self, data: bytes) -> bytes:
        return bytes(((sum(data) + 1) % 256,))


DIGESTS: dict[str, DigestFunction] = {
    "sha512": HashlibDigest.named("sha512"),
    "sha256": HashlibDigest.named("sha256"),
    "sha3_512": HashlibDigest.named("sha3_512"),
    "stub": StubDigest(),
}

DIGEST_WIRE_IDS: dict[str, int] = {
    "sha512": 1,
    "sha256": 2,
    "stub": 3,
    "sha3_512": 4,
}


def get_digest(name: str) -> DigestFunction:
    try:
        return DIGESTS[name.lower()]
    except KeyError as exc:
        raise ParameterError(
            f"unknown digest {name!r}, expected one of {sorted(DIGESTS)}"
        ) from exc


def digest_by_wire_id(wire_id: int) -> DigestFunction:
    for name, candidate in DIGEST_WIRE_IDS.items():
        if candidate == wire_id:
            return DIGESTS[name]
    raise ParameterError(f"unknown digest id {wire_id}")


@dataclass(frozen=True)
class HashChainState:
    """The k-th iterate R^(k)(seed); ``current`` is the latest digest."""

    current: bytes
    step: int


def _checked(digest: DigestFunction, value: bytes) -> bytes:
    if len(value) != digest.digest_size:
        raise ValueError(
            f"digest {digest.name} returned {len(value)} bytes, "
            f"expected {digest.digest_size}"
        )
    return value


def chain_init(digest: DigestFunction, seed: bytes) -> HashChainState:
    return HashChainState(current=_checked(digest, digest.digest(seed)), step=1)


def chain_next(state: HashChainState, digest: DigestFunction) -> HashChainState:
    return HashChainState(
        current=_checked(digest, digest.digest(state.current)),
        step=state.step + 1,
    )


def iter_chain(digest: DigestFunction, seed: bytes) -> Iterator[HashChainState]:
    """Yield R(seed), R(R(seed)), ... without end."""
    state = chain_init(digest, seed)
    while True:
        yield state
        state = chain_next(state, digest)


def digest_to_symbols(data: bytes, params: RingParams) -> SymbolString:
    if params.p > MAX_BYTE_SYMBOL_MODULUS:
        raise ParameterError(
            f"digest symbols need p <= {MAX_BYTE_SYMBOL_MODULUS}, got {params.p}"
        )
    if params.p == MAX_BYTE_SYMBOL_MODULUS:
        return tuple(data)
    return tuple(byte % params.p for byte in data)
