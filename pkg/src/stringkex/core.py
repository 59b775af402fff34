from __future__ import annotations

import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from math import gcd

LOGGER = logging.getLogger(__name__)

FIXED_POINT_SCAN_LIMIT = 1 << 16

SymbolString = tuple[int, ...]


class ParameterError(ValueError):
    """Raised when ring parameters or symbols fall outside their domain."""


class LengthMismatchError(ValueError):
    """Raised when two strings that must align have different lengths."""


@dataclass(frozen=True)
class RingParams:
    """Public arithmetic context: the alphabet size p and the multiplier w."""

    p: int
    w: int

    def __post_init__(self) -> None:
        if self.p < 4 or self.p % 2:
            raise ParameterError(f"p must be an even integer >= 4, got {self.p}")
        if self.w < 2 or self.w % 2:
            raise ParameterError(f"w must be an even integer >= 2, got {self.w}")

    @property
    def wide_modulus(self) -> int:
        return self.w * self.p


@dataclass(frozen=True)
class AffineMap:
    """Collapsed fold: xi -> (big_p * xi + (big_p - 1) / w) mod p.

    ``big_p`` is the product of (w * s_n + 1) over the folded string, held
    modulo w * p so that the offset term stays exact.
    """

    big_p: int


def as_symbols(params: RingParams, values: Iterable[int]) -> SymbolString:
    symbols = tuple(values)
    for index, symbol in enumerate(symbols):
        if not 0 <= symbol < params.p:
            raise ParameterError(
                f"symbol {symbol} at position {index} outside [0, {params.p})"
            )
    return symbols


def gw_step(params: RingParams, xi: int, alpha: int) -> int:
    return ((params.w * alpha + 1) * xi + alpha) % params.p


def t_fold(params: RingParams, xi: int, s: Sequence[int]) -> int:
    w, p = params.w, params.p
    for alpha in s:
        xi = ((w * alpha + 1) * xi + alpha) % p
    return xi


def affine_of_string(params: RingParams, s: Sequence[int]) -> AffineMap:
    modulus = params.wide_modulus
    big_p = 1
    for alpha in s:
        big_p = (big_p * (params.w * alpha + 1)) % modulus
    return AffineMap(big_p=big_p)


def affine_compose(params: RingParams, first: AffineMap, second: AffineMap) -> AffineMap:
    """Fold by ``first`` then ``second``; the result does not depend on order."""
    return AffineMap(big_p=(first.big_p * second.big_p) % params.wide_modulus)


def affine_offset(params: RingParams, affine: AffineMap) -> int:
    if affine.big_p % params.w != 1:
        raise ParameterError(
            f"corrupted affine map: big_p={affine.big_p} is not 1 mod {params.w}"
        )
    return ((affine.big_p - 1) // params.w) % params.p


def affine_apply(params: RingParams, affine: AffineMap, xi: int) -> int:
    offset = affine_offset(params, affine)
    return (affine.big_p * xi + offset) % params.p


def _extended_gcd(a: int, b: int) -> tuple[int, int, int]:
    prev_x, x = 1, 0
    prev_y, y = 0, 1
    while b:
        q = a // b
        a, b = b, a % b
        prev_x, x = x, prev_x - q * x
        prev_y, y = y, prev_y - q * y
    return prev_x, prev_y, a


def mod_inverse(x: int, m: int) -> int | None:
    """Return y in [1, m) with x * y = 1 (mod m), or None when gcd(x, m) > 1."""
    if m < 2:
        raise ParameterError(f"modulus must be >= 2, got {m}")
    coefficient, _, divisor = _extended_gcd(x % m, m)
    if divisor != 1:
        return None
    return coefficient % m


def fixed_point_spectrum(
    p: int,
    w: int,
    debug: bool = False,
) -> list[tuple[int, frozenset[int]]]:
    """List every xi that some nonzero alpha leaves fixed under G_w.

    Accepts odd w on purpose. A pair (xi, alpha) is fixed exactly when
    alpha * (w * xi + 1) = 0 (mod p), so for each xi the fixing alphas are the
    nonzero multiples of p / gcd(w * xi + 1, p).
    """
    if p < 2 or p % 2:
        raise ParameterError(f"p must be an even integer >= 2, got {p}")
    if w < 1:
        raise ParameterError(f"w must be >= 1, got {w}")
    if p > FIXED_POINT_SCAN_LIMIT:
        raise ParameterError(
            f"fixed point scan limited to p <= {FIXED_POINT_SCAN_LIMIT}, got {p}"
        )
    spectrum: list[tuple[int, frozenset[int]]] = []
    for xi in range(p):
        step = p // gcd((w * xi + 1) % p, p)
        if step == p:
            continue
        spectrum.append((xi, frozenset(range(step, p, step))))
        if debug:
            LOGGER.debug("fixed_point_found", extra={"xi": xi, "alpha_step": step})
    LOGGER.debug("fixed_point_scan", extra={"p": p, "w": w, "fixed": len(spectrum)})
    return spectrum
