from __future__ import annotations

import logging
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stringkex import core
from stringkex.core import AffineMap, ParameterError, RingParams

SYMBOL = st.integers(min_value=0, max_value=255)


def _raw_step(p: int, w: int, xi: int, alpha: int) -> int:
    return ((w * alpha + 1) * xi + alpha) % p


def _strings(p: int, max_length: int):
    for length in range(max_length + 1):
        yield from product(range(p), repeat=length)


@pytest.mark.parametrize(("p", "w"), [(7, 2), (2, 2), (8, 3), (8, 0), (256, 1)])
def test_ring_params_rejects_odd_or_small(p: int, w: int) -> None:
    with pytest.raises(ParameterError):
        RingParams(p=p, w=w)


def test_gw_step_examples(byte_params: RingParams) -> None:
    assert core.gw_step(byte_params, 0, 0) == 0
    assert core.gw_step(byte_params, 5, 0) == 5
    assert core.gw_step(byte_params, 200, 100) == 108


def test_zero_symbol_is_identity(byte_params: RingParams) -> None:
    assert all(core.gw_step(byte_params, xi, 0) == xi for xi in range(256))


def test_t_fold_examples(byte_params: RingParams) -> None:
    assert core.t_fold(byte_params, 9, ()) == 9
    assert core.t_fold(byte_params, 3, (2,)) == 17
    assert core.t_fold(byte_params, 3, (2, 7)) == 6
    assert core.t_fold(byte_params, 3, (7, 2)) == 6


def test_affine_of_string_examples(byte_params: RingParams) -> None:
    assert core.affine_of_string(byte_params, ()) == AffineMap(big_p=1)
    affine = core.affine_of_string(byte_params, (2, 7))
    assert affine.big_p == 75
    assert core.affine_apply(byte_params, affine, 3) == 6


def test_affine_apply_examples(micro_params: RingParams, byte_params: RingParams) -> None:
    assert core.affine_apply(byte_params, AffineMap(big_p=1), 42) == 42
    assert core.affine_apply(micro_params, AffineMap(big_p=3), 3) == 2
    assert core.gw_step(micro_params, 3, 1) == 2


def test_affine_apply_rejects_corrupted_map(byte_params: RingParams) -> None:
    with pytest.raises(ParameterError):
        core.affine_apply(byte_params, AffineMap(big_p=74), 3)


def test_quasi_commutativity_exhaustive_small(micro_params: RingParams) -> None:
    for xi, alpha, beta in product(range(8), repeat=3):
        left = core.gw_step(micro_params, core.gw_step(micro_params, xi, alpha), beta)
        right = core.gw_step(micro_params, core.gw_step(micro_params, xi, beta), alpha)
        assert left == right


def test_quasi_commutativity_exhaustive_bytes(byte_params: RingParams) -> None:
    p = byte_params.p
    alpha = np.arange(p, dtype=np.int64)[:, None]
    beta = np.arange(p, dtype=np.int64)[None, :]
    for xi in range(p):
        left = core.gw_step(byte_params, core.gw_step(byte_params, xi, alpha), beta)
        right = core.gw_step(byte_params, core.gw_step(byte_params, xi, beta), alpha)
        assert np.array_equal(left, right), xi


@settings(max_examples=200)
@given(st.data(), SYMBOL, st.lists(SYMBOL, max_size=40))
def test_fold_is_permutation_invariant(data, xi: int, s: list[int]) -> None:
    params = RingParams(p=256, w=2)
    shuffled = data.draw(st.permutations(s))
    assert core.t_fold(params, xi, s) == core.t_fold(params, xi, shuffled)


@pytest.mark.parametrize("w", [2, 4])
def test_affine_collapse_exhaustive_small(w: int) -> None:
    params = RingParams(p=8, w=w)
    for s in _strings(8, 4):
        affine = core.affine_of_string(params, s)
        assert affine.big_p % w == 1
        for xi in range(8):
            assert core.affine_apply(params, affine, xi) == core.t_fold(params, xi, s)


@settings(max_examples=60)
@given(st.sampled_from([2, 4]), st.lists(st.integers(0, 7), min_size=5, max_size=6))
def test_affine_collapse_longer_small_strings(w: int, s: list[int]) -> None:
    params = RingParams(p=8, w=w)
    affine = core.affine_of_string(params, s)
    for xi in range(8):
        assert core.affine_apply(params, affine, xi) == core.t_fold(params, xi, s)


@settings(max_examples=100)
@given(SYMBOL, st.lists(SYMBOL, max_size=512))
def test_affine_collapse_bytes(xi: int, s: list[int]) -> None:
    params = RingParams(p=256, w=2)
    affine = core.affine_of_string(params, s)
    assert affine.big_p % 2 == 1
    assert core.affine_apply(params, affine, xi) == core.t_fold(params, xi, s)


@given(st.lists(SYMBOL, max_size=20), st.lists(SYMBOL, max_size=20))
def test_affine_compose_matches_concatenation(first: list[int], second: list[int]) -> None:
    params = RingParams(p=256, w=2)
    left = core.affine_of_string(params, first)
    right = core.affine_of_string(params, second)
    assert core.affine_compose(params, left, right) == core.affine_of_string(params, first + second)
    assert core.affine_compose(params, left, right) == core.affine_compose(params, right, left)


def test_mod_inverse_examples() -> None:
    assert all(core.mod_inverse(1, m) == 1 for m in range(2, 64))
    assert core.mod_inverse(3, 256) == 171
    assert core.mod_inverse(2, 256) is None
    assert core.mod_inverse(0, 256) is None


def test_mod_inverse_matches_brute_force_table() -> None:
    table: dict[int, int] = {}
    for i in range(256):
        for j in range(256):
            if (i * j) % 256 == 1:
                table[i] = j
    for x in range(256):
        assert core.mod_inverse(x, 256) == table.get(x)


@pytest.mark.parametrize("m", [6, 10, 12, 97, 1000])
def test_mod_inverse_defined_values_invert(m: int) -> None:
    for x in range(m):
        inverse = core.mod_inverse(x, m)
        if inverse is None:
            assert np.gcd(x, m) > 1
        else:
            assert 1 <= inverse < m
            assert (x * inverse) % m == 1


def _brute_spectrum(p: int, w: int) -> list[tuple[int, frozenset[int]]]:
    found = []
    for xi in range(p):
        alphas = frozenset(a for a in range(1, p) if _raw_step(p, w, xi, a) == xi)
        if alphas:
            found.append((xi, alphas))
    return found


@pytest.mark.parametrize("p", [6, 8, 12, 16])
@pytest.mark.parametrize("w", [1, 2, 3, 4, 5, 6])
def test_fixed_point_spectrum_matches_brute_scan(p: int, w: int) -> None:
    assert core.fixed_point_spectrum(p, w) == _brute_spectrum(p, w)


@pytest.mark.parametrize("p", [8, 256])
@pytest.mark.parametrize("w", [2, 4, 6])
def test_even_w_has_no_fixed_points(p: int, w: int) -> None:
    assert core.fixed_point_spectrum(p, w) == []
    params = RingParams(p=p, w=w)
    xi = np.arange(p, dtype=np.int64)[:, None]
    alpha = np.arange(1, p, dtype=np.int64)[None, :]
    assert not np.any(core.gw_step(params, xi, alpha) == xi)


def test_unit_multiplier_fixes_last_symbol() -> None:
    spectrum = dict(core.fixed_point_spectrum(256, 1))
    assert spectrum[255] == frozenset(range(1, 256))
    spectrum = dict(core.fixed_point_spectrum(8, 1))
    assert spectrum[7] == frozenset(range(1, 8))


def test_multiplier_three_fixes_85_for_every_symbol() -> None:
    spectrum = dict(core.fixed_point_spectrum(256, 3))
    assert spectrum[85] == frozenset(range(1, 256))
    # 3 * 253 + 1 = 248 (mod 256), so p - 3 is fixed only by multiples of 32
    assert spectrum[253] == frozenset(range(32, 256, 32))


def test_even_w_with_odd_factor_in_p_has_fixed_points() -> None:
    spectrum = dict(core.fixed_point_spectrum(6, 2))
    assert spectrum[1] == frozenset({2, 4})


def test_fixed_point_scan_refuses_large_modulus() -> None:
    with pytest.raises(ParameterError):
        core.fixed_point_spectrum((1 << 16) + 2, 2)


def test_as_symbols_rejects_out_of_range(micro_params: RingParams) -> None:
    assert core.as_symbols(micro_params, [0, 7]) == (0, 7)
    with pytest.raises(ParameterError):
        core.as_symbols(micro_params, [8])


def test_fixed_point_spectrum_debug_logs_each_point(caplog: pytest.LogCaptureFixture) -> None:
    with caplog.at_level(logging.DEBUG, logger="stringkex.core"):
        core.fixed_point_spectrum(6, 2)
        assert not [r for r in caplog.records if r.getMessage() == "fixed_point_found"]
        core.fixed_point_spectrum(6, 2, debug=True)
    found = [r for r in caplog.records if r.getMessage() == "fixed_point_found"]
    assert [(r.xi, r.alpha_step) for r in found] == [(1, 2), (4, 2)]
