import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tensorrm import oracles
from tensorrm.bits import BitWord
from tensorrm.rm import (
    RmCode,
    binom_sum,
    coefficients_batch,
    encode_batch,
    entropy,
    is_codeword_along,
    is_codeword_batch,
    monomial_indices,
    monomial_set,
    point_index,
    rm_coefficients,
    rm_encode,
    rm_is_codeword,
    zeta_transform,
)


def codes(max_m=6):
    return st.integers(1, max_m).flatmap(lambda m: st.builds(RmCode, st.integers(0, m), st.just(m)))


def test_rmcode_parameters():
    c = RmCode(2, 4)
    assert (c.length, c.dimension, c.d_min) == (16, 11, 4)
    assert c.rate == pytest.approx(11 / 16)
    assert str(c) == "RM(2,4)"
    assert RmCode(0, 3).d_min == 8 and RmCode(3, 3).d_min == 1
    for bad in [(0, 0), (-1, 2), (3, 2)]:
        with pytest.raises(ValueError):
            RmCode(*bad)


def test_monomial_order():
    assert monomial_set(1, 3) == ((), (0,), (1,), (2,))
    assert monomial_set(2, 3)[4:] == ((0, 1), (0, 2), (1, 2))
    assert len(monomial_set(3, 6)) == binom_sum(6, 3)
    assert monomial_indices(1, 2).tolist() == [0, 2, 1]


@pytest.mark.parametrize("m,v,expected", [(2, (0, 0), 0), (2, (1, 0), 2), (3, (0, 1, 1), 3)])
def test_point_index_examples(m, v, expected):
    assert point_index(v) == expected


def test_point_index_first_half_iff_v1_zero():
    for v in itertools.product((0, 1), repeat=4):
        assert (point_index(v) < 8) == (v[0] == 0)
    with pytest.raises(ValueError):
        point_index((0, 2))


def test_encode_examples():
    assert rm_encode(RmCode(0, 2), [1]).to_string() == "1111"
    assert rm_encode(RmCode(1, 2), [0, 1, 1]).to_string() == "0110"
    assert rm_encode(RmCode(2, 2), [0, 0, 0, 1]).to_string() == "0001"
    with pytest.raises(ValueError):
        rm_encode(RmCode(1, 2), [1, 0])


def test_membership_examples():
    assert rm_is_codeword(RmCode(1, 2), BitWord.from_string("0110"))
    assert not rm_is_codeword(RmCode(0, 2), BitWord.from_string("0111"))
    for w in ["0000", "1011", "0111"]:
        assert rm_is_codeword(RmCode(2, 2), BitWord.from_string(w))
    with pytest.raises(ValueError):
        rm_is_codeword(RmCode(1, 2), BitWord.from_string("011"))


def test_binom_sum_and_entropy():
    assert binom_sum(4, 2) == 11
    assert binom_sum(5, 9) == 32
    assert entropy(0.5) == 1.0
    assert entropy(0.0) == entropy(1.0) == 0.0
    assert abs(entropy(0.11) - 0.4999) <= 0.001
    with pytest.raises(ValueError):
        entropy(1.5)


@given(codes(), st.randoms(use_true_random=False))
def test_encode_matches_explicit_generator_and_round_trips(code, rnd):
    coeffs = np.array([rnd.randint(0, 1) for _ in range(code.dimension)], dtype=np.uint8)
    w = rm_encode(code, coeffs)
    gen = oracles.rm_generator(code.r, code.m)
    assert np.array_equal(w.bits, (coeffs.astype(np.int64) @ gen) & 1)
    assert rm_is_codeword(code, w)
    assert np.array_equal(rm_coefficients(code, w), coeffs)
    if code.dimension <= 12:
        assert np.array_equal(oracles.coefficient_recovery(code, w), coeffs)


@given(codes(), st.randoms(use_true_random=False))
def test_linearity(code, rnd):
    a = np.array([rnd.randint(0, 1) for _ in range(code.dimension)], dtype=np.uint8)
    b = np.array([rnd.randint(0, 1) for _ in range(code.dimension)], dtype=np.uint8)
    assert rm_encode(code, a ^ b) == rm_encode(code, a) ^ rm_encode(code, b)


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_exhaustive_member_count(m):
    words = ((np.arange(1 << (1 << m))[:, None] >> np.arange(1 << m)) & 1).astype(np.uint8)
    for r in range(m + 1):
        code = RmCode(r, m)
        assert int(is_codeword_batch(code, words).sum()) == 2 ** code.dimension


@pytest.mark.parametrize("m", range(1, 6))
def test_dmin_bruteforce(m):
    for r in range(m + 1):
        code = RmCode(r, m)
        if code.dimension <= 20:
            assert oracles.min_distance_bruteforce(code) == code.d_min


def test_zeta_is_involution_and_requires_contiguous(rng):
    x = rng.integers(0, 2, (5, 32), dtype=np.uint8)
    y = zeta_transform(zeta_transform(x.copy()))
    assert np.array_equal(x, y)
    with pytest.raises(ValueError):
        zeta_transform(np.zeros((32, 4), dtype=np.uint8)[:, ::2], axis=0)
    with pytest.raises(ValueError):
        zeta_transform(np.zeros(6, dtype=np.uint8))


def test_zeta_along_inner_axis(rng):
    x = rng.integers(0, 2, (3, 16, 5), dtype=np.uint8)
    along = zeta_transform(x.copy(), axis=1)
    ref = np.moveaxis(zeta_transform(np.ascontiguousarray(np.moveaxis(x, 1, -1))), -1, 1)
    assert np.array_equal(along, ref)


def test_is_codeword_along(rng):
    code = RmCode(1, 3)
    cws = encode_batch(code, rng.integers(0, 2, (6, code.dimension), dtype=np.uint8))
    arr = np.ascontiguousarray(cws.T)  # positions on axis 0
    arr[2, 4] ^= 1
    ok = is_codeword_along(code, arr, axis=0)
    assert ok.tolist() == [True, True, True, True, False, True]
    assert is_codeword_along(RmCode(3, 3), arr, axis=0).all()
    with pytest.raises(ValueError):
        is_codeword_along(code, arr, axis=1)


def test_coefficients_batch_degree_structure(rng):
    code = RmCode(2, 5)
    cws = encode_batch(code, rng.integers(0, 2, (10, code.dimension), dtype=np.uint8))
    coeffs = coefficients_batch(code, cws)
    high = [i for i in range(32) if bin(i).count("1") > 2]
    assert not coeffs[:, high].any()


def test_rm_coefficients_rejects_noncodeword():
    with pytest.raises(ValueError):
        rm_coefficients(RmCode(0, 2), BitWord.from_string("0111"))
