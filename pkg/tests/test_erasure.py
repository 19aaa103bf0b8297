import time

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tensorrm import oracles
from tensorrm.bits import BitWord, TriWord
from tensorrm.erasure import (
    TooManyErasures,
    complete_batch,
    complete_int,
    complete_positions_first,
    f_rm,
    linear_complete,
    parity_checks,
    rm_complete,
    solve_template,
)
from tensorrm.rm import RmCode, encode_batch

REP3 = np.array([[1, 1, 1]], dtype=np.uint8)
PAIRS = np.array([[1, 1, 0, 0], [0, 0, 1, 1]], dtype=np.uint8)


def tw(s):
    return TriWord.from_string(s)


def bw(s):
    return BitWord.from_string(s)


# ---------------------------------------------------------------- examples

def test_rm_complete_examples():
    assert rm_complete(RmCode(1, 2), tw("011*")) == bw("0110")
    assert rm_complete(RmCode(0, 2), tw("1*11")) == bw("1111")
    assert rm_complete(RmCode(0, 2), tw("01**")) is None
    assert rm_complete(RmCode(1, 2), tw("0110")) == bw("0110")


def test_rm_complete_precondition():
    with pytest.raises(TooManyErasures):
        rm_complete(RmCode(1, 2), tw("0*1*"))
    with pytest.raises(ValueError):
        rm_complete(RmCode(1, 2), tw("011"))
    with pytest.raises(TooManyErasures):
        complete_positions_first(RmCode(1, 3), np.zeros((8, 2), np.uint8), np.arange(8) < 4)


def test_f_rm_examples():
    code = RmCode(1, 2)
    assert f_rm(code, tw("011*")) == TriWord.from_bits(bw("0110"))
    assert f_rm(code, tw("0*1*")).to_string() == "****"
    assert f_rm(code, tw("1110")).to_string() == "****"


def test_linear_complete_examples():
    assert linear_complete(REP3, tw("1**")) == bw("111")
    assert linear_complete(REP3, tw("***")) is None
    assert linear_complete(PAIRS, tw("1*0*")) == bw("1100")
    assert linear_complete(PAIRS, tw("1000")) is None
    with pytest.raises(ValueError):
        linear_complete(PAIRS, tw("1*0"))


def test_parity_checks_annihilate_generator():
    gen = oracles.rm_generator(2, 4)
    for h in parity_checks(gen):
        for row in gen:
            assert (int.from_bytes(np.packbits(row, bitorder="little").tobytes(), "little") & h).bit_count() % 2 == 0
    assert len(parity_checks(gen)) == 16 - 11


# ------------------------------------------------------------- properties

def _draw_code(draw, max_m=5):
    m = draw(st.integers(1, max_m))
    r = draw(st.integers(0, m))
    code = RmCode(r, m)
    return code


@st.composite
def tri_cases(draw, max_m=4):
    code = _draw_code(draw, max_m)
    n = code.length
    vals = draw(st.lists(st.integers(0, 1), min_size=n, max_size=n))
    k = draw(st.integers(0, code.d_min - 1))
    pos = draw(st.lists(st.integers(0, n - 1), min_size=k, max_size=k, unique=True))
    erased = np.zeros(n, dtype=bool)
    erased[pos] = True
    if draw(st.booleans()):
        coeffs = draw(st.lists(st.integers(0, 1), min_size=code.dimension, max_size=code.dimension))
        vals = encode_batch(code, np.array(coeffs, dtype=np.uint8)).tolist()
    return code, TriWord(np.array(vals), erased)


@given(tri_cases())
def test_rm_complete_matches_consistent_set(case):
    code, y = case
    subset = oracles.consistent_codewords(code, y)
    assert len(subset) <= 1  # fewer than d_min erasures pins the codeword down
    got = rm_complete(code, y)
    if len(subset) == 0:
        assert got is None
    else:
        assert got == BitWord(subset[0])
        assert y.agrees_with(got)
    assert linear_complete(oracles.rm_generator(code.r, code.m), y) == got


@given(tri_cases(max_m=5))
def test_batched_kernel_matches_scalar(case):
    code, y = case
    rng = np.random.default_rng(len(y.to_string()))
    rows = rng.integers(0, 2, (7, code.length), dtype=np.uint8)
    cws = encode_batch(code, rng.integers(0, 2, (7, code.dimension), dtype=np.uint8))
    rows[:4] = cws[:4]
    rows[0] = y.values
    out, ok = complete_batch(code, rows, y.erased)
    for row, o, k in zip(rows, out, ok):
        ref = rm_complete(code, TriWord(row, y.erased))
        assert k == (ref is not None)
        if k:
            assert np.array_equal(o, ref.bits)


def test_complete_int_bitset_form():
    code = RmCode(1, 2)
    # "011*" -> bits 1,2 set; position 3 erased
    assert complete_int(code, 0b0110, 0b1000) == 0b0110


def test_oracle_equivalence_random_pairs(rng):
    for m in range(1, 7):
        for r in range(m + 1):
            code = RmCode(r, m)
            gen = oracles.rm_generator(r, m)
            for _ in range(25):
                c = encode_batch(code, rng.integers(0, 2, code.dimension, dtype=np.uint8))
                k = int(rng.integers(0, code.d_min))
                erased = np.zeros(code.length, dtype=bool)
                erased[rng.choice(code.length, k, replace=False)] = True
                y = TriWord(c, erased)
                assert rm_complete(code, y) == BitWord(c)
                assert linear_complete(gen, y) == BitWord(c)


def test_tie_on_equal_erasures_is_deterministic():
    code = RmCode(1, 3)
    y = tw("0*0000*0")  # one erasure in each half
    assert rm_complete(code, y) == bw("00000000")


def test_solve_template_matches_linear_complete(rng):
    gen = oracles.rm_generator(1, 4)
    for _ in range(30):
        erased = np.zeros(16, dtype=bool)
        erased[rng.choice(16, int(rng.integers(0, 8)), replace=False)] = True
        tpl = solve_template(gen, erased)
        rows = rng.integers(0, 2, (5, 16), dtype=np.uint8)
        rows[:3] = (rng.integers(0, 2, (3, 5)) @ gen) & 1
        out, ok = tpl.apply(rows)
        for row, o, k in zip(rows, out, ok):
            ref = linear_complete(gen, TriWord(row, erased))
            assert k == (ref is not None)
            if k:
                assert np.array_equal(o, ref.bits)


def test_solve_template_underdetermined():
    tpl = solve_template(REP3, np.array([True, True, True]))
    assert not tpl.unique
    _, ok = tpl.apply(np.zeros((2, 3), dtype=np.uint8))
    assert not ok.any()


def test_scalar_runtime_scaling():
    """Cost per doubling of the length stays near 2 (quasilinear tester)."""
    rng = np.random.default_rng(5)
    times = {}
    for m in range(12, 19, 2):
        code = RmCode(m // 2, m)
        c = encode_batch(code, rng.integers(0, 2, code.dimension, dtype=np.uint8))
        erased = np.zeros(code.length, dtype=bool)
        erased[rng.choice(code.length, code.d_min - 1, replace=False)] = True
        y = TriWord(c, erased)
        best = np.inf
        for _ in range(3):
            t0 = time.perf_counter()
            rm_complete(code, y)
            best = min(best, time.perf_counter() - t0)
        times[m] = best
    for m in range(14, 19, 2):
        # two doublings per step
        assert times[m] / times[m - 2] <= 2.6 ** 2, times
