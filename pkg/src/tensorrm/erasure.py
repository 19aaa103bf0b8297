"""Erasure completion: the recursive Reed-Muller tester and a generic linear solver.

``rm_complete`` decides whether some codeword of RM(r, m) agrees with a
partially erased word and returns it, in O(m 2^m). It has two kernels that
run the same recursion:

* a scalar one on Python-int bitsets, for one word at a time;
* a batched numpy one for many words sharing one erasure mask, which is the
  situation inside the tensor decoder (every vector in a subtensor sees the
  same erasure pattern).

``linear_complete`` handles any binary linear code given by a generator
matrix, by Gaussian elimination on its parity checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np

from . import gf2
from .bits import BitWord, TriWord
from .rm import RmCode


class TooManyErasures(ValueError):
    """Input has at least d_min erasures, outside the tester's guarantee."""


def _check_erasure_budget(code: RmCode, count: int) -> None:
    if count >= code.d_min:
        raise TooManyErasures(
            f"{code} completes fewer than {code.d_min} erasures, got {count}"
        )


# ------------------------------------------------------------- scalar kernel

def _complete_bits(r: int, m: int, y: int, e: int) -> Optional[int]:
    n = 1 << m
    if r == 0:
        known = ~e & ((1 << n) - 1)
        if y & known == 0:
            return 0
        if y & known == known:
            return (1 << n) - 1
        return None
    if r == m:
        # erasure count < 2^(m-r) = 1 here
        return y
    half = n >> 1
    low = (1 << half) - 1
    y0, y1 = y & low, y >> half
    e0, e1 = e & low, e >> half
    e_sum = e0 | e1
    c_sum = _complete_bits(r - 1, m - 1, (y0 ^ y1) & ~e_sum, e_sum)
    if c_sum is None:
        return None
    if e1.bit_count() < e0.bit_count():
        c1 = _complete_bits(r, m - 1, y1, e1)
        if c1 is None:
            return None
        c = (c1 ^ c_sum) | (c1 << half)
    else:
        c0 = _complete_bits(r, m - 1, y0, e0)
        if c0 is None:
            return None
        c = c0 | ((c0 ^ c_sum) << half)
    if (c ^ y) & ~e & ((1 << n) - 1):
        return None
    return c


def complete_int(code: RmCode, values: int, erased: int) -> Optional[int]:
    """Bitset form of :func:`rm_complete` (bit i = position i)."""
    _check_erasure_budget(code, erased.bit_count())
    return _complete_bits(code.r, code.m, values & ~erased, erased)


def rm_complete(code: RmCode, y: TriWord) -> Optional[BitWord]:
    """Unique codeword of ``code`` consistent with ``y``, or None if there is none.

    Raises:
        TooManyErasures: ``y`` has ``d_min`` or more erasures.
    """
    if y.length != code.length:
        raise ValueError(f"{code} has length {code.length}, word has {y.length}")
    values = BitWord(y.values).to_int()
    erased = BitWord(y.erased).to_int()
    c = complete_int(code, values, erased)
    if c is None:
        return None
    return BitWord.from_int(c, code.length)


# ------------------------------------------------------------ batched kernel

def _complete_shared(r: int, m: int, y: np.ndarray, e: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    # y: positions on axis 0, any batch shape after it
    if r == 0:
        known = ~e
        b = y[int(np.argmax(known))]
        if e.any():
            ok = (y[known] == b).all(axis=0)
        else:
            ok = (y == b).all(axis=0)
        return np.repeat(b[None], 1 << m, axis=0), ok
    if r == m:
        return y, np.ones(y.shape[1:], dtype=bool)
    half = 1 << (m - 1)
    y0, y1 = y[:half], y[half:]
    e0, e1 = e[:half], e[half:]
    c_sum, ok = _complete_shared(r - 1, m - 1, y0 ^ y1, e0 | e1)
    c = np.empty(y.shape, dtype=np.uint8)
    if np.count_nonzero(e1) < np.count_nonzero(e0):
        c1, ok1 = _complete_shared(r, m - 1, y1, e1)
        c[half:] = c1
        np.bitwise_xor(c1, c_sum, out=c[:half])
    else:
        c0, ok1 = _complete_shared(r, m - 1, y0, e0)
        c[:half] = c0
        np.bitwise_xor(c0, c_sum, out=c[half:])
    ok &= ok1
    mismatch = c != y
    if e.any():
        mismatch[e] = False
    ok &= ~mismatch.any(axis=0)
    return c, ok


def complete_positions_first(code: RmCode, values: np.ndarray, erased: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Tester on every word ``values[:, j, ...]`` under one shared erasure mask.

    Returns ``(completed, ok)`` with ``ok`` shaped like ``values.shape[1:]``;
    where ``ok`` is False the word has no consistent codeword and the
    matching part of ``completed`` is meaningless.
    """
    erased = np.asarray(erased, dtype=bool)
    if values.shape[0] != code.length or erased.shape != (code.length,):
        raise ValueError(f"{code} expects positions on axis 0 and a length-{code.length} mask")
    _check_erasure_budget(code, int(erased.sum()))
    if code.r == code.m:
        return np.array(values, dtype=np.uint8), np.ones(values.shape[1:], dtype=bool)
    return _complete_shared(code.r, code.m, values, erased)


def complete_batch(code: RmCode, values: np.ndarray, erased: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Row-wise form of :func:`complete_positions_first` for a (batch, n) array."""
    values = np.asarray(values, dtype=np.uint8)
    if values.ndim != 2:
        raise ValueError("expected a (batch, n) array")
    c, ok = complete_positions_first(code, values.T, erased)
    return np.ascontiguousarray(c.T), ok


def f_rm(code: RmCode, x: TriWord) -> TriWord:
    """Completion map: the consistent codeword, or the all-erased word."""
    if x.length != code.length:
        raise ValueError(f"{code} has length {code.length}, word has {x.length}")
    if x.erasure_count >= code.d_min:
        return TriWord.all_erased(x.length)
    c = rm_complete(code, x)
    if c is None:
        return TriWord.all_erased(x.length)
    return TriWord.from_bits(c)


# ------------------------------------------------------------ generic codes

@lru_cache(maxsize=256)
def _parity_checks(gen_key: bytes, k: int, n: int) -> Tuple[int, ...]:
    gen = np.frombuffer(gen_key, dtype=np.uint8).reshape(k, n)
    return tuple(gf2.nullspace(gf2.rows_from_matrix(gen), n))


def parity_checks(gen: np.ndarray) -> Tuple[int, ...]:
    """Packed parity-check rows of the code spanned by the rows of ``gen``."""
    gen = np.ascontiguousarray(gen, dtype=np.uint8)
    if gen.ndim != 2:
        raise ValueError("generator must be a 2-D 0/1 matrix")
    return _parity_checks(gen.tobytes(), *gen.shape)


@dataclass(frozen=True)
class SolveTemplate:
    """Linear recipe filling one erasure pattern of one code.

    ``fill`` maps the non-erased entries to the erased ones; ``checks`` are
    the parity constraints left on the non-erased entries. ``unique`` is
    False when the pattern leaves the erased entries underdetermined.
    """

    erased: np.ndarray
    unique: bool
    fill: np.ndarray
    checks: np.ndarray

    def apply(self, values: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        values = np.asarray(values, dtype=np.uint8)
        batch = values.shape[0]
        if not self.unique:
            return values.copy(), np.zeros(batch, dtype=bool)
        known = values[:, ~self.erased].astype(np.int32)
        ok = ~((known @ self.checks.T) & 1).any(axis=1)
        out = values.copy()
        out[:, self.erased] = (known @ self.fill.T) & 1
        return out, ok


def solve_template(gen: np.ndarray, erased: np.ndarray) -> SolveTemplate:
    erased = np.asarray(erased, dtype=bool)
    checks = parity_checks(gen)
    n = erased.size
    hmat = gf2.matrix_from_rows(checks, n)
    e_cols = np.flatnonzero(erased)
    k_cols = np.flatnonzero(~erased)
    aug = np.concatenate([hmat[:, e_cols], hmat[:, k_cols]], axis=1)
    rows, pivots = gf2.eliminate(gf2.rows_from_matrix(aug), e_cols.size)
    reduced = gf2.matrix_from_rows(rows, aug.shape[1]) if rows else np.zeros((0, aug.shape[1]), np.uint8)
    unique = len(pivots) == e_cols.size
    fill = reduced[: len(pivots), e_cols.size:].astype(np.int32)
    rest = reduced[len(pivots):, e_cols.size:].astype(np.int32)
    return SolveTemplate(erased=erased.copy(), unique=unique, fill=fill, checks=rest)


def _solve_bits(checks: Tuple[int, ...], n: int, y: int, e: int) -> Optional[int]:
    rows = []
    for h in checks:
        row = h & e
        rhs = (h & y & ~e).bit_count() & 1
        if row:
            rows.append(row | (rhs << n))
        elif rhs:
            return None
    unknowns = [i for i in range(n) if (e >> i) & 1]
    out = y & ~e
    rank = 0
    for col in unknowns:
        bit = 1 << col
        pivot = next((i for i in range(rank, len(rows)) if rows[i] & bit), None)
        if pivot is None:
            return None
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        prow = rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i] & bit:
                rows[i] ^= prow
        rank += 1
    if any(rows[i] >> n for i in range(rank, len(rows))):
        return None
    for i, col in enumerate(unknowns):
        if rows[i] >> n:
            out |= 1 << col
    return out


def linear_complete(gen, y: TriWord) -> Optional[BitWord]:
    """Unique codeword of the code spanned by ``gen`` consistent with ``y``.

    Returns None when no codeword agrees with ``y`` or when several do.
    """
    gen = np.asarray(gen, dtype=np.uint8)
    if gen.ndim != 2 or gen.shape[1] != y.length:
        raise ValueError(f"generator has {gen.shape[-1]} columns, word has length {y.length}")
    checks = parity_checks(gen)
    c = _solve_bits(checks, y.length, BitWord(y.values).to_int(), BitWord(y.erased).to_int())
    if c is None:
        return None
    return BitWord.from_int(c, y.length)
