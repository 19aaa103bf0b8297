"""Brute-force reference implementations used by the tests.

Nothing here reuses the fast kernels: generator matrices are built by
evaluating monomials point by point, codes are enumerated message by
message, and every question is answered by scanning the full list. All
functions refuse codes of dimension above ``DIMENSION_CAP``.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations
from typing import Sequence, Union

import numpy as np

from .bits import BitWord, TriTensor, TriWord
from .rm import RmCode
from .trm import TrmCode

DIMENSION_CAP = 20


class OracleCapExceeded(ValueError):
    """The code is too large to enumerate."""


CodeLike = Union[RmCode, TrmCode, np.ndarray, Sequence]


def rm_generator(r: int, m: int) -> np.ndarray:
    """Generator of RM(r, m): one row per monomial (degree, then lex), one column per point.

    Point ``p`` assigns variable ``j`` (0-based) the bit ``(p >> (m-1-j)) & 1``.
    """
    rows = []
    for deg in range(r + 1):
        for mono in combinations(range(m), deg):
            row = []
            for p in range(1 << m):
                val = 1
                for j in mono:
                    val &= (p >> (m - 1 - j)) & 1
                row.append(val)
            rows.append(row)
    return np.array(rows, dtype=np.uint8).reshape(-1, 1 << m)


def generator_of(code: CodeLike) -> np.ndarray:
    """Explicit generator matrix of an RM code, a TRM code, a matrix, or a list of matrices.

    Tensor generators are Kronecker products, so codeword bits come out in
    C order of the tensor shape.
    """
    if isinstance(code, RmCode):
        return rm_generator(code.r, code.m)
    if isinstance(code, TrmCode):
        gens = [rm_generator(l.r, l.m) for l in code.layers]
    elif isinstance(code, np.ndarray):
        if code.ndim != 2:
            raise ValueError("generator must be 2-D")
        return code.astype(np.uint8)
    else:
        gens = [generator_of(c) for c in code]
    out = np.ones((1, 1), dtype=np.uint8)
    for g in gens:
        out = np.kron(out, g).astype(np.uint8)
    return out


def enumerate_codewords(code: CodeLike) -> np.ndarray:
    """All ``2^k`` codewords as rows, in increasing message order.

    Message ``i`` has coefficient vector equal to the k-bit big-endian
    expansion of ``i``, so the first row attaining any minimum carries the
    smallest coefficient integer.
    """
    if isinstance(code, (RmCode, TrmCode)):
        return _enumerate_named(code)
    return _enumerate(generator_of(code))


@lru_cache(maxsize=64)
def _enumerate_named(code) -> np.ndarray:
    out = _enumerate(generator_of(code))
    out.flags.writeable = False
    return out


def _enumerate(gen: np.ndarray) -> np.ndarray:
    k = gen.shape[0]
    if k > DIMENSION_CAP:
        raise OracleCapExceeded(f"dimension {k} exceeds the oracle cap {DIMENSION_CAP}")
    msgs = (np.arange(1 << k)[:, None] >> np.arange(k - 1, -1, -1)) & 1
    return ((msgs.astype(np.int64) @ gen.astype(np.int64)) & 1).astype(np.uint8)


def _flat_bits(w) -> np.ndarray:
    if isinstance(w, BitWord):
        return w.bits
    return np.asarray(w, dtype=np.uint8).ravel()


def nearest_codeword(code: CodeLike, w) -> np.ndarray:
    """Closest codeword, ties broken toward the smaller coefficient integer."""
    cws = enumerate_codewords(code)
    bits = _flat_bits(w)
    if bits.size != cws.shape[1]:
        raise ValueError(f"word length {bits.size} != code length {cws.shape[1]}")
    dist = (cws != bits).sum(axis=1)
    return cws[int(np.argmin(dist))]


def min_distance_bruteforce(code: CodeLike) -> int:
    cws = enumerate_codewords(code)
    weights = cws.sum(axis=1)
    nonzero = weights[weights > 0]
    if nonzero.size == 0:
        raise ValueError("zero code has no minimum distance")
    return int(nonzero.min())


def consistent_codewords(code: CodeLike, y: Union[TriWord, TriTensor]) -> np.ndarray:
    """Codewords agreeing with ``y`` on every non-erased position."""
    cws = enumerate_codewords(code)
    values = np.asarray(y.values, dtype=np.uint8).ravel()
    known = ~np.asarray(y.erased, dtype=bool).ravel()
    if values.size != cws.shape[1]:
        raise ValueError(f"word length {values.size} != code length {cws.shape[1]}")
    agree = (cws[:, known] == values[known]).all(axis=1)
    return cws[agree]


def coefficient_recovery(code: CodeLike, w) -> np.ndarray:
    """Coefficient vector of a codeword, found by scanning the enumeration."""
    cws = enumerate_codewords(code)
    bits = _flat_bits(w)
    hits = np.flatnonzero((cws == bits).all(axis=1))
    if hits.size == 0:
        raise ValueError("word is not a codeword")
    k = int(np.log2(cws.shape[0]))
    i = int(hits[0])
    return np.array([(i >> (k - 1 - b)) & 1 for b in range(k)], dtype=np.uint8)


def ssv_condition_holds(m: int, t: int, z) -> bool:
    """No nonzero codeword of RM(m-t, m) is supported inside supp(z)."""
    if not 0 <= t <= m:
        raise ValueError("need 0 <= t <= m")
    cws = enumerate_codewords(RmCode(m - t, m))
    bits = _flat_bits(z).astype(bool)
    if bits.size != 1 << m:
        raise ValueError(f"z must have length {1 << m}")
    covered = ~(cws.astype(bool) & ~bits).any(axis=1)
    nonzero = cws.any(axis=1)
    return not bool((covered & nonzero).any())


SPLIT_DIMENSION_CAP = 30


def min_weight_split(gen: np.ndarray, low_bits: int = 16) -> int:
    """Exhaustive minimum nonzero weight of the span of ``gen`` for dimensions up to 30.

    Every message is visited: the low ``low_bits`` rows are spanned once into
    a packed table, and each combination of the remaining rows is XORed
    against the whole table.
    """
    gen = np.asarray(gen, dtype=np.uint8)
    k, n = gen.shape
    if k > SPLIT_DIMENSION_CAP:
        raise OracleCapExceeded(f"dimension {k} exceeds the split cap {SPLIT_DIMENSION_CAP}")
    low = min(k, low_bits)
    packed = np.packbits(gen, axis=1)
    width = -(-packed.shape[1] // 8) * 8
    rows = np.zeros((k, width), dtype=np.uint8)
    rows[:, : packed.shape[1]] = packed
    rows = rows.view(np.uint64)
    table = np.zeros((1 << low, rows.shape[1]), dtype=np.uint64)
    for i in range(low):
        size = 1 << i
        table[size : 2 * size] = table[:size] ^ rows[k - low + i]
    best = n + 1
    high = k - low
    for combo in range(1 << high):
        offset = np.zeros(rows.shape[1], dtype=np.uint64)
        for i in range(high):
            if (combo >> i) & 1:
                offset ^= rows[i]
        weights = np.bitwise_count(table ^ offset).sum(axis=1, dtype=np.int64)
        if combo == 0:
            weights = weights[1:]
        if weights.size:
            best = min(best, int(weights.min()))
    if best > n:
        raise ValueError("zero code has no minimum distance")
    return best
