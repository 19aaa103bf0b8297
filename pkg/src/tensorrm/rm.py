"""Reed-Muller code descriptors, ordering conventions, encoding and membership.

Points of F_2^m are indexed lexicographically with the first coordinate as
the most significant bit, so index ``i < 2**(m-1)`` exactly when ``v_1 = 0``.
A monomial ``x_S`` is identified with the point whose coordinates are 1 on
``S``; with that identification the evaluation map is the subset-sum (zeta)
transform over GF(2), which is its own inverse.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Sequence, Tuple

import numpy as np

from .bits import BitWord


def binom_sum(m: int, r: int) -> int:
    """Number of subsets of an m-set of size at most r."""
    if m < 0 or r < 0:
        raise ValueError("m and r must be non-negative")
    return sum(math.comb(m, i) for i in range(min(r, m) + 1))


def entropy(x: float) -> float:
    """Binary entropy in bits, with h(0) = h(1) = 0."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"entropy argument must lie in [0, 1], got {x}")
    if x in (0.0, 1.0):
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


@dataclass(frozen=True)
class RmCode:
    """The Reed-Muller code RM(r, m)."""

    r: int
    m: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if not 0 <= self.r <= self.m:
            raise ValueError(f"need 0 <= r <= m, got r={self.r}, m={self.m}")

    @property
    def length(self) -> int:
        return 1 << self.m

    @property
    def dimension(self) -> int:
        return binom_sum(self.m, self.r)

    @property
    def d_min(self) -> int:
        return 1 << (self.m - self.r)

    @property
    def rate(self) -> float:
        return self.dimension / self.length

    def monomials(self) -> Tuple[Tuple[int, ...], ...]:
        return monomial_set(self.r, self.m)

    def __str__(self) -> str:
        return f"RM({self.r},{self.m})"


@lru_cache(maxsize=None)
def monomial_set(r: int, m: int) -> Tuple[Tuple[int, ...], ...]:
    """Monomials of degree <= r as sorted 0-based variable tuples.

    Ordered by degree, then lexicographically: for m=3, r=1 this is
    ``((), (0,), (1,), (2,))``.
    """
    return tuple(s for d in range(r + 1) for s in combinations(range(m), d))


@lru_cache(maxsize=None)
def monomial_indices(r: int, m: int) -> np.ndarray:
    """Position of each monomial (in canonical order) inside a length-2^m coefficient array."""
    idx = np.array([sum(1 << (m - 1 - j) for j in s) for s in monomial_set(r, m)], dtype=np.int64)
    idx.setflags(write=False)
    return idx


@lru_cache(maxsize=None)
def degree_table(m: int) -> np.ndarray:
    """Hamming weight of each index in [0, 2^m), i.e. the degree of that monomial."""
    idx = np.arange(1 << m, dtype=np.int64)
    deg = np.zeros(1 << m, dtype=np.int64)
    for b in range(m):
        deg += (idx >> b) & 1
    deg.setflags(write=False)
    return deg


def point_index(v: Sequence[int]) -> int:
    """Lexicographic rank of a point, first coordinate most significant."""
    idx = 0
    for bit in v:
        if bit not in (0, 1):
            raise ValueError("point coordinates must be 0/1")
        idx = (idx << 1) | int(bit)
    return idx


def zeta_transform(arr: np.ndarray, axis: int = -1) -> np.ndarray:
    """In-place subset-sum transform over GF(2) along ``axis`` (length 2^m).

    Maps monomial coefficients to evaluations and back again.
    """
    n = arr.shape[axis]
    if n & (n - 1):
        raise ValueError("transform length must be a power of two")
    if not arr.flags.c_contiguous:
        raise ValueError("zeta_transform works in place and needs a C-contiguous array")
    axis = axis % arr.ndim
    lead = int(np.prod(arr.shape[:axis], dtype=np.int64))
    trail = int(np.prod(arr.shape[axis + 1:], dtype=np.int64))
    view = arr.reshape(lead, n, trail)
    half = 1
    while half < n:
        blocks = view.reshape(lead, n // (2 * half), 2, half, trail)
        blocks[:, :, 1] ^= blocks[:, :, 0]
        half *= 2
    return arr


def encode_batch(code: RmCode, coeffs: np.ndarray) -> np.ndarray:
    """Encode rows of ``coeffs`` (shape ``(..., dimension)``) to codewords."""
    coeffs = np.asarray(coeffs, dtype=np.uint8)
    if coeffs.shape[-1] != code.dimension:
        raise ValueError(f"{code} expects {code.dimension} coefficients, got {coeffs.shape[-1]}")
    out = np.zeros(coeffs.shape[:-1] + (code.length,), dtype=np.uint8)
    out[..., monomial_indices(code.r, code.m)] = coeffs
    return zeta_transform(out)


def rm_encode(code: RmCode, coeffs: Sequence[int]) -> BitWord:
    """Evaluation vector of the polynomial with the given coefficients."""
    coeffs = np.asarray(coeffs, dtype=np.uint8).ravel()
    if coeffs.size != code.dimension:
        raise ValueError(f"{code} expects {code.dimension} coefficients, got {coeffs.size}")
    return BitWord(encode_batch(code, coeffs))


def coefficients_batch(code: RmCode, words: np.ndarray) -> np.ndarray:
    """Full length-2^m coefficient arrays of arbitrary words (no degree check)."""
    words = np.array(words, dtype=np.uint8, copy=True, order="C")
    if words.shape[-1] != code.length:
        raise ValueError(f"{code} expects words of length {code.length}")
    return zeta_transform(words)


def is_codeword_batch(code: RmCode, words: np.ndarray) -> np.ndarray:
    """Membership of each row of ``words``; degree test on the transformed word."""
    if code.r == code.m:
        return np.ones(np.shape(words)[:-1], dtype=bool)
    coeffs = coefficients_batch(code, words)
    high = degree_table(code.m) > code.r
    return ~coeffs[..., high].any(axis=-1)


def rm_is_codeword(code: RmCode, w: BitWord) -> bool:
    if w.length != code.length:
        raise ValueError(f"{code} has length {code.length}, word has {w.length}")
    return bool(is_codeword_batch(code, w.bits))


def rm_coefficients(code: RmCode, w: BitWord) -> np.ndarray:
    """Coefficient vector (canonical monomial order) of a codeword."""
    if not rm_is_codeword(code, w):
        raise ValueError(f"word is not a codeword of {code}")
    return coefficients_batch(code, w.bits)[monomial_indices(code.r, code.m)]


def is_codeword_along(code: RmCode, arr: np.ndarray, axis: int) -> np.ndarray:
    """Membership of every vector of ``arr`` running along ``axis``.

    The result has ``arr``'s shape with ``axis`` removed.
    """
    moved = np.moveaxis(np.asarray(arr), axis, 0)
    if moved.shape[0] != code.length:
        raise ValueError(f"{code} expects length {code.length} along axis {axis}")
    if code.r == code.m:
        return np.ones(moved.shape[1:], dtype=bool)
    work = np.array(moved, dtype=np.uint8, order="C")
    zeta_transform(work, axis=0)
    high = np.flatnonzero(degree_table(code.m) > code.r)
    return ~work[high].any(axis=0)
