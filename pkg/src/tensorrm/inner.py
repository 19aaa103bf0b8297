"""Error decoders for single Reed-Muller layers.

Two decoders feed the staged tensor decoder:

* maximum-likelihood decoding, through a full lookup table for codes of
  length at most 16 and through direct nearest-codeword search otherwise;
* a high-rate decoder: a membership test followed, on failure, by classical
  majority-logic (Reed) decoding, which corrects every pattern of weight
  below half the minimum distance.

Among equidistant codewords the ML decoders return the one whose coefficient
vector, read as a big-endian integer in canonical monomial order, is
smallest.
"""

from __future__ import annotations

import os
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Tuple, Union

import numpy as np

from .bits import BitWord
from .rm import RmCode, degree_table, encode_batch, is_codeword_batch, monomial_set, zeta_transform

DEFAULT_TABLE_CAP_BITS = 16
SEARCH_DIMENSION_CAP = 20

_TABLE_MAGIC = b"TRMMLTB\x00"
_TABLE_VERSION = 1

class TableTooLarge(ValueError):
    pass


def codeword_list(code: RmCode) -> np.ndarray:
    """All codewords as a (2^k, n) bit array, sorted by coefficient integer."""
    k = code.dimension
    if k > SEARCH_DIMENSION_CAP:
        raise TableTooLarge(f"{code} has dimension {k} > {SEARCH_DIMENSION_CAP}; cannot enumerate")
    msgs = np.arange(1 << k, dtype=np.int64)
    shifts = np.arange(k - 1, -1, -1, dtype=np.int64)
    coeffs = ((msgs[:, None] >> shifts) & 1).astype(np.uint8)
    return encode_batch(code, coeffs)


def _words_to_ints(words: np.ndarray) -> np.ndarray:
    n = words.shape[-1]
    weights = (np.uint64(1) << np.arange(n, dtype=np.uint64))
    return (words.astype(np.uint64) * weights).sum(axis=-1, dtype=np.uint64)


def _ints_to_words(ints: np.ndarray, n: int) -> np.ndarray:
    ints = np.asarray(ints, dtype=np.uint64)
    return ((ints[..., None] >> np.arange(n, dtype=np.uint64)) & np.uint64(1)).astype(np.uint8)


@dataclass(frozen=True, eq=False)
class MlTable:
    """ML decisions for every received word, indexed by the word as an integer."""

    code: RmCode
    entries: np.ndarray

    def __post_init__(self):
        if self.entries.shape != (1 << self.code.length,):
            raise ValueError("table must hold one entry per received word")

    def lookup(self, words: np.ndarray) -> np.ndarray:
        """Decode rows of ``words`` (shape ``(..., n)``)."""
        words = np.asarray(words, dtype=np.uint8)
        if words.shape[-1] != self.code.length:
            raise ValueError(f"{self.code} table expects length {self.code.length}")
        idx = _words_to_ints(words).astype(np.int64)
        return _ints_to_words(self.entries[idx], self.code.length)

    def __getitem__(self, word: BitWord) -> BitWord:
        return BitWord(self.lookup(word.bits))

    def save(self, path: Union[str, Path]) -> None:
        n = self.code.length
        nbytes = (n + 7) // 8
        header = _TABLE_MAGIC + struct.pack("<III", _TABLE_VERSION, self.code.r, self.code.m)
        body = self.entries.astype("<u8").view(np.uint8).reshape(-1, 8)[:, :nbytes]
        Path(path).write_bytes(header + body.tobytes())

    @classmethod
    def load(cls, path: Union[str, Path]) -> "MlTable":
        data = Path(path).read_bytes()
        if not data.startswith(_TABLE_MAGIC):
            raise ValueError(f"{path}: not an ML table file")
        version, r, m = struct.unpack_from("<III", data, len(_TABLE_MAGIC))
        if version != _TABLE_VERSION:
            raise ValueError(f"{path}: unsupported table version {version}")
        code = RmCode(r, m)
        nbytes = (code.length + 7) // 8
        body = np.frombuffer(data, dtype=np.uint8, offset=len(_TABLE_MAGIC) + 12)
        if body.size != nbytes << code.length:
            raise ValueError(f"{path}: truncated table body")
        padded = np.zeros((1 << code.length, 8), dtype=np.uint8)
        padded[:, :nbytes] = body.reshape(-1, nbytes)
        return cls(code, padded.view("<u8").ravel().astype(np.uint64))


def build_ml_table(code: RmCode, cap_bits: int = DEFAULT_TABLE_CAP_BITS) -> MlTable:
    """Nearest codeword for each of the 2^(2^m) received words.

    Words are grouped by syndrome (their coefficients of degree above r).
    Within a coset the candidates are ``w ^ e`` for the coset's
    minimum-weight patterns ``e``; the winner is the candidate with the
    smallest coefficient integer. This touches ``2^k`` times the number of
    coset leaders instead of ``2^k`` times ``2^n``.
    """
    n = code.length
    if n > cap_bits:
        raise TableTooLarge(f"{code} needs a 2^{n}-entry table; cap is 2^{cap_bits}")
    total = 1 << n
    words = np.arange(total, dtype=np.int64)
    bits = _ints_to_words(words, n)
    high = np.flatnonzero(degree_table(code.m) > code.r)
    syn_bits = zeta_transform(bits.copy())[:, high]
    syndrome = (syn_bits.astype(np.int64) << np.arange(high.size, dtype=np.int64)).sum(axis=1)
    weight = bits.sum(axis=1)

    # rank of each codeword in coefficient order
    cws = _words_to_ints(codeword_list(code)).astype(np.int64)
    rank = np.full(total, -1, dtype=np.int64)
    rank[cws] = np.arange(cws.size)

    order = np.lexsort((words, syndrome))
    bounds = np.flatnonzero(np.diff(syndrome[order])) + 1
    entries = np.empty(total, dtype=np.uint64)
    for group in np.split(order, bounds):
        w = weight[group]
        leaders = group[w == w.min()]
        cand = group[:, None] ^ leaders[None, :]
        best = np.argmin(rank[cand], axis=1)
        entries[group] = cand[np.arange(group.size), best].astype(np.uint64)
    return MlTable(code, entries)


def cached_ml_table(code: RmCode, cache_dir: Optional[Union[str, Path]] = None) -> MlTable:
    """Load the table from ``cache_dir`` (default ``$TRM_CACHE_DIR``), building it on a miss."""
    cache_dir = cache_dir or os.environ.get("TRM_CACHE_DIR")
    if not cache_dir:
        return build_ml_table(code)
    path = Path(cache_dir) / f"ml_r{code.r}_m{code.m}.tbl"
    if path.exists():
        table = MlTable.load(path)
        if table.code == code:
            return table
    table = build_ml_table(code)
    path.parent.mkdir(parents=True, exist_ok=True)
    table.save(path)
    return table


def nearest_search_batch(code: RmCode, words: np.ndarray) -> np.ndarray:
    """Nearest codeword by direct search over the enumerated code."""
    words = np.asarray(words, dtype=np.uint8)
    flat = words.reshape(-1, code.length)
    cws = codeword_list(code)
    out = np.empty_like(flat)
    chunk = max(1, (1 << 24) // (cws.shape[0] * code.length))
    for start in range(0, flat.shape[0], chunk):
        block = flat[start:start + chunk]
        dist = (block[:, None, :] != cws[None, :, :]).sum(axis=2)
        out[start:start + block.shape[0]] = cws[np.argmin(dist, axis=1)]
    return out.reshape(words.shape)


def ml_decode_batch(code: RmCode, words: np.ndarray, table: Optional[MlTable] = None) -> np.ndarray:
    if table is not None and table.code == code:
        return table.lookup(words)
    return nearest_search_batch(code, words)


def ml_decode(code: RmCode, w: BitWord, table: Optional[MlTable] = None) -> BitWord:
    """Maximum-likelihood decoding with the canonical tie-break."""
    if w.length != code.length:
        raise ValueError(f"{code} has length {code.length}, word has {w.length}")
    return BitWord(ml_decode_batch(code, w.bits, table))


def _pack_limbs(words: np.ndarray) -> np.ndarray:
    """(B, n) bits -> (B, L) little-endian uint64 limbs."""
    packed = np.packbits(words, axis=1, bitorder="little")
    pad = (-packed.shape[1]) % 8
    if pad:
        packed = np.concatenate([packed, np.zeros((packed.shape[0], pad), dtype=np.uint8)], axis=1)
    return np.ascontiguousarray(packed).view("<u8")


def _unpack_limbs(limbs: np.ndarray, n: int) -> np.ndarray:
    raw = np.ascontiguousarray(limbs).view(np.uint8)
    return np.unpackbits(raw, axis=1, bitorder="little")[:, :n]


def _fold(x: np.ndarray, h: int) -> np.ndarray:
    """Positions p with bit h clear receive x[p] ^ x[p + h]; the rest is scratch."""
    if h < 64:
        return x ^ (x >> np.uint64(h))
    s = h // 64
    y = x.copy()
    y[:, :-s] ^= x[:, s:]
    return y


def _position_masks(m: int, monomial: Tuple[int, ...]) -> Tuple[np.ndarray, np.ndarray]:
    """Packed masks of positions with all monomial bits clear / all set."""
    idx = np.arange(1 << m)
    bits = sum(1 << (m - 1 - j) for j in monomial)
    clear = ((idx & bits) == 0).astype(np.uint8)[None]
    full = ((idx & bits) == bits).astype(np.uint8)[None]
    return _pack_limbs(clear)[0], _pack_limbs(full)[0]


def majority_decode_batch(code: RmCode, words: np.ndarray) -> np.ndarray:
    """Reed majority-logic decoding of each row of ``words``.

    Words are packed into 64-bit limbs; the coset sums for monomial x_S are
    obtained by folding the word along each axis in S, which leaves the sum
    over every coset at the coset's point with the S coordinates zero.
    """
    words = np.asarray(words, dtype=np.uint8)
    n, m = code.length, code.m
    flat = words.reshape(-1, n)
    residual = _pack_limbs(flat)
    monos = monomial_set(code.r, m)
    for degree in range(code.r, -1, -1):
        votes = 1 << (m - degree)
        layer = []
        for mono in monos:
            if len(mono) != degree:
                continue
            clear, full = _position_masks(m, mono)
            folded = residual
            for j in mono:
                folded = _fold(folded, 1 << (m - 1 - j))
            ones = np.bitwise_count(folded & clear).sum(axis=1, dtype=np.int64)
            layer.append((2 * ones > votes, full))
        for bit, full in layer:
            residual ^= np.where(bit[:, None], full[None, :], np.uint64(0))
    decoded = flat ^ _unpack_limbs(residual, n)
    return decoded.reshape(words.shape)


def majority_decode(code: RmCode, w: BitWord) -> BitWord:
    if w.length != code.length:
        raise ValueError(f"{code} has length {code.length}, word has {w.length}")
    return BitWord(majority_decode_batch(code, w.bits))


def majority_radius(code: RmCode) -> int:
    """Largest error weight majority-logic decoding always corrects."""
    return max(0, code.d_min // 2 - 1)


def highrate_decode_batch(code: RmCode, words: np.ndarray) -> np.ndarray:
    words = np.asarray(words, dtype=np.uint8)
    flat = words.reshape(-1, code.length)
    out = flat.copy()
    bad = ~is_codeword_batch(code, flat)
    if bad.any():
        out[bad] = majority_decode_batch(code, flat[bad])
    return out.reshape(words.shape)


def highrate_decode(code: RmCode, w: BitWord) -> BitWord:
    """Members pass through; anything else goes to majority-logic decoding."""
    if w.length != code.length:
        raise ValueError(f"{code} has length {code.length}, word has {w.length}")
    return BitWord(highrate_decode_batch(code, w.bits))


BatchDecoder = Callable[[RmCode, np.ndarray], np.ndarray]
