"""GF(2) linear algebra on bit-packed rows.

A row is a Python ``int`` whose bit ``j`` is column ``j``. Python integers
are arbitrary precision, so rows of any width pack into machine words
without extra bookkeeping.
"""

from __future__ import annotations

from typing import List, Sequence, Tuple

import numpy as np


def rows_from_matrix(mat) -> List[int]:
    mat = np.asarray(mat, dtype=np.uint8)
    if mat.ndim != 2:
        raise ValueError("expected a 2-D 0/1 matrix")
    packed = np.packbits(mat, axis=1, bitorder="little")
    return [int.from_bytes(row.tobytes(), "little") for row in packed]


def matrix_from_rows(rows: Sequence[int], ncols: int) -> np.ndarray:
    nbytes = max(1, (ncols + 7) // 8)
    out = np.zeros((len(rows), nbytes), dtype=np.uint8)
    for i, row in enumerate(rows):
        out[i] = np.frombuffer(row.to_bytes(nbytes, "little"), dtype=np.uint8)
    return np.unpackbits(out, axis=1, bitorder="little")[:, :ncols]


def eliminate(rows: Sequence[int], ncols: int) -> Tuple[List[int], List[int]]:
    """Gauss-Jordan elimination on the low ``ncols`` columns.

    Bits above ``ncols`` ride along (augmented columns). Returns every row,
    reordered so the first ``len(pivots)`` are pivot rows; the remaining rows
    are zero on the low ``ncols`` columns.
    """
    work = list(rows)
    pivots: List[int] = []
    rank = 0
    for col in range(ncols):
        if rank == len(work):
            break
        bit = 1 << col
        pivot = next((i for i in range(rank, len(work)) if work[i] & bit), None)
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        prow = work[rank]
        for i in range(len(work)):
            if i != rank and work[i] & bit:
                work[i] ^= prow
        pivots.append(col)
        rank += 1
    return work, pivots


def rref(rows: Sequence[int], ncols: int) -> Tuple[List[int], List[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    work, pivots = eliminate([r for r in rows if r], ncols)
    return work[: len(pivots)], pivots


def rank(rows: Sequence[int], ncols: int) -> int:
    return len(rref(rows, ncols)[1])


def nullspace(rows: Sequence[int], ncols: int) -> List[int]:
    """Basis of {x : row . x = 0 for every row}, as packed rows."""
    reduced, pivots = rref(rows, ncols)
    pivot_set = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        vec = 1 << free
        for row, pc in zip(reduced, pivots):
            if (row >> free) & 1:
                vec |= 1 << pc
        basis.append(vec)
    return basis


def parity(x: int) -> int:
    return x.bit_count() & 1
