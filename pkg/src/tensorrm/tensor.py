"""Adversarial-error decoding of arbitrary tensor codes C_1 x ... x C_t.

The decoder recurses on the slices obtained by fixing the last coordinate,
then completes every last-axis vector from the slices that survived, and
finally refuses (returns all erasures) if anything is still erased or the
result moved too far from the input. It needs only an erasure-completion
routine per component code, never an error decoder.

Internally a batch of tensors is stored as one C-ordered array of shape
``(n_1, ..., n_t, batch)``. Fixing the last code coordinate then merges it
into the batch axis with a plain reshape, so the recursion works in place.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from math import prod
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from . import erasure
from .gf2 import matrix_from_rows
from .bits import BitWord, TriTensor, TriWord
from .rm import RmCode, is_codeword_batch


class ComponentCode(ABC):
    """What the tensor decoder needs from each component code.

    ``complete`` is the completion map: the unique codeword agreeing with the
    non-erased input when there are fewer than ``d_min`` erasures, otherwise
    the all-erased word. ``complete_many`` applies it to many words sharing
    one erasure mask, with positions on axis 0 of ``values``.
    """

    length: int
    d_min: int
    cost_note: str = ""

    @abstractmethod
    def complete(self, x: TriWord) -> TriWord:
        ...

    @abstractmethod
    def complete_many(self, values: np.ndarray, erased: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Return ``(completed, ok)``; ``ok`` has shape ``values.shape[1:]``."""

    @abstractmethod
    def is_member_many(self, values: np.ndarray) -> np.ndarray:
        """Membership with positions on axis 0."""

    def is_member(self, w: BitWord) -> bool:
        return bool(self.is_member_many(w.bits[:, None])[0])


class RmComponent(ComponentCode):
    cost_note = "O(n log n) recursive tester"

    def __init__(self, code: RmCode):
        self.code = code
        self.length = code.length
        self.d_min = code.d_min

    def __repr__(self) -> str:
        return f"RmComponent({self.code})"

    def complete(self, x: TriWord) -> TriWord:
        return erasure.f_rm(self.code, x)

    def complete_many(self, values, erased):
        erased = np.asarray(erased, dtype=bool)
        if erased.sum() >= self.d_min:
            return values, np.zeros(values.shape[1:], dtype=bool)
        return erasure.complete_positions_first(self.code, values, erased)

    def is_member_many(self, values):
        flat = np.asarray(values).reshape(self.length, -1)
        return is_codeword_batch(self.code, flat.T).reshape(np.shape(values)[1:])


class LinearComponent(ComponentCode):
    """Any binary linear code given by a generator matrix."""

    cost_note = "O(n^3) Gaussian elimination per erasure pattern"

    def __init__(self, generator, d_min: Optional[int] = None):
        gen = np.array(generator, dtype=np.uint8)
        if gen.ndim != 2:
            raise ValueError("generator must be a 2-D 0/1 matrix")
        self.generator = gen
        self.length = gen.shape[1]
        self.d_min = _min_distance(gen) if d_min is None else int(d_min)
        self._templates: Dict[bytes, erasure.SolveTemplate] = {}

    def __repr__(self) -> str:
        return f"LinearComponent(n={self.length}, d_min={self.d_min})"

    def template(self, erased: np.ndarray) -> erasure.SolveTemplate:
        key = np.packbits(erased).tobytes()
        tpl = self._templates.get(key)
        if tpl is None:
            tpl = erasure.solve_template(self.generator, erased)
            self._templates[key] = tpl
        return tpl

    def complete(self, x: TriWord) -> TriWord:
        if x.erasure_count >= self.d_min:
            return TriWord.all_erased(x.length)
        c = erasure.linear_complete(self.generator, x)
        return TriWord.all_erased(x.length) if c is None else TriWord.from_bits(c)

    def complete_many(self, values, erased):
        erased = np.asarray(erased, dtype=bool)
        batch_shape = values.shape[1:]
        if erased.sum() >= self.d_min:
            return values, np.zeros(batch_shape, dtype=bool)
        rows = np.asarray(values).reshape(self.length, -1).T
        out, ok = self.template(erased).apply(rows)
        return out.T.reshape(values.shape), ok.reshape(batch_shape)

    def is_member_many(self, values):
        checks = erasure.parity_checks(self.generator)
        flat = np.asarray(values).reshape(self.length, -1)
        if not checks:
            return np.ones(np.shape(values)[1:], dtype=bool)
        hmat = matrix_from_rows(checks, self.length).astype(np.int32)
        ok = ~((hmat @ flat.astype(np.int32)) & 1).any(axis=0)
        return ok.reshape(np.shape(values)[1:])


def _min_distance(gen: np.ndarray) -> int:
    k = gen.shape[0]
    if k > 20:
        raise ValueError("pass d_min explicitly for generators with more than 20 rows")
    msgs = ((np.arange(1, 1 << k)[:, None] >> np.arange(k)) & 1).astype(np.int32)
    weights = ((msgs @ gen.astype(np.int32)) & 1).sum(axis=1)
    weights = weights[weights > 0]
    if weights.size == 0:
        raise ValueError("generator spans only the zero code")
    return int(weights.min())


def rm_component(code: RmCode) -> RmComponent:
    return RmComponent(code)


def linear_component(generator, d_min: Optional[int] = None) -> LinearComponent:
    return LinearComponent(generator, d_min)


def adversarial_radius(codes: Sequence[ComponentCode]) -> int:
    """Number of worst-case errors the tensor decoder is guaranteed to correct."""
    if not codes:
        raise ValueError("need at least one component code")
    dists = [c.d_min for c in codes]
    total = prod(dists)
    return -(-total // (2 * max(dists))) - 1


# ------------------------------------------------------------------- decoder

@dataclass
class _Run:
    codes: Sequence[ComponentCode]
    use_pattern_cache: bool = True


def _complete_vectors(code: ComponentCode, values, mask, use_cache):
    """Completion of the words ``values[:, ...]`` (positions first) under one mask."""
    if use_cache:
        return code.complete_many(values, mask)
    flat = np.asarray(values).reshape(code.length, -1)
    out = np.array(flat)
    ok = np.zeros(flat.shape[1], dtype=bool)
    for j in range(flat.shape[1]):
        res = code.complete(TriWord(flat[:, j], mask))
        if not res.is_all_erased():
            out[:, j] = res.values
            ok[j] = True
    return out.reshape(values.shape), ok.reshape(values.shape[1:])


def _group_columns(masks: np.ndarray):
    """Group the columns of a (n, batch) boolean array by equal content."""
    uniq, inverse = np.unique(masks.T, axis=0, return_inverse=True)
    inverse = np.asarray(inverse).ravel()
    for g in range(uniq.shape[0]):
        yield uniq[g], np.flatnonzero(inverse == g)


def _decode_base(run: _Run, code: ComponentCode, data, erased) -> np.ndarray:
    batch = data.shape[1]
    if erased is None or not erased.any():
        c, ok = _complete_vectors(code, data, np.zeros(code.length, dtype=bool), run.use_pattern_cache)
        data[...] = c
        return ~ok
    failed = np.ones(batch, dtype=bool)
    for mask, idx in _group_columns(erased):
        if mask.sum() >= code.d_min:
            continue
        c, ok = _complete_vectors(code, data[:, idx], mask, run.use_pattern_cache)
        data[:, idx] = c
        failed[idx] = ~ok
    return failed


def _decode(run: _Run, depth: int, data: np.ndarray, orig: np.ndarray, erased: Optional[np.ndarray]) -> np.ndarray:
    """Decode the batch ``data`` of shape (n_1..n_depth, B) in place; return failed flags (B,)."""
    codes = run.codes[:depth]
    if depth == 1:
        return _decode_base(run, codes[0], data, erased)
    shape = data.shape[:-1]
    batch = data.shape[-1]
    nt = shape[-1]
    inner = shape[:-1] + (nt * batch,)
    sub_failed = _decode(
        run,
        depth - 1,
        data.reshape(inner),
        orig.reshape(inner),
        None if erased is None else erased.reshape(inner),
    ).reshape(nt, batch)

    code = codes[-1]
    plane = int(prod(shape[:-1]))
    data3 = data.reshape(plane, nt, batch)
    failed = np.zeros(batch, dtype=bool)
    dirty = np.flatnonzero(sub_failed.any(axis=0))
    clean = batch - dirty.size

    saved = data3[:, :, dirty].copy() if dirty.size else None
    if clean:
        if dirty.size * 2 <= batch:
            vecs = np.moveaxis(data3, 1, 0)
            c, ok = _complete_vectors(code, vecs, np.zeros(nt, dtype=bool), run.use_pattern_cache)
            data3[...] = np.moveaxis(c, 0, 1)
            failed = ~ok.all(axis=0)
        else:
            idx = np.flatnonzero(~sub_failed.any(axis=0))
            vecs = np.moveaxis(data3[:, :, idx], 1, 0)
            c, ok = _complete_vectors(code, vecs, np.zeros(nt, dtype=bool), run.use_pattern_cache)
            data3[:, :, idx] = np.moveaxis(c, 0, 1)
            failed[idx] = ~ok.all(axis=0)
    if dirty.size:
        for mask, sel in _group_columns(sub_failed[:, dirty]):
            targets = dirty[sel]
            if mask.sum() >= code.d_min:
                failed[targets] = True
                continue
            vecs = np.moveaxis(saved[:, :, sel], 1, 0)
            c, ok = _complete_vectors(code, vecs, mask, run.use_pattern_cache)
            data3[:, :, targets] = np.moveaxis(c, 0, 1)
            failed[targets] = ~ok.all(axis=0)

    live = np.flatnonzero(~failed)
    if live.size:
        orig3 = orig.reshape(plane, nt, batch)
        if live.size == batch:
            diff = data3 != orig3
            if erased is not None:
                diff &= ~erased.reshape(plane, nt, batch)
        else:
            diff = data3[:, :, live] != orig3[:, :, live]
            if erased is not None:
                diff &= ~erased.reshape(plane, nt, batch)[:, :, live]
        dist = np.count_nonzero(diff.reshape(-1, diff.shape[-1]), axis=0)
        threshold = prod(c.d_min for c in codes)
        far = 2 * dist >= threshold
        failed[live[far]] = True
    return failed


def decode_array(
    codes: Sequence[ComponentCode],
    values: np.ndarray,
    erased: Optional[np.ndarray] = None,
    use_pattern_cache: bool = True,
) -> Tuple[np.ndarray, np.ndarray]:
    """Decode a batch of tensors with trailing batch axis.

    ``values`` has shape ``(n_1, ..., n_t, B)``. Returns ``(decoded, failed)``
    where ``failed[b]`` means tensor ``b`` decodes to all erasures (its slice
    of ``decoded`` is then meaningless).
    """
    codes = list(codes)
    values = np.asarray(values, dtype=np.uint8)
    if values.ndim != len(codes) + 1:
        raise ValueError("values must carry one axis per code plus a batch axis")
    if tuple(values.shape[:-1]) != tuple(c.length for c in codes):
        raise ValueError(f"shape {values.shape[:-1]} does not match code lengths {[c.length for c in codes]}")
    if erased is not None:
        erased = np.ascontiguousarray(erased, dtype=bool)
        if not erased.any():
            erased = None
    data = np.array(values, order="C", copy=True)
    orig = np.ascontiguousarray(values)
    run = _Run(codes, use_pattern_cache)
    failed = _decode(run, len(codes), data, orig, erased)
    return data, failed


def tensor_decode(codes: Sequence[ComponentCode], tensor, use_pattern_cache: bool = True) -> TriTensor:
    """Decode one tensor; the result is a tensor codeword or all erasures."""
    if not isinstance(tensor, TriTensor):
        tensor = TriTensor.from_bits(tensor)
    data, failed = decode_array(
        codes, tensor.values[..., None], tensor.erased[..., None], use_pattern_cache
    )
    if failed[0]:
        return TriTensor.all_erased(tensor.shape)
    return TriTensor.from_bits(data[..., 0])


def is_tensor_codeword(codes: Sequence[ComponentCode], values: np.ndarray) -> bool:
    """Every axis vector along every axis is a member of its component code."""
    values = np.asarray(values, dtype=np.uint8)
    if values.shape != tuple(c.length for c in codes):
        raise ValueError("shape does not match code lengths")
    for axis, code in enumerate(codes):
        if not code.is_member_many(np.moveaxis(values, axis, 0)).all():
            return False
    return True
