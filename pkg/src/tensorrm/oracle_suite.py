"""Oracle-equivalence checks run by ``trm oracle-check``.

Each check compares a fast routine with its brute-force counterpart in
:mod:`tensorrm.oracles` over seeded random inputs and reports the number of
mismatches.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import List

import numpy as np

from . import oracles
from .bits import BitWord, TriWord
from .erasure import TooManyErasures, linear_complete, rm_complete
from .inner import build_ml_table, majority_decode_batch, majority_radius, ml_decode_batch
from .rm import RmCode, coefficients_batch, encode_batch, is_codeword_batch, monomial_indices
from .tensor import adversarial_radius, decode_array, rm_component
from .trm import TrmCode, trm_encode


@dataclass
class CheckResult:
    name: str
    cases: int
    mismatches: int
    seconds: float

    @property
    def passed(self) -> bool:
        return self.mismatches == 0

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "cases": self.cases,
            "mismatches": self.mismatches,
            "seconds": round(self.seconds, 4),
            "passed": self.passed,
        }


SMALL_RM = [RmCode(r, m) for m in range(1, 5) for r in range(m + 1)]


def _encoding(rng, scale):
    cases = bad = 0
    for code in SMALL_RM:
        gen = oracles.rm_generator(code.r, code.m)
        msgs = rng.integers(0, 2, (scale, code.dimension), dtype=np.uint8)
        fast = encode_batch(code, msgs)
        slow = (msgs.astype(np.int64) @ gen) & 1
        bad += int((fast != slow).any(axis=1).sum())
        coeffs = coefficients_batch(code, fast)[:, monomial_indices(code.r, code.m)]
        bad += int((coeffs != msgs).any(axis=1).sum())
        cases += scale
    return cases, bad


def _membership(rng, scale):
    cases = bad = 0
    for code in SMALL_RM:
        cws = oracles.enumerate_codewords(code)
        members = {row.tobytes() for row in cws}
        words = rng.integers(0, 2, (scale, code.length), dtype=np.uint8)
        words[: scale // 2] = cws[rng.integers(0, len(cws), scale // 2)]
        fast = is_codeword_batch(code, words)
        slow = np.array([w.tobytes() in members for w in words])
        bad += int((fast != slow).sum())
        cases += scale
    return cases, bad


def _erasure(rng, scale):
    cases = bad = 0
    for code in SMALL_RM:
        gen = oracles.rm_generator(code.r, code.m)
        for _ in range(scale):
            values = rng.integers(0, 2, code.length, dtype=np.uint8)
            if rng.random() < 0.5:
                values = encode_batch(code, rng.integers(0, 2, code.dimension, dtype=np.uint8))
            k = int(rng.integers(0, code.d_min))
            erased = np.zeros(code.length, dtype=bool)
            erased[rng.choice(code.length, k, replace=False)] = True
            y = TriWord(values, erased)
            subset = oracles.consistent_codewords(code, y)
            try:
                got = rm_complete(code, y)
            except TooManyErasures:
                bad += 1
                continue
            lin = linear_complete(gen, y)
            want = None if len(subset) == 0 else BitWord(subset[0])
            bad += int(len(subset) > 1)
            bad += int(got != want) + int(lin != want)
            cases += 1
    return cases, bad


def _ml(rng, scale):
    cases = bad = 0
    for code in SMALL_RM:
        table = build_ml_table(code)
        # brute force costs 2^k per word; keep the big codes to a sample
        count = max(16, min(scale, (1 << 18) >> code.dimension))
        words = rng.integers(0, 2, (count, code.length), dtype=np.uint8)
        fast = ml_decode_batch(code, words, table)
        for w, got in zip(words, fast):
            bad += int(not np.array_equal(got, oracles.nearest_codeword(code, w)))
        cases += count
    return cases, bad


def _majority(rng, scale):
    cases = bad = 0
    for code in SMALL_RM:
        radius = majority_radius(code)
        cws = encode_batch(code, rng.integers(0, 2, (scale, code.dimension), dtype=np.uint8))
        noisy = cws.copy()
        for row in noisy:
            w = int(rng.integers(0, radius + 1))
            row[rng.choice(code.length, w, replace=False)] ^= 1
        bad += int((majority_decode_batch(code, noisy) != cws).any(axis=1).sum())
        cases += scale
    return cases, bad


def _tensor(rng, scale):
    cases = bad = 0
    for profile in ("0:2,0:2", "1:2,0:2", "1:3,1:2", "1:2,1:2,1:2"):
        code = TrmCode.parse(profile)
        comps = [rm_component(l) for l in code.layers]
        radius = adversarial_radius(comps)
        gen = oracles.generator_of(code)
        for _ in range(scale):
            msg = rng.integers(0, 2, code.dimension, dtype=np.uint8)
            sent = trm_encode(code, msg)
            bad += int(not np.array_equal(sent.ravel(), (msg.astype(np.int64) @ gen) & 1))
            noisy = sent.copy().ravel()
            w = int(rng.integers(0, radius + 1))
            noisy[rng.choice(noisy.size, w, replace=False)] ^= 1
            out, failed = decode_array(comps, noisy.reshape(code.shape)[..., None])
            bad += int(failed[0] or not np.array_equal(out[..., 0], sent))
            cases += 1
    return cases, bad


def _distance(rng, scale):
    cases = bad = 0
    for code in SMALL_RM:
        bad += int(oracles.min_distance_bruteforce(code) != code.d_min)
        cases += 1
    for profile in ("1:2,1:2", "0:2,1:3", "1:3,1:2"):
        code = TrmCode.parse(profile)
        bad += int(oracles.min_distance_bruteforce(code) != code.d_min)
        cases += 1
    return cases, bad


CHECKS: List[tuple] = [
    ("encode vs explicit generator", _encoding),
    ("membership vs enumeration", _membership),
    ("erasure completion vs consistent set", _erasure),
    ("ml table vs nearest codeword", _ml),
    ("majority logic within radius", _majority),
    ("tensor decoder within radius", _tensor),
    ("minimum distance formulas", _distance),
]


def run_oracle_suite(seed: int = 0, scale: int = 200) -> List[CheckResult]:
    results = []
    for i, (name, fn) in enumerate(CHECKS):
        rng = np.random.default_rng([seed, i])
        start = time.perf_counter()
        cases, bad = fn(rng, scale)
        results.append(CheckResult(name, cases, bad, time.perf_counter() - start))
    return results
