"""Coarse wall-clock benchmarks of the decoding stages versus block length."""

from __future__ import annotations

import time
from typing import Dict, List, Sequence

import numpy as np

from .channel import NoiseSpec, apply_noise, trial_rng
from .inner import build_ml_table
from .rm import RmCode
from .tensor import adversarial_radius, decode_array, rm_component
from .trm import DecodeConfig, TrmCode, random_codeword, trm_decode_detailed


def grow_last_layer(code: TrmCode, m_last: int) -> TrmCode:
    """Same profile with the last layer resized to ``m_last``, keeping m - r fixed."""
    last = code.layers[-1]
    gap = last.m - last.r
    if m_last < gap:
        raise ValueError(f"m={m_last} is smaller than the last layer's m - r = {gap}")
    return TrmCode(code.layers[:-1] + (RmCode(m_last - gap, m_last),))


def time_stages(code: TrmCode, p: float = 0.001, seed: int = 0, repeat: int = 3) -> Dict[str, float]:
    """Best-of-``repeat`` seconds for each stage on one seeded noisy codeword.

    ``tensor_adv`` times the generic tensor decoder on the codeword with
    ``min(radius, 8)`` flips, so every completion runs.
    """
    rng = trial_rng(seed, 0)
    sent = random_codeword(code, rng)
    received, _ = apply_noise(NoiseSpec("bsc", p), sent, rng)
    table = build_ml_table(code.layers[0])
    comps = [rm_component(l) for l in code.layers]
    light = sent.copy().ravel()
    flips = rng.choice(light.size, min(adversarial_radius(comps), 8), replace=False)
    light[flips] ^= 1
    light = light.reshape(code.shape)[..., None]

    best: Dict[str, float] = {}

    def keep(name, secs):
        best[name] = min(best.get(name, float("inf")), secs)

    for _ in range(repeat):
        start = time.perf_counter()
        res = trm_decode_detailed(code, received, DecodeConfig(), table)
        keep("decode", time.perf_counter() - start)
        for stage, secs in res.timings.items():
            keep(stage, secs)
        start = time.perf_counter()
        decode_array(comps, light)
        keep("tensor_adv", time.perf_counter() - start)
    return best


def bench_profile(
    profile: str, sizes: Sequence[int], p: float = 0.001, seed: int = 0, repeat: int = 3
) -> List[dict]:
    base = TrmCode.parse(profile)
    if base.t < 2:
        raise ValueError("bench needs a profile with at least two layers")
    records = []
    for m_last in sizes:
        code = grow_last_layer(base, m_last)
        stages = time_stages(code, p, seed, repeat)
        records.append({
            "profile": str(code),
            "n": code.length,
            "log2_n": int(np.log2(code.length)),
            "stages": {k: round(v, 6) for k, v in sorted(stages.items())},
        })
    return records


def ratios(records: List[dict]) -> List[dict]:
    """Per-stage time ratios between consecutive sizes."""
    out = []
    for prev, cur in zip(records, records[1:]):
        common = sorted(set(prev["stages"]) & set(cur["stages"]))
        out.append({
            "from_n": prev["n"],
            "to_n": cur["n"],
            "size_ratio": cur["n"] / prev["n"],
            "time_ratio": {
                k: (cur["stages"][k] / prev["stages"][k]) if prev["stages"][k] > 0 else None for k in common
            },
        })
    return out
