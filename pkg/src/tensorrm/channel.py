"""Seeded channel noise and Monte-Carlo block-error measurement.

All randomness in a campaign comes from ``(base_seed, trial_index)``: trial
``k`` draws from ``numpy.random.Generator(PCG64(mix64(base_seed, k)))``,
where ``mix64`` is the splitmix64 step

    z = (base_seed + (k + 1) * 0x9E3779B97F4A7C15) mod 2^64
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 mod 2^64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB mod 2^64
    z =  z ^ (z >> 31)

so a run is reproducible from its flags alone, in any order or split
across any number of workers.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
from scipy.stats import beta

from .bits import BitWord, TriTensor, TriWord
from .inner import build_ml_table, highrate_decode_batch, majority_decode_batch, ml_decode_batch
from .rm import RmCode, encode_batch
from .tensor import decode_array, rm_component
from .trm import DecodeConfig, TrmCode, random_codeword, trm_decode_detailed

_MASK64 = (1 << 64) - 1
NOISE_KINDS = ("bsc", "bec", "adversarial")
PLACEMENTS = ("uniform", "slice")


def mix64(base_seed: int, index: int) -> int:
    z = (base_seed + (index + 1) * 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def trial_rng(base_seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(mix64(base_seed, index)))


@dataclass(frozen=True)
class NoiseSpec:
    kind: str = "bsc"
    p: float = 0.0
    weight: int = 0
    placement: str = "uniform"
    per_slice: Optional[int] = None

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ValueError(f"noise kind must be one of {NOISE_KINDS}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if self.weight < 0:
            raise ValueError("weight must be non-negative")
        if self.placement not in PLACEMENTS:
            raise ValueError(f"placement must be one of {PLACEMENTS}")

    def label(self) -> str:
        if self.kind == "adversarial":
            return f"adversarial:w={self.weight}:{self.placement}"
        return f"{self.kind}:p={self.p:g}"


def bernoulli_positions(n: int, p: float, rng: np.random.Generator) -> np.ndarray:
    """Sorted indices of i.i.d. Bernoulli(p) successes among n trials.

    Uses geometric gaps, so memory scales with the number of successes.
    """
    if p <= 0.0 or n == 0:
        return np.zeros(0, dtype=np.int64)
    if p >= 1.0:
        return np.arange(n, dtype=np.int64)
    chunks = []
    pos = -1
    while True:
        remaining = n - pos - 1
        size = int(remaining * p + 6 * math.sqrt(remaining * p + 1) + 16)
        gaps = rng.geometric(p, size=size)
        steps = pos + np.cumsum(gaps, dtype=np.int64)
        inside = steps[steps < n]
        chunks.append(inside)
        if inside.size < steps.size:
            break
        pos = int(steps[-1])
    return np.concatenate(chunks)


def _distinct_positions(n: int, w: int, rng: np.random.Generator) -> np.ndarray:
    if w > n:
        raise ValueError(f"weight {w} exceeds block length {n}")
    if 4 * w >= n:
        return np.sort(rng.permutation(n)[:w])
    picked = np.zeros(0, dtype=np.int64)
    while picked.size < w:
        extra = rng.integers(0, n, size=2 * (w - picked.size) + 8)
        picked = np.unique(np.concatenate([picked, extra]))
    return np.sort(rng.permutation(picked)[:w])


def _slice_positions(shape: Tuple[int, ...], w: int, per_slice: Optional[int], rng) -> np.ndarray:
    n = int(np.prod(shape))
    if w > n:
        raise ValueError(f"weight {w} exceeds block length {n}")
    slice_size = n // shape[-1]
    cap = slice_size if per_slice is None else min(per_slice, slice_size)
    if cap <= 0:
        raise ValueError("per_slice must be positive")
    n_slices = -(-w // cap)
    if n_slices > shape[-1]:
        raise ValueError(f"cannot fit weight {w} into {shape[-1]} slices of {cap}")
    slices = rng.choice(shape[-1], size=n_slices, replace=False)
    out = []
    left = w
    for s in slices:
        k = min(cap, left)
        inner = _distinct_positions(slice_size, k, rng)
        out.append(inner * shape[-1] + s)
        left -= k
    return np.sort(np.concatenate(out))


def noise_mask(spec: NoiseSpec, shape: Tuple[int, ...], rng: np.random.Generator) -> np.ndarray:
    n = int(np.prod(shape))
    if spec.kind == "adversarial":
        if spec.placement == "slice":
            pos = _slice_positions(shape, spec.weight, spec.per_slice, rng)
        else:
            pos = _distinct_positions(n, spec.weight, rng)
    else:
        pos = bernoulli_positions(n, spec.p, rng)
    mask = np.zeros(n, dtype=bool)
    mask[pos] = True
    return mask.reshape(shape)


def apply_noise(spec: NoiseSpec, data, seed: Union[int, np.random.Generator]):
    """Return ``(noisy, mask)``.

    ``data`` is a BitWord or a 0/1 array. Flip channels return the same type;
    the erasure channel returns a TriWord or TriTensor.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.Generator(np.random.PCG64(seed))
    is_word = isinstance(data, BitWord)
    bits = data.bits if is_word else np.asarray(data, dtype=np.uint8)
    mask = noise_mask(spec, bits.shape, rng)
    if spec.kind == "bec":
        if is_word:
            return TriWord(bits, mask), mask
        return TriTensor(bits, mask), mask
    noisy = bits ^ mask.astype(np.uint8)
    return (BitWord(noisy) if is_word else noisy), mask


# ----------------------------------------------------------------- statistics

def clopper_pearson(k: int, n: int, confidence: float = 0.95) -> Tuple[float, float]:
    """Exact two-sided binomial confidence interval."""
    if n <= 0 or not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n and n >= 1")
    alpha = 1.0 - confidence
    low = 0.0 if k == 0 else float(beta.ppf(alpha / 2, k, n - k + 1))
    high = 1.0 if k == n else float(beta.ppf(1 - alpha / 2, k + 1, n - k))
    return low, high


@dataclass
class TrialStats:
    trials: int
    block_errors: int
    error_rate: float
    ci_low: float
    ci_high: float
    elapsed: Dict[str, float] = field(default_factory=dict, compare=False)

    @classmethod
    def from_counts(cls, trials: int, errors: int, elapsed: Optional[Dict[str, float]] = None) -> "TrialStats":
        low, high = clopper_pearson(errors, trials)
        return cls(trials, errors, errors / trials, low, high, dict(elapsed or {}))

    def to_json(self) -> dict:
        return asdict(self)


# ---------------------------------------------------------------- trial loop

RM_DECODERS = ("ml", "highrate", "majority")
TRM_DECODERS = ("full", "tensor-adv")


def _check_decoder(code, decoder: str) -> None:
    allowed = RM_DECODERS if isinstance(code, RmCode) else TRM_DECODERS
    if decoder not in allowed:
        raise ValueError(f"decoder {decoder!r} not available for {code}; choose from {allowed}")


def _run_chunk(args) -> Tuple[int, Dict[str, float]]:
    code, decoder, spec, indices, base_seed, cfg = args
    errors = 0
    elapsed: Dict[str, float] = {}

    def tick(name, t0):
        elapsed[name] = elapsed.get(name, 0.0) + time.perf_counter() - t0

    table = None
    if isinstance(code, TrmCode) and decoder == "full":
        table = build_ml_table(code.layers[0])
    for k in indices:
        rng = trial_rng(base_seed, k)
        t0 = time.perf_counter()
        if isinstance(code, RmCode):
            sent = encode_batch(code, rng.integers(0, 2, code.dimension, dtype=np.uint8))
        else:
            sent = random_codeword(code, rng)
        tick("encode", t0)
        t0 = time.perf_counter()
        received, _ = apply_noise(spec, sent, rng)
        tick("noise", t0)
        t0 = time.perf_counter()
        ok = _decode_matches(code, decoder, sent, received, table, cfg, elapsed)
        tick("decode", t0)
        errors += not ok
    return errors, elapsed


def _decode_matches(code, decoder, sent, received, table, cfg, elapsed) -> bool:
    if isinstance(received, (TriWord, TriTensor)):
        values, erased = received.values, received.erased
    else:
        values, erased = received, None
    if isinstance(code, RmCode):
        if erased is not None:
            raise ValueError("RM error decoders take flip noise only")
        fn = {"ml": ml_decode_batch, "highrate": highrate_decode_batch, "majority": majority_decode_batch}[decoder]
        return bool(np.array_equal(fn(code, values), sent))
    if decoder == "tensor-adv":
        comps = [rm_component(l) for l in code.layers]
        out, failed = decode_array(comps, values[..., None], None if erased is None else erased[..., None])
        return not failed[0] and bool(np.array_equal(out[..., 0], sent))
    if erased is not None:
        raise ValueError("the staged decoder takes flip noise only")
    res = trm_decode_detailed(code, values, cfg, table)
    for stage, secs in res.timings.items():
        elapsed[f"stage_{stage}"] = elapsed.get(f"stage_{stage}", 0.0) + secs
    return bool(np.array_equal(res.codeword, sent))


def run_trials(
    code: Union[RmCode, TrmCode],
    decoder: str,
    spec: NoiseSpec,
    trials: int,
    base_seed: int = 0,
    jobs: int = 1,
    cfg: Optional[DecodeConfig] = None,
) -> TrialStats:
    """Encode a random message, add noise, decode and compare, ``trials`` times."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    _check_decoder(code, decoder)
    jobs = max(1, min(jobs or os.cpu_count() or 1, trials))
    chunks = [list(range(j, trials, jobs)) for j in range(jobs)]
    args = [(code, decoder, spec, idx, base_seed, cfg) for idx in chunks]
    if jobs == 1:
        results = [_run_chunk(args[0])]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_chunk, args))
    errors = sum(r[0] for r in results)
    elapsed: Dict[str, float] = {}
    for _, e in results:
        for key, val in e.items():
            elapsed[key] = elapsed.get(key, 0.0) + val
    return TrialStats.from_counts(trials, errors, elapsed)
