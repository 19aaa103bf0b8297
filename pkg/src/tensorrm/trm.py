"""Tensor Reed-Muller codes: descriptors, parameter planning, encoding and
the staged random-error decoder.

A codeword of TRM(r_1,m_1; ...; r_t,m_t) is a ``uint8`` array of shape
``(2^m_1, ..., 2^m_t)`` whose every axis-i vector lies in RM(r_i, m_i).
Axis-1 vectors are called rows and axis-2 vectors columns.

The staged decoder runs three passes:

1. every row is replaced by its maximum-likelihood decoding (table lookup);
2. every column that is not a codeword is counted and handed to the layer-2
   inner decoder; if the count exceeds the threshold the decoder gives up
   and returns the all-zero codeword;
3. for t > 3 the adversarial tensor decoder runs over all t axes, with an
   all-erasure result mapped to the all-zero codeword.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from math import prod
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .inner import MlTable, build_ml_table, highrate_decode_batch, ml_decode_batch
from .rm import RmCode, binom_sum, entropy, is_codeword_along, monomial_indices, zeta_transform
from .tensor import decode_array, rm_component


@dataclass(frozen=True)
class TrmCode:
    """Ordered list of Reed-Muller layers."""

    layers: Tuple[RmCode, ...]

    def __post_init__(self):
        layers = tuple(l if isinstance(l, RmCode) else RmCode(*l) for l in self.layers)
        if not layers:
            raise ValueError("a tensor code needs at least one layer")
        object.__setattr__(self, "layers", layers)

    @classmethod
    def from_pairs(cls, pairs: Sequence[Tuple[int, int]]) -> "TrmCode":
        return cls(tuple(RmCode(r, m) for r, m in pairs))

    @classmethod
    def parse(cls, profile: str) -> "TrmCode":
        """Parse ``"r1:m1,r2:m2,..."``."""
        pairs = []
        for item in profile.replace(" ", "").split(","):
            if not item:
                continue
            try:
                r, m = item.split(":")
                pairs.append((int(r), int(m)))
            except ValueError:
                raise ValueError(f"bad layer {item!r} in profile {profile!r}; expected r:m") from None
        return cls.from_pairs(pairs)

    def __str__(self) -> str:
        return ",".join(f"{l.r}:{l.m}" for l in self.layers)

    @property
    def t(self) -> int:
        return len(self.layers)

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(l.length for l in self.layers)

    @property
    def length(self) -> int:
        return 1 << sum(l.m for l in self.layers)

    @property
    def dimension(self) -> int:
        return prod(l.dimension for l in self.layers)

    @property
    def coeff_shape(self) -> Tuple[int, ...]:
        return tuple(l.dimension for l in self.layers)

    @property
    def d_min(self) -> int:
        return prod(l.d_min for l in self.layers)

    @property
    def rate(self) -> float:
        return prod(l.rate for l in self.layers)

    def describe(self) -> dict:
        return {
            "profile": str(self),
            "layers": [{"r": l.r, "m": l.m} for l in self.layers],
            "t": self.t,
            "length": self.length,
            "log2_length": sum(l.m for l in self.layers),
            "dimension": self.dimension,
            "d_min": self.d_min,
            "rate": self.rate,
        }


# ------------------------------------------------------------------ planning

@dataclass(frozen=True)
class PlanRequest:
    n: int
    t: int
    rate: float
    p: float

    def __post_init__(self):
        if self.n < 4:
            raise ValueError("n must be at least 4")
        if self.t < 3:
            raise ValueError("t must be at least 3")
        if not 0.0 < self.rate < 1.0:
            raise ValueError(f"rate must lie in (0, 1), got {self.rate}")
        if not 0.0 < self.p < 0.5:
            raise ValueError(f"p must lie in (0, 1/2), got {self.p}")


@dataclass
class Diagnostic:
    """Why the asymptotic parameter formulas fail at the requested n."""

    violated_constraint: str
    values: Dict[str, object]
    minimum_feasible_n: Optional[str]

    def to_json(self) -> dict:
        return {
            "violated_constraint": self.violated_constraint,
            "values": self.values,
            "minimum_feasible_n": self.minimum_feasible_n,
        }


def _closest_r(m: int, rate: float) -> int:
    best, best_gap = 0, math.inf
    for r in range(m + 1):
        gap = abs(binom_sum(m, r) / (1 << m) - rate)
        if gap <= best_gap:
            best, best_gap = r, gap
    return best


def _formula_layers(log_n: float, t: int, rate: float) -> Dict[str, int]:
    loglog = math.log2(log_n)
    m1 = max(1, math.ceil(loglog - 3))
    m2 = math.ceil(10 * loglog)
    r2 = math.ceil(m2 / 2 + math.sqrt(m2) * math.log2(m2)) if m2 > 0 else 0
    m3 = math.ceil((log_n - m1 - m2) / (t - 2))
    r3 = math.ceil((m3 + m3 ** 0.75) / 2) if m3 > 0 else 0
    return {"m1": m1, "r1": _closest_r(m1, rate), "m2": m2, "r2": r2, "m3": m3, "r3": r3}


def _violations(log_n: float, vals: Dict[str, int]) -> List[str]:
    out = []
    if vals["m1"] + vals["m2"] >= log_n:
        out.append("m1 + m2 < log2(n)")
    for i in (1, 2, 3):
        if vals[f"r{i}"] > vals[f"m{i}"]:
            out.append(f"r{i} <= m{i}")
    return out


def _minimum_feasible_log_n(t: int, rate: float, start: int) -> int:
    def ok(log_n: int) -> bool:
        return not _violations(log_n, _formula_layers(log_n, t, rate))

    hi = max(start, 4)
    while not ok(hi):
        hi *= 2
    lo = max(start, 2)
    # feasibility is monotone above the point where the r2 bound starts holding
    while lo < hi:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid + 1
    return hi


def plan_parameters(req: PlanRequest) -> Union[TrmCode, Diagnostic]:
    """Evaluate the asymptotic parameter formulas; never silently clamp."""
    if req.rate >= 1.0 - entropy(req.p):
        return Diagnostic(
            "rate < 1 - h(p)",
            {"rate": req.rate, "capacity": 1.0 - entropy(req.p)},
            None,
        )
    log_n = math.log2(req.n)
    vals = _formula_layers(log_n, req.t, req.rate)
    bad = _violations(log_n, vals)
    if bad:
        values: Dict[str, object] = dict(vals)
        values["log2_n"] = log_n
        values["all_violations"] = bad
        min_log = _minimum_feasible_log_n(req.t, req.rate, math.ceil(log_n))
        return Diagnostic(bad[0], values, f"2^{min_log}")
    pairs = [(vals["r1"], vals["m1"]), (vals["r2"], vals["m2"])]
    pairs += [(vals["r3"], vals["m3"])] * (req.t - 2)
    return TrmCode.from_pairs(pairs)


# ------------------------------------------------------------------ encoding

def trm_encode(code: TrmCode, coeffs) -> np.ndarray:
    """Encode a coefficient tensor of shape ``code.coeff_shape`` (or its flattening).

    Coefficient ``[i_1, ..., i_t]`` multiplies the product of the i_k-th
    monomials (canonical order) of each layer.
    """
    coeffs = np.asarray(coeffs, dtype=np.uint8)
    if coeffs.size != code.dimension:
        raise ValueError(f"code has dimension {code.dimension}, got {coeffs.size} coefficients")
    out = coeffs.reshape(code.coeff_shape)
    for axis in range(code.t - 1, -1, -1):
        layer = code.layers[axis]
        shape = list(out.shape)
        shape[axis] = layer.length
        full = np.zeros(shape, dtype=np.uint8)
        index = [slice(None)] * code.t
        index[axis] = monomial_indices(layer.r, layer.m)
        full[tuple(index)] = out
        out = zeta_transform(full, axis=axis)
    return out


def random_codeword(code: TrmCode, rng: np.random.Generator) -> np.ndarray:
    return trm_encode(code, rng.integers(0, 2, code.coeff_shape, dtype=np.uint8))


def trm_is_codeword(code: TrmCode, tensor: np.ndarray) -> bool:
    tensor = np.asarray(tensor)
    if tensor.shape != code.shape:
        raise ValueError(f"expected shape {code.shape}, got {tensor.shape}")
    return all(is_codeword_along(layer, tensor, axis).all() for axis, layer in enumerate(code.layers))


# ------------------------------------------------------------------ decoding

def counter_threshold(n: int) -> int:
    """Column-repair budget floor(n * 2^(-2^((log log n)^(1/4))))."""
    if n < 4:
        raise ValueError("n must be at least 4")
    exponent = 2.0 ** (math.log2(math.log2(n)) ** 0.25)
    return math.floor(n * 2.0 ** (-exponent))


INNER_DECODERS = ("highrate", "ml")


@dataclass
class DecodeConfig:
    counter_threshold: Optional[int] = None
    inner_decoder: str = "highrate"
    run_final_pass: bool = True
    use_pattern_cache: bool = True

    def __post_init__(self):
        if self.counter_threshold is not None and self.counter_threshold < 0:
            raise ValueError("counter_threshold must be >= 0")
        if self.inner_decoder not in INNER_DECODERS:
            raise ValueError(f"inner_decoder must be one of {INNER_DECODERS}")

    def threshold_for(self, code: TrmCode) -> int:
        if self.counter_threshold is not None:
            return self.counter_threshold
        return counter_threshold(code.length)


@dataclass
class DecodeResult:
    codeword: np.ndarray
    counter: int = 0
    aborted: bool = False
    final_pass_failed: bool = False  # also set when the unchecked output was not a codeword
    timings: Dict[str, float] = field(default_factory=dict)


def _row_pass(table: MlTable, data: np.ndarray) -> None:
    n1 = data.shape[0]
    rows = data.reshape(n1, -1)
    idx = np.zeros(rows.shape[1], dtype=np.int64)
    for i in range(n1):
        idx |= rows[i].astype(np.int64) << i
    decoded = table.entries[idx]
    for i in range(n1):
        rows[i] = (decoded >> np.uint64(i)) & np.uint64(1)


def _column_pass(code: TrmCode, data: np.ndarray, cfg: DecodeConfig) -> Tuple[int, bool]:
    layer = code.layers[1]
    n1, n2 = data.shape[:2]
    cols = data.reshape(n1, n2, -1)
    bad = ~is_codeword_along(layer, cols, axis=1)
    counter = int(np.count_nonzero(bad))
    if counter > cfg.threshold_for(code):
        return counter, True
    if counter:
        j1, rest = np.nonzero(bad)
        words = cols[j1, :, rest]
        if cfg.inner_decoder == "ml":
            fixed = ml_decode_batch(layer, words)
        else:
            fixed = highrate_decode_batch(layer, words)
        cols[j1, :, rest] = fixed
    return counter, False


def trm_decode_detailed(
    code: TrmCode,
    received: np.ndarray,
    cfg: Optional[DecodeConfig] = None,
    table: Optional[MlTable] = None,
) -> DecodeResult:
    """Staged decoder with per-stage timings and the repair counter."""
    cfg = cfg or DecodeConfig()
    if code.t < 2:
        raise ValueError("the staged decoder needs at least two layers")
    received = np.asarray(received, dtype=np.uint8)
    if received.shape != code.shape:
        raise ValueError(f"expected shape {code.shape}, got {received.shape}")
    if table is None:
        table = build_ml_table(code.layers[0])
    elif table.code != code.layers[0]:
        raise ValueError(f"table is for {table.code}, layer 1 is {code.layers[0]}")

    data = np.array(received, order="C", copy=True)
    timings = {}
    start = time.perf_counter()
    _row_pass(table, data)
    timings["rows"] = time.perf_counter() - start

    start = time.perf_counter()
    counter, aborted = _column_pass(code, data, cfg)
    timings["columns"] = time.perf_counter() - start
    if aborted:
        return DecodeResult(np.zeros(code.shape, dtype=np.uint8), counter, True, False, timings)

    failed = False
    if code.t > 3 and cfg.run_final_pass:
        start = time.perf_counter()
        comps = [rm_component(l) for l in code.layers]
        out, fail = decode_array(comps, data[..., None], use_pattern_cache=cfg.use_pattern_cache)
        timings["final"] = time.perf_counter() - start
        failed = bool(fail[0])
        data = np.zeros(code.shape, dtype=np.uint8) if failed else out[..., 0]
    elif not trm_is_codeword(code, data):
        # column repairs can break rows; fall back to the zero codeword
        failed = True
        data = np.zeros(code.shape, dtype=np.uint8)
    return DecodeResult(data, counter, False, failed, timings)


def trm_decode_random(
    code: TrmCode,
    received: np.ndarray,
    cfg: Optional[DecodeConfig] = None,
    table: Optional[MlTable] = None,
) -> np.ndarray:
    """Decode a noisy TRM codeword; always returns some codeword."""
    return trm_decode_detailed(code, received, cfg, table).codeword
