"""Tensor Reed-Muller codes: encoding, erasure completion, adversarial and
random-error decoding, brute-force oracles and a seeded channel simulator."""

__version__ = "0.1.0"

from .bits import BitWord, TriTensor, TriWord
from .erasure import TooManyErasures, f_rm, linear_complete, rm_complete
from .inner import MlTable, build_ml_table, highrate_decode, majority_decode, ml_decode
from .rm import RmCode, binom_sum, entropy, point_index, rm_encode, rm_is_codeword
from .tensor import (
    ComponentCode,
    adversarial_radius,
    linear_component,
    rm_component,
    tensor_decode,
)
from .trm import (
    DecodeConfig,
    Diagnostic,
    PlanRequest,
    TrmCode,
    counter_threshold,
    plan_parameters,
    trm_decode_random,
    trm_encode,
    trm_is_codeword,
)
from .channel import NoiseSpec, TrialStats, apply_noise, run_trials

__all__ = [
    "BitWord", "TriWord", "TriTensor",
    "RmCode", "binom_sum", "entropy", "point_index", "rm_encode", "rm_is_codeword",
    "TooManyErasures", "rm_complete", "f_rm", "linear_complete",
    "MlTable", "build_ml_table", "ml_decode", "majority_decode", "highrate_decode",
    "ComponentCode", "rm_component", "linear_component", "adversarial_radius", "tensor_decode",
    "TrmCode", "PlanRequest", "Diagnostic", "DecodeConfig", "plan_parameters", "trm_encode",
    "trm_is_codeword", "counter_threshold", "trm_decode_random",
    "NoiseSpec", "TrialStats", "apply_noise", "run_trials",
]
