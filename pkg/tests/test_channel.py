import numpy as np
import pytest

from tensorrm.bits import BitWord, TriTensor, TriWord
from tensorrm.channel import (
    NoiseSpec,
    TrialStats,
    apply_noise,
    bernoulli_positions,
    clopper_pearson,
    mix64,
    run_trials,
    trial_rng,
)
from tensorrm.rm import RmCode
from tensorrm.trm import TrmCode


def test_mix64_reference_values():
    # splitmix64 seeded with 0: first output
    assert mix64(0, 0) == 0xE220A8397B1DCDAF
    assert mix64(0, 1) != mix64(1, 0)
    assert 0 <= mix64(2**64 - 1, 10**6) < 2**64


def test_trial_rng_is_reproducible():
    a = trial_rng(5, 3).integers(0, 1 << 30, 8)
    b = trial_rng(5, 3).integers(0, 1 << 30, 8)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, trial_rng(5, 4).integers(0, 1 << 30, 8))


def test_zero_noise_is_identity():
    word = BitWord.from_string("0110")
    noisy, mask = apply_noise(NoiseSpec("bsc", 0.0), word, 1)
    assert noisy == word and not mask.any()
    tensor = np.ones((4, 8), dtype=np.uint8)
    noisy, mask = apply_noise(NoiseSpec("bec", 0.0), tensor, 1)
    assert isinstance(noisy, TriTensor) and noisy.is_boolean() and not mask.any()


def test_adversarial_weight_is_exact():
    for w in (0, 1, 7, 100, 1024):
        noisy, mask = apply_noise(NoiseSpec("adversarial", weight=w), np.zeros(1024, np.uint8), w)
        assert mask.sum() == w and noisy.sum() == w
    with pytest.raises(ValueError):
        apply_noise(NoiseSpec("adversarial", weight=9), np.zeros(8, np.uint8), 0)


def test_slice_placement_concentrates():
    spec = NoiseSpec("adversarial", weight=12, placement="slice", per_slice=5)
    _, mask = apply_noise(spec, np.zeros((8, 8, 16), np.uint8), 3)
    assert mask.sum() == 12
    per_slice = mask.sum(axis=(0, 1))
    assert (per_slice > 0).sum() == 3 and per_slice.max() == 5


def test_bsc_half_flip_fraction():
    _, mask = apply_noise(NoiseSpec("bsc", 0.5), np.zeros(10**6, np.uint8), 42)
    assert abs(mask.mean() - 0.5) <= 0.002


def test_bernoulli_positions_rate_and_bounds():
    rng = np.random.default_rng(0)
    pos = bernoulli_positions(2_000_000, 0.003, rng)
    assert np.all(np.diff(pos) > 0) and pos[-1] < 2_000_000
    assert abs(pos.size / 2_000_000 - 0.003) < 0.0002
    assert bernoulli_positions(10, 1.0, rng).tolist() == list(range(10))


def test_bec_returns_triword():
    noisy, mask = apply_noise(NoiseSpec("bec", 0.3), BitWord.from_string("01" * 32), 9)
    assert isinstance(noisy, TriWord)
    assert np.array_equal(noisy.erased, mask)


def test_noise_spec_validation():
    with pytest.raises(ValueError):
        NoiseSpec("awgn")
    with pytest.raises(ValueError):
        NoiseSpec("bsc", 1.5)
    with pytest.raises(ValueError):
        NoiseSpec("adversarial", weight=-1)
    with pytest.raises(ValueError):
        NoiseSpec("adversarial", weight=1, placement="corner")
    assert NoiseSpec("bsc", 0.01).label() == "bsc:p=0.01"


def test_clopper_pearson_closed_forms():
    lo, hi = clopper_pearson(0, 10)
    assert lo == 0.0 and hi == pytest.approx(1 - 0.025 ** 0.1, abs=1e-9)
    assert hi == pytest.approx(0.3085, abs=1e-4)
    lo, hi = clopper_pearson(10, 10)
    assert hi == 1.0 and lo == pytest.approx(0.6915, abs=1e-4)
    lo, hi = clopper_pearson(5, 100)
    assert lo < 0.05 < hi
    stats = TrialStats.from_counts(100, 5)
    assert stats.ci_low <= stats.error_rate <= stats.ci_high
    with pytest.raises(ValueError):
        clopper_pearson(3, 2)


def test_run_trials_noiseless_has_no_errors():
    assert run_trials(RmCode(2, 5), "majority", NoiseSpec("bsc", 0.0), 20).block_errors == 0
    assert run_trials(TrmCode.parse("1:2,1:3,1:2"), "full", NoiseSpec("bsc", 0.0), 5).block_errors == 0
    assert run_trials(TrmCode.parse("1:2,1:3"), "tensor-adv", NoiseSpec("bec", 0.0), 5).block_errors == 0


def test_run_trials_is_deterministic_across_jobs():
    spec = NoiseSpec("bsc", 0.08)
    code = RmCode(2, 5)
    one = run_trials(code, "highrate", spec, 60, base_seed=7, jobs=1)
    again = run_trials(code, "highrate", spec, 60, base_seed=7, jobs=1)
    two = run_trials(code, "highrate", spec, 60, base_seed=7, jobs=2)
    assert one == again == two
    assert 0 < one.block_errors < 60


def test_run_trials_rejects_bad_decoder():
    with pytest.raises(ValueError):
        run_trials(RmCode(1, 3), "full", NoiseSpec(), 1)
    with pytest.raises(ValueError):
        run_trials(TrmCode.parse("1:2,1:2"), "ml", NoiseSpec(), 1)
    with pytest.raises(ValueError):
        run_trials(RmCode(1, 3), "ml", NoiseSpec(), 0)


def test_tensor_adv_corrects_bounded_adversarial():
    code = TrmCode.parse("1:3,1:3")
    stats = run_trials(code, "tensor-adv", NoiseSpec("adversarial", weight=3), 30, base_seed=1)
    assert stats.block_errors == 0
