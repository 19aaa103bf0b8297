import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline

from tensorrm.estimators import (
    RmDecoder,
    RmEncoder,
    RmErasureCompleter,
    TensorAdversarialDecoder,
    TrmDecoder,
    TrmEncoder,
)
from tensorrm.trm import TrmCode, trm_is_codeword


def test_encoder_round_trip(rng):
    enc = RmEncoder(2, 4).fit()
    msgs = rng.integers(0, 2, (20, 11))
    words = enc.transform(msgs)
    assert words.shape == (20, 16)
    assert np.array_equal(enc.inverse_transform(words), msgs)
    with pytest.raises(ValueError):
        enc.transform(np.full((2, 11), 2))
    with pytest.raises(ValueError):
        enc.transform(np.zeros((2, 10)))


def test_params_and_clone():
    dec = RmDecoder(r=2, m=5, method="majority")
    assert dec.get_params() == {"r": 2, "m": 5, "method": "majority"}
    other = clone(dec).set_params(method="ml")
    assert other.method == "ml" and dec.method == "majority"
    with pytest.raises(NotFittedError):
        RmDecoder().predict(np.zeros((1, 8)))
    with pytest.raises(ValueError):
        RmDecoder(method="guess").fit()


@pytest.mark.parametrize("method", ["highrate", "majority", "ml"])
def test_decoder_corrects_one_error(method, rng):
    enc = RmEncoder(1, 4).fit()
    msgs = rng.integers(0, 2, (30, 5))
    words = enc.transform(msgs)
    noisy = words.copy()
    noisy[np.arange(30), rng.integers(0, 16, 30)] ^= 1
    dec = RmDecoder(1, 4, method).fit()
    assert np.array_equal(dec.predict(noisy), words)
    assert np.array_equal(dec.transform(noisy), msgs)


def test_pipeline_encode_then_decode(rng):
    pipe = make_pipeline(RmEncoder(2, 5))
    msgs = rng.integers(0, 2, (5, 16))
    words = pipe.fit_transform(msgs)
    assert np.array_equal(RmDecoder(2, 5).fit().transform(words), msgs)


def test_erasure_completer(rng):
    enc = RmEncoder(1, 3).fit()
    words = enc.transform(rng.integers(0, 2, (6, 4))).astype(float)
    holes = words.copy()
    holes[:3, :3] = np.nan          # three erasures: recoverable
    holes[3:, :4] = np.nan          # four erasures: refused
    out = RmErasureCompleter(1, 3).fit().transform(holes)
    assert np.array_equal(out[:3], words[:3])
    assert np.isnan(out[3:]).all()
    assert RmErasureCompleter(1, 3).fit().transform(np.zeros((0, 8))).shape == (0, 8)
    with pytest.raises(ValueError):
        RmErasureCompleter(1, 3).fit().transform(np.full((1, 8), 0.5))


def test_trm_encoder_and_decoder(rng):
    profile = "1:3,2:4,1:3"
    code = TrmCode.parse(profile)
    words = TrmEncoder(profile).fit().transform(rng.integers(0, 2, (3, code.dimension)))
    assert all(trm_is_codeword(code, w.reshape(code.shape)) for w in words)
    noisy = words.copy()
    noisy[:, 5] ^= 1
    dec = TrmDecoder(profile).fit()
    assert np.array_equal(dec.predict(noisy), words)


def test_tensor_adversarial_with_nan(rng):
    profile = "1:3,1:3"
    code = TrmCode.parse(profile)
    words = TrmEncoder(profile).fit().transform(rng.integers(0, 2, (4, code.dimension))).astype(float)
    x = words.copy()
    x[0, [1, 9, 17]] = np.nan       # erasures only
    x[1, 4] = 1 - x[1, 4]           # one flip, inside the radius of 3
    x[2, :] = np.nan                # hopeless
    out = TensorAdversarialDecoder(profile).fit().predict(x)
    assert np.array_equal(out[[0, 1, 3]], words[[0, 1, 3]])
    assert np.isnan(out[2]).all()
    assert np.array_equal(
        TensorAdversarialDecoder(profile, use_pattern_cache=False).fit().predict(x), out, equal_nan=True
    )
