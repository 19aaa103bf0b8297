"""scikit-learn style wrappers around the functional API.

Each estimator takes a 2-D array with one word per row. Words are flattened
in C order for tensor codes. Erased symbols are written as ``NaN`` in float
input, and a decoder that refuses (all erasures) returns a row of ``NaN``.
"""

from __future__ import annotations

from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .erasure import complete_batch
from .inner import build_ml_table, highrate_decode_batch, majority_decode_batch, ml_decode_batch
from .rm import RmCode, coefficients_batch, encode_batch, monomial_indices
from .tensor import decode_array, rm_component
from .trm import DecodeConfig, TrmCode, trm_decode_detailed, trm_encode


def check_bits(X, n_features: Optional[int] = None, allow_nan: bool = False) -> np.ndarray:
    """Validate a 2-D 0/1 array (optionally with NaN erasures) and return it."""
    arr = check_array(
        X,
        dtype=np.float64 if allow_nan else None,
        ensure_all_finite="allow-nan" if allow_nan else True,
        ensure_min_samples=0,
    )
    vals = arr[~np.isnan(arr)] if allow_nan else arr
    if not np.isin(vals, (0, 1)).all():
        raise ValueError("entries must be 0 or 1" + (" or NaN" if allow_nan else ""))
    if n_features is not None and arr.shape[1] != n_features:
        raise ValueError(f"expected {n_features} columns, got {arr.shape[1]}")
    return arr


def _split_erasures(arr: np.ndarray):
    erased = np.isnan(arr)
    return np.where(erased, 0, arr).astype(np.uint8), erased


def _coeffs(code: RmCode, words: np.ndarray) -> np.ndarray:
    return coefficients_batch(code, words)[:, monomial_indices(code.r, code.m)]


class RmEncoder(TransformerMixin, BaseEstimator):
    """Coefficient rows -> RM(r, m) codeword rows."""

    def __init__(self, r: int = 1, m: int = 3):
        self.r = r
        self.m = m

    def fit(self, X=None, y=None):
        self.code_ = RmCode(self.r, self.m)
        self.n_features_in_ = self.code_.dimension
        return self

    def transform(self, X):
        check_is_fitted(self, "code_")
        arr = check_bits(X, self.code_.dimension)
        return encode_batch(self.code_, arr.astype(np.uint8))

    def inverse_transform(self, X):
        check_is_fitted(self, "code_")
        arr = check_bits(X, self.code_.length)
        return _coeffs(self.code_, arr.astype(np.uint8))


class RmDecoder(BaseEstimator):
    """Error decoder for RM(r, m).

    ``method`` is ``"highrate"`` (membership test then majority logic),
    ``"majority"`` or ``"ml"``. ``fit`` builds the ML table when the code is
    short enough for one.
    """

    def __init__(self, r: int = 1, m: int = 3, method: str = "highrate"):
        self.r = r
        self.m = m
        self.method = method

    def fit(self, X=None, y=None):
        if self.method not in ("highrate", "majority", "ml"):
            raise ValueError(f"unknown method {self.method!r}")
        self.code_ = RmCode(self.r, self.m)
        self.table_ = build_ml_table(self.code_) if self.method == "ml" and self.code_.length <= 16 else None
        self.n_features_in_ = self.code_.length
        return self

    def predict(self, X):
        check_is_fitted(self, "code_")
        words = check_bits(X, self.code_.length).astype(np.uint8)
        if self.method == "ml":
            return ml_decode_batch(self.code_, words, self.table_)
        if self.method == "majority":
            return majority_decode_batch(self.code_, words)
        return highrate_decode_batch(self.code_, words)

    def transform(self, X):
        """Decoded coefficient vectors."""
        return _coeffs(self.code_, self.predict(X))


class RmErasureCompleter(TransformerMixin, BaseEstimator):
    """Fill NaN erasures with the unique consistent RM(r, m) codeword."""

    def __init__(self, r: int = 1, m: int = 3):
        self.r = r
        self.m = m

    def fit(self, X=None, y=None):
        self.code_ = RmCode(self.r, self.m)
        self.n_features_in_ = self.code_.length
        return self

    def transform(self, X):
        check_is_fitted(self, "code_")
        arr = check_bits(X, self.code_.length, allow_nan=True)
        values, erased = _split_erasures(arr)
        out = np.full(arr.shape, np.nan)
        if not len(arr):
            return out
        masks, inverse = np.unique(erased, axis=0, return_inverse=True)
        inverse = np.asarray(inverse).ravel()
        for g, mask in enumerate(masks):
            rows = np.flatnonzero(inverse == g)
            if mask.sum() >= self.code_.d_min:
                continue
            c, ok = complete_batch(self.code_, values[rows], mask)
            out[rows[ok]] = c[ok]
        return out


class TrmEncoder(TransformerMixin, BaseEstimator):
    """Coefficient rows (C-order coefficient tensors) -> flattened TRM codewords."""

    def __init__(self, profile: str = "1:2,1:2"):
        self.profile = profile

    def fit(self, X=None, y=None):
        self.code_ = TrmCode.parse(self.profile)
        self.n_features_in_ = self.code_.dimension
        return self

    def transform(self, X):
        check_is_fitted(self, "code_")
        arr = check_bits(X, self.code_.dimension).astype(np.uint8)
        out = np.empty((arr.shape[0], self.code_.length), dtype=np.uint8)
        for i, row in enumerate(arr):
            out[i] = trm_encode(self.code_, row).ravel()
        return out


class TrmDecoder(BaseEstimator):
    """Staged random-error decoder; ``fit`` builds the layer-1 ML table."""

    def __init__(
        self,
        profile: str = "1:3,4:6,4:7",
        inner_decoder: str = "highrate",
        counter_threshold: Optional[int] = None,
        run_final_pass: bool = True,
    ):
        self.profile = profile
        self.inner_decoder = inner_decoder
        self.counter_threshold = counter_threshold
        self.run_final_pass = run_final_pass

    def fit(self, X=None, y=None):
        self.code_ = TrmCode.parse(self.profile)
        self.config_ = DecodeConfig(
            counter_threshold=self.counter_threshold,
            inner_decoder=self.inner_decoder,
            run_final_pass=self.run_final_pass,
        )
        self.table_ = build_ml_table(self.code_.layers[0])
        self.n_features_in_ = self.code_.length
        return self

    def predict(self, X):
        check_is_fitted(self, "table_")
        arr = check_bits(X, self.code_.length).astype(np.uint8)
        out = np.empty_like(arr)
        for i, row in enumerate(arr):
            res = trm_decode_detailed(self.code_, row.reshape(self.code_.shape), self.config_, self.table_)
            out[i] = res.codeword.ravel()
        return out


class TensorAdversarialDecoder(BaseEstimator):
    """Worst-case decoder for RM tensor codes; accepts NaN erasures."""

    def __init__(self, profile: str = "1:3,1:3", use_pattern_cache: bool = True):
        self.profile = profile
        self.use_pattern_cache = use_pattern_cache

    def fit(self, X=None, y=None):
        self.code_ = TrmCode.parse(self.profile)
        self.components_ = [rm_component(l) for l in self.code_.layers]
        self.n_features_in_ = self.code_.length
        return self

    def predict(self, X):
        check_is_fitted(self, "components_")
        arr = check_bits(X, self.code_.length, allow_nan=True)
        values, erased = _split_erasures(arr)
        shape = self.code_.shape + (arr.shape[0],)
        data, failed = decode_array(
            self.components_,
            np.ascontiguousarray(values.T).reshape(shape),
            np.ascontiguousarray(erased.T).reshape(shape),
            self.use_pattern_cache,
        )
        out = data.reshape(-1, arr.shape[0]).T.astype(np.float64)
        out[failed] = np.nan
        return out
