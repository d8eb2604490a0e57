"""Estimator plumbing: parameter introspection and input validation.

Estimators in this package follow the scikit-learn calling convention
(``fit`` returns ``self``, ``get_params``/``set_params`` for composition)
without importing scikit-learn, so they stay drop-in compatible with
ecosystem tooling that duck-types against that interface.
"""

from __future__ import annotations

import inspect

import numpy as np

from .errors import LengthMismatch, NonFiniteFeature, NotFitted, SingleClassData


class BaseEstimator:
    """get_params/set_params over the constructor signature, sklearn-style."""

    @classmethod
    def _param_names(cls) -> list[str]:
        sig = inspect.signature(cls.__init__)
        return sorted(
            p.name
            for p in sig.parameters.values()
            if p.name != "self" and p.kind not in (p.VAR_POSITIONAL, p.VAR_KEYWORD)
        )

    def get_params(self, deep: bool = True) -> dict:
        return {name: getattr(self, name) for name in self._param_names()}

    def set_params(self, **params) -> "BaseEstimator":
        valid = set(self._param_names())
        for key, value in params.items():
            if key not in valid:
                raise ValueError(
                    f"invalid parameter {key!r} for {type(self).__name__}; "
                    f"valid parameters are {sorted(valid)}"
                )
            setattr(self, key, value)
        return self

    def __repr__(self) -> str:
        args = ", ".join(f"{k}={v!r}" for k, v in sorted(self.get_params().items()))
        return f"{type(self).__name__}({args})"


def check_array(X, *, ndim: int = 2, dtype=np.float64) -> np.ndarray:
    """Coerce to a finite ndarray of the expected rank."""
    arr = np.asarray(X, dtype=dtype)
    if arr.ndim != ndim:
        raise ValueError(f"expected a {ndim}-d array, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError("empty array")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteFeature("array contains NaN or infinite entries")
    return arr


def check_X_y(X, y) -> tuple[np.ndarray, np.ndarray]:
    """Validate a training pair: finite 2-d X, binary y with both classes."""
    X = check_array(X, ndim=2)
    y = np.asarray(y)
    if y.ndim != 1:
        raise ValueError(f"expected 1-d labels, got shape {y.shape}")
    if len(y) != X.shape[0]:
        raise LengthMismatch(f"X has {X.shape[0]} rows but y has {len(y)} labels")
    y = y.astype(np.int64)
    if not np.all((y == 0) | (y == 1)):
        raise ValueError("labels must be 0/1")
    if len(np.unique(y)) < 2:
        raise SingleClassData("training labels contain a single class")
    return X, y


def check_is_fitted(estimator, attribute: str) -> None:
    if getattr(estimator, attribute, None) is None:
        raise NotFitted(f"{type(estimator).__name__} must be fitted before use")


def check_feature_dim(x: np.ndarray, expected: int) -> np.ndarray:
    """Validate scoring input against the model's feature dimension."""
    from .errors import DimensionMismatch

    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[None, :]
    if x.ndim != 2 or x.shape[1] != expected:
        raise DimensionMismatch(f"expected {expected} features, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise NonFiniteFeature("scoring input contains NaN or infinite entries")
    return x


def rng_stream(seed: int, *key: int) -> np.random.Generator:
    """Counter-based per-component random stream.

    Every source of randomness in training derives from (seed, key...) so a
    component (e.g. tree i) gets the same stream no matter what ran before it.
    """
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(key)))
