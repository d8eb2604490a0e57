"""Principal components by power iteration with deflation.

Full eigendecomposition of a 512x512 covariance is unnecessary for a 2-d
projection; repeated power iteration with orthogonalization against the
components already found converges fast and stays dependency-free.
"""

from __future__ import annotations

import numpy as np

from ..base import BaseEstimator, check_array, check_is_fitted, rng_stream
from ..errors import DegenerateData

_PCA_STREAM = 50


class PowerIterationPCA(BaseEstimator):
    """Transform-shaped PCA; components_ rows are orthonormal axes ordered
    by decreasing eigenvalue, each signed so its largest-magnitude entry is
    positive."""

    def __init__(self, n_components: int = 2, tol: float = 1e-10, max_iter: int = 1000):
        self.n_components = n_components
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y=None) -> "PowerIterationPCA":
        X = check_array(X)
        n, d = X.shape
        if n < 2:
            raise ValueError("PCA needs at least two samples")
        if d < self.n_components:
            raise ValueError(f"cannot extract {self.n_components} components from {d} features")

        self.mean_ = X.mean(axis=0)
        centered = X - self.mean_
        cov = centered.T @ centered / (n - 1)
        total_var = float(np.trace(cov))
        if total_var <= 0.0:
            raise DegenerateData("data has zero total variance")

        components = []
        eigenvalues = []
        work = cov.copy()
        for comp in range(self.n_components):
            rng = rng_stream(0, _PCA_STREAM, comp)  # fixed stream: fit is deterministic
            v = rng.standard_normal(d)
            v /= np.linalg.norm(v)
            prev_diff = None
            for _ in range(self.max_iter):
                nxt = work @ v
                for prev in components:  # re-orthogonalize against found axes
                    nxt -= (nxt @ prev) * prev
                norm = np.linalg.norm(nxt)
                if norm <= total_var * 1e-15:  # exhausted variance (rank < n_components)
                    v = _fallback_direction(components, d)
                    break
                nxt /= norm
                diff = float(np.max(np.abs(nxt - v)))
                v = nxt
                if diff == 0.0:
                    break
                # geometric decay: remaining error ~ diff * r / (1 - r)
                if prev_diff is not None and diff < prev_diff:
                    ratio = diff / prev_diff
                    if diff * ratio / (1.0 - ratio) < self.tol:
                        break
                prev_diff = diff
            eigenvalue = float(v @ work @ v)
            if np.max(np.abs(v)) > 0 and v[np.argmax(np.abs(v))] < 0:
                v = -v
            components.append(v)
            eigenvalues.append(max(eigenvalue, 0.0))
            work = work - eigenvalue * np.outer(v, v)

        self.components_ = np.vstack(components)
        self.explained_variance_ = np.asarray(eigenvalues)
        self.explained_variance_ratio_ = self.explained_variance_ / total_var
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "components_")
        X = np.asarray(X, dtype=np.float64)
        return (X - self.mean_) @ self.components_.T

    def fit_transform(self, X, y=None) -> np.ndarray:
        return self.fit(X).transform(X)


def _fallback_direction(components: list, d: int) -> np.ndarray:
    """First basis vector orthogonal to everything found so far."""
    for axis in range(d):
        v = np.zeros(d)
        v[axis] = 1.0
        for prev in components:
            v -= (v @ prev) * prev
        norm = np.linalg.norm(v)
        if norm > 1e-12:
            return v / norm
    raise DegenerateData("no orthogonal direction left")


def pca_project(X, k: int = 2):
    """Convenience wrapper: (N x k scores, k variance ratios, k x d components)."""
    model = PowerIterationPCA(n_components=k).fit(X)
    return model.transform(X), model.explained_variance_ratio_, model.components_
