"""Linear classifiers: full-batch logistic regression and a primal
subgradient linear SVM.
"""

from __future__ import annotations

import time

import numpy as np

from ..base import BaseEstimator, check_X_y, check_feature_dim, check_is_fitted, rng_stream

_SVM_STREAM = 10


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=np.float64)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def log_loss(p: np.ndarray, y: np.ndarray) -> float:
    p = np.clip(p, 1e-12, 1.0 - 1e-12)
    return float(-np.mean(y * np.log(p) + (1.0 - y) * np.log(1.0 - p)))


class LogisticRegressionClassifier(BaseEstimator):
    """L2-regularized logistic regression trained by gradient descent with
    backtracking line search. Deterministic: weights start at zero and no
    randomness enters training."""

    def __init__(self, l2: float = 1.0, max_iter: int = 500, tol: float = 1e-6, seed: int = 0):
        self.l2 = l2
        self.max_iter = max_iter
        self.tol = tol
        self.seed = seed

    def fit(self, X, y) -> "LogisticRegressionClassifier":
        t0 = time.perf_counter()
        X, y = check_X_y(X, y)
        n, d = X.shape
        w = np.zeros(d)
        b = 0.0

        def objective(w, b):
            p = _sigmoid(X @ w + b)
            return log_loss(p, y) + 0.5 * self.l2 * float(w @ w) / n, p

        loss, p = objective(w, b)
        iterations = 0
        for iterations in range(1, self.max_iter + 1):
            grad_w = X.T @ (p - y) / n + self.l2 * w / n
            grad_b = float(np.mean(p - y))
            grad_sq = float(grad_w @ grad_w) + grad_b**2
            if max(np.max(np.abs(grad_w)), abs(grad_b)) < self.tol:
                iterations -= 1
                break
            step = 1.0
            while step > 1e-12:
                new_loss, new_p = objective(w - step * grad_w, b - step * grad_b)
                if new_loss <= loss - 1e-4 * step * grad_sq:
                    break
                step *= 0.5
            w = w - step * grad_w
            b = b - step * grad_b
            loss, p = new_loss, new_p

        self.coef_ = w
        self.intercept_ = b
        self.feature_dim_ = d
        self.diagnostics_ = [{
            "stage": iterations, "loss": loss,
            "elapsed_ms": int((time.perf_counter() - t0) * 1000),
        }]
        return self

    def score_samples(self, X) -> np.ndarray:
        """Positive-class probability per row."""
        check_is_fitted(self, "coef_")
        X = check_feature_dim(X, self.feature_dim_)
        return _sigmoid(X @ self.coef_ + self.intercept_)

    predict_proba_positive = score_samples

    def predict(self, X, threshold: float = 0.5) -> np.ndarray:
        return (self.score_samples(X) >= threshold).astype(np.int64)


class LinearSvmClassifier(BaseEstimator):
    """Linear SVM trained by per-sample primal subgradient descent on the
    hinge objective, lambda = 1/(c*n), step 1/(lambda*t). The bias is
    trained as an augmented constant feature so it decays with the weights
    instead of freezing at the first huge step. Scores are signed margins,
    not probabilities."""

    def __init__(self, c: float = 1.0, epochs: int = 100, seed: int = 0):
        self.c = c
        self.epochs = epochs
        self.seed = seed

    def fit(self, X, y) -> "LinearSvmClassifier":
        t0 = time.perf_counter()
        X, y = check_X_y(X, y)
        n, d = X.shape
        sign = 2.0 * y - 1.0
        lam = 1.0 / (self.c * n)
        rng = rng_stream(self.seed, _SVM_STREAM)

        Xa = np.hstack([X, np.ones((n, 1))])
        w = np.zeros(d + 1)
        t = 0
        for _ in range(self.epochs):
            for i in rng.permutation(n):
                t += 1
                eta = 1.0 / (lam * t)
                margin = sign[i] * (Xa[i] @ w)
                w *= 1.0 - eta * lam
                if margin < 1.0:
                    w += eta * sign[i] * Xa[i]

        self.coef_ = w[:d].copy()
        self.intercept_ = float(w[d])
        self.feature_dim_ = d
        margins = sign * (Xa @ w)
        hinge = float(np.mean(np.maximum(0.0, 1.0 - margins)))
        self.diagnostics_ = [{
            "stage": self.epochs,
            "loss": hinge + 0.5 * lam * float(w @ w),
            "elapsed_ms": int((time.perf_counter() - t0) * 1000),
        }]
        return self

    def score_samples(self, X) -> np.ndarray:
        """Signed margin per row; >= 0 means positive."""
        check_is_fitted(self, "coef_")
        X = check_feature_dim(X, self.feature_dim_)
        return X @ self.coef_ + self.intercept_

    decision_function = score_samples

    def predict(self, X, threshold: float = 0.0) -> np.ndarray:
        return (self.score_samples(X) >= threshold).astype(np.int64)
