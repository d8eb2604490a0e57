"""Two-hidden-layer perceptron trained with momentum SGD on cross-entropy."""

from __future__ import annotations

import time

import numpy as np

from ..base import BaseEstimator, check_X_y, check_feature_dim, check_is_fitted, rng_stream
from ..errors import DimensionMismatch
from .linear import _sigmoid, log_loss

_MLP_STREAM = 30


class MlpClassifier(BaseEstimator):
    """ReLU hidden layers (128, 64 by default) with a sigmoid output unit.

    Inputs are standardized with statistics learned during fit, weights use
    He initialization from the seeded stream, and training stops early once
    the epoch loss stops improving for `patience` epochs.
    """

    def __init__(self, hidden: tuple = (128, 64), learning_rate: float = 1e-3,
                 momentum: float = 0.9, epochs: int = 200, batch: int = 32,
                 patience: int = 15, min_delta: float = 1e-7,
                 standardize: bool = True, seed: int = 0):
        self.hidden = hidden
        self.learning_rate = learning_rate
        self.momentum = momentum
        self.epochs = epochs
        self.batch = batch
        self.patience = patience
        self.min_delta = min_delta
        self.standardize = standardize
        self.seed = seed

    # -- network core ------------------------------------------------------

    def init_weights(self, feature_dim: int) -> "MlpClassifier":
        """He-initialize all layers for `feature_dim` inputs (fit calls this;
        exposed so gradients can be inspected on an untrained network)."""
        rng = rng_stream(self.seed, _MLP_STREAM)
        sizes = [feature_dim, *self.hidden, 1]
        self.weights_ = []
        self.biases_ = []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            self.weights_.append(rng.normal(0.0, np.sqrt(2.0 / fan_in), size=(fan_in, fan_out)))
            self.biases_.append(np.zeros(fan_out))
        self.feature_dim_ = feature_dim
        self.mean_ = np.zeros(feature_dim)
        self.scale_ = np.ones(feature_dim)
        return self

    def _forward(self, X: np.ndarray):
        """Returns (activations per layer, output probabilities)."""
        acts = [X]
        h = X
        last = len(self.weights_) - 1
        for i, (W, b) in enumerate(zip(self.weights_, self.biases_)):
            z = h @ W + b
            h = _sigmoid(z) if i == last else np.maximum(z, 0.0)
            acts.append(h)
        return acts, h[:, 0]

    def loss_and_gradients(self, X, y):
        """Cross-entropy loss and its gradients w.r.t. every weight and bias.

        Gradients are averaged over the batch: duplicating every sample
        leaves them unchanged.
        """
        if getattr(self, "weights_", None) is None:
            raise RuntimeError("call init_weights or fit first")
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.feature_dim_:
            raise DimensionMismatch(f"expected (N, {self.feature_dim_}) batch, got {X.shape}")
        y = np.asarray(y, dtype=np.float64)
        n = X.shape[0]

        Xs = (X - self.mean_) / self.scale_
        acts, p = self._forward(Xs)
        loss = log_loss(p, y)

        grads_w = [np.zeros_like(W) for W in self.weights_]
        grads_b = [np.zeros_like(b) for b in self.biases_]
        # sigmoid + cross-entropy collapse to (p - y) at the output
        delta = (p - y)[:, None] / n
        for i in range(len(self.weights_) - 1, -1, -1):
            grads_w[i] = acts[i].T @ delta
            grads_b[i] = delta.sum(axis=0)
            if i > 0:
                delta = (delta @ self.weights_[i].T) * (acts[i] > 0.0)
        return loss, grads_w, grads_b

    # -- estimator surface ---------------------------------------------------

    def fit(self, X, y) -> "MlpClassifier":
        t0 = time.perf_counter()
        X, y = check_X_y(X, y)
        n, d = X.shape
        self.init_weights(d)
        if self.standardize:
            self.mean_ = X.mean(axis=0)
            self.scale_ = np.maximum(X.std(axis=0), 1e-8)

        rng = rng_stream(self.seed, _MLP_STREAM, 1)
        vel_w = [np.zeros_like(W) for W in self.weights_]
        vel_b = [np.zeros_like(b) for b in self.biases_]
        self.diagnostics_ = []
        best = np.inf
        stall = 0
        for epoch in range(1, self.epochs + 1):
            order = rng.permutation(n)
            epoch_loss = 0.0
            for start in range(0, n, self.batch):
                batch = order[start : start + self.batch]
                loss, grads_w, grads_b = self.loss_and_gradients(X[batch], y[batch])
                epoch_loss += loss * batch.size
                for i in range(len(self.weights_)):
                    vel_w[i] = self.momentum * vel_w[i] - self.learning_rate * grads_w[i]
                    vel_b[i] = self.momentum * vel_b[i] - self.learning_rate * grads_b[i]
                    self.weights_[i] += vel_w[i]
                    self.biases_[i] += vel_b[i]
            epoch_loss /= n
            self.diagnostics_.append({
                "stage": epoch, "loss": epoch_loss,
                "elapsed_ms": int((time.perf_counter() - t0) * 1000),
            })
            if epoch_loss < best - self.min_delta:
                best = epoch_loss
                stall = 0
            else:
                stall += 1
                if stall >= self.patience:
                    break
        return self

    def score_samples(self, X) -> np.ndarray:
        """Positive-class probability per row."""
        check_is_fitted(self, "weights_")
        X = check_feature_dim(X, self.feature_dim_)
        _, p = self._forward((X - self.mean_) / self.scale_)
        return p

    predict_proba_positive = score_samples

    def predict(self, X, threshold: float = 0.5) -> np.ndarray:
        return (self.score_samples(X) >= threshold).astype(np.int64)
