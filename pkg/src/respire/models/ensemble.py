"""Tree ensembles: bagged random forest and logistic-loss gradient boosting."""

from __future__ import annotations

import math
import time

import numpy as np

from ..base import BaseEstimator, check_X_y, check_feature_dim, check_is_fitted, rng_stream
from .linear import _sigmoid, log_loss
from .tree import FlatTree, grow_tree

_FOREST_STREAM = 20
_LEAF_EPS = 1e-12


class RandomForestClassifier(BaseEstimator):
    """Bootstrap-aggregated Gini trees with per-split feature subsampling.

    Tree i draws all its randomness from the stream (seed, i), so training
    order never changes the result. The score is the exact fraction of
    trees voting positive.
    """

    def __init__(self, n_trees: int = 100, max_depth: int | None = None,
                 features_per_split: int | None = None, seed: int = 0):
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.features_per_split = features_per_split
        self.seed = seed

    def fit(self, X, y) -> "RandomForestClassifier":
        t0 = time.perf_counter()
        X, y = check_X_y(X, y)
        n, d = X.shape
        k = self.features_per_split or max(1, int(math.isqrt(d)))
        self.trees_ = []
        for i in range(self.n_trees):
            rng = rng_stream(self.seed, _FOREST_STREAM, i)
            bootstrap = rng.integers(0, n, size=n)
            tree, _ = grow_tree(
                X[bootstrap], y[bootstrap].astype(np.float64),
                criterion="gini", max_depth=self.max_depth,
                features_per_split=min(k, d), rng=rng,
            )
            self.trees_.append(tree)
        self.feature_dim_ = d
        self.diagnostics_ = [{
            "stage": self.n_trees,
            "loss": log_loss(self.score_samples(X), y.astype(np.float64)),
            "elapsed_ms": int((time.perf_counter() - t0) * 1000),
        }]
        return self

    def score_samples(self, X) -> np.ndarray:
        """Fraction of trees voting positive, in [0, 1]."""
        check_is_fitted(self, "trees_")
        X = check_feature_dim(X, self.feature_dim_)
        votes = np.zeros(X.shape[0])
        for tree in self.trees_:
            votes += tree.predict(X)
        return votes / len(self.trees_)

    predict_proba_positive = score_samples

    def predict(self, X, threshold: float = 0.5) -> np.ndarray:
        return (self.score_samples(X) >= threshold).astype(np.int64)


class GradientBoostingClassifier(BaseEstimator):
    """Stagewise boosting of shallow regression trees on the logistic loss.

    Each stage fits a depth-limited tree to the residuals y - p and takes a
    Newton step per leaf. If a stage would raise the training loss, its
    contribution is halved until the loss is non-increasing (dropping the
    stage entirely as a last resort), so the recorded loss curve is
    monotone by construction.
    """

    def __init__(self, n_stages: int = 100, learning_rate: float = 0.1,
                 tree_depth: int = 3, seed: int = 0):
        self.n_stages = n_stages
        self.learning_rate = learning_rate
        self.tree_depth = tree_depth
        self.seed = seed

    def fit(self, X, y) -> "GradientBoostingClassifier":
        t0 = time.perf_counter()
        X, y = check_X_y(X, y)
        yf = y.astype(np.float64)
        prior = float(np.mean(yf))
        self.base_score_ = math.log(prior / (1.0 - prior))
        self.trees_ = []
        self.feature_dim_ = X.shape[1]
        self.diagnostics_ = []

        raw = np.full(X.shape[0], self.base_score_)
        loss = log_loss(_sigmoid(raw), yf)
        for stage in range(self.n_stages):
            p = _sigmoid(raw)
            residual = yf - p
            tree, leaf_of = grow_tree(X, residual, criterion="mse",
                                      max_depth=self.tree_depth)
            hessian = p * (1.0 - p)
            leaves = np.flatnonzero(tree.feature < 0)
            gamma = np.zeros(tree.n_nodes)
            for leaf in leaves:
                members = leaf_of == leaf
                gamma[leaf] = residual[members].sum() / max(hessian[members].sum(), _LEAF_EPS)

            # fold the step size into the leaf values; halve while the
            # training loss would increase
            scale = self.learning_rate
            for _ in range(20):
                candidate = raw + scale * gamma[leaf_of]
                new_loss = log_loss(_sigmoid(candidate), yf)
                if new_loss <= loss:
                    break
                scale *= 0.5
            else:
                scale = 0.0
                candidate, new_loss = raw, loss
            tree.value = scale * gamma
            self.trees_.append(tree)
            raw, loss = candidate, new_loss
            self.diagnostics_.append({
                "stage": stage + 1, "loss": loss,
                "elapsed_ms": int((time.perf_counter() - t0) * 1000),
            })
        return self

    def score_samples(self, X) -> np.ndarray:
        """Positive-class probability per row."""
        check_is_fitted(self, "trees_")
        X = check_feature_dim(X, self.feature_dim_)
        raw = np.full(X.shape[0], self.base_score_)
        for tree in self.trees_:
            raw += tree.predict(X)
        return _sigmoid(raw)

    predict_proba_positive = score_samples

    def predict(self, X, threshold: float = 0.5) -> np.ndarray:
        return (self.score_samples(X) >= threshold).astype(np.int64)
