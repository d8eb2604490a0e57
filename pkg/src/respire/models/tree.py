"""Flat-array decision trees shared by the forest and boosting ensembles.

Splits use midpoint thresholds between adjacent distinct values, scanned
with vectorized prefix sums. Ties resolve to the lowest feature index,
then the lowest threshold, so rebuilding from the same inputs always
yields the same tree.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_DEPTH_CAP = 32


@dataclass
class FlatTree:
    feature: np.ndarray  # int32, -1 at leaves
    threshold: np.ndarray  # float64
    left: np.ndarray  # int32 child ids, -1 at leaves
    right: np.ndarray
    value: np.ndarray  # float64 leaf payload

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf node id for every row, by vectorized level-wise descent."""
        node = np.zeros(X.shape[0], dtype=np.int64)
        active = self.feature[node] >= 0
        while active.any():
            idx = np.flatnonzero(active)
            cur = node[idx]
            go_left = X[idx, self.feature[cur]] <= self.threshold[cur]
            node[idx] = np.where(go_left, self.left[cur], self.right[cur])
            active[idx] = self.feature[node[idx]] >= 0
        return node

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.value[self.apply(X)]

    @property
    def n_nodes(self) -> int:
        return self.feature.size


def grow_tree(
    X: np.ndarray,
    target: np.ndarray,
    *,
    criterion: str = "gini",
    max_depth: int | None = None,
    features_per_split: int | None = None,
    rng: np.random.Generator | None = None,
):
    """Build one tree; returns (FlatTree, leaf node id per training row).

    criterion "gini" treats target as 0/1 classes and stores the majority
    class at leaves (tie -> 1); "mse" fits real-valued targets and stores
    the leaf mean. features_per_split draws that many candidate features
    per node from rng, falling back to a full scan when the drawn subset
    has no valid split.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    n, d = X.shape
    depth_cap = min(max_depth if max_depth is not None else MAX_DEPTH_CAP, MAX_DEPTH_CAP)
    if features_per_split is not None and not 1 <= features_per_split <= d:
        raise ValueError(f"features_per_split must be in [1, {d}], got {features_per_split}")

    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    value: list[float] = []
    sample_leaf = np.full(n, -1, dtype=np.int64)

    def alloc() -> int:
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(0.0)
        return len(feature) - 1

    # depth-first, left child first: children pushed right-then-left
    root = alloc()
    stack = [(np.arange(n), 0, root)]
    while stack:
        idx, depth, node = stack.pop()
        t = target[idx]
        pure = t.max() == t.min()
        if pure or depth >= depth_cap or idx.size < 2:
            _leafify(node, t, criterion, value, sample_leaf, idx)
            continue

        split = None
        if features_per_split is not None and features_per_split < d:
            feats = np.sort(rng.choice(d, size=features_per_split, replace=False))
            split = _best_split(X[np.ix_(idx, feats)], t, criterion)
            if split is not None:
                split = (int(feats[split[0]]), split[1])
        if split is None:
            split = _best_split(X[idx], t, criterion)
        if split is None:
            _leafify(node, t, criterion, value, sample_leaf, idx)
            continue

        f, thr = split
        feature[node] = f
        threshold[node] = thr
        mask = X[idx, f] <= thr
        left_id, right_id = alloc(), alloc()
        left[node], right[node] = left_id, right_id
        stack.append((idx[~mask], depth + 1, right_id))
        stack.append((idx[mask], depth + 1, left_id))

    tree = FlatTree(
        feature=np.asarray(feature, dtype=np.int32),
        threshold=np.asarray(threshold, dtype=np.float64),
        left=np.asarray(left, dtype=np.int32),
        right=np.asarray(right, dtype=np.int32),
        value=np.asarray(value, dtype=np.float64),
    )
    return tree, sample_leaf


def _leafify(node, t, criterion, value, sample_leaf, idx):
    if criterion == "gini":
        value[node] = 1.0 if t.sum() * 2 >= t.size else 0.0
    else:
        value[node] = float(t.mean())
    sample_leaf[idx] = node


def _best_split(Xs: np.ndarray, t: np.ndarray, criterion: str):
    """Best (column, threshold) over all columns of Xs, or None.

    Scans every gap between adjacent distinct sorted values in one pass of
    2-d prefix sums; np.argmin's first-hit rule implements the lowest-index,
    lowest-threshold tie-break because columns and thresholds ascend.
    """
    m, k = Xs.shape
    if m < 2:
        return None
    order = np.argsort(Xs, axis=0, kind="stable")
    sx = np.take_along_axis(Xs, order, axis=0)
    st = t[order]

    valid = sx[:-1] < sx[1:]  # (m-1, k): split between j and j+1 allowed
    if not valid.any():
        return None

    n_left = np.arange(1, m, dtype=np.float64)[:, None]
    n_right = m - n_left
    csum = np.cumsum(st, axis=0)[:-1]  # left-side target sum (or positive count)

    if criterion == "gini":
        p, q = csum, t.sum() - csum
        gini_left = 1.0 - (p**2 + (n_left - p) ** 2) / n_left**2
        gini_right = 1.0 - (q**2 + (n_right - q) ** 2) / n_right**2
        score = (n_left * gini_left + n_right * gini_right) / m
    elif criterion == "mse":
        s_left, s_right = csum, t.sum() - csum
        # minimizing total squared error == maximizing sum of s^2/n terms
        score = -(s_left**2 / n_left + s_right**2 / n_right)
    else:
        raise ValueError(f"unknown criterion {criterion!r}")

    score = np.where(valid, score, np.inf)
    flat = np.argmin(score.T)  # transpose: ties -> lowest column first
    col, pos = divmod(flat, m - 1)
    if not np.isfinite(score[pos, col]):
        return None
    lo, hi = sx[pos, col], sx[pos + 1, col]
    thr = lo + (hi - lo) / 2.0
    if thr >= hi:  # rounding collapsed the midpoint onto the upper value
        thr = lo
    return int(col), float(thr)
