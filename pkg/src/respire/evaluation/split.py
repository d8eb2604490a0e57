"""Stratified train/test splitting, optionally at group granularity."""

from __future__ import annotations

import numpy as np

from ..base import rng_stream
from ..errors import LengthMismatch, SingleClassData

_SPLIT_STREAM = 40


def stratified_split(labels, ratio: float = 0.8, seed: int = 0, group_ids=None):
    """Split indices so each class lands in train at close to `ratio`.

    Per-class train counts are round(ratio * n_class), which keeps the
    deviation under one sample. With group_ids no group straddles the
    split: whole groups (labeled by their majority class) are dealt to the
    train side until its per-class quota is met, so the ratio is then
    best-effort. Returns sorted (train_indices, test_indices).
    """
    labels = np.asarray(labels, dtype=np.int64)
    if not 0.0 < ratio < 1.0:
        raise ValueError(f"ratio must be in (0, 1), got {ratio}")
    classes = np.unique(labels)
    if classes.size < 2:
        raise SingleClassData("both classes are required to stratify")
    rng = rng_stream(seed, _SPLIT_STREAM)

    if group_ids is None:
        train = []
        for cls in classes:
            members = np.flatnonzero(labels == cls)
            n_train = int(round(ratio * members.size))
            n_train = min(max(n_train, 1), members.size - 1)  # keep both sides non-empty
            train.append(rng.permutation(members)[:n_train])
        train_idx = np.sort(np.concatenate(train))
    else:
        group_ids = np.asarray(group_ids)
        if group_ids.shape != labels.shape:
            raise LengthMismatch("group_ids must align with labels")
        train_groups = []
        order = {}  # group -> first occurrence, for deterministic listing
        for i, g in enumerate(group_ids):
            order.setdefault(g, i)
        groups = sorted(order, key=order.get)
        group_label = {}
        for g in groups:
            members = labels[group_ids == g]
            group_label[g] = int(members.sum() * 2 >= members.size)  # majority, tie -> 1
        for cls in classes:
            candidates = [g for g in groups if group_label[g] == cls]
            rng.shuffle(candidates)
            quota = ratio * sum(np.count_nonzero(group_ids == g) for g in candidates)
            filled = 0
            for g in candidates:
                size = int(np.count_nonzero(group_ids == g))
                if filled < quota and filled + size <= quota + size / 2:
                    train_groups.append(g)
                    filled += size
        chosen = set(train_groups)
        train_idx = np.sort(np.flatnonzero([g in chosen for g in group_ids]))

    mask = np.zeros(labels.size, dtype=bool)
    mask[train_idx] = True
    test_idx = np.flatnonzero(~mask)
    return train_idx, test_idx
