"""Confusion counts, derived classification metrics, and ROC/AUC."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import LengthMismatch, SingleClassData


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class Metrics:
    accuracy: float
    precision_pos: float
    recall_pos: float
    f1_pos: float
    precision_neg: float
    recall_neg: float
    f1_neg: float
    zero_division: bool  # any 0/0 was coerced to 0


@dataclass(frozen=True)
class RocCurve:
    points: tuple  # ((fpr, tpr), ...) from (0,0) to (1,1)
    auc: float


def confusion(y_true, y_pred) -> ConfusionMatrix:
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    if y_true.shape != y_pred.shape or y_true.ndim != 1 or y_true.size == 0:
        raise LengthMismatch(f"shapes {y_true.shape} vs {y_pred.shape}")
    return ConfusionMatrix(
        tp=int(np.sum((y_true == 1) & (y_pred == 1))),
        fp=int(np.sum((y_true == 0) & (y_pred == 1))),
        tn=int(np.sum((y_true == 0) & (y_pred == 0))),
        fn=int(np.sum((y_true == 1) & (y_pred == 0))),
    )


def metrics(cm: ConfusionMatrix) -> Metrics:
    """Standard per-class metrics; 0/0 is defined as 0 and flagged."""
    if cm.total == 0:
        raise ValueError("empty confusion matrix")
    flagged = False

    def safe(num: int, den: int) -> float:
        nonlocal flagged
        if den == 0:
            flagged = True
            return 0.0
        return num / den

    precision_pos = safe(cm.tp, cm.tp + cm.fp)
    recall_pos = safe(cm.tp, cm.tp + cm.fn)
    precision_neg = safe(cm.tn, cm.tn + cm.fn)
    recall_neg = safe(cm.tn, cm.tn + cm.fp)

    def f1(p: float, r: float) -> float:
        nonlocal flagged
        if p + r == 0.0:
            flagged = True
            return 0.0
        return 2.0 * p * r / (p + r)

    return Metrics(
        accuracy=(cm.tp + cm.tn) / cm.total,
        precision_pos=precision_pos,
        recall_pos=recall_pos,
        f1_pos=f1(precision_pos, recall_pos),
        precision_neg=precision_neg,
        recall_neg=recall_neg,
        f1_neg=f1(precision_neg, recall_neg),
        zero_division=flagged,
    )


def roc_auc(y_true, scores) -> RocCurve:
    """ROC swept over distinct scores descending, AUC by trapezoid rule.

    Ties share one point, which makes the trapezoid area equal the
    Mann-Whitney statistic with half credit for tied pairs.
    """
    y_true = np.asarray(y_true, dtype=np.int64)
    scores = np.asarray(scores, dtype=np.float64)
    if y_true.shape != scores.shape or y_true.ndim != 1:
        raise LengthMismatch(f"shapes {y_true.shape} vs {scores.shape}")
    if not np.all(np.isfinite(scores)):
        raise ValueError("scores must be finite")
    n_pos = int(np.sum(y_true == 1))
    n_neg = y_true.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClassData("ROC requires both classes")

    order = np.argsort(-scores, kind="stable")
    sorted_true = y_true[order]
    sorted_scores = scores[order]
    # one sweep point after each tie group
    boundary = np.flatnonzero(np.diff(sorted_scores)) + 1
    cuts = np.concatenate([boundary, [scores.size]])
    cum_tp = np.cumsum(sorted_true)[cuts - 1]
    cum_fp = cuts - cum_tp

    tpr = np.concatenate([[0.0], cum_tp / n_pos])
    fpr = np.concatenate([[0.0], cum_fp / n_neg])
    auc = float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1])) / 2.0)
    points = tuple(zip(fpr.tolist(), tpr.tolist()))
    return RocCurve(points=points, auc=auc)
