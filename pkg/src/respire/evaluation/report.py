"""Per-model evaluation reports and their on-disk forms."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..base import rng_stream
from ..errors import SingleClassData
from .metrics import ConfusionMatrix, Metrics, RocCurve, confusion, metrics, roc_auc

_BARCODE_STREAM = 60

METRICS_JSON_KEYS = [
    "accuracy", "precision_pos", "recall_pos", "f1_pos",
    "precision_neg", "recall_neg", "f1_neg", "auc", "tp", "fp", "tn", "fn",
]


@dataclass
class Misclassification:
    clip_id: str
    true_label: int
    predicted: int
    score: float


@dataclass
class EvalReport:
    model_kind: str
    threshold: float
    confusion: ConfusionMatrix
    metrics: Metrics
    roc: RocCurve
    misclassified: list  # Misclassification, most confident mistakes first


def build_report(model_kind: str, y_true, scores, clip_ids, threshold: float) -> EvalReport:
    """Assemble the full report for one model's test-set scores.

    Predictions are score >= threshold (ties count as positive);
    misclassifications sort by descending distance from the threshold.
    """
    y_true = np.asarray(y_true, dtype=np.int64)
    scores = np.asarray(scores, dtype=np.float64)
    y_pred = (scores >= threshold).astype(np.int64)
    cm = confusion(y_true, y_pred)
    wrong = np.flatnonzero(y_true != y_pred)
    wrong = wrong[np.argsort(-np.abs(scores[wrong] - threshold), kind="stable")]
    miss = [
        Misclassification(clip_id=clip_ids[i], true_label=int(y_true[i]),
                          predicted=int(y_pred[i]), score=float(scores[i]))
        for i in wrong
    ]
    return EvalReport(
        model_kind=model_kind,
        threshold=threshold,
        confusion=cm,
        metrics=metrics(cm),
        roc=roc_auc(y_true, scores),
        misclassified=miss,
    )


def metrics_dict(report: EvalReport) -> dict:
    m, cm = report.metrics, report.confusion
    out = {
        "accuracy": m.accuracy,
        "precision_pos": m.precision_pos, "recall_pos": m.recall_pos, "f1_pos": m.f1_pos,
        "precision_neg": m.precision_neg, "recall_neg": m.recall_neg, "f1_neg": m.f1_neg,
        "auc": report.roc.auc,
        "tp": cm.tp, "fp": cm.fp, "tn": cm.tn, "fn": cm.fn,
    }
    assert list(out) == METRICS_JSON_KEYS
    return out


def write_metrics_json(report: EvalReport, path) -> None:
    Path(path).write_text(json.dumps(metrics_dict(report), indent=2) + "\n")


def export_misclassified(report: EvalReport, clips_dir, out_csv) -> None:
    """CSV of mistakes with confidence scores and playable audio paths."""
    clips_dir = Path(clips_dir)
    if not clips_dir.is_dir():
        raise FileNotFoundError(f"clips directory {clips_dir} does not exist")
    with open(out_csv, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["clip_id", "true_label", "predicted", "score", "audio_path"])
        for m in report.misclassified:
            writer.writerow([
                m.clip_id, m.true_label, m.predicted, f"{m.score:.6f}",
                str(clips_dir / f"{m.clip_id}.wav"),
            ])


def barcode_data(rows: np.ndarray, labels: np.ndarray, clip_ids, sample: int = 20, seed: int = 0):
    """Sampled embedding rows normalized for barcode rendering.

    Draws up to `sample` rows per class, positives first, and min-max
    scales each row to [0, 1]; constant rows map to 0.5 everywhere.
    Returns a list of (clip_id, label, intensities) tuples.
    """
    labels = np.asarray(labels, dtype=np.int64)
    if np.unique(labels).size < 2:
        raise SingleClassData("barcode needs both classes")
    rng = rng_stream(seed, _BARCODE_STREAM)
    out = []
    for cls in (1, 0):
        members = np.flatnonzero(labels == cls)
        chosen = rng.permutation(members)[: min(sample, members.size)]
        for i in np.sort(chosen):
            row = rows[i].astype(np.float64)
            lo, hi = row.min(), row.max()
            if hi > lo:
                intensity = (row - lo) / (hi - lo)
            else:
                intensity = np.full_like(row, 0.5)
            out.append((clip_ids[i], int(cls), intensity))
    return out
