"""Self-contained SVG figures plus machine-readable series.

Hand-rolled on purpose: the figures stay diffable, dependency-free, and
byte-identical across reruns.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..models import DISPLAY_NAMES
from .pca import pca_project
from .report import EvalReport, barcode_data

_MODEL_COLORS = {
    "svm": "#1f77b4",
    "logreg": "#ff7f0e",
    "forest": "#2ca02c",
    "boosting": "#d62728",
    "mlp": "#9467bd",
}
_POS_COLOR = "#d62728"  # positive = red
_NEG_COLOR = "#1f77b4"  # negative = blue


def _svg(width: int, height: int, body: list) -> str:
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif">\n'
        f'<rect width="{width}" height="{height}" fill="white"/>\n'
    )
    return head + "\n".join(body) + "\n</svg>\n"


def _text(x, y, s, size=12, anchor="start", rotate=None, bold=False):
    extra = f' transform="rotate(-90 {x} {y})"' if rotate else ""
    weight = ' font-weight="bold"' if bold else ""
    return (f'<text x="{x}" y="{y}" font-size="{size}" text-anchor="{anchor}"'
            f'{weight}{extra}>{s}</text>')


class _Axes:
    """Maps unit-square data coordinates onto a margin-padded pixel frame."""

    def __init__(self, width=480, height=480, margin=60):
        self.w, self.h, self.m = width, height, margin

    def x(self, u: float) -> float:
        return round(self.m + u * (self.w - 2 * self.m), 2)

    def y(self, v: float) -> float:
        return round(self.h - self.m - v * (self.h - 2 * self.m), 2)

    def frame(self, title: str, xlabel: str, ylabel: str) -> list:
        parts = [
            f'<rect x="{self.m}" y="{self.m}" width="{self.w - 2 * self.m}" '
            f'height="{self.h - 2 * self.m}" fill="none" stroke="#333"/>',
            _text(self.w / 2, self.m / 2 + 6, title, size=14, anchor="middle", bold=True),
            _text(self.w / 2, self.h - self.m / 3, xlabel, anchor="middle"),
            _text(self.m / 3, self.h / 2, ylabel, anchor="middle", rotate=True),
        ]
        for tick in (0.0, 0.25, 0.5, 0.75, 1.0):
            parts.append(_text(self.x(tick), self.h - self.m + 16, f"{tick:g}", size=10, anchor="middle"))
            parts.append(_text(self.m - 6, self.y(tick) + 4, f"{tick:g}", size=10, anchor="end"))
        return parts


def roc_overlay_svg(reports: list[EvalReport]) -> str:
    ax = _Axes()
    body = ax.frame("ROC curves", "False positive rate", "True positive rate")
    body.append(
        f'<line x1="{ax.x(0)}" y1="{ax.y(0)}" x2="{ax.x(1)}" y2="{ax.y(1)}" '
        f'stroke="#bbb" stroke-dasharray="4 3"/>'
    )
    for i, report in enumerate(reports):
        color = _MODEL_COLORS.get(report.model_kind, "#444")
        pts = " ".join(f"{ax.x(fpr)},{ax.y(tpr)}" for fpr, tpr in report.roc.points)
        body.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        label = f"{DISPLAY_NAMES.get(report.model_kind, report.model_kind)} (AUC = {report.roc.auc:.3f})"
        ly = ax.m + 18 + 16 * i
        body.append(f'<line x1="{ax.w - ax.m - 180}" y1="{ly - 4}" x2="{ax.w - ax.m - 160}" '
                    f'y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        body.append(_text(ax.w - ax.m - 154, ly, label, size=11))
    return _svg(ax.w, ax.h, body)


def confusion_svg(report: EvalReport) -> str:
    cm = report.confusion
    width, height = 420, 420
    cells = [
        (0, 0, cm.tn, "True negative"), (1, 0, cm.fp, "False positive"),
        (0, 1, cm.fn, "False negative"), (1, 1, cm.tp, "True positive"),
    ]
    peak = max(cm.tp, cm.fp, cm.tn, cm.fn, 1)
    size, x0, y0 = 130, 90, 90
    body = [_text(width / 2, 40, f"Confusion matrix: {DISPLAY_NAMES.get(report.model_kind, report.model_kind)}",
                  size=14, anchor="middle", bold=True)]
    for col, row, count, name in cells:
        shade = int(255 - 175 * count / peak)
        x, y = x0 + col * size, y0 + row * size
        body.append(f'<rect x="{x}" y="{y}" width="{size}" height="{size}" '
                    f'fill="rgb({shade},{shade},255)" stroke="#333"/>')
        text_color = "#000" if shade > 120 else "#fff"
        body.append(f'<text x="{x + size / 2}" y="{y + size / 2}" font-size="22" text-anchor="middle" '
                    f'fill="{text_color}">{count}</text>')
        body.append(f'<text x="{x + size / 2}" y="{y + size / 2 + 22}" font-size="10" '
                    f'text-anchor="middle" fill="{text_color}">{name}</text>')
    body.append(_text(x0 + size, y0 + 2 * size + 30, "Predicted", anchor="middle"))
    body.append(_text(x0 + size / 2, y0 + 2 * size + 14, "negative", size=10, anchor="middle"))
    body.append(_text(x0 + 1.5 * size, y0 + 2 * size + 14, "positive", size=10, anchor="middle"))
    body.append(_text(x0 - 30, y0 + size, "Actual", anchor="middle", rotate=True))
    body.append(_text(x0 - 12, y0 + size / 2, "neg", size=10, anchor="end"))
    body.append(_text(x0 - 12, y0 + 1.5 * size, "pos", size=10, anchor="end"))
    return _svg(width, height, body)


def pca_scatter_svg(projection: np.ndarray, labels: np.ndarray, variance_ratios) -> str:
    ax = _Axes()
    spans = []
    for dim in range(2):
        lo, hi = float(projection[:, dim].min()), float(projection[:, dim].max())
        pad = (hi - lo) * 0.05 or 1.0
        spans.append((lo - pad, hi - lo + 2 * pad))
    title = (f"PCA of embeddings (PC1 {variance_ratios[0] * 100:.1f}%, "
             f"PC2 {variance_ratios[1] * 100:.1f}%)")
    body = ax.frame(title, "PC1", "PC2")
    for (px, py), label in zip(projection, labels):
        u = (px - spans[0][0]) / spans[0][1]
        v = (py - spans[1][0]) / spans[1][1]
        color = _POS_COLOR if label == 1 else _NEG_COLOR
        body.append(f'<circle cx="{ax.x(u)}" cy="{ax.y(v)}" r="3" fill="{color}" fill-opacity="0.6"/>')
    body.append(f'<circle cx="{ax.w - ax.m - 150}" cy="{ax.m + 14}" r="4" fill="{_POS_COLOR}"/>')
    body.append(_text(ax.w - ax.m - 140, ax.m + 18, "positive", size=11))
    body.append(f'<circle cx="{ax.w - ax.m - 150}" cy="{ax.m + 32}" r="4" fill="{_NEG_COLOR}"/>')
    body.append(_text(ax.w - ax.m - 140, ax.m + 36, "negative", size=11))
    return _svg(ax.w, ax.h, body)


def barcode_svg(bars: list) -> str:
    """Rows of 512 intensity cells, red for positive clips, blue for negative."""
    n_rows = len(bars)
    cell_w, row_h, left, top = 1.5, 10, 120, 50
    width = int(left + 512 * cell_w + 40)
    height = int(top + n_rows * row_h + 40)
    body = [_text(width / 2, 28, "Embedding barcode (rows = clips)", size=14, anchor="middle", bold=True)]
    for r, (clip_id, label, intensity) in enumerate(bars):
        y = top + r * row_h
        base = (212, 39, 40) if label == 1 else (31, 119, 180)
        body.append(_text(left - 6, y + row_h - 2, clip_id[-18:], size=7, anchor="end"))
        for c in range(0, 512):
            alpha = float(intensity[c])
            red = int(255 - (255 - base[0]) * alpha)
            green = int(255 - (255 - base[1]) * alpha)
            blue = int(255 - (255 - base[2]) * alpha)
            body.append(f'<rect x="{round(left + c * cell_w, 1)}" y="{y}" width="{cell_w}" '
                        f'height="{row_h - 1}" fill="rgb({red},{green},{blue})"/>')
    return _svg(width, height, body)


def emit_plots(reports: list[EvalReport], embeddings: np.ndarray, labels: np.ndarray,
               clip_ids, out_dir, barcode_sample: int = 20, seed: int = 0) -> list[str]:
    """Write the full results figure set plus series.json; returns filenames."""
    if not reports:
        raise ValueError("at least one report is required")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    (out_dir / "roc_all.svg").write_text(roc_overlay_svg(reports))
    written.append("roc_all.svg")
    for report in reports:
        name = f"confusion_{report.model_kind}.svg"
        (out_dir / name).write_text(confusion_svg(report))
        written.append(name)

    projection, ratios, _ = pca_project(embeddings, k=2)
    (out_dir / "pca.svg").write_text(pca_scatter_svg(projection, labels, ratios))
    written.append("pca.svg")

    bars = barcode_data(embeddings, labels, clip_ids, sample=barcode_sample, seed=seed)
    (out_dir / "barcode.svg").write_text(barcode_svg(bars))
    written.append("barcode.svg")

    series = {
        "roc": {
            r.model_kind: {"points": [list(p) for p in r.roc.points], "auc": r.roc.auc}
            for r in reports
        },
        "confusion": {
            r.model_kind: {"tp": r.confusion.tp, "fp": r.confusion.fp,
                           "tn": r.confusion.tn, "fn": r.confusion.fn}
            for r in reports
        },
        "pca": {
            "projection": projection.tolist(),
            "labels": labels.tolist(),
            "explained_variance_ratio": ratios.tolist(),
        },
        "barcode": [
            {"clip_id": clip_id, "label": label, "intensity": intensity.tolist()}
            for clip_id, label, intensity in bars
        ],
    }
    (out_dir / "series.json").write_text(json.dumps(series) + "\n")
    written.append("series.json")
    return written
