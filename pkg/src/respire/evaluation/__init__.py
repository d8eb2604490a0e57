"""Splitting, metrics, projections, and report emission."""

from .metrics import ConfusionMatrix, Metrics, RocCurve, confusion, metrics, roc_auc
from .pca import PowerIterationPCA, pca_project
from .report import (
    METRICS_JSON_KEYS,
    EvalReport,
    Misclassification,
    barcode_data,
    build_report,
    export_misclassified,
    metrics_dict,
    write_metrics_json,
)
from .split import stratified_split
from .svgplot import emit_plots

__all__ = [
    "ConfusionMatrix", "Metrics", "RocCurve", "confusion", "metrics", "roc_auc",
    "PowerIterationPCA", "pca_project", "stratified_split",
    "EvalReport", "Misclassification", "build_report", "metrics_dict",
    "write_metrics_json", "export_misclassified", "barcode_data",
    "METRICS_JSON_KEYS", "emit_plots",
]
