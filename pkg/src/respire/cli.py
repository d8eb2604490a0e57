"""Stage-oriented command line: ingest -> segment -> embed -> train ->
evaluate, plus the review service. Each stage reads and writes plain files
under the work directory, so stages can be rerun or swapped independently.

Exit codes: 0 ok, 2 corpus problem, 3 embedding provider unavailable,
4 bad data, 5 review port busy.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import audio as audiomod
from . import models as modelsmod
from .dataset import AnnotationSchema, DEFAULT_SCHEMA, filter_quality, scan_corpus, write_manifest
from .embed import EmbeddingMatrix, RemoteProvider, SurrogateProvider, embed_batch
from .errors import (
    EmptyCorpus,
    ProviderUnavailable,
    RespireError,
    SingleClassData,
    UnknownClipId,
)
from .evaluation import (
    build_report,
    emit_plots,
    export_misclassified,
    stratified_split,
    write_metrics_json,
)
from .review import ReviewState, apply_verdicts, load_review_queue, make_server

log = logging.getLogger("respire")

EXIT_OK = 0
EXIT_CORPUS = 2
EXIT_PROVIDER = 3
EXIT_DATA = 4
EXIT_PORT = 5

CLIPS_DIR = "asthma_clips"
CLIPS_METADATA = "clips_metadata.csv"
MANIFEST = "manifest.csv"
SPLIT_FILE = "split.json"
MODELS_DIR = "models"
RESULTS_DIR = "results"
VERDICT_LOG = "verdicts.jsonl"
AUDIT_LOG = "relabel_audit.jsonl"
DIAGNOSTICS = "train_diagnostics.jsonl"


@dataclass
class PipelineConfig:
    corpus_root: str | None = None
    work_dir: str = "work"
    schema_file: str | None = None
    hop_ms: int = 1000
    crackle_policy: str = "exclude"
    pad: str = "tail"
    provider: str = "surrogate"
    endpoint: str | None = None
    embed_batch: int = 32
    timeout_ms: int = 30_000
    seed: int = 0
    ratio: float = 0.8
    group_by: str = "none"  # none | recording | patient
    models: list = field(default_factory=lambda: list(modelsmod.ALL_KINDS))
    train: dict = field(default_factory=dict)  # TrainConfig overrides
    review_port: int = 8765
    review_model: str | None = None
    ui_dir: str | None = None

    @classmethod
    def load(cls, path) -> "PipelineConfig":
        raw = json.loads(Path(path).read_text())
        cfg = cls()
        for key, value in raw.items():
            if not hasattr(cfg, key):
                raise ValueError(f"unknown config key {key!r}")
            setattr(cfg, key, value)
        return cfg

    def train_config(self) -> modelsmod.TrainConfig:
        cfg = modelsmod.TrainConfig.from_dict(self.train)
        cfg.seed = self.seed
        return cfg

    def schema(self) -> AnnotationSchema:
        return AnnotationSchema.from_json(self.schema_file) if self.schema_file else DEFAULT_SCHEMA


def _apply_env(cfg: PipelineConfig) -> None:
    if os.environ.get("EMBED_ENDPOINT"):
        cfg.endpoint = os.environ["EMBED_ENDPOINT"]
    if os.environ.get("EMBED_BATCH"):
        cfg.embed_batch = int(os.environ["EMBED_BATCH"])
    if os.environ.get("EMBED_TIMEOUT_MS"):
        cfg.timeout_ms = int(os.environ["EMBED_TIMEOUT_MS"])


# -- stages -----------------------------------------------------------------

def cmd_ingest(cfg: PipelineConfig) -> int:
    work = _work_dir(cfg)
    recordings = scan_corpus(cfg.corpus_root, cfg.schema())
    kept = filter_quality(recordings)
    write_manifest(kept, work / MANIFEST)
    n_events = sum(len(r.events) for r in kept)
    print(f"ingest: {len(recordings)} recordings scanned, "
          f"{len(kept)} kept after quality filter, {n_events} events -> {work / MANIFEST}")
    return EXIT_OK


def cmd_segment(cfg: PipelineConfig) -> int:
    work = _work_dir(cfg)
    recordings = filter_quality(scan_corpus(cfg.corpus_root, cfg.schema()))
    clips, rows = audiomod.build_clip_set(
        recordings, hop_ms=cfg.hop_ms,
        crackle_policy=audiomod.CracklePolicy(cfg.crackle_policy), pad=cfg.pad,
    )
    audiomod.write_clips(clips, work / CLIPS_DIR)
    audiomod.write_clip_metadata(rows, work / CLIPS_METADATA)
    n_pos = sum(1 for c in clips if c.label is audiomod.BinaryLabel.POSITIVE)
    print(f"segment: {len(clips)} clips ({n_pos} positive, {len(clips) - n_pos} negative) "
          f"-> {work / CLIPS_DIR}")
    return EXIT_OK


def cmd_embed(cfg: PipelineConfig) -> int:
    work = _work_dir(cfg)
    rows = audiomod.read_clip_metadata(work / CLIPS_METADATA)
    clips = _load_clips(work / CLIPS_DIR, rows)
    if cfg.provider == "remote":
        if not cfg.endpoint:
            raise ProviderUnavailable("remote provider needs --endpoint or EMBED_ENDPOINT")
        provider = RemoteProvider(cfg.endpoint, timeout_ms=cfg.timeout_ms)
    else:
        provider = SurrogateProvider()
    matrix = embed_batch(provider, clips, batch_size=cfg.embed_batch)
    if len(matrix) == 0:
        raise SingleClassData("no clips to embed")
    matrix.save(work)
    print(f"embed: {len(matrix)} x {matrix.rows.shape[1]} embeddings "
          f"({provider.name}) -> {work}")
    return EXIT_OK


def cmd_train(cfg: PipelineConfig) -> int:
    work = _work_dir(cfg)
    matrix = EmbeddingMatrix.load(work)
    group_ids = _group_ids(cfg.group_by, matrix.clip_ids)
    train_idx, test_idx = stratified_split(matrix.labels, ratio=cfg.ratio,
                                           seed=cfg.seed, group_ids=group_ids)
    (work / SPLIT_FILE).write_text(json.dumps({
        "seed": cfg.seed, "ratio": cfg.ratio, "group_by": cfg.group_by,
        "train": train_idx.tolist(), "test": test_idx.tolist(),
    }, indent=1) + "\n")

    models_dir = work / MODELS_DIR
    models_dir.mkdir(exist_ok=True)
    train_cfg = cfg.train_config()
    X, y = matrix.rows[train_idx].astype(np.float64), matrix.labels[train_idx]
    with open(work / DIAGNOSTICS, "w") as diag:
        for kind in cfg.models:
            model = modelsmod.fit_classifier(kind, X, y, train_cfg)
            modelsmod.save_model(model, models_dir / f"{kind}.rspm")
            for entry in model.diagnostics_:
                diag.write(json.dumps({"model": kind, **entry}) + "\n")
            print(f"train: {kind} fitted on {len(train_idx)} clips "
                  f"(final loss {model.diagnostics_[-1]['loss']:.4f}) "
                  f"-> {models_dir / f'{kind}.rspm'}")
    return EXIT_OK


def cmd_evaluate(cfg: PipelineConfig) -> int:
    work = _work_dir(cfg)
    matrix = EmbeddingMatrix.load(work)
    split = json.loads((work / SPLIT_FILE).read_text())
    test_idx = np.asarray(split["test"], dtype=np.int64)
    results = work / RESULTS_DIR
    results.mkdir(exist_ok=True)

    reports = []
    for model_file in sorted((work / MODELS_DIR).glob("*.rspm")):
        kind = model_file.stem
        model = modelsmod.load_model(model_file)
        scores = model.score_samples(matrix.rows[test_idx].astype(np.float64))
        report = build_report(kind, matrix.labels[test_idx], scores,
                              [matrix.clip_ids[i] for i in test_idx],
                              threshold=modelsmod.decision_threshold(kind))
        write_metrics_json(report, results / f"metrics_{kind}.json")
        export_misclassified(report, work / CLIPS_DIR, results / f"misclassified_{kind}.csv")
        reports.append(report)
        print(f"evaluate: {kind} accuracy {report.metrics.accuracy:.3f} "
              f"auc {report.roc.auc:.3f} ({len(report.misclassified)} misclassified)")
    if not reports:
        raise SingleClassData(f"no trained models under {work / MODELS_DIR}")

    emit_plots(reports, matrix.rows.astype(np.float64), matrix.labels,
               matrix.clip_ids, results, seed=cfg.seed)
    print(f"evaluate: results -> {results}")
    return EXIT_OK


def cmd_review_serve(cfg: PipelineConfig) -> int:
    work = _work_dir(cfg)
    kind = cfg.review_model or _best_model(work / RESULTS_DIR)
    queue = load_review_queue(work / RESULTS_DIR / f"misclassified_{kind}.csv")
    state = ReviewState(
        queue=queue,
        clips_dir=work / CLIPS_DIR,
        verdict_log=work / VERDICT_LOG,
        ui_dir=Path(cfg.ui_dir) if cfg.ui_dir else None,
    )
    try:
        server = make_server(state, port=cfg.review_port)
    except OSError as exc:
        print(f"error: cannot bind port {cfg.review_port}: {exc}", file=sys.stderr)
        return EXIT_PORT
    print(f"review: serving {len(queue)} {kind} misclassifications "
          f"on http://127.0.0.1:{cfg.review_port} (Ctrl-C to stop)")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return EXIT_OK


def cmd_review_apply(cfg: PipelineConfig) -> int:
    work = _work_dir(cfg)
    audit = apply_verdicts(work / VERDICT_LOG, work / "labels.npy",
                           work / "filenames.txt", work / AUDIT_LOG)
    changed = sum(1 for a in audit if a["old_label"] != a["new_label"])
    print(f"review apply: {len(audit)} verdicts, {changed} labels changed, "
          f"audit -> {work / AUDIT_LOG}")
    return EXIT_OK


def cmd_run_all(cfg: PipelineConfig) -> int:
    for stage in (cmd_ingest, cmd_segment, cmd_embed, cmd_train, cmd_evaluate):
        code = stage(cfg)
        if code != EXIT_OK:
            return code
    return EXIT_OK


# -- helpers ----------------------------------------------------------------

def _work_dir(cfg: PipelineConfig) -> Path:
    work = Path(cfg.work_dir)
    work.mkdir(parents=True, exist_ok=True)
    return work


def _load_clips(clips_dir: Path, rows: list[dict]):
    from .audio import BinaryLabel, Clip
    from .dataset import EventLabel
    from .wavio import read_wav

    clips = []
    for row in rows:
        w = read_wav(clips_dir / f"{row['clip_id']}.wav")
        clips.append(Clip(
            samples=w.samples.astype(np.float32),
            label=BinaryLabel(row["binary_label"]),
            source=row["source"],
            event_index=int(row["event_index"]),
            window_offset_ms=int(row["window_offset_ms"]),
            padded_samples=int(row["padded_samples"]),
            event_label=EventLabel(row["event_label"]),
        ))
    return clips


def _group_ids(group_by: str, clip_ids: list[str]):
    if group_by == "none":
        return None
    sources = [clip_id.rsplit("_", 2)[0] for clip_id in clip_ids]
    if group_by == "recording":
        return np.asarray(sources)
    if group_by == "patient":
        return np.asarray([s.split("_", 1)[0] for s in sources])
    raise ValueError(f"unknown group_by {group_by!r}")


def _best_model(results_dir: Path) -> str:
    """Default review target: the evaluated model with the highest AUC."""
    best_kind, best_auc = None, -1.0
    for path in sorted(results_dir.glob("metrics_*.json")):
        doc = json.loads(path.read_text())
        if doc["auc"] > best_auc:
            best_kind, best_auc = path.stem[len("metrics_"):], doc["auc"]
    if best_kind is None:
        raise FileNotFoundError(f"no metrics files under {results_dir}; run evaluate first")
    return best_kind


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="respire",
        description="respiratory sound classification pipeline",
    )
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file; flags override it")
        p.add_argument("--work-dir", help="artifact directory (default: work)")
        p.add_argument("--seed", type=int, help="master random seed")

    p_ingest = sub.add_parser("ingest", help="scan corpus, filter quality, write manifest")
    common(p_ingest)
    p_ingest.add_argument("--corpus", help="corpus root (wav + json pairs)")
    p_ingest.add_argument("--schema", help="annotation schema JSON override")

    p_segment = sub.add_parser("segment", help="cut events into 2 s labeled clips")
    common(p_segment)
    p_segment.add_argument("--corpus")
    p_segment.add_argument("--schema")
    p_segment.add_argument("--hop-ms", type=int, help="sliding window hop (default 1000)")
    p_segment.add_argument("--crackle-policy", choices=["exclude", "positive", "negative"])
    p_segment.add_argument("--pad", choices=["tail", "center"])

    p_embed = sub.add_parser("embed", help="embed clips to 512-d vectors")
    common(p_embed)
    p_embed.add_argument("--provider", choices=["surrogate", "remote"])
    p_embed.add_argument("--endpoint", help="remote embedding endpoint URL")
    p_embed.add_argument("--batch", type=int, dest="embed_batch")
    p_embed.add_argument("--timeout-ms", type=int)

    p_train = sub.add_parser("train", help="split and train classifiers")
    common(p_train)
    p_train.add_argument("--models", help="comma list or 'all' (svm,logreg,forest,boosting,mlp)")
    p_train.add_argument("--ratio", type=float, help="train fraction (default 0.8)")
    p_train.add_argument("--group-by", choices=["none", "recording", "patient"])

    p_eval = sub.add_parser("evaluate", help="metrics, figures, misclassification CSVs")
    common(p_eval)

    p_review = sub.add_parser("review", help="clinician review loop")
    review_sub = p_review.add_subparsers(dest="review_command", required=True)
    p_serve = review_sub.add_parser("serve", help="serve the review API and UI")
    common(p_serve)
    p_serve.add_argument("--model", dest="review_model", help="model whose mistakes to review")
    p_serve.add_argument("--port", type=int, dest="review_port")
    p_serve.add_argument("--ui-dir", help="directory with a built review UI bundle")
    p_apply = review_sub.add_parser("apply", help="fold verdicts into labels.npy")
    common(p_apply)

    p_all = sub.add_parser("run-all", help="ingest through evaluate in one go")
    common(p_all)
    for p in (p_all,):
        p.add_argument("--corpus")
        p.add_argument("--schema")
        p.add_argument("--hop-ms", type=int)
        p.add_argument("--crackle-policy", choices=["exclude", "positive", "negative"])
        p.add_argument("--pad", choices=["tail", "center"])
        p.add_argument("--provider", choices=["surrogate", "remote"])
        p.add_argument("--endpoint")
        p.add_argument("--batch", type=int, dest="embed_batch")
        p.add_argument("--timeout-ms", type=int)
        p.add_argument("--models")
        p.add_argument("--ratio", type=float)
        p.add_argument("--group-by", choices=["none", "recording", "patient"])
    return parser


_ARG_TO_CONFIG = {
    "work_dir": "work_dir", "seed": "seed", "corpus": "corpus_root",
    "schema": "schema_file", "hop_ms": "hop_ms", "crackle_policy": "crackle_policy",
    "pad": "pad", "provider": "provider", "endpoint": "endpoint",
    "embed_batch": "embed_batch", "timeout_ms": "timeout_ms", "ratio": "ratio",
    "group_by": "group_by", "review_model": "review_model",
    "review_port": "review_port", "ui_dir": "ui_dir",
}


def _config_from_args(args: argparse.Namespace) -> PipelineConfig:
    cfg = PipelineConfig.load(args.config) if getattr(args, "config", None) else PipelineConfig()
    _apply_env(cfg)
    for arg_name, cfg_name in _ARG_TO_CONFIG.items():
        value = getattr(args, arg_name, None)
        if value is not None:
            setattr(cfg, cfg_name, value)
    models_arg = getattr(args, "models", None)
    if models_arg:
        cfg.models = list(modelsmod.ALL_KINDS) if models_arg == "all" else [
            m.strip() for m in models_arg.split(",") if m.strip()
        ]
    for kind in cfg.models:
        if kind not in modelsmod.ALL_KINDS:
            raise ValueError(f"unknown model kind {kind!r}; choose from {modelsmod.ALL_KINDS}")
    return cfg


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = _config_from_args(args)
        if args.command == "ingest":
            return cmd_ingest(cfg)
        if args.command == "segment":
            return cmd_segment(cfg)
        if args.command == "embed":
            return cmd_embed(cfg)
        if args.command == "train":
            return cmd_train(cfg)
        if args.command == "evaluate":
            return cmd_evaluate(cfg)
        if args.command == "review":
            if args.review_command == "serve":
                return cmd_review_serve(cfg)
            return cmd_review_apply(cfg)
        if args.command == "run-all":
            return cmd_run_all(cfg)
        raise AssertionError(args.command)
    except (EmptyCorpus, FileNotFoundError, NotADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CORPUS
    except ProviderUnavailable as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PROVIDER
    except (RespireError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    raise SystemExit(main())
