"""Clinician review loop: a local HTTP service over the misclassification
queue, an append-only verdict log, and label correction with an audit trail.
"""

from __future__ import annotations

import csv
import json
import logging
import shutil
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import numpy as np

from .errors import UnknownClipId
from .npyio import read_npy, write_npy

log = logging.getLogger(__name__)

VERDICTS = ("confirm", "relabel_positive", "relabel_negative")


def load_review_queue(misclassified_csv) -> list[dict]:
    """Rows of a misclassified CSV, served in file (confidence) order."""
    with open(misclassified_csv, newline="") as fh:
        rows = list(csv.DictReader(fh))
    for row in rows:
        row["true_label"] = int(row["true_label"])
        row["predicted"] = int(row["predicted"])
        row["score"] = float(row["score"])
    return rows


@dataclass
class ReviewState:
    """Shared service state; the lock serializes verdict-log appends."""

    queue: list
    clips_dir: Path
    verdict_log: Path
    ui_dir: Path | None = None
    lock: threading.Lock = field(default_factory=threading.Lock)

    def latest_verdicts(self) -> dict:
        return read_verdicts(self.verdict_log)

    def append_verdict(self, clip_id: str, verdict: str, note: str) -> None:
        entry = {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "clip_id": clip_id,
            "verdict": verdict,
            "note": note,
        }
        with self.lock:
            with open(self.verdict_log, "a") as fh:
                fh.write(json.dumps(entry) + "\n")


def read_verdicts(path) -> dict:
    """clip_id -> latest verdict entry; missing file means nothing reviewed."""
    path = Path(path)
    verdicts: dict[str, dict] = {}
    if path.exists():
        for line in path.read_text().splitlines():
            if line.strip():
                entry = json.loads(line)
                verdicts[entry["clip_id"]] = entry
    return verdicts


class _ReviewHandler(BaseHTTPRequestHandler):
    state: ReviewState  # injected by make_server

    def do_GET(self):
        if self.path == "/api/misclassified":
            verdicts = self.state.latest_verdicts()
            items = []
            for row in self.state.queue:
                item = {
                    "clip_id": row["clip_id"],
                    "true_label": row["true_label"],
                    "predicted": row["predicted"],
                    "score": row["score"],
                    "audio_url": f"/api/clip/{row['clip_id']}/audio",
                }
                recorded = verdicts.get(row["clip_id"])
                if recorded:
                    item["verdict"] = recorded["verdict"]
                items.append(item)
            self._send_json(items)
        elif self.path == "/api/progress":
            verdicts = self.state.latest_verdicts()
            reviewed = sum(1 for row in self.state.queue if row["clip_id"] in verdicts)
            self._send_json({"reviewed": reviewed, "total": len(self.state.queue)})
        elif self.path.startswith("/api/clip/") and self.path.endswith("/audio"):
            self._send_audio(self.path[len("/api/clip/") : -len("/audio")])
        else:
            self._send_static()

    def do_POST(self):
        if self.path != "/api/verdict":
            self.send_error(404)
            return
        length = int(self.headers.get("Content-Length", 0))
        try:
            body = json.loads(self.rfile.read(length) or b"{}")
        except json.JSONDecodeError:
            self.send_error(400, "invalid JSON")
            return
        clip_id = body.get("clip_id")
        verdict = body.get("verdict")
        known = {row["clip_id"] for row in self.state.queue}
        if verdict not in VERDICTS:
            self.send_error(400, f"verdict must be one of {VERDICTS}")
            return
        if clip_id not in known:
            self.send_error(404, f"unknown clip_id {clip_id!r}")
            return
        self.state.append_verdict(clip_id, verdict, str(body.get("note", "")))
        self.send_response(204)
        self.end_headers()

    # -- helpers ------------------------------------------------------------

    def _send_json(self, payload) -> None:
        data = json.dumps(payload).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def _send_audio(self, clip_id: str) -> None:
        if "/" in clip_id or ".." in clip_id:
            self.send_error(400, "bad clip id")
            return
        path = self.state.clips_dir / f"{clip_id}.wav"
        if not path.is_file():
            self.send_error(404, f"no audio for {clip_id!r}")
            return
        data = path.read_bytes()
        self.send_response(200)
        self.send_header("Content-Type", "audio/wav")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def _send_static(self) -> None:
        name = self.path.split("?")[0].lstrip("/") or "index.html"
        if self.state.ui_dir is not None:
            target = (self.state.ui_dir / name).resolve()
            if target.is_file() and self.state.ui_dir.resolve() in target.parents:
                kinds = {".html": "text/html", ".js": "text/javascript",
                         ".css": "text/css", ".map": "application/json",
                         ".svg": "image/svg+xml"}
                data = target.read_bytes()
                self.send_response(200)
                self.send_header("Content-Type", kinds.get(target.suffix, "application/octet-stream"))
                self.send_header("Content-Length", str(len(data)))
                self.end_headers()
                self.wfile.write(data)
                return
        if name == "index.html":
            data = _FALLBACK_PAGE.encode()
            self.send_response(200)
            self.send_header("Content-Type", "text/html")
            self.send_header("Content-Length", str(len(data)))
            self.end_headers()
            self.wfile.write(data)
            return
        self.send_error(404)

    def log_message(self, fmt, *args):  # route through logging, not stderr
        log.debug("review http: " + fmt, *args)


_FALLBACK_PAGE = """<!doctype html>
<html><head><meta charset="utf-8"><title>Review</title></head>
<body>
<h1>Misclassified clip review</h1>
<p>No UI bundle configured (pass --ui-dir to serve one). The API is live:</p>
<ul>
<li><a href="/api/misclassified">/api/misclassified</a></li>
<li><a href="/api/progress">/api/progress</a></li>
</ul>
</body></html>
"""


def make_server(state: ReviewState, host: str = "127.0.0.1", port: int = 8765) -> ThreadingHTTPServer:
    handler = type("BoundReviewHandler", (_ReviewHandler,), {"state": state})
    return ThreadingHTTPServer((host, port), handler)


def apply_verdicts(verdict_log, labels_path, filenames_path, audit_path) -> list[dict]:
    """Fold relabel verdicts into labels.npy.

    Every verdict is audited (old -> new); the original labels file is
    copied to a versioned backup before anything is rewritten. A verdict
    for an unknown clip aborts with nothing written.
    """
    verdicts = read_verdicts(verdict_log)
    labels = read_npy(labels_path)
    clip_ids = Path(filenames_path).read_text().splitlines()
    index = {clip_id: i for i, clip_id in enumerate(clip_ids)}

    unknown = sorted(set(verdicts) - set(index))
    if unknown:
        raise UnknownClipId(f"verdicts reference unknown clips: {unknown[:5]}")

    new_labels = labels.copy()
    audit = []
    for clip_id, entry in sorted(verdicts.items()):
        i = index[clip_id]
        old = int(labels[i])
        if entry["verdict"] == "relabel_positive":
            new_labels[i] = 1
        elif entry["verdict"] == "relabel_negative":
            new_labels[i] = 0
        audit.append({
            "clip_id": clip_id,
            "verdict": entry["verdict"],
            "old_label": old,
            "new_label": int(new_labels[i]),
            "timestamp": entry["timestamp"],
        })

    backup = _versioned_backup(labels_path)
    shutil.copy2(labels_path, backup)
    write_npy(new_labels, labels_path)
    with open(audit_path, "w") as fh:
        for row in audit:
            fh.write(json.dumps(row) + "\n")
    log.info("applied %d verdicts (%d relabels); original labels kept at %s",
             len(audit), sum(1 for a in audit if a["old_label"] != a["new_label"]), backup)
    return audit


def _versioned_backup(path) -> Path:
    path = Path(path)
    n = 1
    while (candidate := path.with_name(f"{path.name}.orig{n}")).exists():
        n += 1
    return candidate
