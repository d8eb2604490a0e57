"""Clip embeddings: a deterministic local surrogate and a remote HTTP provider.

The surrogate is a fixed mel-filterbank feature extractor that stands in
for the external 512-d embedding service during offline development and
tests. It is not a clinical substitute for the real model. Both providers
sit behind the same batch interface so the rest of the pipeline does not
care which one produced the matrix.
"""

from __future__ import annotations

import json
import logging
import time
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .audio import CLIP_SAMPLES, TARGET_RATE, BinaryLabel, Clip
from .base import BaseEstimator
from .errors import DimensionMismatch, ProviderUnavailable
from .npyio import read_npy, write_npy

log = logging.getLogger(__name__)

EMBED_DIM = 512

EMBEDDINGS_FILE = "embeddings.npy"
LABELS_FILE = "labels.npy"
FILENAMES_FILE = "filenames.txt"


@dataclass
class EmbeddingMatrix:
    """N x 512 embeddings with aligned binary labels and clip ids."""

    rows: np.ndarray  # float32 (N, 512)
    labels: np.ndarray  # int64, 0 = normal, 1 = abnormal
    clip_ids: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.rows = np.ascontiguousarray(self.rows, dtype=np.float32)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.rows.ndim != 2 or self.rows.shape[1] != EMBED_DIM:
            raise DimensionMismatch(f"embedding matrix must be (N, {EMBED_DIM}), got {self.rows.shape}")
        if not (len(self.labels) == len(self.clip_ids) == self.rows.shape[0]):
            raise ValueError(
                f"misaligned matrix: {self.rows.shape[0]} rows, "
                f"{len(self.labels)} labels, {len(self.clip_ids)} ids"
            )

    def __len__(self) -> int:
        return self.rows.shape[0]

    def save(self, directory) -> None:
        """Persist as embeddings.npy / labels.npy / filenames.txt."""
        if len(self) == 0:
            raise ValueError("refusing to persist an empty embedding matrix")
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        write_npy(self.rows, directory / EMBEDDINGS_FILE)
        write_npy(self.labels, directory / LABELS_FILE)
        (directory / FILENAMES_FILE).write_text("".join(f"{c}\n" for c in self.clip_ids))

    @classmethod
    def load(cls, directory) -> "EmbeddingMatrix":
        directory = Path(directory)
        rows = read_npy(directory / EMBEDDINGS_FILE)
        labels = read_npy(directory / LABELS_FILE)
        clip_ids = (directory / FILENAMES_FILE).read_text().splitlines()
        return cls(rows=rows, labels=labels, clip_ids=clip_ids)


class SurrogateEmbedder(BaseEstimator):
    """Deterministic 512-d features from a 2 s clip, no model required.

    Layout: 64 mel-band log energies averaged over 4 temporal quarters
    (256 values), then per-band statistics of the frame-to-frame log-energy
    deltas (mean, std, min, max; 256 values). Identical clips map to
    identical vectors bit for bit.
    """

    def __init__(self, n_mels: int = 64, n_fft: int = 512, frame_len: int = 400,
                 hop: int = 160, log_floor: float = 1e-10):
        self.n_mels = n_mels
        self.n_fft = n_fft
        self.frame_len = frame_len
        self.hop = hop
        self.log_floor = log_floor

    def fit(self, X=None, y=None) -> "SurrogateEmbedder":
        return self  # stateless

    def transform(self, clips: np.ndarray) -> np.ndarray:
        """Embed a (N, 32000) batch of clip samples to (N, 512) float32."""
        clips = np.asarray(clips, dtype=np.float64)
        if clips.ndim == 1:
            clips = clips[None, :]
        if clips.shape[1] != CLIP_SAMPLES:
            raise DimensionMismatch(f"clips must hold {CLIP_SAMPLES} samples, got {clips.shape}")
        return np.stack([self._embed_one(c) for c in clips]).astype(np.float32)

    def embed_clip(self, clip: Clip) -> np.ndarray:
        return self.transform(clip.samples[None, :])[0]

    def _embed_one(self, samples: np.ndarray) -> np.ndarray:
        frames = self._frame(samples) * np.hanning(self.frame_len)
        spectrum = np.abs(np.fft.rfft(frames, n=self.n_fft, axis=1)) ** 2
        mel_energy = spectrum @ self._filterbank().T  # (frames, n_mels)
        log_mel = np.log(mel_energy + self.log_floor)

        quarters = np.array_split(log_mel, 4, axis=0)
        band_means = np.stack([q.mean(axis=0) for q in quarters], axis=1)  # (n_mels, 4)

        deltas = np.diff(log_mel, axis=0)  # (frames-1, n_mels)
        delta_stats = np.stack(
            [deltas.mean(axis=0), deltas.std(axis=0), deltas.min(axis=0), deltas.max(axis=0)],
            axis=1,
        )  # (n_mels, 4)
        return np.concatenate([band_means.ravel(), delta_stats.ravel()])

    def _frame(self, samples: np.ndarray) -> np.ndarray:
        n_frames = 1 + (samples.size - self.frame_len) // self.hop
        idx = np.arange(self.frame_len)[None, :] + self.hop * np.arange(n_frames)[:, None]
        return samples[idx]

    def _filterbank(self) -> np.ndarray:
        """Triangular mel filters over the rFFT bins, rows L1-normalized."""
        if getattr(self, "_fb_cache", None) is not None:
            return self._fb_cache
        n_bins = self.n_fft // 2 + 1
        hz = np.linspace(0, TARGET_RATE / 2, n_bins)
        mel_edges = np.linspace(_hz_to_mel(0.0), _hz_to_mel(TARGET_RATE / 2), self.n_mels + 2)
        edges_hz = _mel_to_hz(mel_edges)
        fb = np.zeros((self.n_mels, n_bins))
        for m in range(self.n_mels):
            lo, center, hi = edges_hz[m], edges_hz[m + 1], edges_hz[m + 2]
            rising = (hz - lo) / max(center - lo, 1e-12)
            falling = (hi - hz) / max(hi - center, 1e-12)
            fb[m] = np.clip(np.minimum(rising, falling), 0.0, None)
            total = fb[m].sum()
            if total > 0:
                fb[m] /= total
        self._fb_cache = fb
        return fb


def _hz_to_mel(hz):
    return 2595.0 * np.log10(1.0 + np.asarray(hz) / 700.0)


def _mel_to_hz(mel):
    return 700.0 * (10.0 ** (np.asarray(mel) / 2595.0) - 1.0)


class SurrogateProvider:
    """Batch adapter over SurrogateEmbedder."""

    name = "surrogate"

    def __init__(self):
        self._embedder = SurrogateEmbedder()

    def embed(self, batch: np.ndarray) -> np.ndarray:
        return self._embedder.transform(batch)


class RemoteProvider:
    """Client for the embedding wire protocol: POST /v1/embed.

    Request: ``{"clips": [[f32 x 32000], ...]}`` as application/json.
    Response: ``{"embeddings": [[f32 x 512], ...]}``, or, when the binary
    variant is negotiated via ``Accept: application/octet-stream``, a
    uint32-LE row count followed by rows of 512 float32-LE values.
    Non-200 responses and transport errors are retried with exponential
    backoff, then surface as ProviderUnavailable.
    """

    name = "remote"

    def __init__(self, endpoint: str, timeout_ms: int = 30_000, retries: int = 3,
                 backoff_s: float = 0.5, binary: bool = False):
        self.endpoint = endpoint.rstrip("/")
        self.timeout_ms = timeout_ms
        self.retries = retries
        self.backoff_s = backoff_s
        self.binary = binary

    def embed(self, batch: np.ndarray) -> np.ndarray:
        body = json.dumps({"clips": np.asarray(batch, dtype=np.float32).tolist()}).encode()
        url = f"{self.endpoint}/v1/embed"
        accept = "application/octet-stream" if self.binary else "application/json"
        last_error: Exception | None = None
        for attempt in range(self.retries):
            if attempt:
                delay = self.backoff_s * 2 ** (attempt - 1)
                log.warning("embed attempt %d/%d failed (%s); retrying in %.1fs",
                            attempt, self.retries, last_error, delay)
                time.sleep(delay)
            try:
                request = urllib.request.Request(
                    url, data=body,
                    headers={"Content-Type": "application/json", "Accept": accept},
                )
                with urllib.request.urlopen(request, timeout=self.timeout_ms / 1000.0) as resp:
                    if resp.status != 200:
                        raise ProviderUnavailable(f"{url} returned {resp.status}")
                    payload = resp.read()
                    content_type = resp.headers.get("Content-Type", "")
                return self._parse(payload, content_type, len(batch))
            except (urllib.error.URLError, urllib.error.HTTPError, TimeoutError, OSError) as exc:
                last_error = exc
        raise ProviderUnavailable(
            f"{url} unreachable after {self.retries} attempts: {last_error}"
        )

    def _parse(self, payload: bytes, content_type: str, n_clips: int) -> np.ndarray:
        if content_type.startswith("application/octet-stream"):
            if len(payload) < 4:
                raise ProviderUnavailable("binary response shorter than its length prefix")
            count = int(np.frombuffer(payload[:4], dtype="<u4")[0])
            values = np.frombuffer(payload[4:], dtype="<f4")
            if values.size != count * EMBED_DIM:
                raise DimensionMismatch(
                    f"binary response declares {count} rows but holds {values.size} floats"
                )
            rows = values.reshape(count, EMBED_DIM)
        else:
            doc = json.loads(payload)
            rows = np.asarray(doc.get("embeddings", []), dtype=np.float32)
            if rows.ndim != 2 or (rows.size and rows.shape[1] != EMBED_DIM):
                raise DimensionMismatch(f"provider returned shape {rows.shape}, want (N, {EMBED_DIM})")
        if rows.shape[0] != n_clips:
            raise DimensionMismatch(f"sent {n_clips} clips, got {rows.shape[0]} embeddings")
        return rows.astype(np.float32)


def embed_batch(provider, clips: list[Clip], batch_size: int = 32) -> EmbeddingMatrix:
    """Embed clips in input order; row i always corresponds to clips[i]."""
    if batch_size < 1:
        raise ValueError(f"batch_size must be >= 1, got {batch_size}")
    if not clips:
        return EmbeddingMatrix(rows=np.empty((0, EMBED_DIM), dtype=np.float32),
                               labels=np.empty(0, dtype=np.int64), clip_ids=[])
    blocks = []
    for i in range(0, len(clips), batch_size):
        batch = np.stack([c.samples for c in clips[i : i + batch_size]])
        rows = np.asarray(provider.embed(batch), dtype=np.float32)
        if rows.ndim != 2 or rows.shape[1] != EMBED_DIM:
            raise DimensionMismatch(f"provider returned shape {rows.shape}, want (N, {EMBED_DIM})")
        if rows.shape[0] != batch.shape[0]:
            raise DimensionMismatch(f"sent {batch.shape[0]} clips, got {rows.shape[0]} rows")
        blocks.append(rows)
    labels = np.array([1 if c.label is BinaryLabel.POSITIVE else 0 for c in clips], dtype=np.int64)
    return EmbeddingMatrix(rows=np.vstack(blocks), labels=labels,
                           clip_ids=[c.clip_id for c in clips])
