"""Waveform conditioning and event segmentation into fixed 2 s clips.

Every clip leaving this module is exactly 32,000 mono samples at 16 kHz.
Short events grow a zero tail (or symmetric padding with ``pad="center"``);
long events are cut by a sliding window plus one tail-aligned window so the
event end is never dropped.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np
from scipy.signal import upfirdn

from .dataset import AnnotatedRecording, EventLabel, SoundEvent
from .errors import EventOutOfBounds
from .wavio import Waveform, read_wav, write_wav

TARGET_RATE = 16_000
CLIP_SAMPLES = 32_000
CLIP_MS = 2_000
_MS_TO_SAMPLES = TARGET_RATE // 1000

# resampler design: windowed-sinc polyphase, 64 taps per output sample,
# Kaiser beta 8.6, cutoff at 0.45x the narrower Nyquist
_TAPS = 64
_KAISER_BETA = 8.6
_CUTOFF_FRACTION = 0.45


class BinaryLabel(Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    EXCLUDED = "excluded"


class CracklePolicy(Enum):
    EXCLUDE = "exclude"
    POSITIVE = "positive"
    NEGATIVE = "negative"


_POSITIVE_EVENTS = frozenset({
    EventLabel.WHEEZE,
    EventLabel.WHEEZE_CRACKLE,
    EventLabel.RHONCHI,
    EventLabel.STRIDOR,
})
_CRACKLE_EVENTS = frozenset({EventLabel.FINE_CRACKLE, EventLabel.COARSE_CRACKLE})


@dataclass
class Clip:
    """One 2 s training example with provenance back to its source event."""

    samples: np.ndarray  # float32, exactly CLIP_SAMPLES
    label: BinaryLabel
    source: str
    event_index: int
    window_offset_ms: int
    padded_samples: int
    event_label: EventLabel

    def __post_init__(self):
        if self.samples.shape != (CLIP_SAMPLES,):
            raise ValueError(f"clip must hold {CLIP_SAMPLES} samples, got {self.samples.shape}")
        if self.label is BinaryLabel.EXCLUDED:
            raise ValueError("clips never carry the excluded label")

    @property
    def clip_id(self) -> str:
        return f"{self.source}_{self.event_index}_{self.window_offset_ms}"


def to_mono(w: Waveform) -> Waveform:
    """Average stereo frame pairs; mono passes through unchanged."""
    if w.channels == 1:
        return w
    if w.channels != 2:
        raise ValueError(f"expected 1 or 2 channels, got {w.channels}")
    mixed = w.samples.reshape(-1, 2).mean(axis=1)
    return Waveform(samples=mixed, sample_rate=w.sample_rate, channels=1)


def resample(w: Waveform, target_rate: int = TARGET_RATE) -> Waveform:
    """Rate-convert with an anti-aliased windowed-sinc polyphase filter.

    Output length is round(n * target/source); equal rates return the input
    unchanged. The low-pass sits at 0.45x the narrower of the two Nyquist
    frequencies, so downsampling is anti-aliased and upsampling suppresses
    images above the source band.
    """
    if w.channels != 1:
        raise ValueError("resample expects mono input; call to_mono first")
    if target_rate <= 0:
        raise ValueError(f"target rate must be positive, got {target_rate}")
    if target_rate == w.sample_rate:
        return w

    g = math.gcd(target_rate, w.sample_rate)
    up, down = target_rate // g, w.sample_rate // g

    # prototype FIR at the upsampled rate: _TAPS input-rate taps per branch
    half = _TAPS * up // 2
    n = np.arange(-half, half + 1, dtype=np.float64)
    cutoff_hz = _CUTOFF_FRACTION * min(w.sample_rate, target_rate) / 2.0
    fc = cutoff_hz / (w.sample_rate * up / 2.0)  # normalized to upsampled Nyquist
    kernel = np.sinc(fc * n) * fc * np.kaiser(n.size, _KAISER_BETA)
    kernel *= up / kernel.sum()  # unity DC gain after zero-stuffing

    out = upfirdn(kernel, w.samples, up=up, down=down)
    n_out = int(round(w.samples.size * target_rate / w.sample_rate))
    delay = half  # group delay of the symmetric kernel, in upsampled samples
    start = delay // down
    # the filtered stream is offset by the kernel delay; take n_out samples
    # from there, padding with zeros if the tail falls short
    segment = out[start : start + n_out]
    if segment.size < n_out:
        segment = np.pad(segment, (0, n_out - segment.size))
    return Waveform(samples=np.clip(segment, -1.0, 1.0), sample_rate=target_rate, channels=1)


def binary_label(
    label: EventLabel, crackle_policy: CracklePolicy = CracklePolicy.EXCLUDE
) -> BinaryLabel:
    """Map an event label onto the binary task.

    Wheeze, wheeze+crackle, rhonchi, and stridor are positive; normal is
    negative; crackle-only events follow the configured policy (excluded by
    default since they belong to neither class).
    """
    if label in _POSITIVE_EVENTS:
        return BinaryLabel.POSITIVE
    if label is EventLabel.NORMAL:
        return BinaryLabel.NEGATIVE
    if label in _CRACKLE_EVENTS:
        return {
            CracklePolicy.EXCLUDE: BinaryLabel.EXCLUDED,
            CracklePolicy.POSITIVE: BinaryLabel.POSITIVE,
            CracklePolicy.NEGATIVE: BinaryLabel.NEGATIVE,
        }[crackle_policy]
    raise ValueError(f"unhandled event label {label}")


def segment_event(
    w: Waveform,
    event: SoundEvent,
    event_index: int,
    source: str,
    hop_ms: int = 1000,
    crackle_policy: CracklePolicy = CracklePolicy.EXCLUDE,
    pad: str = "tail",
) -> list[Clip]:
    """Cut one annotated event into 2 s clips.

    Events at or under 2 s yield a single zero-padded clip. Longer events
    yield windows at 0, hop, 2*hop, ... plus a final tail-aligned window
    when the last hop stops short of the event end. Window offsets are
    relative to the event start. Excluded events yield no clips.
    """
    if w.sample_rate != TARGET_RATE:
        raise ValueError(f"segmentation expects {TARGET_RATE} Hz input, got {w.sample_rate}")
    if w.channels != 1:
        raise ValueError("segmentation expects mono input")
    if not 100 <= hop_ms <= 2000:
        raise ValueError(f"hop_ms must be within [100, 2000], got {hop_ms}")
    if pad not in ("tail", "center"):
        raise ValueError(f"pad must be 'tail' or 'center', got {pad!r}")

    label = binary_label(event.label, crackle_policy)
    if label is BinaryLabel.EXCLUDED:
        return []

    start = event.start_ms * _MS_TO_SAMPLES
    end = event.end_ms * _MS_TO_SAMPLES
    if end > w.samples.size:
        raise EventOutOfBounds(
            f"{source} event {event_index} ends at {event.end_ms} ms but the "
            f"waveform holds {w.samples.size // _MS_TO_SAMPLES} ms"
        )

    duration_ms = event.duration_ms
    clips: list[Clip] = []

    def make(offset_ms: int, samples: np.ndarray, padded: int) -> Clip:
        return Clip(
            samples=samples.astype(np.float32),
            label=label,
            source=source,
            event_index=event_index,
            window_offset_ms=offset_ms,
            padded_samples=padded,
            event_label=event.label,
        )

    if duration_ms <= CLIP_MS:
        body = w.samples[start:end]
        missing = CLIP_SAMPLES - body.size
        if pad == "tail":
            samples = np.pad(body, (0, missing))
        else:
            samples = np.pad(body, (missing // 2, missing - missing // 2))
        clips.append(make(0, samples, missing))
        return clips

    offset = 0
    while offset + CLIP_MS <= duration_ms:
        s = start + offset * _MS_TO_SAMPLES
        clips.append(make(offset, w.samples[s : s + CLIP_SAMPLES], 0))
        offset += hop_ms
    last_covered = clips[-1].window_offset_ms + CLIP_MS
    if last_covered < duration_ms:
        tail_offset = duration_ms - CLIP_MS
        s = start + tail_offset * _MS_TO_SAMPLES
        clips.append(make(tail_offset, w.samples[s : s + CLIP_SAMPLES], 0))
    return clips


def load_waveform(path) -> Waveform:
    """Read, downmix, and resample a recording to mono 16 kHz."""
    return resample(to_mono(read_wav(path)))


def build_clip_set(
    recordings: list[AnnotatedRecording],
    hop_ms: int = 1000,
    crackle_policy: CracklePolicy = CracklePolicy.EXCLUDE,
    pad: str = "tail",
):
    """Segment every non-excluded event of every recording.

    Returns (clips, metadata rows); row i describes clips[i]. Order is
    deterministic: recording order, then event order, then window offset.
    """
    clips: list[Clip] = []
    rows: list[dict] = []
    for rec in recordings:
        w = load_waveform(rec.audio_path)
        for idx, event in enumerate(rec.events):
            for clip in segment_event(
                w, event, idx, rec.base_name, hop_ms=hop_ms,
                crackle_policy=crackle_policy, pad=pad,
            ):
                clips.append(clip)
                rows.append({
                    "clip_id": clip.clip_id,
                    "source": clip.source,
                    "event_index": clip.event_index,
                    "window_offset_ms": clip.window_offset_ms,
                    "padded_samples": clip.padded_samples,
                    "event_label": clip.event_label.value,
                    "binary_label": clip.label.value,
                })
    return clips, rows


CLIP_METADATA_COLUMNS = [
    "clip_id", "source", "event_index", "window_offset_ms",
    "padded_samples", "event_label", "binary_label",
]


def write_clips(clips: list[Clip], directory) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for clip in clips:
        write_wav(directory / f"{clip.clip_id}.wav", clip.samples, TARGET_RATE)


def write_clip_metadata(rows: list[dict], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CLIP_METADATA_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)


def read_clip_metadata(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
