"""Synthetic corpus generator for offline runs and tests.

Produces WAV+JSON pairs shaped like a real annotated corpus: "wheeze"
events are 300-600 Hz tone bursts over noise at 10 dB SNR, "normal"
events are low-pass filtered noise. Useful for exercising the whole
pipeline without any clinical data.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .base import rng_stream
from .wavio import write_wav

_SYNTH_STREAM = 70


def generate_corpus(
    root,
    n_recordings: int = 40,
    poor_quality: int = 2,
    seed: int = 0,
    sample_rate: int = 16_000,
    events_per_recording: tuple = (2, 5),
    event_ms: tuple = (800, 4500),
    snr_db: float = 10.0,
) -> list[str]:
    """Write a corpus under root; returns the base names created.

    Half the recordings carry wheeze events (record label CAS), half carry
    normal events, plus `poor_quality` extra recordings that the quality
    filter should drop.
    """
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    rng = rng_stream(seed, _SYNTH_STREAM)
    names = []
    total = n_recordings + poor_quality
    for i in range(total):
        is_poor = i >= n_recordings
        wheezy = i % 2 == 0 and not is_poor
        patient = 100 + i
        age = round(float(rng.uniform(0.5, 17.5)), 1)
        gender = int(rng.integers(0, 2))
        location = f"p{1 + i % 4}"
        base = f"{patient}_{age}_{gender}_{location}_{2000 + i}"

        n_events = 0 if is_poor else int(rng.integers(*events_per_recording))
        events = []
        cursor = int(rng.integers(200, 600))
        for _ in range(n_events):
            duration = int(rng.integers(*event_ms))
            events.append((cursor, cursor + duration))
            cursor += duration + int(rng.integers(150, 500))
        total_ms = max(cursor + 400, 3000)

        samples = rng.normal(0.0, 0.003, size=total_ms * sample_rate // 1000)
        doc_events = []
        for start_ms, end_ms in events:
            lo = start_ms * sample_rate // 1000
            hi = end_ms * sample_rate // 1000
            if wheezy:
                samples[lo:hi] = _tone_burst(rng, hi - lo, sample_rate, snr_db)
                label = "Wheeze"
            else:
                samples[lo:hi] = _breath_noise(rng, hi - lo)
                label = "Normal"
            doc_events.append({"start": start_ms, "end": end_ms, "type": label})

        if is_poor:
            record_label = "Poor Quality"
        elif wheezy:
            record_label = "CAS"
        else:
            record_label = "Normal"

        write_wav(root / f"{base}.wav", np.clip(samples, -1.0, 1.0), sample_rate)
        (root / f"{base}.json").write_text(json.dumps({
            "record_annotation": record_label,
            "event_annotation": doc_events,
        }, indent=1))
        names.append(base)
    return names


def _tone_burst(rng: np.random.Generator, n: int, sample_rate: int, snr_db: float) -> np.ndarray:
    """Tone at a random 300-600 Hz pitch plus noise at the requested SNR."""
    freq = float(rng.uniform(300.0, 600.0))
    t = np.arange(n) / sample_rate
    noise_std = 0.02
    amplitude = noise_std * np.sqrt(2.0) * 10.0 ** (snr_db / 20.0)
    tone = amplitude * np.sin(2.0 * np.pi * freq * t + rng.uniform(0.0, 2.0 * np.pi))
    envelope = np.minimum(1.0, np.minimum(np.arange(n), np.arange(n)[::-1]) / (0.02 * sample_rate))
    return tone * envelope + rng.normal(0.0, noise_std, size=n)


def _breath_noise(rng: np.random.Generator, n: int) -> np.ndarray:
    """Low-pass filtered noise, a stand-in for unremarkable breath sound."""
    raw = rng.normal(0.0, 0.05, size=n + 16)
    kernel = np.hanning(17)
    kernel /= kernel.sum()
    return np.convolve(raw, kernel, mode="valid")[:n]


def main(argv=None) -> int:
    import argparse

    parser = argparse.ArgumentParser(description="generate a synthetic annotated corpus")
    parser.add_argument("root", help="output directory")
    parser.add_argument("--recordings", type=int, default=40)
    parser.add_argument("--poor-quality", type=int, default=2)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--sample-rate", type=int, default=16_000)
    args = parser.parse_args(argv)
    names = generate_corpus(args.root, n_recordings=args.recordings,
                            poor_quality=args.poor_quality, seed=args.seed,
                            sample_rate=args.sample_rate)
    print(f"wrote {len(names)} recordings under {args.root}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
