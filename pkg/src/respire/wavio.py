"""RIFF/WAVE decoding and encoding.

The stdlib ``wave`` module cannot read IEEE float files, so the chunk walk
is done by hand. Decoding covers PCM 16-bit and float 32-bit, mono or
stereo; anything else is refused. Encoding always writes mono PCM16, the
format the clip store and review playback use.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import TruncatedFile, UnsupportedFormat

_PCM = 1
_IEEE_FLOAT = 3


@dataclass
class Waveform:
    """Decoded audio: samples in [-1, 1], interleaved when channels > 1."""

    samples: np.ndarray
    sample_rate: int
    channels: int = 1

    def __post_init__(self):
        if self.samples.size == 0:
            raise ValueError("empty waveform")
        if self.sample_rate <= 0:
            raise ValueError(f"sample rate must be positive, got {self.sample_rate}")

    @property
    def duration_ms(self) -> int:
        return int(round(self.samples.size / self.channels / self.sample_rate * 1000))


def decode_wav(data: bytes) -> Waveform:
    """Decode a RIFF/WAVE byte string to a normalized waveform.

    PCM16 samples are divided by 32768; float samples are clamped to [-1, 1].
    """
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise UnsupportedFormat("not a RIFF/WAVE file")

    fmt = None
    payload = None
    pos = 12
    while pos + 8 <= len(data):
        chunk_id = data[pos : pos + 4]
        (size,) = struct.unpack_from("<I", data, pos + 4)
        body_start = pos + 8
        if chunk_id == b"fmt ":
            if size < 16 or body_start + 16 > len(data):
                raise TruncatedFile("fmt chunk shorter than 16 bytes")
            fmt = struct.unpack_from("<HHIIHH", data, body_start)
        elif chunk_id == b"data":
            if body_start + size > len(data):
                raise TruncatedFile(
                    f"data chunk declares {size} bytes but only "
                    f"{len(data) - body_start} remain"
                )
            payload = data[body_start : body_start + size]
        pos = body_start + size + (size & 1)  # chunks are word-aligned

    if fmt is None or payload is None:
        raise TruncatedFile("missing fmt or data chunk")

    audio_format, channels, sample_rate, _, _, bits = fmt
    if audio_format not in (_PCM, _IEEE_FLOAT):
        raise UnsupportedFormat(f"compression code {audio_format} (want PCM or IEEE float)")
    if channels not in (1, 2):
        raise UnsupportedFormat(f"{channels} channels (want 1 or 2)")

    if audio_format == _PCM:
        if bits != 16:
            raise UnsupportedFormat(f"{bits}-bit PCM (want 16)")
        raw = np.frombuffer(payload[: len(payload) - len(payload) % 2], dtype="<i2")
        samples = raw.astype(np.float64) / 32768.0
    else:
        if bits != 32:
            raise UnsupportedFormat(f"{bits}-bit float (want 32)")
        raw = np.frombuffer(payload[: len(payload) - len(payload) % 4], dtype="<f4")
        samples = np.clip(raw.astype(np.float64), -1.0, 1.0)

    if samples.size == 0:
        raise TruncatedFile("data chunk holds no complete samples")
    samples = samples[: samples.size - samples.size % channels]
    return Waveform(samples=samples, sample_rate=sample_rate, channels=channels)


def read_wav(path) -> Waveform:
    with open(path, "rb") as fh:
        return decode_wav(fh.read())


def encode_wav(samples: np.ndarray, sample_rate: int) -> bytes:
    """Encode mono samples in [-1, 1] as a PCM16 WAV byte string."""
    samples = np.asarray(samples, dtype=np.float64)
    if samples.ndim != 1:
        raise ValueError(f"expected mono samples, got shape {samples.shape}")
    pcm = np.clip(np.round(samples * 32767.0), -32768, 32767).astype("<i2")
    body = pcm.tobytes()
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF",
        36 + len(body),
        b"WAVE",
        b"fmt ",
        16,
        _PCM,
        1,
        sample_rate,
        sample_rate * 2,
        2,
        16,
        b"data",
        len(body),
    )
    return header + body


def write_wav(path, samples: np.ndarray, sample_rate: int) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_wav(samples, sample_rate))
