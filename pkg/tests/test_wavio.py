import struct

import numpy as np
import pytest

from respire.errors import TruncatedFile, UnsupportedFormat
from respire.wavio import decode_wav, encode_wav, read_wav, write_wav


def _pcm16_wav(samples, sample_rate=16000, channels=1, audio_format=1, bits=16):
    pcm = np.asarray(samples, dtype="<i2").tobytes()
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI", b"RIFF", 36 + len(pcm), b"WAVE", b"fmt ", 16,
        audio_format, channels, sample_rate, sample_rate * channels * bits // 8,
        channels * bits // 8, bits, b"data", len(pcm),
    )
    return header + pcm


def test_pcm16_normalization():
    w = decode_wav(_pcm16_wav([0, 16384, -32768]))
    assert w.sample_rate == 16000
    assert w.channels == 1
    assert np.allclose(w.samples, [0.0, 0.5, -1.0])


def test_float32_passthrough_with_clamp():
    body = np.array([0.25, 1.5, -2.0], dtype="<f4").tobytes()
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI", b"RIFF", 36 + len(body), b"WAVE", b"fmt ", 16,
        3, 1, 16000, 64000, 4, 32, b"data", len(body),
    )
    w = decode_wav(header + body)
    assert np.allclose(w.samples, [0.25, 1.0, -1.0])


def test_adpcm_rejected():
    with pytest.raises(UnsupportedFormat):
        decode_wav(_pcm16_wav([0, 1], audio_format=2))  # 2 = MS ADPCM


def test_three_channels_rejected():
    with pytest.raises(UnsupportedFormat):
        decode_wav(_pcm16_wav([0, 1, 2], channels=3))


def test_truncated_data_chunk():
    data = _pcm16_wav(list(range(100)))
    with pytest.raises(TruncatedFile):
        decode_wav(data[:-50])


def test_not_riff():
    with pytest.raises(UnsupportedFormat):
        decode_wav(b"OGGS" + b"\x00" * 100)


def test_stereo_decodes_interleaved():
    w = decode_wav(_pcm16_wav([100, 200, 300, 400], channels=2))
    assert w.channels == 2
    assert w.samples.size == 4


def test_write_read_round_trip(tmp_path):
    samples = np.sin(np.linspace(0, 20, 1600)) * 0.7
    path = tmp_path / "t.wav"
    write_wav(path, samples, 16000)
    back = read_wav(path)
    assert back.sample_rate == 16000
    assert back.samples.size == 1600
    # half-step quantization plus the 32767/32768 scale mismatch
    assert np.max(np.abs(back.samples - samples)) < 1.5 / 32768


def test_encode_is_deterministic():
    samples = np.linspace(-1, 1, 320)
    assert encode_wav(samples, 16000) == encode_wav(samples, 16000)
