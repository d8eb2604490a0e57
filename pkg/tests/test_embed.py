import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import numpy as np
import pytest

from respire.audio import BinaryLabel, Clip
from respire.dataset import EventLabel
from respire.embed import (
    EMBED_DIM,
    EmbeddingMatrix,
    RemoteProvider,
    SurrogateEmbedder,
    SurrogateProvider,
    embed_batch,
)
from respire.errors import DimensionMismatch, ProviderUnavailable


def _clip(seed, label=BinaryLabel.NEGATIVE):
    rng = np.random.default_rng(seed)
    return Clip(
        samples=rng.uniform(-0.5, 0.5, 32000).astype(np.float32),
        label=label, source="10_1.0_0_p1_0001", event_index=0,
        window_offset_ms=seed, padded_samples=0, event_label=EventLabel.NORMAL,
    )


class TestSurrogate:
    def test_silence_hits_log_floor(self):
        emb = SurrogateEmbedder()
        vec = emb.transform(np.zeros((1, 32000)))[0]
        floor = np.float32(np.log(emb.log_floor))
        assert np.all(vec[:256] == floor)  # energy slots
        assert np.all(vec[256:] == 0.0)  # deltas of a constant signal

    def test_deterministic_bit_exact(self):
        clip = _clip(3)
        a = SurrogateEmbedder().transform(clip.samples[None, :])
        b = SurrogateEmbedder().transform(clip.samples[None, :])
        assert a.tobytes() == b.tobytes()

    def test_tone_vs_noise_dissimilar(self):
        # oracle ran ahead of this test: cosine was ~-0.55, far below 0.9
        t = np.arange(32000) / 16000
        sine = 0.3 * np.sin(2 * np.pi * 400 * t)
        noise = 0.3 * np.clip(np.random.default_rng(0).standard_normal(32000), -1, 1)
        emb = SurrogateEmbedder()
        v1 = emb.transform(sine[None, :])[0].astype(np.float64)
        v2 = emb.transform(noise[None, :])[0].astype(np.float64)
        cos = v1 @ v2 / (np.linalg.norm(v1) * np.linalg.norm(v2))
        assert cos < 0.9

    def test_output_shape_and_finiteness(self):
        vecs = SurrogateEmbedder().transform(np.vstack([_clip(i).samples for i in range(3)]))
        assert vecs.shape == (3, EMBED_DIM)
        assert vecs.dtype == np.float32
        assert np.all(np.isfinite(vecs))

    def test_wrong_length_rejected(self):
        with pytest.raises(DimensionMismatch):
            SurrogateEmbedder().transform(np.zeros((1, 16000)))


class TestEmbedBatch:
    def test_order_preserved_across_batches(self):
        clips = [_clip(i) for i in range(5)]
        whole = embed_batch(SurrogateProvider(), clips, batch_size=5)
        pieces = embed_batch(SurrogateProvider(), clips, batch_size=2)
        assert np.array_equal(whole.rows, pieces.rows)
        assert whole.clip_ids == [c.clip_id for c in clips]

    def test_empty_input_no_calls(self):
        calls = []

        class Spy:
            def embed(self, batch):
                calls.append(batch)
                return np.zeros((len(batch), EMBED_DIM), dtype=np.float32)

        matrix = embed_batch(Spy(), [], batch_size=4)
        assert len(matrix) == 0
        assert calls == []

    def test_wrong_dimension_surfaces(self):
        class Bad:
            def embed(self, batch):
                return np.zeros((len(batch), 256), dtype=np.float32)

        with pytest.raises(DimensionMismatch):
            embed_batch(Bad(), [_clip(0)], batch_size=1)

    def test_labels_follow_clips(self):
        clips = [_clip(0, BinaryLabel.POSITIVE), _clip(1, BinaryLabel.NEGATIVE)]
        matrix = embed_batch(SurrogateProvider(), clips, batch_size=2)
        assert matrix.labels.tolist() == [1, 0]


class TestPersistence:
    def test_save_load_round_trip(self, tmp_path):
        clips = [_clip(i, BinaryLabel.POSITIVE if i % 2 else BinaryLabel.NEGATIVE)
                 for i in range(4)]
        matrix = embed_batch(SurrogateProvider(), clips, batch_size=3)
        matrix.save(tmp_path)
        assert sorted(p.name for p in tmp_path.iterdir()) == [
            "embeddings.npy", "filenames.txt", "labels.npy",
        ]
        back = EmbeddingMatrix.load(tmp_path)
        assert np.array_equal(back.rows, matrix.rows)
        assert np.array_equal(back.labels, matrix.labels)
        assert back.clip_ids == matrix.clip_ids
        assert set(back.labels.tolist()) == {0, 1}
        assert back.labels.dtype == np.int64
        assert back.rows.dtype == np.float32

    def test_empty_matrix_refused(self, tmp_path):
        matrix = embed_batch(SurrogateProvider(), [], batch_size=1)
        with pytest.raises(ValueError):
            matrix.save(tmp_path)

    def test_misaligned_refused(self):
        with pytest.raises(ValueError):
            EmbeddingMatrix(rows=np.zeros((2, EMBED_DIM), dtype=np.float32),
                            labels=np.array([1]), clip_ids=["a", "b"])


class _StubHandler(BaseHTTPRequestHandler):
    fail_times = 0
    dim = EMBED_DIM
    binary = False
    seen: list = []

    def do_POST(self):
        body = json.loads(self.rfile.read(int(self.headers["Content-Length"])))
        type(self).seen.append(len(body["clips"]))
        if type(self).fail_times > 0:
            type(self).fail_times -= 1
            self.send_error(503)
            return
        n = len(body["clips"])
        if self.binary and "octet-stream" in self.headers.get("Accept", ""):
            rows = np.arange(n * self.dim, dtype="<f4")
            payload = np.array([n], dtype="<u4").tobytes() + rows.tobytes()
            self.send_response(200)
            self.send_header("Content-Type", "application/octet-stream")
            self.send_header("Content-Length", str(len(payload)))
            self.end_headers()
            self.wfile.write(payload)
            return
        rows = [[float(i)] * self.dim for i in range(n)]
        payload = json.dumps({"embeddings": rows}).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def log_message(self, *args):
        pass


@pytest.fixture
def stub_server():
    server = ThreadingHTTPServer(("127.0.0.1", 0), _StubHandler)
    _StubHandler.fail_times = 0
    _StubHandler.dim = EMBED_DIM
    _StubHandler.binary = False
    _StubHandler.seen = []
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_address[1]}"
    server.shutdown()
    server.server_close()


class TestRemoteProvider:
    def test_json_round_trip(self, stub_server):
        provider = RemoteProvider(stub_server, retries=1)
        rows = provider.embed(np.zeros((3, 32000), dtype=np.float32))
        assert rows.shape == (3, EMBED_DIM)
        assert rows[1, 0] == 1.0

    def test_retry_then_success(self, stub_server):
        _StubHandler.fail_times = 2
        provider = RemoteProvider(stub_server, retries=3, backoff_s=0.01)
        rows = provider.embed(np.zeros((2, 32000), dtype=np.float32))
        assert rows.shape == (2, EMBED_DIM)
        assert len(_StubHandler.seen) == 3

    def test_exhausted_retries(self, stub_server):
        _StubHandler.fail_times = 99
        provider = RemoteProvider(stub_server, retries=2, backoff_s=0.01)
        with pytest.raises(ProviderUnavailable):
            provider.embed(np.zeros((1, 32000), dtype=np.float32))

    def test_endpoint_down(self):
        provider = RemoteProvider("http://127.0.0.1:9", retries=2, backoff_s=0.01)
        with pytest.raises(ProviderUnavailable):
            provider.embed(np.zeros((1, 32000), dtype=np.float32))

    def test_wrong_dimension(self, stub_server):
        _StubHandler.dim = 256
        provider = RemoteProvider(stub_server, retries=1)
        with pytest.raises(DimensionMismatch):
            provider.embed(np.zeros((1, 32000), dtype=np.float32))

    def test_binary_variant(self, stub_server):
        _StubHandler.binary = True
        provider = RemoteProvider(stub_server, retries=1, binary=True)
        rows = provider.embed(np.zeros((2, 32000), dtype=np.float32))
        assert rows.shape == (2, EMBED_DIM)
        assert rows[0, 0] == 0.0 and rows[1, 0] == float(EMBED_DIM)
