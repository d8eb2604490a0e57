import json

import numpy as np
import pytest

from respire.wavio import write_wav


@pytest.fixture
def corpus_builder(tmp_path):
    """Factory writing wav+json pairs under a fresh corpus root."""

    root = tmp_path / "corpus"
    root.mkdir()

    def add(base_name, events, record_label="Normal", sample_rate=16000,
            duration_ms=None, annotation=True):
        if duration_ms is None:
            duration_ms = max((e["end"] for e in events), default=1000) + 200
        n = duration_ms * sample_rate // 1000
        rng = np.random.default_rng(abs(hash(base_name)) % 2**32)
        write_wav(root / f"{base_name}.wav", rng.uniform(-0.1, 0.1, size=n), sample_rate)
        if annotation:
            (root / f"{base_name}.json").write_text(json.dumps({
                "record_annotation": record_label,
                "event_annotation": events,
            }))
        return root / f"{base_name}.wav"

    add.root = root
    return add
