"""Versioned binary model files.

Layout: magic ``RSPM`` | u16 format version | u16 kind length | kind utf8 |
u32 header length | JSON header | concatenated float64 little-endian array
blocks in header order. Everything numeric is stored as float64, which is
exact for the integer payloads (tree structure indices) as well.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from ..errors import VersionMismatch
from .ensemble import GradientBoostingClassifier, RandomForestClassifier
from .linear import LinearSvmClassifier, LogisticRegressionClassifier
from .mlp import MlpClassifier
from .tree import FlatTree

_MAGIC = b"RSPM"
_FORMAT_VERSION = 1

KINDS = {
    "svm": LinearSvmClassifier,
    "logreg": LogisticRegressionClassifier,
    "forest": RandomForestClassifier,
    "boosting": GradientBoostingClassifier,
    "mlp": MlpClassifier,
}
KIND_OF_CLASS = {cls: kind for kind, cls in KINDS.items()}


def save_model(model, path) -> None:
    kind = KIND_OF_CLASS.get(type(model))
    if kind is None:
        raise TypeError(f"cannot serialize {type(model).__name__}")
    arrays = _state_arrays(kind, model)
    params = {k: list(v) if isinstance(v, tuple) else v
              for k, v in model.get_params().items()}
    header = {
        "kind": kind,
        "params": params,
        "feature_dim": model.feature_dim_,
        "arrays": [{"name": name, "shape": list(arr.shape)} for name, arr in arrays],
    }
    header_bytes = json.dumps(header, sort_keys=True).encode()
    kind_bytes = kind.encode()
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<HH", _FORMAT_VERSION, len(kind_bytes)))
        fh.write(kind_bytes)
        fh.write(struct.pack("<I", len(header_bytes)))
        fh.write(header_bytes)
        for _, arr in arrays:
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def load_model(path):
    data = Path(path).read_bytes()
    if len(data) < 8 or data[:4] != _MAGIC:
        raise VersionMismatch(f"{path}: bad magic header")
    version, kind_len = struct.unpack_from("<HH", data, 4)
    if version != _FORMAT_VERSION:
        raise VersionMismatch(f"{path}: format version {version}, expected {_FORMAT_VERSION}")
    pos = 8
    kind = data[pos : pos + kind_len].decode()
    pos += kind_len
    (header_len,) = struct.unpack_from("<I", data, pos)
    pos += 4
    header = json.loads(data[pos : pos + header_len].decode())
    pos += header_len
    if kind not in KINDS or header.get("kind") != kind:
        raise VersionMismatch(f"{path}: unknown model kind {kind!r}")

    arrays = {}
    for spec in header["arrays"]:
        shape = tuple(spec["shape"])
        count = int(np.prod(shape)) if shape else 1
        arr = np.frombuffer(data, dtype="<f8", count=count, offset=pos).reshape(shape)
        arrays[spec["name"]] = arr.copy()
        pos += count * 8

    params = {k: tuple(v) if isinstance(v, list) else v
              for k, v in header["params"].items()}
    model = KINDS[kind](**params)
    _restore_state(kind, model, header["feature_dim"], arrays)
    return model


def _state_arrays(kind: str, model) -> list[tuple[str, np.ndarray]]:
    if kind in ("svm", "logreg"):
        return [("coef", model.coef_), ("intercept", np.array([model.intercept_]))]
    if kind == "forest":
        return _tree_arrays(model.trees_)
    if kind == "boosting":
        return [("base_score", np.array([model.base_score_]))] + _tree_arrays(model.trees_)
    if kind == "mlp":
        out = [("mean", model.mean_), ("scale", model.scale_)]
        for i, (W, b) in enumerate(zip(model.weights_, model.biases_)):
            out += [(f"w{i}", W), (f"b{i}", b)]
        return out
    raise AssertionError(kind)


def _tree_arrays(trees) -> list[tuple[str, np.ndarray]]:
    out = []
    for i, t in enumerate(trees):
        stacked = np.vstack([
            t.feature.astype(np.float64), t.threshold,
            t.left.astype(np.float64), t.right.astype(np.float64), t.value,
        ])
        out.append((f"tree{i}", stacked))
    return out


def _restore_state(kind: str, model, feature_dim: int, arrays: dict) -> None:
    model.feature_dim_ = feature_dim
    if kind in ("svm", "logreg"):
        model.coef_ = arrays["coef"]
        model.intercept_ = float(arrays["intercept"][0])
    elif kind == "forest":
        model.trees_ = _trees_from(arrays)
    elif kind == "boosting":
        model.base_score_ = float(arrays.pop("base_score")[0])
        model.trees_ = _trees_from(arrays)
    elif kind == "mlp":
        model.mean_ = arrays["mean"]
        model.scale_ = arrays["scale"]
        model.weights_ = []
        model.biases_ = []
        for i in range(len(model.hidden) + 1):
            model.weights_.append(arrays[f"w{i}"])
            model.biases_.append(arrays[f"b{i}"])


def _trees_from(arrays: dict) -> list[FlatTree]:
    trees = []
    for i in range(len(arrays)):
        stacked = arrays[f"tree{i}"]
        trees.append(FlatTree(
            feature=stacked[0].astype(np.int32),
            threshold=stacked[1],
            left=stacked[2].astype(np.int32),
            right=stacked[3].astype(np.int32),
            value=stacked[4],
        ))
    return trees
