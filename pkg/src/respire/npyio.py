"""Minimal NPY v1.0 reader/writer for the pipeline's on-disk arrays.

Supports exactly what the embedding artifacts need: C-order, little-endian,
1-d or 2-d arrays of float32 or int64. The header is padded so that the
data block starts on a 64-byte boundary, matching the format spec, and the
files stay readable by ``numpy.load``.
"""

from __future__ import annotations

import ast
import struct
from pathlib import Path

import numpy as np

from .errors import DtypeUnsupported, NpyHeaderError

_MAGIC = b"\x93NUMPY"
_VERSION = (1, 0)
_DESCRS = {"<f4": np.float32, "<i8": np.int64}
_DTYPES = {np.dtype(np.float32): "<f4", np.dtype(np.int64): "<i8"}


def write_npy(array: np.ndarray, path) -> None:
    """Write a non-empty 1-d or 2-d float32/int64 array as NPY v1.0."""
    arr = np.asarray(array)
    if arr.dtype not in _DTYPES:
        raise DtypeUnsupported(f"dtype {arr.dtype} not in {sorted(d for d in _DESCRS)}")
    if arr.ndim not in (1, 2):
        raise ValueError(f"expected a 1-d or 2-d array, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError("refusing to write an empty array")
    arr = np.ascontiguousarray(arr)

    shape = arr.shape if arr.ndim == 2 else (arr.shape[0],)
    header = (
        "{'descr': '%s', 'fortran_order': False, 'shape': %s, }"
        % (_DTYPES[arr.dtype], _shape_literal(shape))
    ).encode("latin1")
    # magic(6) + version(2) + hlen(2) + header must be a multiple of 64
    prefix_len = len(_MAGIC) + 2 + 2
    pad = (-(prefix_len + len(header) + 1)) % 64
    header = header + b" " * pad + b"\n"

    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(bytes(_VERSION))
        fh.write(struct.pack("<H", len(header)))
        fh.write(header)
        fh.write(arr.tobytes(order="C"))


def read_npy(path) -> np.ndarray:
    """Read an NPY v1.0 file written by this module (or numpy)."""
    data = Path(path).read_bytes()
    if len(data) < 10 or data[:6] != _MAGIC:
        raise NpyHeaderError(f"{path}: not an NPY file (bad magic)")
    if tuple(data[6:8]) != _VERSION:
        raise NpyHeaderError(f"{path}: unsupported NPY version {tuple(data[6:8])}")
    (hlen,) = struct.unpack("<H", data[8:10])
    if len(data) < 10 + hlen:
        raise NpyHeaderError(f"{path}: truncated header")
    try:
        meta = ast.literal_eval(data[10 : 10 + hlen].decode("latin1"))
    except (ValueError, SyntaxError) as exc:
        raise NpyHeaderError(f"{path}: unparseable header") from exc
    if not isinstance(meta, dict) or set(meta) != {"descr", "fortran_order", "shape"}:
        raise NpyHeaderError(f"{path}: header keys {sorted(meta) if isinstance(meta, dict) else meta}")
    if meta["fortran_order"]:
        raise NpyHeaderError(f"{path}: fortran-order arrays are not supported")
    descr = meta["descr"]
    if descr not in _DESCRS:
        raise DtypeUnsupported(f"{path}: dtype {descr!r} not in {sorted(_DESCRS)}")
    shape = tuple(meta["shape"])
    if len(shape) not in (1, 2) or any(not isinstance(s, int) or s < 0 for s in shape):
        raise NpyHeaderError(f"{path}: unsupported shape {shape}")

    dtype = np.dtype(_DESCRS[descr])
    count = int(np.prod(shape)) if shape else 0
    body = data[10 + hlen :]
    if len(body) < count * dtype.itemsize:
        raise NpyHeaderError(f"{path}: data block shorter than declared shape")
    return np.frombuffer(body, dtype=dtype, count=count).reshape(shape).copy()


def _shape_literal(shape: tuple[int, ...]) -> str:
    if len(shape) == 1:
        return f"({shape[0]},)"
    return "(" + ", ".join(str(s) for s in shape) + ")"
