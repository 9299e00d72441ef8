"""EMB1 reader/writer for the bridge side of the exchange.

This mirrors the byte-level contract of the toolkit that consumes the
bridge (magic "EMB1", little-endian u32 version/rows/dim, float32 payload
row-major) without importing it: the format is the interface, and each side
implements it independently.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

MAGIC = b"EMB1"
VERSION = 1
_HEADER = struct.Struct("<III")


class Emb1Error(ValueError):
    pass


def write_matrix(data: np.ndarray, path: str | Path) -> None:
    arr = np.ascontiguousarray(np.asarray(data, dtype=np.float32))
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise Emb1Error(f"need a non-empty 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise Emb1Error("matrix contains non-finite values")
    rows, dim = arr.shape
    payload = arr.astype("<f4", copy=False).tobytes(order="C")
    Path(path).write_bytes(MAGIC + _HEADER.pack(VERSION, rows, dim) + payload)


def read_matrix(path: str | Path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) < 4 + _HEADER.size:
        raise Emb1Error(f"file too short: {len(raw)} bytes")
    if raw[:4] != MAGIC:
        raise Emb1Error(f"bad magic {raw[:4]!r}")
    version, rows, dim = _HEADER.unpack_from(raw, 4)
    if version != VERSION:
        raise Emb1Error(f"unsupported version {version}")
    if rows < 1 or dim < 1:
        raise Emb1Error(f"invalid declared shape {rows}x{dim}")
    expected = 4 + _HEADER.size + rows * dim * 4
    if len(raw) != expected:
        raise Emb1Error(f"expected {expected} bytes for {rows}x{dim}, got {len(raw)}")
    arr = np.frombuffer(raw, dtype="<f4", offset=16).reshape(rows, dim).copy()
    if not np.all(np.isfinite(arr)):
        raise Emb1Error("payload contains non-finite values")
    return arr
