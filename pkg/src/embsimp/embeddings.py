"""EMB1: the binary interchange format for embedding matrices.

Layout (the byte-level contract shared with external coders):

    bytes 0..3   magic "EMB1"
    bytes 4..15  little-endian u32: version (=1), row_count, dim
    then         row_count * dim little-endian IEEE-754 float32, row-major

A valid file has at least one row, a positive dim, and only finite values.
Matrices are immutable after load; files are single-writer, multi-reader.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

MAGIC = b"EMB1"
VERSION = 1
_HEADER = struct.Struct("<III")


class EmbeddingFormatError(ValueError):
    pass


class BadMagicError(EmbeddingFormatError):
    pass


class BadVersionError(EmbeddingFormatError):
    pass


class TruncatedFileError(EmbeddingFormatError):
    pass


class NonFiniteValueError(EmbeddingFormatError):
    def __init__(self, row: int, col: int):
        super().__init__(f"non-finite value at row {row}, column {col}")
        self.row = row
        self.col = col


class EmptyMatrixError(ValueError):
    pass


class DimMismatchError(ValueError):
    pass


def _check_finite(arr: np.ndarray) -> None:
    if not np.all(np.isfinite(arr)):
        bad = np.argwhere(~np.isfinite(arr))[0]
        raise NonFiniteValueError(int(bad[0]), int(bad[1]))


@dataclass(frozen=True)
class EmbeddingMatrix:
    """A (rows, dim) float32 matrix; row order mirrors the sentence file it
    was produced from. The lang tag is in-memory metadata and not persisted."""

    data: np.ndarray
    lang: str = ""

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float32)
        if arr.ndim != 2:
            raise ValueError(f"expected a 2-D array, got shape {arr.shape}")
        if arr.shape[1] < 1:
            raise ValueError("dim must be positive")
        _check_finite(arr)
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def row_count(self) -> int:
        return self.data.shape[0]

    @property
    def dim(self) -> int:
        return self.data.shape[1]

    def row(self, i: int) -> np.ndarray:
        return self.data[i]


def write_embeddings(m: EmbeddingMatrix, path: str | Path) -> None:
    """Serialize a matrix as EMB1. Rejects empty matrices."""
    if m.row_count == 0:
        raise EmptyMatrixError("refusing to write a matrix with no rows")
    header = MAGIC + _HEADER.pack(VERSION, m.row_count, m.dim)
    payload = m.data.astype("<f4", copy=False).tobytes(order="C")
    Path(path).write_bytes(header + payload)


def read_embeddings(path: str | Path, lang: str = "") -> EmbeddingMatrix:
    """Exact inverse of write_embeddings, with full validation."""
    raw = Path(path).read_bytes()
    if len(raw) < 4:
        raise TruncatedFileError(f"file too short for a magic: {len(raw)} bytes")
    if raw[:4] != MAGIC:
        raise BadMagicError(f"bad magic {raw[:4]!r}, expected {MAGIC!r}")
    if len(raw) < 4 + _HEADER.size:
        raise TruncatedFileError(f"file too short for a header: {len(raw)} bytes")
    version, rows, dim = _HEADER.unpack_from(raw, 4)
    if version != VERSION:
        raise BadVersionError(f"unsupported version {version}")
    if rows == 0:
        raise EmptyMatrixError("file declares zero rows")
    if dim == 0:
        raise EmbeddingFormatError("file declares zero dim")
    expected = 4 + _HEADER.size + rows * dim * 4
    if len(raw) != expected:
        raise TruncatedFileError(
            f"declared {rows}x{dim} needs {expected} bytes, file has {len(raw)}"
        )
    arr = np.frombuffer(raw, dtype="<f4", offset=16).reshape(rows, dim)
    _check_finite(arr)
    return EmbeddingMatrix(arr.copy(), lang=lang)
