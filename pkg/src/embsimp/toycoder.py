"""Deterministic stand-in encoder/decoder for desk-scale pipeline tests.

Encoding: character n-grams (boundary-padded) hashed with the seed into a
signed count vector, then L2-normalized. Decoding: cosine nearest neighbor
over a pool of sentences encoded under the same config. The decoder is
retrieval-based on purpose; it gives exact-match round trips instead of
semantic fidelity.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .corpus import Sentence
from .embeddings import DimMismatchError, EmbeddingMatrix
from .rng import hash_bytes

log = logging.getLogger(__name__)

# Sentences can never contain a line break, so LF is a collision-free
# boundary marker for the n-gram window.
_BOUNDARY = "\n"


class EmptyPoolError(ValueError):
    pass


class EmptyQueryError(ValueError):
    pass


class DuplicateSentencesError(ValueError):
    pass


@dataclass(frozen=True)
class ToyCoderConfig:
    dim: int = 1024
    seed: int = 42
    ngram_order: int = 3

    def __post_init__(self):
        if self.dim < 8:
            raise ValueError(f"dim must be at least 8, got {self.dim}")
        if self.ngram_order < 1:
            raise ValueError(f"ngram_order must be at least 1, got {self.ngram_order}")


def toy_encode(s: Sentence | str, cfg: ToyCoderConfig) -> np.ndarray:
    """Encode one sentence to a unit-norm float32 vector of cfg.dim.

    The hash of each n-gram is a 64-bit mix of (seed, n-gram UTF-8 bytes);
    the column is hash mod dim, the sign comes from bit 63. Empty input
    yields the zero vector, the only permitted non-unit output.
    """
    text = s.text if isinstance(s, Sentence) else s
    acc = np.zeros(cfg.dim, dtype=np.float64)
    if not text:
        return acc.astype(np.float32)
    k = cfg.ngram_order
    padded = _BOUNDARY * (k - 1) + text + _BOUNDARY * (k - 1)
    for i in range(len(padded) - k + 1):
        h = hash_bytes(cfg.seed, padded[i : i + k].encode("utf-8"))
        sign = 1.0 if (h >> 63) == 0 else -1.0
        acc[h % cfg.dim] += sign
    norm = float(np.sqrt(np.sum(acc * acc)))
    if norm == 0.0:
        return acc.astype(np.float32)
    return (acc / norm).astype(np.float32)


def encode_sentences(
    sentences: Sequence[Sentence | str], cfg: ToyCoderConfig, lang: str | None = None
) -> EmbeddingMatrix:
    """Encode a batch, one row per sentence, input order preserved."""
    if not sentences:
        raise ValueError("nothing to encode")
    if lang is None:
        first = sentences[0]
        lang = first.lang if isinstance(first, Sentence) else ""
    rows = np.stack([toy_encode(s, cfg) for s in sentences])
    return EmbeddingMatrix(rows, lang=lang)


@dataclass(frozen=True)
class DecodePool:
    """Candidate sentences with their encodings under one config."""

    sentences: tuple[Sentence, ...]
    embeddings: EmbeddingMatrix

    def __post_init__(self):
        object.__setattr__(self, "sentences", tuple(self.sentences))
        if not self.sentences:
            raise EmptyPoolError("decode pool is empty")
        if len(self.sentences) != self.embeddings.row_count:
            raise ValueError(
                f"{len(self.sentences)} sentences but "
                f"{self.embeddings.row_count} embedding rows"
            )

    @classmethod
    def build(cls, sentences: Sequence[Sentence], cfg: ToyCoderConfig) -> "DecodePool":
        return cls(tuple(sentences), encode_sentences(sentences, cfg))

    @property
    def dim(self) -> int:
        return self.embeddings.dim


def _cosine_matrix(queries: np.ndarray, pool: DecodePool) -> np.ndarray:
    """Cosine similarities, queries x pool, computed in float64."""
    pool_data = pool.embeddings.data.astype(np.float64)
    pool_norms = np.linalg.norm(pool_data, axis=1)
    q_norms = np.linalg.norm(queries, axis=1)
    if np.any(q_norms == 0.0):
        raise EmptyQueryError("cannot decode a zero vector")
    sims = (queries @ pool_data.T) / np.outer(q_norms, pool_norms + (pool_norms == 0.0))
    # a degenerate all-zero pool row never wins
    sims[:, pool_norms == 0.0] = -2.0
    return sims


def toy_decode(e: np.ndarray, pool: DecodePool) -> Sentence:
    """Return the pool sentence with the highest cosine similarity to e;
    ties break toward the lowest pool index."""
    q = np.asarray(e, dtype=np.float64).ravel()
    if q.size != pool.dim:
        raise DimMismatchError(f"query dim {q.size} vs pool dim {pool.dim}")
    sims = _cosine_matrix(q[None, :], pool)
    return pool.sentences[int(np.argmax(sims[0]))]


def decode_matrix(m: EmbeddingMatrix, pool: DecodePool) -> list[Sentence]:
    """Batch toy_decode, row by row, with the same tie rule."""
    if m.dim != pool.dim:
        raise DimMismatchError(f"matrix dim {m.dim} vs pool dim {pool.dim}")
    sims = _cosine_matrix(m.data.astype(np.float64), pool)
    return [pool.sentences[int(i)] for i in np.argmax(sims, axis=1)]


def roundtrip_check(sentences: Sequence[Sentence], cfg: ToyCoderConfig) -> float:
    """Fraction of sentences that decode back to themselves from their own
    encoding, with the pool being the sentences themselves. Misses are
    embedding collisions and are logged, never silently tolerated."""
    texts = [s.text for s in sentences]
    if len(set(texts)) != len(texts):
        raise DuplicateSentencesError("round-trip input must be pairwise distinct")
    pool = DecodePool.build(sentences, cfg)
    decoded = decode_matrix(pool.embeddings, pool)
    hits = 0
    for original, result in zip(sentences, decoded):
        if result.text == original.text:
            hits += 1
        else:
            log.warning(
                "round-trip miss: %r decoded as %r (embedding collision)",
                original.text,
                result.text,
            )
    return hits / len(sentences)
