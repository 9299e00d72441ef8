"""Encoder/decoder backends.

SonarBackend wraps the pretrained SONAR text pipelines (imported lazily so
the CLI stays usable for diagnostics without torch installed). HashBackend
is a deterministic stand-in for protocol tests on machines without the
models; its decoder emits placeholder lines, one per row.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass

import numpy as np

SONAR_DIM = 1024
_LANG_TAG = re.compile(r"^[a-z]{3}_[A-Z][a-z]{3}$")


class BackendUnavailableError(RuntimeError):
    pass


def check_lang(lang: str) -> str:
    """FLORES-200 style tag: three-letter language, underscore, script."""
    if not _LANG_TAG.match(lang):
        raise ValueError(
            f"language tag {lang!r} is not FLORES-200 shaped (e.g. eng_Latn)"
        )
    return lang


@dataclass(frozen=True)
class BridgeConfig:
    lang: str
    device: str = "auto"
    batch_size: int = 32
    max_seq_len: int = 512

    def __post_init__(self):
        check_lang(self.lang)
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be positive, got {self.batch_size}")
        if self.max_seq_len < 1:
            raise ValueError(f"max_seq_len must be positive, got {self.max_seq_len}")


class SonarBackend:
    """Pretrained SONAR text encoder/decoder (1024-dim shared space)."""

    ENCODER = "text_sonar_basic_encoder"
    DECODER = "text_sonar_basic_decoder"

    def __init__(self, config: BridgeConfig):
        try:
            import torch
            from sonar.inference_pipelines.text import (
                EmbeddingToTextModelPipeline,
                TextToEmbeddingModelPipeline,
            )
        except ImportError as e:
            raise BackendUnavailableError(
                "the sonar backend needs the 'sonar-space' and 'torch' packages "
                f"(pip install 'sonar-bridge[sonar]'): {e}"
            ) from e
        self.config = config
        self._torch = torch
        device = config.device
        if device == "auto":
            device = "cuda" if torch.cuda.is_available() else "cpu"
        self._device = torch.device(device)
        self._encode_pipeline = TextToEmbeddingModelPipeline(
            encoder=self.ENCODER, tokenizer=self.ENCODER, device=self._device
        )
        self._decode_pipeline = EmbeddingToTextModelPipeline(
            decoder=self.DECODER, tokenizer=self.ENCODER, device=self._device
        )

    def encode(self, lines: list[str]) -> np.ndarray:
        emb = self._encode_pipeline.predict(
            lines, source_lang=self.config.lang, batch_size=self.config.batch_size
        )
        out = emb.detach().cpu().numpy().astype(np.float32)
        if out.shape != (len(lines), SONAR_DIM):
            raise RuntimeError(f"encoder returned unexpected shape {out.shape}")
        return out

    def decode(self, matrix: np.ndarray) -> list[str]:
        tensor = self._torch.from_numpy(np.ascontiguousarray(matrix, dtype=np.float32))
        texts = self._decode_pipeline.predict(
            tensor,
            target_lang=self.config.lang,
            batch_size=self.config.batch_size,
            max_seq_len=self.config.max_seq_len,
        )
        return [str(t) for t in texts]


class HashBackend:
    """Model-free stand-in: seeded word-hash encoder, placeholder decoder."""

    def __init__(self, config: BridgeConfig):
        self.config = config

    def encode(self, lines: list[str]) -> np.ndarray:
        rows = np.zeros((len(lines), SONAR_DIM), dtype=np.float64)
        for i, line in enumerate(lines):
            for token in f"{self.config.lang} {line}".split():
                digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
                value = int.from_bytes(digest, "little")
                rows[i, value % SONAR_DIM] += 1.0 if value >> 63 == 0 else -1.0
            norm = np.linalg.norm(rows[i])
            if norm > 0.0:
                rows[i] /= norm
            else:
                rows[i, 0] = 1.0
        return rows.astype(np.float32)

    def decode(self, matrix: np.ndarray) -> list[str]:
        return [
            f"{self.config.lang} placeholder {i} {float(np.abs(row).sum()):.3f}"
            for i, row in enumerate(matrix)
        ]


BACKENDS = {"sonar": SonarBackend, "hash": HashBackend}
