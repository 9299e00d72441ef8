"""Two-layer fully-connected network trained with Adam on embedding pairs.

The model maps a dim-wide embedding through a hidden layer of K nodes back
to dim outputs: out = W2 @ act(W1 @ x + b1) + b2. Parameters are float32
(the on-disk precision); all arithmetic runs in float64 with numpy's
deterministic reductions, so identical data, config, and seed give
bit-identical training runs.

Training follows a checkpoint/rollback protocol: every checkpoint_interval
epochs the full-validation MSE is recorded; after `patience` consecutive
checkpoint-to-checkpoint increases the run stops early, and in every case
the snapshot with the lowest validation loss is returned.

Model files use the MLP1 format:

    bytes 0..3   magic "MLP1"
    bytes 4..15  little-endian u32: version (=1), dim, hidden
    then         float32 LE parameters: W1 row-major, b1, W2 row-major, b2

MLP1 has no activation field, so only models with the default ReLU
activation are serializable.
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .embeddings import (
    BadMagicError,
    BadVersionError,
    DimMismatchError,
    EmbeddingMatrix,
    TruncatedFileError,
)

MODEL_MAGIC = b"MLP1"
MODEL_VERSION = 1
_HEADER = struct.Struct("<III")


class ShapeMismatchError(ValueError):
    pass


class RowMismatchError(ValueError):
    pass


def _relu(x):
    return np.maximum(x, 0.0)


def _relu_grad(x):
    return (x > 0.0).astype(np.float64)


def _tanh_grad(x):
    t = np.tanh(x)
    return 1.0 - t * t


_ACTIVATIONS: dict[str, tuple[Callable, Callable]] = {
    "relu": (_relu, _relu_grad),
    "tanh": (np.tanh, _tanh_grad),
}


def param_count(dim: int, hidden: int) -> int:
    """Total parameters of a dim -> hidden -> dim network."""
    if dim < 1 or hidden < 1:
        raise ValueError("dim and hidden must be at least 1")
    return 2 * dim * hidden + hidden + dim


def _as_param(arr, shape) -> np.ndarray:
    out = np.asarray(arr, dtype=np.float32)
    if out.shape != shape:
        raise ShapeMismatchError(f"expected shape {shape}, got {out.shape}")
    if not np.all(np.isfinite(out)):
        raise ValueError("parameters must be finite")
    out = np.ascontiguousarray(out)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class MlpModel:
    dim: int
    hidden: int
    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray
    activation: str = "relu"

    def __post_init__(self):
        if self.activation not in _ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")
        object.__setattr__(self, "W1", _as_param(self.W1, (self.hidden, self.dim)))
        object.__setattr__(self, "b1", _as_param(self.b1, (self.hidden,)))
        object.__setattr__(self, "W2", _as_param(self.W2, (self.dim, self.hidden)))
        object.__setattr__(self, "b2", _as_param(self.b2, (self.dim,)))

    @property
    def param_count(self) -> int:
        return param_count(self.dim, self.hidden)


@dataclass(frozen=True)
class ParamSet:
    """Arrays shaped like a model's parameters (gradients, Adam moments)."""

    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray

    @classmethod
    def zeros_like(cls, model: MlpModel) -> "ParamSet":
        return cls(
            np.zeros((model.hidden, model.dim)),
            np.zeros(model.hidden),
            np.zeros((model.dim, model.hidden)),
            np.zeros(model.dim),
        )


@dataclass(frozen=True)
class AdamState:
    m: ParamSet
    v: ParamSet
    t: int = 0

    @classmethod
    def initial(cls, model: MlpModel) -> "AdamState":
        return cls(ParamSet.zeros_like(model), ParamSet.zeros_like(model), 0)


@dataclass(frozen=True)
class TrainingConfig:
    learning_rate: float = 0.001
    max_epochs: int = 10000
    checkpoint_interval: int = 50
    patience: int = 5
    batch_size: int = 256
    seed: int = 42
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_epsilon: float = 1e-8

    def __post_init__(self):
        positive = (
            ("learning_rate", self.learning_rate),
            ("max_epochs", self.max_epochs),
            ("checkpoint_interval", self.checkpoint_interval),
            ("patience", self.patience),
            ("batch_size", self.batch_size),
            ("adam_beta1", self.adam_beta1),
            ("adam_beta2", self.adam_beta2),
            ("adam_epsilon", self.adam_epsilon),
        )
        for name, value in positive:
            if value <= 0:
                raise ValueError(f"{name} must be positive, got {value}")


@dataclass(frozen=True)
class Checkpoint:
    epoch: int
    model: MlpModel
    validation_loss: float

    def __post_init__(self):
        if not math.isfinite(self.validation_loss):
            raise ValueError(
                f"validation loss is not finite at epoch {self.epoch}"
            )


@dataclass(frozen=True)
class CheckpointRecord:
    epoch: int
    train_loss: float
    validation_loss: float


@dataclass(frozen=True)
class TrainingLog:
    records: tuple[CheckpointRecord, ...]
    stop_reason: str  # "max_epochs" | "early_stop"
    final_loss: float
    best_epoch: int
    param_count: int

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        epochs = [r.epoch for r in self.records]
        if any(b <= a for a, b in zip(epochs, epochs[1:])):
            raise ValueError("checkpoint epochs must be strictly increasing")
        if self.stop_reason not in ("max_epochs", "early_stop"):
            raise ValueError(f"unknown stop reason {self.stop_reason!r}")


def init_model(dim: int, hidden: int, seed: int, activation: str = "relu") -> MlpModel:
    """Seeded init: weights uniform in +-sqrt(6/(fan_in+fan_out)) drawn from
    a PCG64 stream (W1 first, then W2), biases zero."""
    if dim < 1 or hidden < 1:
        raise ValueError("dim and hidden must be at least 1")
    rng = np.random.default_rng(seed)
    limit = math.sqrt(6.0 / (dim + hidden))
    w1 = rng.uniform(-limit, limit, size=(hidden, dim))
    w2 = rng.uniform(-limit, limit, size=(dim, hidden))
    return MlpModel(
        dim,
        hidden,
        w1.astype(np.float32),
        np.zeros(hidden, dtype=np.float32),
        w2.astype(np.float32),
        np.zeros(dim, dtype=np.float32),
        activation,
    )


def _data_of(m) -> np.ndarray:
    return m.data if isinstance(m, EmbeddingMatrix) else np.asarray(m)


def _forward_raw(model: MlpModel, x64: np.ndarray):
    """float64 forward pass; returns (pre-activation, hidden, output)."""
    act, _ = _ACTIVATIONS[model.activation]
    h_pre = x64 @ model.W1.T.astype(np.float64) + model.b1.astype(np.float64)
    h = act(h_pre)
    out = h @ model.W2.T.astype(np.float64) + model.b2.astype(np.float64)
    return h_pre, h, out


def forward(model: MlpModel, batch: EmbeddingMatrix) -> EmbeddingMatrix:
    """Map each row independently through the network."""
    if batch.dim != model.dim:
        raise DimMismatchError(f"batch dim {batch.dim} vs model dim {model.dim}")
    out = _forward_raw(model, batch.data.astype(np.float64))[2]
    return EmbeddingMatrix(out.astype(np.float32), lang=batch.lang)


def transform_embeddings(model: MlpModel, m: EmbeddingMatrix) -> EmbeddingMatrix:
    """Pipeline-facing name for forward; carries the input's lang tag."""
    return forward(model, m)


def mse_loss(pred, target) -> float:
    """Mean over all elements of the squared difference, in float64."""
    p = _data_of(pred).astype(np.float64)
    t = _data_of(target).astype(np.float64)
    if p.shape != t.shape:
        raise ShapeMismatchError(f"pred shape {p.shape} vs target shape {t.shape}")
    d = p - t
    return float(np.mean(d * d))


def gradients(model: MlpModel, batch, target) -> ParamSet:
    """Exact gradients of mse_loss with respect to every parameter."""
    x = _data_of(batch).astype(np.float64)
    t = _data_of(target).astype(np.float64)
    if x.ndim != 2 or x.shape[1] != model.dim:
        raise ShapeMismatchError(f"batch shape {x.shape} vs model dim {model.dim}")
    if t.shape != (x.shape[0], model.dim):
        raise ShapeMismatchError(f"target shape {t.shape} vs expected {(x.shape[0], model.dim)}")
    _, act_grad = _ACTIVATIONS[model.activation]
    h_pre, h, out = _forward_raw(model, x)
    d_out = (2.0 / out.size) * (out - t)
    g_w2 = d_out.T @ h
    g_b2 = d_out.sum(axis=0)
    d_h = d_out @ model.W2.astype(np.float64)
    d_h_pre = d_h * act_grad(h_pre)
    g_w1 = d_h_pre.T @ x
    g_b1 = d_h_pre.sum(axis=0)
    return ParamSet(g_w1, g_b1, g_w2, g_b2)


def adam_step(
    model: MlpModel,
    grads: ParamSet,
    state: AdamState,
    lr: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> tuple[MlpModel, AdamState]:
    """One bias-corrected Adam update; returns the new model and state."""
    t = state.t + 1
    c1 = 1.0 - beta1**t
    c2 = 1.0 - beta2**t
    new_params = {}
    new_m = {}
    new_v = {}
    for name in ("W1", "b1", "W2", "b2"):
        g = np.asarray(getattr(grads, name), dtype=np.float64)
        theta = getattr(model, name).astype(np.float64)
        if g.shape != theta.shape:
            raise ShapeMismatchError(f"{name}: gradient shape {g.shape} vs {theta.shape}")
        m = beta1 * getattr(state.m, name) + (1.0 - beta1) * g
        v = beta2 * getattr(state.v, name) + (1.0 - beta2) * g * g
        step = lr * (m / c1) / (np.sqrt(v / c2) + eps)
        new_params[name] = (theta - step).astype(np.float32)
        new_m[name] = m
        new_v[name] = v
    new_model = MlpModel(
        model.dim,
        model.hidden,
        new_params["W1"],
        new_params["b1"],
        new_params["W2"],
        new_params["b2"],
        model.activation,
    )
    return new_model, AdamState(ParamSet(**new_m), ParamSet(**new_v), t)


def train(
    train_pairs: tuple[EmbeddingMatrix, EmbeddingMatrix],
    val_pairs: tuple[EmbeddingMatrix, EmbeddingMatrix],
    cfg: TrainingConfig,
    dim: int,
    hidden: int,
    activation: str = "relu",
    validation_fn: Callable[[MlpModel, int], float] | None = None,
) -> tuple[MlpModel, TrainingLog]:
    """Train on (source, target) embedding rows with checkpointed early
    stopping and rollback to the best snapshot.

    Epochs iterate seeded-shuffled mini-batches. At every checkpoint the
    full-train and full-validation MSE are recorded; a final checkpoint is
    always taken at max_epochs even when the interval does not divide it,
    so at least one snapshot exists. The run stops early after
    cfg.patience consecutive checkpoints whose validation loss is strictly
    greater than the one before; the returned model is always the snapshot
    with the minimum recorded validation loss.

    validation_fn is a seam for tests: when given, it replaces the
    validation MSE computation and is called as fn(model, epoch).
    """
    src, tgt = train_pairs
    vsrc, vtgt = val_pairs
    if src.row_count != tgt.row_count:
        raise RowMismatchError(
            f"train rows: {src.row_count} sources vs {tgt.row_count} targets"
        )
    if vsrc.row_count != vtgt.row_count:
        raise RowMismatchError(
            f"validation rows: {vsrc.row_count} sources vs {vtgt.row_count} targets"
        )
    for label, m in (("train-src", src), ("train-tgt", tgt), ("val-src", vsrc), ("val-tgt", vtgt)):
        if m.dim != dim:
            raise DimMismatchError(f"{label} dim {m.dim} vs requested dim {dim}")

    x = src.data.astype(np.float64)
    y = tgt.data.astype(np.float64)
    xv = vsrc.data.astype(np.float64)
    yv = vtgt.data.astype(np.float64)

    model = init_model(dim, hidden, cfg.seed, activation)
    state = AdamState.initial(model)
    shuffler = np.random.default_rng(cfg.seed)
    n = src.row_count

    records: list[CheckpointRecord] = []
    best: Checkpoint | None = None
    prev_val: float | None = None
    streak = 0
    stop_reason = "max_epochs"

    for epoch in range(1, cfg.max_epochs + 1):
        order = shuffler.permutation(n)
        for start in range(0, n, cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            grads = gradients(model, x[idx], y[idx])
            model, state = adam_step(
                model,
                grads,
                state,
                cfg.learning_rate,
                cfg.adam_beta1,
                cfg.adam_beta2,
                cfg.adam_epsilon,
            )
        if epoch % cfg.checkpoint_interval != 0 and epoch != cfg.max_epochs:
            continue
        if validation_fn is not None:
            val_loss = float(validation_fn(model, epoch))
        else:
            val_loss = mse_loss(_forward_raw(model, xv)[2], yv)
        train_loss = mse_loss(_forward_raw(model, x)[2], y)
        records.append(CheckpointRecord(epoch, train_loss, val_loss))
        snapshot = Checkpoint(epoch, model, val_loss)
        if best is None or val_loss < best.validation_loss:
            best = snapshot
        if prev_val is not None and val_loss > prev_val:
            streak += 1
        else:
            streak = 0
        prev_val = val_loss
        if streak >= cfg.patience:
            stop_reason = "early_stop"
            break

    assert best is not None  # a final checkpoint is always taken
    log = TrainingLog(
        tuple(records),
        stop_reason,
        final_loss=best.validation_loss,
        best_epoch=best.epoch,
        param_count=param_count(dim, hidden),
    )
    return best.model, log


def write_training_log(log: TrainingLog, path: str | Path) -> None:
    """Emit the log as JSON lines: one checkpoint record per line, then a
    summary record."""
    lines = []
    for r in log.records:
        lines.append(
            json.dumps(
                {
                    "type": "checkpoint",
                    "epoch": r.epoch,
                    "train_loss": r.train_loss,
                    "validation_loss": r.validation_loss,
                },
                sort_keys=True,
            )
        )
    lines.append(
        json.dumps(
            {
                "type": "summary",
                "stop_reason": log.stop_reason,
                "final_loss": log.final_loss,
                "best_epoch": log.best_epoch,
                "param_count": log.param_count,
            },
            sort_keys=True,
        )
    )
    Path(path).write_text("".join(f"{line}\n" for line in lines), encoding="utf-8")


def save_model(model: MlpModel, path: str | Path) -> None:
    """Serialize as MLP1. Only the default ReLU activation is representable."""
    if model.activation != "relu":
        raise ValueError(
            f"MLP1 carries relu models only, got activation {model.activation!r}"
        )
    parts = [MODEL_MAGIC, _HEADER.pack(MODEL_VERSION, model.dim, model.hidden)]
    for name in ("W1", "b1", "W2", "b2"):
        parts.append(getattr(model, name).astype("<f4", copy=False).tobytes(order="C"))
    Path(path).write_bytes(b"".join(parts))


def load_model(path: str | Path) -> MlpModel:
    """Exact inverse of save_model."""
    raw = Path(path).read_bytes()
    if len(raw) < 4:
        raise TruncatedFileError(f"file too short for a magic: {len(raw)} bytes")
    if raw[:4] != MODEL_MAGIC:
        raise BadMagicError(f"bad magic {raw[:4]!r}, expected {MODEL_MAGIC!r}")
    if len(raw) < 4 + _HEADER.size:
        raise TruncatedFileError(f"file too short for a header: {len(raw)} bytes")
    version, dim, hidden = _HEADER.unpack_from(raw, 4)
    if version != MODEL_VERSION:
        raise BadVersionError(f"unsupported version {version}")
    if dim < 1 or hidden < 1:
        raise ValueError(f"file declares invalid dims {dim}x{hidden}")
    expected = 4 + _HEADER.size + 4 * param_count(dim, hidden)
    if len(raw) != expected:
        raise TruncatedFileError(
            f"declared dim={dim} hidden={hidden} needs {expected} bytes, file has {len(raw)}"
        )
    offset = 16
    arrays = []
    for shape in ((hidden, dim), (hidden,), (dim, hidden), (dim,)):
        count = int(np.prod(shape))
        arr = np.frombuffer(raw, dtype="<f4", count=count, offset=offset).reshape(shape)
        arrays.append(arr.copy())
        offset += count * 4
    return MlpModel(dim, hidden, *arrays)
