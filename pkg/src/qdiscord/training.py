"""Full-batch gradient-descent training with a staircase learning rate.

The learning rate is lr0 * decay_factor^floor(step / decay_interval).
Datasets store raw parameter vectors; the polynomial feature matrix is
expanded once when training starts.  Checkpoints are versioned, carry a
SHA-256 checksum and round-trip weights bit-exactly.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .features import degree_for_dim, feature_dim, feature_matrix
from .models import (
    Gradients,
    ModelKind,
    ModelWeights,
    backward,
    degenerate_entropy_start,
    forward,
    init_weights,
    quadratic_loss,
)

__all__ = [
    "FAMILIES",
    "DivergedError",
    "FormatVersionUnsupportedError",
    "CorruptChecksumError",
    "TrainConfig",
    "Dataset",
    "RunRecord",
    "EvalResult",
    "ReplicateReport",
    "lr_at_step",
    "train",
    "evaluate",
    "replicate_experiment",
    "format_replicate_table",
    "write_replicate_report",
    "write_trajectory",
    "save_checkpoint",
    "load_checkpoint",
]

FAMILIES = ("xstate", "real")

_CHECKPOINT_MAGIC = b"qdckpt 1"


class DivergedError(RuntimeError):
    """Training produced a non-finite loss."""

    def __init__(self, step: int):
        super().__init__(f"non-finite loss at step {step}")
        self.step = step


class FormatVersionUnsupportedError(ValueError):
    """Checkpoint magic or version not recognized."""


class CorruptChecksumError(ValueError):
    """Checkpoint bytes do not match their checksum."""


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters of one training run."""

    kind: ModelKind
    steps: int = 300_000
    lr0: float = 0.2
    decay_factor: float = 0.98
    decay_interval: int = 3000
    hidden: int = 16
    degree: int = 6
    batch: int | None = None  # None trains full-batch
    seed: int = 0
    log_every: int = 1000

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", ModelKind(self.kind))
        if self.steps < 0:
            raise ValueError("steps must be >= 0")
        if not (self.lr0 > 0.0) or not (0.0 < self.decay_factor <= 1.0):
            raise ValueError("need lr0 > 0 and 0 < decay_factor <= 1")
        if self.decay_interval < 1 or self.hidden < 1 or self.degree < 1:
            raise ValueError("decay_interval, hidden and degree must be >= 1")
        if self.batch is not None and self.batch < 1:
            raise ValueError("batch must be >= 1 or None")
        if self.log_every < 1:
            raise ValueError("log_every must be >= 1")


@dataclass
class Dataset:
    """Labeled states: raw parameter vectors and their oracle labels."""

    params: np.ndarray
    labels: np.ndarray
    family: str

    def __post_init__(self) -> None:
        self.params = np.asarray(self.params, dtype=float)
        self.labels = np.asarray(self.labels, dtype=float)
        if self.params.ndim != 2 or self.labels.shape != (self.params.shape[0],):
            raise ValueError(
                f"inconsistent dataset shapes {self.params.shape} / {self.labels.shape}"
            )
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        # inverted comparison also rejects NaN labels
        if self.size and not (self.labels.min() >= 0.0 and self.labels.max() <= 2.0):
            raise ValueError("labels must lie in [0, 2] bits")

    @property
    def size(self) -> int:
        return self.params.shape[0]

    @property
    def param_dim(self) -> int:
        return self.params.shape[1]


@dataclass
class RunRecord:
    """Outcome of one training run.

    trajectory holds (step, lr, loss) triples sampled every log_every
    steps plus the final step; loss at a logged step is evaluated before
    that step's update.
    """

    kind: ModelKind
    seed: int
    steps: int
    train_loss: float
    test_loss: float | None
    wall_time_s: float
    trajectory: list[tuple[int, float, float]] = field(default_factory=list)
    degenerate_start: bool = False


@dataclass
class EvalResult:
    """Loss plus per-sample (label, prediction) pairs for scatter plots."""

    loss: float
    pairs: np.ndarray


@dataclass
class ReplicateReport:
    """Per-run records and their arithmetic means."""

    records: list[RunRecord]
    mean_train_loss: float
    mean_test_loss: float


def lr_at_step(cfg: TrainConfig, step: int) -> float:
    """Staircase schedule: lr0 * decay_factor^floor(step / decay_interval)."""
    if step < 0:
        raise ValueError("step must be >= 0")
    return cfg.lr0 * cfg.decay_factor ** (step // cfg.decay_interval)


def _apply_update(weights: ModelWeights, grads: Gradients, lr: float) -> None:
    weights.w1 -= lr * grads.w1
    weights.w2 -= lr * grads.w2
    if weights.wcond is not None:
        weights.wcond -= lr * grads.wcond


def train(
    cfg: TrainConfig, train_set: Dataset, progress=None
) -> tuple[RunRecord, ModelWeights]:
    """Run gradient descent; returns the run record and final weights.

    progress, when given, is called as progress(step, lr, loss) at every
    logged point.  Raises DivergedError the first time the training loss
    turns non-finite.
    """
    if train_set.size == 0:
        raise ValueError("cannot train on an empty dataset")
    if cfg.batch is not None and cfg.batch > train_set.size:
        raise ValueError(f"batch {cfg.batch} exceeds dataset size {train_set.size}")

    started = time.perf_counter()
    phi = feature_matrix(train_set.params, cfg.degree)
    y = train_set.labels
    weights = init_weights(cfg.kind, cfg.hidden, phi.shape[1], cfg.seed)
    degenerate = degenerate_entropy_start(weights, phi)

    batch_rng = None
    if cfg.batch is not None and cfg.batch < train_set.size:
        batch_rng = np.random.Generator(np.random.Philox(key=[cfg.seed, 0x9E3779B9]))
        order = batch_rng.permutation(train_set.size)
        cursor = 0

    trajectory: list[tuple[int, float, float]] = []
    for step in range(cfg.steps):
        if batch_rng is None:
            xb, yb = phi, y
        else:
            if cursor + cfg.batch > order.size:
                order = batch_rng.permutation(train_set.size)
                cursor = 0
            pick = order[cursor : cursor + cfg.batch]
            cursor += cfg.batch
            xb, yb = phi[pick], y[pick]
        lr = lr_at_step(cfg, step)
        yhat, trace = forward(weights, xb)
        loss = quadratic_loss(yhat, yb)
        if not np.isfinite(loss):
            raise DivergedError(step)
        if step % cfg.log_every == 0:
            trajectory.append((step, lr, loss))
            if progress is not None:
                progress(step, lr, loss)
        _apply_update(weights, backward(weights, xb, yb, trace), lr)

    final_loss = quadratic_loss(forward(weights, phi)[0], y)
    if not np.isfinite(final_loss):
        raise DivergedError(cfg.steps)
    trajectory.append((cfg.steps, lr_at_step(cfg, cfg.steps), final_loss))
    if progress is not None:
        progress(cfg.steps, lr_at_step(cfg, cfg.steps), final_loss)

    record = RunRecord(
        kind=cfg.kind,
        seed=cfg.seed,
        steps=cfg.steps,
        train_loss=final_loss,
        test_loss=None,
        wall_time_s=time.perf_counter() - started,
        trajectory=trajectory,
        degenerate_start=degenerate,
    )
    return record, weights


def evaluate(weights: ModelWeights, dataset: Dataset, degree: int | None = None) -> EvalResult:
    """Loss of fixed weights on a dataset; no gradients are computed.

    degree defaults to the unique expansion degree matching the weight
    shape, recovered from the dataset's parameter dimension.
    """
    if degree is None:
        degree = degree_for_dim(dataset.param_dim, weights.feature_dim)
    phi = feature_matrix(dataset.params, degree)
    yhat, _ = forward(weights, phi)
    return EvalResult(
        loss=quadratic_loss(yhat, dataset.labels),
        pairs=np.column_stack([dataset.labels, yhat]),
    )


def replicate_experiment(
    cfg: TrainConfig, train_set: Dataset, test_set: Dataset, runs: int, progress=None
) -> ReplicateReport:
    """Repeat training with re-seeded weights on a fixed dataset.

    Run i uses seed cfg.seed + i.  Test data never enters a gradient;
    it is only evaluated after each run finishes.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    records = []
    for i in range(runs):
        run_cfg = replace(cfg, seed=cfg.seed + i)
        record, weights = train(run_cfg, train_set, progress=progress)
        record.test_loss = evaluate(weights, test_set, cfg.degree).loss
        records.append(record)
    return ReplicateReport(
        records=records,
        mean_train_loss=float(np.mean([r.train_loss for r in records])),
        mean_test_loss=float(np.mean([r.test_loss for r in records])),
    )


def format_replicate_table(report: ReplicateReport) -> str:
    """Tab-separated run table; losses are scaled by 1e3 as in the usual
    reporting convention, with a trailing average row."""
    lines = ["model\trun\ttrain_loss_x1e3\ttest_loss_x1e3"]
    for i, rec in enumerate(report.records, start=1):
        lines.append(
            f"{rec.kind.value}\t{i}\t{1e3 * rec.train_loss:.6g}\t{1e3 * rec.test_loss:.6g}"
        )
    kind = report.records[0].kind.value
    lines.append(
        f"{kind}\tmean\t{1e3 * report.mean_train_loss:.6g}\t{1e3 * report.mean_test_loss:.6g}"
    )
    return "\n".join(lines) + "\n"


def write_replicate_report(report: ReplicateReport, path: str) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(format_replicate_table(report))


def write_trajectory(record: RunRecord, path: str) -> None:
    """Loss trajectory as tab-separated (step, lr, loss) rows."""
    lines = ["step\tlr\tloss"]
    for step, lr, loss in record.trajectory:
        lines.append(f"{step}\t{lr:.17g}\t{loss:.17g}")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def _param_dim_for(feature_count: int, degree: int, max_vars: int = 64) -> int:
    for n in range(1, max_vars + 1):
        d = feature_dim(n, degree)
        if d == feature_count:
            return n
        if d > feature_count:
            break
    raise ValueError(f"no parameter dimension matches {feature_count} features at degree {degree}")


def save_checkpoint(weights: ModelWeights, cfg: TrainConfig, path: str) -> None:
    """Serialize weights and config: magic line, JSON header, raw float64
    buffers, SHA-256 of everything before the digest."""
    header = {
        "format_version": 1,
        "kind": weights.kind.value,
        "hidden": weights.hidden_width,
        "feature_dim": weights.feature_dim,
        "param_dim": _param_dim_for(weights.feature_dim, cfg.degree),
        "degree": cfg.degree,
        "seed": cfg.seed,
        "steps": cfg.steps,
        "lr0": cfg.lr0,
        "decay_factor": cfg.decay_factor,
        "decay_interval": cfg.decay_interval,
        "batch": cfg.batch,
        "log_every": cfg.log_every,
    }
    blob = bytearray()
    blob += _CHECKPOINT_MAGIC + b"\n"
    blob += json.dumps(header, sort_keys=True).encode("ascii") + b"\n"
    for array in weights.arrays().values():
        blob += np.ascontiguousarray(array, dtype=np.float64).tobytes()
    blob += hashlib.sha256(bytes(blob)).digest()
    with open(path, "wb") as fh:
        fh.write(bytes(blob))


def load_checkpoint(path: str) -> tuple[ModelWeights, TrainConfig]:
    """Inverse of save_checkpoint; verifies version and checksum."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 32 + len(_CHECKPOINT_MAGIC) + 2:
        raise CorruptChecksumError(f"{path}: truncated checkpoint")
    body, digest = data[:-32], data[-32:]
    if hashlib.sha256(body).digest() != digest:
        raise CorruptChecksumError(f"{path}: checksum mismatch")
    magic_end = body.find(b"\n")
    if magic_end < 0 or body[:magic_end] != _CHECKPOINT_MAGIC:
        raise FormatVersionUnsupportedError(
            f"{path}: unsupported magic {body[: max(magic_end, 0)]!r}"
        )
    header_end = body.find(b"\n", magic_end + 1)
    header = json.loads(body[magic_end + 1 : header_end].decode("ascii"))
    if header.get("format_version") != 1:
        raise FormatVersionUnsupportedError(
            f"{path}: format_version {header.get('format_version')!r}"
        )
    kind = ModelKind(header["kind"])
    hidden, features = header["hidden"], header["feature_dim"]
    matrices = 3 if kind is ModelKind.DBNN else 2
    expected = hidden * features * (matrices - 1) + hidden
    payload = body[header_end + 1 :]
    if len(payload) != 8 * expected:
        raise CorruptChecksumError(
            f"{path}: payload holds {len(payload)} bytes, expected {8 * expected}"
        )
    flat = np.frombuffer(payload, dtype=np.float64)
    w1 = flat[: hidden * features].reshape(hidden, features).copy()
    w2 = flat[hidden * features : hidden * features + hidden].reshape(1, hidden).copy()
    wcond = None
    if kind is ModelKind.DBNN:
        wcond = flat[hidden * features + hidden :].reshape(hidden, features).copy()
    cfg = TrainConfig(
        kind=kind,
        steps=header["steps"],
        lr0=header["lr0"],
        decay_factor=header["decay_factor"],
        decay_interval=header["decay_interval"],
        hidden=hidden,
        degree=header["degree"],
        batch=header["batch"],
        seed=header["seed"],
        log_every=header["log_every"],
    )
    return ModelWeights(kind, w1, w2, wcond), cfg
