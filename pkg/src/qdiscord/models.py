"""Shallow networks for regressing the discord optimization term.

Three single-hidden-layer architectures over polynomial features, all
bias-free (the constant feature plays that role):

* nn:    yhat = W2 sigmoid(W1 x)
* pknn:  yhat = W2 E(W1 x)            with E(z) = z log2 z (0 for z <= 0)
* dbnn:  yhat = W2 [E(W1 x) * sigmoid(Wcond x)]

E mirrors the p log2 p terms of the quantity being learned; the dbnn's
sigmoid branch gates each entropy unit on a learned condition.  Gradients
are exact analytic backpropagation with an elementwise safety clip.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "ENTROPY_GRAD_EPS",
    "GRAD_CLIP",
    "ModelKind",
    "ShapeMismatchError",
    "EmptyBatchError",
    "ModelWeights",
    "ForwardTrace",
    "Gradients",
    "sigmoid",
    "entropy_activation",
    "entropy_activation_grad",
    "init_weights",
    "forward",
    "quadratic_loss",
    "backward",
    "degenerate_entropy_start",
]

# Below this pre-activation the entropy derivative is taken as 0; log2 z
# diverges at the origin and the activation itself is already ~4e-11.
ENTROPY_GRAD_EPS = 1e-12

# Elementwise bound on weight-gradient entries.
GRAD_CLIP = 1e3

_INV_LN2 = 1.0 / math.log(2.0)


class ModelKind(str, Enum):
    NN = "nn"
    PKNN = "pknn"
    DBNN = "dbnn"


class ShapeMismatchError(ValueError):
    """Weight/input dimensions disagree."""


class EmptyBatchError(ValueError):
    """An operation received a zero-sample batch."""


def sigmoid(z):
    """Numerically stable logistic function, elementwise."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z >= 0.0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return float(out) if out.ndim == 0 else out


def entropy_activation(z):
    """E(z) = z log2 z for z > 0, else 0, elementwise.

    Continuous at 0; reproduces the p log2 p terms of Shannon entropies
    up to sign.
    """
    z = np.asarray(z, dtype=float)
    out = np.zeros_like(z)
    pos = z > 0.0
    zp = z[pos]
    out[pos] = zp * np.log2(zp)
    return float(out) if out.ndim == 0 else out


def entropy_activation_grad(z):
    """dE/dz = log2 z + 1/ln 2 for z > ENTROPY_GRAD_EPS, else 0."""
    z = np.asarray(z, dtype=float)
    out = np.zeros_like(z)
    pos = z > ENTROPY_GRAD_EPS
    out[pos] = np.log2(z[pos]) + _INV_LN2
    return float(out) if out.ndim == 0 else out


@dataclass
class ModelWeights:
    """Parameters of one model.

    w1 and the dbnn's wcond are (hidden, features); w2 is (1, hidden).
    wcond must be present exactly when kind is dbnn.
    """

    kind: ModelKind
    w1: np.ndarray
    w2: np.ndarray
    wcond: np.ndarray | None = None

    def __post_init__(self) -> None:
        self.kind = ModelKind(self.kind)
        if self.w1.ndim != 2 or self.w2.shape != (1, self.w1.shape[0]):
            raise ShapeMismatchError(
                f"w1 {self.w1.shape} and w2 {self.w2.shape} are inconsistent"
            )
        if self.kind is ModelKind.DBNN:
            if self.wcond is None or self.wcond.shape != self.w1.shape:
                raise ShapeMismatchError("dbnn requires wcond with the same shape as w1")
        elif self.wcond is not None:
            raise ShapeMismatchError(f"{self.kind.value} does not take wcond")
        for name, w in self.arrays().items():
            if not np.all(np.isfinite(w)):
                raise ValueError(f"{name} contains non-finite entries")

    @property
    def hidden_width(self) -> int:
        return self.w1.shape[0]

    @property
    def feature_dim(self) -> int:
        return self.w1.shape[1]

    def arrays(self) -> dict[str, np.ndarray]:
        out = {"w1": self.w1, "w2": self.w2}
        if self.wcond is not None:
            out["wcond"] = self.wcond
        return out

    def copy(self) -> "ModelWeights":
        return ModelWeights(
            self.kind,
            self.w1.copy(),
            self.w2.copy(),
            None if self.wcond is None else self.wcond.copy(),
        )


@dataclass
class ForwardTrace:
    """Intermediates cached by forward for exact backpropagation."""

    z1: np.ndarray
    hidden: np.ndarray
    prediction: np.ndarray
    zcond: np.ndarray | None = None
    gate: np.ndarray | None = None
    gated: np.ndarray | None = None


@dataclass
class Gradients:
    """Loss gradients, matching the layout of ModelWeights."""

    w1: np.ndarray
    w2: np.ndarray
    wcond: np.ndarray | None = None


def init_weights(kind: ModelKind, hidden: int, features: int, seed: int) -> ModelWeights:
    """Draw initial weights from a counter-based generator.

    Entries are uniform in +-1/sqrt(fan_in): W1 and Wcond over the feature
    dimension, W2 over the hidden width.  Draw order is fixed (w1, w2,
    wcond) so identical seeds give bitwise-identical weights.
    """
    if hidden < 1 or features < 1:
        raise ValueError(f"need hidden >= 1 and features >= 1, got {hidden}, {features}")
    rng = np.random.Generator(np.random.Philox(seed))
    b1 = 1.0 / math.sqrt(features)
    b2 = 1.0 / math.sqrt(hidden)
    w1 = rng.uniform(-b1, b1, size=(hidden, features))
    w2 = rng.uniform(-b2, b2, size=(1, hidden))
    kind = ModelKind(kind)
    wcond = rng.uniform(-b1, b1, size=(hidden, features)) if kind is ModelKind.DBNN else None
    return ModelWeights(kind, w1, w2, wcond)


def _check_batch(weights: ModelWeights, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != weights.feature_dim:
        raise ShapeMismatchError(
            f"feature batch {X.shape} does not match weights ({weights.feature_dim} features)"
        )
    if X.shape[0] == 0:
        raise EmptyBatchError("empty feature batch")
    return X


def forward(weights: ModelWeights, X: np.ndarray) -> tuple[np.ndarray, ForwardTrace]:
    """Predictions for a feature batch X of shape (M, D); returns (yhat, trace)."""
    X = _check_batch(weights, X)
    z1 = X @ weights.w1.T
    if weights.kind is ModelKind.NN:
        hidden = sigmoid(z1)
        head = hidden
        zc = gate = gated = None
    elif weights.kind is ModelKind.PKNN:
        hidden = entropy_activation(z1)
        head = hidden
        zc = gate = gated = None
    else:
        hidden = entropy_activation(z1)
        zc = X @ weights.wcond.T
        gate = sigmoid(zc)
        gated = hidden * gate
        head = gated
    prediction = head @ weights.w2[0]
    return prediction, ForwardTrace(z1, hidden, prediction, zc, gate, gated)


def quadratic_loss(yhat: np.ndarray, y: np.ndarray) -> float:
    """Mean squared error (1/M) sum (y - yhat)^2."""
    yhat = np.asarray(yhat, dtype=float)
    y = np.asarray(y, dtype=float)
    if yhat.shape != y.shape:
        raise ShapeMismatchError(f"prediction {yhat.shape} vs target {y.shape}")
    if yhat.size == 0:
        raise EmptyBatchError("empty batch in loss")
    diff = y - yhat
    return float(diff @ diff / diff.size)


def backward(
    weights: ModelWeights, X: np.ndarray, y: np.ndarray, trace: ForwardTrace
) -> Gradients:
    """Exact gradients of quadratic_loss with respect to every weight matrix.

    Entries are clipped elementwise at +-GRAD_CLIP as a divergence guard;
    the clip is inactive at ordinary scales.
    """
    X = _check_batch(weights, X)
    y = np.asarray(y, dtype=float)
    if y.shape != trace.prediction.shape:
        raise ShapeMismatchError(f"targets {y.shape} vs predictions {trace.prediction.shape}")
    residual = (2.0 / y.size) * (trace.prediction - y)

    head = trace.gated if weights.kind is ModelKind.DBNN else trace.hidden
    g_w2 = (residual @ head)[None, :]
    d_head = residual[:, None] * weights.w2
    if weights.kind is ModelKind.NN:
        d_z1 = d_head * trace.hidden * (1.0 - trace.hidden)
        g_wcond = None
    elif weights.kind is ModelKind.PKNN:
        d_z1 = d_head * entropy_activation_grad(trace.z1)
        g_wcond = None
    else:
        d_z1 = d_head * trace.gate * entropy_activation_grad(trace.z1)
        d_zc = d_head * trace.hidden * trace.gate * (1.0 - trace.gate)
        g_wcond = d_zc.T @ X
    g_w1 = d_z1.T @ X

    np.clip(g_w1, -GRAD_CLIP, GRAD_CLIP, out=g_w1)
    np.clip(g_w2, -GRAD_CLIP, GRAD_CLIP, out=g_w2)
    if g_wcond is not None:
        np.clip(g_wcond, -GRAD_CLIP, GRAD_CLIP, out=g_wcond)
    return Gradients(g_w1, g_w2, g_wcond)


def degenerate_entropy_start(weights: ModelWeights, X: np.ndarray) -> bool:
    """True when an entropy-activated model starts in E's dead zone.

    If every pre-activation W1 x is <= 0 the pknn/dbnn output is
    identically zero and no gradient can flow; such an initialization
    cannot train.
    """
    if weights.kind is ModelKind.NN:
        return False
    X = _check_batch(weights, X)
    return bool(np.all(X @ weights.w1.T <= 0.0))
