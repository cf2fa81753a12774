"""
Tiny differentiable classifiers used as the service model and every sub-service model.

Two architectures are supported:

    logistic   x -> softmax(x W + b)
    mlp1       x -> softmax(tanh(x W1 + b1) W2 + b2)

Training is plain (mini-batch) gradient descent on the mean cross-entropy with
hand-written backpropagation. Everything is a pure function of its inputs: the
shuffle order and batch partition come from a generator seeded with
(params.init_seed, cfg.seed), and full-batch descent is used when
batch_size >= n.
"""

import logging
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import log_softmax, softmax

from config import CONVERGENCE_TOL, CONVERGENCE_WINDOW, SERVICE_BATCH_SIZE, SERVICE_EPOCHS, SERVICE_LR
from dataset import Dataset
from errors import ArchitectureError, ModelError
from helper import make_rng

logger = logging.getLogger(__name__)

ARCHITECTURES = ("logistic", "mlp1")
PROB_TINY = np.finfo(np.float64).tiny


@dataclass(frozen=True)
class Architecture:
    kind: str
    input_dim: int
    output_dim: int
    hidden_units: int = 0

    def __post_init__(self):
        if self.kind not in ARCHITECTURES:
            raise ArchitectureError(f"unknown architecture {self.kind!r}, expected one of {ARCHITECTURES}")
        if self.input_dim < 1 or self.output_dim < 1:
            raise ArchitectureError("input and output dimensions must be positive")
        if self.kind == "mlp1" and self.hidden_units < 1:
            raise ArchitectureError(f"mlp1 needs hidden_units >= 1, got {self.hidden_units}")

    @classmethod
    def logistic(cls, d: int, m: int) -> "Architecture":
        return cls("logistic", d, m)

    @classmethod
    def mlp1(cls, d: int, m: int, hidden_units: int) -> "Architecture":
        return cls("mlp1", d, m, hidden_units)

    def layer_shapes(self) -> list[tuple[int, int]]:
        if self.kind == "logistic":
            return [(self.input_dim, self.output_dim)]
        return [(self.input_dim, self.hidden_units), (self.hidden_units, self.output_dim)]


@dataclass(eq=False)
class ModelParams:
    arch: Architecture
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    init_seed: int = 0

    def __post_init__(self):
        shapes = self.arch.layer_shapes()
        if len(self.weights) != len(shapes) or len(self.biases) != len(shapes):
            raise ArchitectureError(f"{self.arch.kind} expects {len(shapes)} layers")
        for weight, bias, shape in zip(self.weights, self.biases, shapes):
            if weight.shape != shape or bias.shape != (shape[1],):
                raise ArchitectureError(f"layer shapes {weight.shape}/{bias.shape} do not match {shape}")

    def arrays(self) -> list[np.ndarray]:
        return [array for layer in zip(self.weights, self.biases) for array in layer]

    def copy(self) -> "ModelParams":
        return replace(self, weights=[w.copy() for w in self.weights], biases=[b.copy() for b in self.biases])

    def equals(self, other: "ModelParams") -> bool:
        return self.arch == other.arch and all(
            np.array_equal(a, b) for a, b in zip(self.arrays(), other.arrays())
        )


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = SERVICE_LR
    lr_scale: float = 1.0
    epochs: int = SERVICE_EPOCHS
    batch_size: int = SERVICE_BATCH_SIZE
    seed: int = 0
    convergence_tol: float = CONVERGENCE_TOL

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ModelError(f"learning rate must be positive, got {self.learning_rate}")
        if self.lr_scale <= 0:
            raise ModelError(f"learning rate scale must be positive, got {self.lr_scale}")
        if self.epochs < 0:
            raise ModelError(f"epochs must be non-negative, got {self.epochs}")
        if self.batch_size < 1:
            raise ModelError(f"batch size must be at least 1, got {self.batch_size}")
        if self.convergence_tol < 0:
            raise ModelError("convergence tolerance must be non-negative")

    @property
    def effective_lr(self) -> float:
        return self.learning_rate * self.lr_scale


@dataclass
class TrainResult:
    params: ModelParams
    losses: np.ndarray
    snapshots: list[ModelParams] = field(default_factory=list)

    @property
    def epochs_run(self) -> int:
        return len(self.losses)


def init(arch: Architecture, seed: int) -> ModelParams:
    """Weights uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)], biases zero."""
    rng = make_rng(seed)
    weights = []
    for fan_in, fan_out in arch.layer_shapes():
        bound = 1.0 / np.sqrt(fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
    biases = [np.zeros(fan_out) for _, fan_out in arch.layer_shapes()]
    return ModelParams(arch, weights, biases, init_seed=seed)


def zeros(arch: Architecture, seed: int = 0) -> ModelParams:
    shapes = arch.layer_shapes()
    return ModelParams(arch, [np.zeros(s) for s in shapes], [np.zeros(s[1]) for s in shapes], init_seed=seed)


def _forward(params: ModelParams, X: np.ndarray):
    if params.arch.kind == "logistic":
        return X @ params.weights[0] + params.biases[0], None
    hidden = np.tanh(X @ params.weights[0] + params.biases[0])
    return hidden @ params.weights[1] + params.biases[1], hidden


def _as_batch(params: ModelParams, x) -> tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    X = x[None, :] if single else x
    if X.ndim != 2 or X.shape[1] != params.arch.input_dim:
        raise ModelError(f"expected inputs of dimension {params.arch.input_dim}, got shape {x.shape}")
    return X, single


def predict_logits(params: ModelParams, x) -> np.ndarray:
    X, single = _as_batch(params, x)
    logits, _ = _forward(params, X)
    return logits[0] if single else logits


def predict_proba(params: ModelParams, x) -> np.ndarray:
    """Softmax class probabilities for one d-vector or a k x d batch; floored at the smallest normal float."""
    return np.maximum(softmax(predict_logits(params, x), axis=-1), PROB_TINY)


def accuracy(params: ModelParams, data: Dataset) -> float:
    return float(np.mean(predict_logits(params, data.features).argmax(axis=1) == data.labels))


def loss_and_gradients(params: ModelParams, X: np.ndarray, Y: np.ndarray) -> tuple[float, list[np.ndarray]]:
    """Mean cross-entropy against one-hot targets Y and its gradient, ordered like params.arrays()."""
    logits, hidden = _forward(params, X)
    loss = -float(np.mean(np.sum(Y * log_softmax(logits, axis=1), axis=1)))
    delta = (softmax(logits, axis=1) - Y) / X.shape[0]

    if params.arch.kind == "logistic":
        return loss, [X.T @ delta, delta.sum(axis=0)]

    hidden_delta = (delta @ params.weights[1].T) * (1.0 - hidden ** 2)
    return loss, [X.T @ hidden_delta, hidden_delta.sum(axis=0), hidden.T @ delta, delta.sum(axis=0)]


def _converged(losses: list[float], tol: float) -> bool:
    if tol <= 0 or len(losses) <= CONVERGENCE_WINDOW:
        return False
    before = losses[-1 - CONVERGENCE_WINDOW]
    return (before - losses[-1]) / max(abs(before), np.finfo(float).tiny) < tol


def train(
        params: ModelParams,
        data: Dataset,
        cfg: TrainConfig,
        *,
        record_snapshots: bool = False,
        stop_on_convergence: bool = False,
        allow_empty: bool = False,
) -> TrainResult:
    if data.n == 0:
        if not allow_empty:
            raise ModelError("empty coalition must go through utility layer")
        return TrainResult(params.copy(), np.zeros(0))

    trained = params.copy()
    arrays = trained.arrays()
    X, Y = data.features, data.one_hot()
    lr = cfg.effective_lr
    rng = make_rng(params.init_seed, cfg.seed)
    full_batch = cfg.batch_size >= data.n

    losses, snapshots = [], []
    for epoch in range(cfg.epochs):
        batches = [slice(None)] if full_batch else _batches(rng.permutation(data.n), cfg.batch_size)
        epoch_loss = 0.0
        for batch in batches:
            Xb, Yb = X[batch], Y[batch]
            loss, grads = loss_and_gradients(trained, Xb, Yb)
            epoch_loss += loss * Xb.shape[0]
            for array, grad in zip(arrays, grads):
                array -= lr * grad
        losses.append(epoch_loss / data.n)
        if record_snapshots:
            snapshots.append(trained.copy())
        if stop_on_convergence and _converged(losses, cfg.convergence_tol):
            logger.debug("converged after %d epochs", epoch + 1)
            break

    return TrainResult(trained, np.asarray(losses), snapshots)


def _batches(order: np.ndarray, batch_size: int) -> list[np.ndarray]:
    return [order[start:start + batch_size] for start in range(0, len(order), batch_size)]
