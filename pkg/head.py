# --- head.py ---
"""
Trainable classification head over frozen sentence embeddings.

    input embedding -> inverted dropout (train only) -> linear L x D -> sigmoid per label

Training minimizes label-smoothed binary cross entropy with AdamW
(decoupled weight decay), global-norm gradient clipping and early stopping on
dev macro F1. All randomness comes from one seeded generator per run.
"""

import dataclasses
import logging
import math
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field

import numpy as np

from constants import (
    CLIP_TOLERANCE,
    DEFAULT_BATCH_SIZE,
    DEFAULT_BETA1,
    DEFAULT_BETA2,
    DEFAULT_CLIP_MAX_NORM,
    DEFAULT_DROPOUT_RATE,
    DEFAULT_EPSILON,
    DEFAULT_LEARNING_RATE,
    DEFAULT_MAX_EPOCHS,
    DEFAULT_PATIENCE,
    DEFAULT_SEED,
    DEFAULT_SMOOTHING_ALPHA,
    DEFAULT_THRESHOLD,
    DEFAULT_WEIGHT_DECAY,
    PROB_CLIP,
)
from embeddings import EmbeddedSplit
from emotion_data import LabelSchema
from errors import ConfigError, DimMismatch, EmptySplit
from metrics import classification_report
from utils import fingerprint_arrays

logger = logging.getLogger(__name__)


# --- Config ---
@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = DEFAULT_LEARNING_RATE
    beta1: float = DEFAULT_BETA1
    beta2: float = DEFAULT_BETA2
    epsilon: float = DEFAULT_EPSILON
    weight_decay: float = DEFAULT_WEIGHT_DECAY
    batch_size: int = DEFAULT_BATCH_SIZE
    dropout_rate: float = DEFAULT_DROPOUT_RATE
    smoothing_alpha: float = DEFAULT_SMOOTHING_ALPHA
    clip_max_norm: float = DEFAULT_CLIP_MAX_NORM
    patience: int = DEFAULT_PATIENCE
    max_epochs: int = DEFAULT_MAX_EPOCHS
    threshold: float = DEFAULT_THRESHOLD
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.patience < 1:
            raise ConfigError(f"patience must be >= 1, got {self.patience}")
        if self.max_epochs < 1:
            raise ConfigError(f"max_epochs must be >= 1, got {self.max_epochs}")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ConfigError(f"dropout_rate must be in [0, 1), got {self.dropout_rate}")
        if not 0.0 <= self.smoothing_alpha <= 1.0:
            raise ConfigError(f"smoothing_alpha must be in [0, 1], got {self.smoothing_alpha}")
        if not 0.0 < self.threshold < 1.0:
            raise ConfigError(f"threshold must be in (0, 1), got {self.threshold}")
        if self.learning_rate <= 0 or self.clip_max_norm <= 0:
            raise ConfigError("learning_rate and clip_max_norm must be positive")

    def with_overrides(self, overrides: Mapping[str, object]) -> "TrainConfig":
        """Returns a copy with string or typed overrides converted to the field types."""
        types = {f.name: f.type for f in dataclasses.fields(self)}
        converted = {}
        for name, value in overrides.items():
            if name not in types:
                raise ConfigError(f"unknown training option '{name}'")
            cast = int if types[name] in (int, "int") else float
            try:
                converted[name] = cast(value)
            except (TypeError, ValueError):
                raise ConfigError(f"option '{name}' expects {cast.__name__}, got {value!r}") from None
        return dataclasses.replace(self, **converted)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


# --- Parameters & Optimizer State ---
@dataclass
class HeadParams:
    """Weights of the linear layer; gradients use the same container."""

    W: np.ndarray  # L x D
    b: np.ndarray  # L

    @classmethod
    def init(cls, n_labels: int, dim: int, rng: np.random.Generator) -> "HeadParams":
        bound = 1.0 / math.sqrt(dim)
        W = rng.uniform(-bound, bound, size=(n_labels, dim))
        b = rng.uniform(-bound, bound, size=n_labels)
        return cls(W=W, b=b)

    @classmethod
    def zeros_like(cls, other: "HeadParams") -> "HeadParams":
        return cls(W=np.zeros_like(other.W), b=np.zeros_like(other.b))

    def copy(self) -> "HeadParams":
        return HeadParams(W=self.W.copy(), b=self.b.copy())

    @property
    def n_labels(self) -> int:
        return int(self.W.shape[0])

    @property
    def dim(self) -> int:
        return int(self.W.shape[1])

    def global_norm(self) -> float:
        return math.sqrt(float(np.sum(self.W * self.W)) + float(np.sum(self.b * self.b)))

    def fingerprint(self) -> str:
        return fingerprint_arrays(self.W, self.b)


@dataclass
class AdamWState:
    m: HeadParams
    v: HeadParams
    t: int = 0

    @classmethod
    def zeros(cls, params: HeadParams) -> "AdamWState":
        return cls(m=HeadParams.zeros_like(params), v=HeadParams.zeros_like(params), t=0)


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    train_loss: float
    dev_macro_f1: float


@dataclass
class TrainedModel:
    params: HeadParams
    schema: LabelSchema
    embedder_fingerprint: str
    threshold: float
    history: list[EpochRecord] = field(default_factory=list)
    config: TrainConfig = field(default_factory=TrainConfig)
    best_epoch: int = 0

    @property
    def best_dev_macro_f1(self) -> float:
        return max((r.dev_macro_f1 for r in self.history), default=0.0)


# --- Forward Pass ---
def sigmoid(z):
    """Overflow-free logistic function; sigmoid(0) is exactly 0.5."""
    z = np.asarray(z, dtype=np.float64)
    e = np.exp(-np.abs(z))
    return np.where(z >= 0, 1.0 / (1.0 + e), e / (1.0 + e))


def apply_dropout(x, mask, rate: float) -> np.ndarray:
    """Inverted dropout: kept coordinates are scaled by 1 / (1 - rate)."""
    x = np.asarray(x, dtype=np.float64)
    mask = np.asarray(mask, dtype=np.float64)
    if mask.shape != x.shape:
        raise DimMismatch(f"dropout mask shape {mask.shape} does not match input {x.shape}")
    return x * mask / (1.0 - rate)


def draw_dropout_mask(rng: np.random.Generator, shape, rate: float) -> np.ndarray:
    keep = rng.random(shape) >= rate
    return keep.astype(np.float64)


def _check_input(params: HeadParams, x: np.ndarray) -> None:
    if x.shape[-1] != params.dim:
        raise DimMismatch(f"input dim {x.shape[-1]} does not match head dim {params.dim}")


def forward(
    params: HeadParams,
    x,
    mode: str = "eval",
    dropout_mask=None,
    dropout_rate: float = 0.0,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """
    Label probabilities for one embedding (D,) or a batch (N, D).

    In train mode the input is masked with inverted dropout first; pass either
    `dropout_mask` or an `rng` to draw one.
    """
    x = np.asarray(x, dtype=np.float64)
    _check_input(params, x)
    if mode == "train":
        if dropout_mask is None:
            if rng is None:
                raise ConfigError("train mode needs a dropout mask or an rng")
            dropout_mask = draw_dropout_mask(rng, x.shape, dropout_rate)
        x = apply_dropout(x, dropout_mask, dropout_rate)
    elif mode != "eval":
        raise ConfigError(f"unknown forward mode '{mode}'")
    return sigmoid(x @ params.W.T + params.b)


# --- Loss ---
def smooth_targets(y, alpha: float) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64)
    return y * (1.0 - alpha) + alpha / 2.0


def bce_loss(p, y_smooth) -> float:
    """Mean over labels of binary cross entropy against (smoothed) targets."""
    p = np.asarray(p, dtype=np.float64)
    y = np.asarray(y_smooth, dtype=np.float64)
    if p.shape != y.shape:
        raise DimMismatch(f"probabilities {p.shape} and targets {y.shape} differ")
    p = np.clip(p, PROB_CLIP, 1.0 - PROB_CLIP)
    return float(-np.mean(y * np.log(p) + (1.0 - y) * np.log1p(-p)))


def _bce_from_logits(z: np.ndarray, y: np.ndarray) -> np.ndarray:
    # -[y log s(z) + (1-y) log(1-s(z))] = y*softplus(-z) + (1-y)*softplus(z)
    return y * np.logaddexp(0.0, -z) + (1.0 - y) * np.logaddexp(0.0, z)


def loss_and_grads(
    params: HeadParams,
    X,
    Y,
    config: TrainConfig,
    masks=None,
) -> tuple[float, HeadParams]:
    """
    Batch-mean smoothed BCE and its analytic gradients.

    Args:
        params: Current head weights.
        X: Batch embeddings, shape (B, D).
        Y: Binary targets, shape (B, L).
        config: Supplies smoothing_alpha and dropout_rate.
        masks: Optional dropout masks, shape (B, D). None means no dropout.

    Returns:
        (loss, grads) where grads has the shapes of params.
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    Y = np.atleast_2d(np.asarray(Y, dtype=np.float64))
    if X.shape[0] == 0:
        raise EmptySplit("loss_and_grads needs a nonempty batch")
    _check_input(params, X)
    if Y.shape != (X.shape[0], params.n_labels):
        raise DimMismatch(f"targets {Y.shape} do not match batch of {X.shape[0]} x {params.n_labels} labels")
    if masks is not None:
        X = apply_dropout(X, masks, config.dropout_rate)

    batch, n_labels = Y.shape
    Ys = smooth_targets(Y, config.smoothing_alpha)
    Z = X @ params.W.T + params.b
    loss = float(np.mean(_bce_from_logits(Z, Ys)))

    dZ = (sigmoid(Z) - Ys) / (n_labels * batch)
    grads = HeadParams(W=dZ.T @ X, b=dZ.sum(axis=0))
    return loss, grads


# --- Optimizer ---
def clip_global_norm(grads: HeadParams, max_norm: float) -> HeadParams:
    """Rescales all gradients together when their joint L2 norm exceeds max_norm."""
    if max_norm <= 0:
        raise ConfigError(f"max_norm must be positive, got {max_norm}")
    norm = grads.global_norm()
    if norm <= max_norm * (1.0 + CLIP_TOLERANCE):
        return grads
    scale = max_norm / norm
    return HeadParams(W=grads.W * scale, b=grads.b * scale)


def adamw_step(
    params: HeadParams,
    state: AdamWState,
    grads: HeadParams,
    config: TrainConfig,
) -> tuple[HeadParams, AdamWState]:
    """One AdamW update with bias correction and decoupled weight decay. Inputs are not mutated."""
    t = state.t + 1
    b1, b2 = config.beta1, config.beta2
    lr, eps, wd = config.learning_rate, config.epsilon, config.weight_decay
    bias1 = 1.0 - b1**t
    bias2 = 1.0 - b2**t

    new_m, new_v, new_p = {}, {}, {}
    for name in ("W", "b"):
        theta = getattr(params, name)
        g = getattr(grads, name)
        m = b1 * getattr(state.m, name) + (1.0 - b1) * g
        v = b2 * getattr(state.v, name) + (1.0 - b2) * g * g
        m_hat = m / bias1
        v_hat = v / bias2
        new_p[name] = theta - lr * (m_hat / (np.sqrt(v_hat) + eps) + wd * theta)
        new_m[name], new_v[name] = m, v

    return HeadParams(**new_p), AdamWState(m=HeadParams(**new_m), v=HeadParams(**new_v), t=t)


# --- Early Stopping ---
class EarlyStopping:
    """
    Tracks the best dev score and keeps a copy of the weights that produced it.

    Improvement means a strictly greater score; training stops once `patience`
    consecutive epochs fail to improve.
    """

    def __init__(self, patience: int):
        self.patience = patience
        self.best_score = -math.inf
        self.best_epoch = 0
        self.best_params: HeadParams | None = None
        self.bad_epochs = 0

    def __call__(self, score: float, epoch: int, params: HeadParams) -> bool:
        if score > self.best_score:
            self.best_score = score
            self.best_epoch = epoch
            self.best_params = params.copy()
            self.bad_epochs = 0
        else:
            self.bad_epochs += 1
        return self.bad_epochs >= self.patience


# --- Training ---
def predict_proba(params: HeadParams, X) -> np.ndarray:
    return forward(params, X, mode="eval")


def dev_macro_f1(params: HeadParams, dev: EmbeddedSplit, schema: LabelSchema, threshold: float) -> float:
    preds = (predict_proba(params, dev.X) >= threshold).astype(np.int64)
    return classification_report(preds, dev.Y, schema, log_warnings=False).macro_f1


def train_head(
    train: EmbeddedSplit,
    dev: EmbeddedSplit,
    config: TrainConfig,
    schema: LabelSchema,
    dev_scorer: Callable[[HeadParams, int], float] | None = None,
    on_epoch: Callable[[EpochRecord, HeadParams], None] | None = None,
) -> TrainedModel:
    """
    Mini-batch AdamW training with early stopping on dev macro F1.

    Args:
        train: Training embeddings and labels.
        dev: Development embeddings and labels used for early stopping.
        config: Hyperparameters; config.seed drives init, shuffling and dropout.
        schema: Label schema shared by both splits.
        dev_scorer: Replaces the dev macro F1 computation (params, epoch) -> score.
        on_epoch: Called after every epoch with its record and the current weights.

    Returns:
        TrainedModel holding the weights of the best dev epoch.
    """
    if len(train) == 0:
        raise EmptySplit("training split is empty")
    if len(dev) == 0:
        raise EmptySplit("dev split is empty")
    if train.X.shape[1] != dev.X.shape[1]:
        raise DimMismatch(f"train dim {train.X.shape[1]} != dev dim {dev.X.shape[1]}")
    if train.Y.shape[1] != len(schema) or dev.Y.shape[1] != len(schema):
        raise DimMismatch(f"label matrices do not match schema of {len(schema)} labels")

    rng = np.random.default_rng(config.seed)
    n, dim = train.X.shape
    params = HeadParams.init(len(schema), dim, rng)
    state = AdamWState.zeros(params)
    stopper = EarlyStopping(config.patience)
    history: list[EpochRecord] = []

    for epoch in range(1, config.max_epochs + 1):
        order = rng.permutation(n)
        weighted_loss = 0.0
        for start in range(0, n, config.batch_size):
            idx = order[start : start + config.batch_size]
            X, Y = train.X[idx], train.Y[idx]
            masks = draw_dropout_mask(rng, X.shape, config.dropout_rate) if config.dropout_rate > 0 else None
            loss, grads = loss_and_grads(params, X, Y, config, masks)
            grads = clip_global_norm(grads, config.clip_max_norm)
            params, state = adamw_step(params, state, grads, config)
            weighted_loss += loss * len(idx)

        if dev_scorer is not None:
            score = float(dev_scorer(params, epoch))
        else:
            score = dev_macro_f1(params, dev, schema, config.threshold)
        record = EpochRecord(epoch=epoch, train_loss=weighted_loss / n, dev_macro_f1=score)
        history.append(record)
        stop = stopper(score, epoch, params)
        logger.info(
            "epoch %d: train_loss=%.6f dev_macro_f1=%.4f (best %.4f @ %d)",
            epoch, record.train_loss, score, stopper.best_score, stopper.best_epoch,
        )
        if on_epoch is not None:
            on_epoch(record, params)
        if stop:
            logger.info("Early stopping after epoch %d; restoring epoch %d", epoch, stopper.best_epoch)
            break

    return TrainedModel(
        params=stopper.best_params,
        schema=schema,
        embedder_fingerprint=train.fingerprint,
        threshold=config.threshold,
        history=history,
        config=config,
        best_epoch=stopper.best_epoch,
    )


# --- Inference ---
def predict(model: TrainedModel, x, threshold: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Probabilities and 0/1 decisions (p >= threshold) for one embedding or a batch."""
    tau = model.threshold if threshold is None else threshold
    if not 0.0 < tau < 1.0:
        raise ConfigError(f"threshold must be in (0, 1), got {tau}")
    probs = predict_proba(model.params, x)
    return probs, (probs >= tau).astype(np.int64)
