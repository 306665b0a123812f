# --- baselines.py ---
"""
Classical multi-output baselines over normalized sentence embeddings.

Pipeline (fixed order, identical at fit and predict time):
    L2-normalize each row -> z-score with a scaler fitted on training rows
    -> one independent binary learner per emotion label
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import singledispatch

import numpy as np

from constants import (
    BASELINE_KINDS,
    GNB_VAR_SMOOTHING,
    LOGREG_L2_PENALTY,
    LOGREG_MAX_ITER,
    LOGREG_MIN_STEP,
    LOGREG_STEP,
    LOGREG_TOL,
)
from embeddings import ScalerParams, fit_scaler, l2_normalize_rows, transform_scaler
from emotion_data import LabelSchema
from errors import (
    ConfigError,
    DimMismatch,
    EmptyText,
    EmptyTraining,
    FingerprintMismatch,
    SingleClass,
)
from head import sigmoid

logger = logging.getLogger(__name__)


# --- Learner Parameters ---
@dataclass(frozen=True)
class LogRegParams:
    w: np.ndarray
    bias: float
    l2_penalty: float = LOGREG_L2_PENALTY
    max_iter: int = LOGREG_MAX_ITER
    tol: float = LOGREG_TOL
    n_iter: int = 0

    @property
    def dim(self) -> int:
        return int(self.w.shape[0])


@dataclass(frozen=True)
class GnbParams:
    log_prior: np.ndarray  # (2,), classes 0 and 1
    mean: np.ndarray  # (2, D)
    var: np.ndarray  # (2, D), strictly positive

    @property
    def dim(self) -> int:
        return int(self.mean.shape[1])


@dataclass(frozen=True)
class ConstantLearner:
    """Stands in for a label that had a single class in training."""

    value: int
    dim: int


# --- Logistic Regression ---
def _logreg_objective(w: np.ndarray, bias: float, X: np.ndarray, y: np.ndarray, l2: float) -> float:
    z = X @ w + bias
    nll = np.mean(np.logaddexp(0.0, z) - y * z)
    return float(nll + 0.5 * l2 * np.dot(w, w))


def fit_logreg(
    X,
    y,
    l2_penalty: float = LOGREG_L2_PENALTY,
    max_iter: int = LOGREG_MAX_ITER,
    tol: float = LOGREG_TOL,
    step: float = LOGREG_STEP,
) -> LogRegParams:
    """
    L2-penalized logistic regression by full-batch gradient descent.

    Each iteration starts from `step` and halves it until the penalized
    objective does not increase, so the objective is non-increasing.
    Stops when the gradient norm drops below `tol` or after `max_iter` iterations.
    The bias is not penalized.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or y.shape != (X.shape[0],):
        raise DimMismatch(f"X {X.shape} and y {y.shape} are not aligned")
    if max_iter < 1:
        raise ConfigError(f"max_iter must be >= 1, got {max_iter}")
    n, dim = X.shape
    w = np.zeros(dim)
    bias = 0.0
    objective = _logreg_objective(w, bias, X, y, l2_penalty)
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        residual = sigmoid(X @ w + bias) - y
        grad_w = X.T @ residual / n + l2_penalty * w
        grad_b = float(residual.mean())
        if math.sqrt(float(grad_w @ grad_w) + grad_b * grad_b) < tol:
            break
        eta = step
        while eta >= LOGREG_MIN_STEP:
            cand_w = w - eta * grad_w
            cand_b = bias - eta * grad_b
            cand_obj = _logreg_objective(cand_w, cand_b, X, y, l2_penalty)
            if cand_obj <= objective:
                break
            eta /= 2.0
        else:
            logger.debug("logreg backtracking stalled at iteration %d", n_iter)
            break
        w, bias, objective = cand_w, cand_b, cand_obj
    return LogRegParams(w=w, bias=bias, l2_penalty=l2_penalty, max_iter=max_iter, tol=tol, n_iter=n_iter)


# --- Gaussian Naive Bayes ---
def fit_gnb(X, y, var_smoothing: float = GNB_VAR_SMOOTHING) -> GnbParams:
    """
    Per-class means and population variances with a variance floor of
    var_smoothing * (largest per-feature variance of X).
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.ndim != 2 or y.shape != (X.shape[0],):
        raise DimMismatch(f"X {X.shape} and y {y.shape} are not aligned")
    if not (np.any(y == 0) and np.any(y == 1)):
        raise SingleClass("Gaussian naive Bayes needs both classes in training")
    epsilon = var_smoothing * float(np.var(X, axis=0).max())
    if epsilon == 0.0:
        epsilon = var_smoothing  # Every feature constant
    means, variances, priors = [], [], []
    for c in (0, 1):
        Xc = X[y == c]
        means.append(Xc.mean(axis=0))
        variances.append(Xc.var(axis=0) + epsilon)
        priors.append(Xc.shape[0] / X.shape[0])
    return GnbParams(log_prior=np.log(priors), mean=np.stack(means), var=np.stack(variances))


def gnb_log_posteriors(params: GnbParams, x) -> np.ndarray:
    """Unnormalized log posteriors of classes 0 and 1 for one row; computed in log space."""
    x = np.asarray(x, dtype=np.float64)
    log_norm = -0.5 * np.sum(np.log(2.0 * np.pi * params.var), axis=1)
    log_lik = -0.5 * np.sum((x - params.mean) ** 2 / params.var, axis=1)
    return params.log_prior + log_norm + log_lik


# --- Binary Prediction ---
def _check_dim(learner, x: np.ndarray) -> None:
    if x.ndim != 1 or x.shape[0] != learner.dim:
        raise DimMismatch(f"input of shape {x.shape} for learner of dim {learner.dim}")


@singledispatch
def predict_binary(learner, x) -> tuple[int, float]:
    """Returns (decision, probability of class 1) for one normalized row."""
    raise ConfigError(f"unsupported learner type {type(learner).__name__}")


@predict_binary.register
def _(learner: LogRegParams, x) -> tuple[int, float]:
    x = np.asarray(x, dtype=np.float64)
    _check_dim(learner, x)
    p = float(sigmoid(np.array(x @ learner.w + learner.bias)))
    return int(p >= 0.5), p


@predict_binary.register
def _(learner: GnbParams, x) -> tuple[int, float]:
    x = np.asarray(x, dtype=np.float64)
    _check_dim(learner, x)
    jll = gnb_log_posteriors(learner, x)
    p1 = float(np.exp(jll[1] - np.logaddexp(jll[0], jll[1])))
    # Ties go to class 0
    return int(jll[1] > jll[0]), p1


@predict_binary.register
def _(learner: ConstantLearner, x) -> tuple[int, float]:
    x = np.asarray(x, dtype=np.float64)
    _check_dim(learner, x)
    return learner.value, float(learner.value)


# --- Multi-Output Wrapper ---
@dataclass(frozen=True)
class MultiOutputModel:
    schema: LabelSchema
    scaler: ScalerParams
    kind: str
    learners: tuple
    embedder_fingerprint: str = ""

    def __post_init__(self):
        if len(self.learners) != len(self.schema):
            raise DimMismatch(f"{len(self.learners)} learners for {len(self.schema)} labels")

    @property
    def dim(self) -> int:
        return self.scaler.dim


def normalize_features(scaler: ScalerParams, X_raw) -> np.ndarray:
    """The predict-time half of the pipeline: L2 rows, then the frozen scaler."""
    return transform_scaler(scaler, l2_normalize_rows(X_raw))


def _fit_one(kind: str, X: np.ndarray, y: np.ndarray, hyper: dict):
    values = np.unique(y)
    if values.shape[0] == 1:
        return ConstantLearner(value=int(values[0]), dim=X.shape[1])
    if kind == "logreg":
        return fit_logreg(X, y, **hyper)
    return fit_gnb(X, y, **hyper)


def fit_multioutput(
    kind: str,
    X_raw,
    Y,
    schema: LabelSchema,
    embedder_fingerprint: str = "",
    n_jobs: int = 1,
    **hyper,
) -> MultiOutputModel:
    """
    Fits one independent binary learner per label column.

    Args:
        kind: "logreg" or "gnb".
        X_raw: Raw embeddings, shape (N, D).
        Y: Binary labels, shape (N, L), columns ordered as the schema.
        schema: Label schema of Y.
        embedder_fingerprint: Stored so prediction can refuse a different embedder.
        n_jobs: Labels fitted concurrently in a thread pool when > 1.
        **hyper: Passed to fit_logreg / fit_gnb.
    """
    if kind not in BASELINE_KINDS:
        raise ConfigError(f"unknown baseline kind '{kind}', expected one of {BASELINE_KINDS}")
    X_raw = np.asarray(X_raw, dtype=np.float64)
    Y = np.asarray(Y)
    if X_raw.ndim != 2 or X_raw.shape[0] == 0:
        raise EmptyTraining("no training rows")
    if Y.shape != (X_raw.shape[0], len(schema)):
        raise DimMismatch(f"labels {Y.shape} do not align with {X_raw.shape[0]} rows x {len(schema)} labels")

    scaler = fit_scaler(l2_normalize_rows(X_raw))
    X = normalize_features(scaler, X_raw)
    columns = [Y[:, j] for j in range(Y.shape[1])]
    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            learners = list(pool.map(lambda col: _fit_one(kind, X, col, hyper), columns))
    else:
        learners = [_fit_one(kind, X, col, hyper) for col in columns]
    for label, learner in zip(schema.labels, learners):
        if isinstance(learner, ConstantLearner):
            logger.info("Label '%s' has a single class in training; using constant %d", label, learner.value)
    return MultiOutputModel(
        schema=schema, scaler=scaler, kind=kind, learners=tuple(learners), embedder_fingerprint=embedder_fingerprint
    )


def predict_matrix(model: MultiOutputModel, X_raw) -> tuple[np.ndarray, np.ndarray]:
    """(probabilities N x L, decisions N x L) for raw embeddings."""
    X = normalize_features(model.scaler, np.atleast_2d(np.asarray(X_raw, dtype=np.float64)))
    probs = np.zeros((X.shape[0], len(model.learners)))
    preds = np.zeros((X.shape[0], len(model.learners)), dtype=np.int64)
    for j, learner in enumerate(model.learners):
        for i in range(X.shape[0]):
            preds[i, j], probs[i, j] = predict_binary(learner, X[i])
    return probs, preds


def predict_dict(model: MultiOutputModel, text: str, embedder) -> dict[str, int]:
    """Embeds one text and returns {emotion: 0 or 1} over the model's schema labels."""
    if not text or not text.strip():
        raise EmptyText("cannot predict emotions for empty text")
    if model.embedder_fingerprint and embedder.fingerprint != model.embedder_fingerprint:
        raise FingerprintMismatch(model.embedder_fingerprint, embedder.fingerprint)
    _, preds = predict_matrix(model, embedder.embed([text]))
    return {label: int(v) for label, v in zip(model.schema.labels, preds[0])}
