# --- checkpoints.py ---
"""
Structured-text (YAML) checkpoints for trained heads and baseline models.

Float arrays are written as rows of 9-significant-digit numbers so files are
diffable and identical across reruns with the same seed.
"""

import logging
from pathlib import Path

import numpy as np
import yaml

from baselines import ConstantLearner, GnbParams, LogRegParams, MultiOutputModel
from constants import APP_VERSION, FLOAT_SIG_DIGITS
from embeddings import ScalerParams
from emotion_data import LabelSchema
from errors import IoError
from head import EpochRecord, HeadParams, TrainConfig, TrainedModel
from report_utils import dump_yaml
from utils import safe_read_file, safe_write_file

logger = logging.getLogger(__name__)

HEAD_KIND = "head"
BASELINE_KIND = "baseline"


# --- Array Encoding ---
def encode_row(values) -> str:
    return " ".join(format(float(v), f".{FLOAT_SIG_DIGITS}g") for v in np.ravel(values))


def decode_row(text: str) -> np.ndarray:
    return np.array([float(tok) for tok in str(text).split()], dtype=np.float64)


def encode_matrix(matrix) -> list[str]:
    return [encode_row(row) for row in np.atleast_2d(matrix)]


def decode_matrix(rows) -> np.ndarray:
    return np.stack([decode_row(r) for r in rows])


def _schema_dict(schema: LabelSchema) -> dict:
    return {"language": schema.language, "labels": list(schema.labels)}


def _schema_from(data: dict) -> LabelSchema:
    return LabelSchema(str(data["language"]), tuple(data["labels"]))


def _write(path: Path, payload: dict) -> None:
    ok, error = safe_write_file(Path(path), dump_yaml(payload))
    if not ok:
        raise IoError(error)
    logger.debug("Wrote checkpoint %s", path)


def _read(path: Path, expected_kind: str) -> dict:
    content, error = safe_read_file(Path(path))
    if error:
        raise IoError(error)
    try:
        data = yaml.safe_load(content)
    except yaml.YAMLError as e:
        raise IoError(f"{path} is not a valid checkpoint: {e}") from e
    if not isinstance(data, dict) or data.get("kind") != expected_kind:
        raise IoError(f"{path} is not a {expected_kind} checkpoint")
    return data


# --- Head Models ---
def head_to_dict(model: TrainedModel) -> dict:
    return {
        "kind": HEAD_KIND,
        "version": APP_VERSION,
        "schema": _schema_dict(model.schema),
        "threshold": float(model.threshold),
        "embedder_fingerprint": model.embedder_fingerprint,
        "best_epoch": int(model.best_epoch),
        "config": model.config.to_dict(),
        "W": encode_matrix(model.params.W),
        "b": encode_row(model.params.b),
        "history": [
            {"epoch": r.epoch, "train_loss": float(r.train_loss), "dev_macro_f1": float(r.dev_macro_f1)}
            for r in model.history
        ],
    }


def save_head_model(model: TrainedModel, path: Path) -> None:
    _write(path, head_to_dict(model))


def load_head_model(path: Path) -> TrainedModel:
    data = _read(path, HEAD_KIND)
    try:
        params = HeadParams(W=decode_matrix(data["W"]), b=decode_row(data["b"]))
        return TrainedModel(
            params=params,
            schema=_schema_from(data["schema"]),
            embedder_fingerprint=str(data["embedder_fingerprint"]),
            threshold=float(data["threshold"]),
            history=[
                EpochRecord(int(r["epoch"]), float(r["train_loss"]), float(r["dev_macro_f1"])) for r in data["history"]
            ],
            config=TrainConfig().with_overrides(data.get("config", {})),
            best_epoch=int(data.get("best_epoch", 0)),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise IoError(f"{path}: malformed head checkpoint ({e})") from e


# --- Baseline Models ---
def _learner_to_dict(learner) -> dict:
    if isinstance(learner, LogRegParams):
        return {
            "type": "logreg",
            "w": encode_row(learner.w),
            "bias": float(format(learner.bias, f".{FLOAT_SIG_DIGITS}g")),
            "l2_penalty": learner.l2_penalty,
            "max_iter": learner.max_iter,
            "tol": learner.tol,
            "n_iter": learner.n_iter,
        }
    if isinstance(learner, GnbParams):
        return {
            "type": "gnb",
            "log_prior": encode_row(learner.log_prior),
            "mean": encode_matrix(learner.mean),
            "var": encode_matrix(learner.var),
        }
    return {"type": "constant", "value": int(learner.value), "dim": int(learner.dim)}


def _learner_from_dict(data: dict):
    kind = data["type"]
    if kind == "logreg":
        return LogRegParams(
            w=decode_row(data["w"]),
            bias=float(data["bias"]),
            l2_penalty=float(data["l2_penalty"]),
            max_iter=int(data["max_iter"]),
            tol=float(data["tol"]),
            n_iter=int(data.get("n_iter", 0)),
        )
    if kind == "gnb":
        return GnbParams(
            log_prior=decode_row(data["log_prior"]),
            mean=decode_matrix(data["mean"]),
            var=decode_matrix(data["var"]),
        )
    if kind == "constant":
        return ConstantLearner(value=int(data["value"]), dim=int(data["dim"]))
    raise ValueError(f"unknown learner type '{kind}'")


def save_baseline_model(model: MultiOutputModel, path: Path) -> None:
    payload = {
        "kind": BASELINE_KIND,
        "version": APP_VERSION,
        "learner_kind": model.kind,
        "schema": _schema_dict(model.schema),
        "embedder_fingerprint": model.embedder_fingerprint,
        "scaler": {"mean": encode_row(model.scaler.mean), "std": encode_row(model.scaler.std)},
        "learners": {
            label: _learner_to_dict(learner) for label, learner in zip(model.schema.labels, model.learners)
        },
    }
    _write(path, payload)


def load_baseline_model(path: Path) -> MultiOutputModel:
    data = _read(path, BASELINE_KIND)
    try:
        schema = _schema_from(data["schema"])
        scaler = ScalerParams(mean=decode_row(data["scaler"]["mean"]), std=decode_row(data["scaler"]["std"]))
        learners = tuple(_learner_from_dict(data["learners"][label]) for label in schema.labels)
        return MultiOutputModel(
            schema=schema,
            scaler=scaler,
            kind=str(data["learner_kind"]),
            learners=learners,
            embedder_fingerprint=str(data.get("embedder_fingerprint", "")),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise IoError(f"{path}: malformed baseline checkpoint ({e})") from e
