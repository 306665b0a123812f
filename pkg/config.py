# --- config.py ---
"""
Run configuration for the CLI.

Precedence, highest first: command-line flags, the key=value config file,
the EMOCLASS_SEED environment variable (seed list only), built-in defaults.
"""

import logging
import os
from collections.abc import Mapping
from dataclasses import dataclass, field
from pathlib import Path

from dotenv import dotenv_values

from constants import DEFAULT_LANGUAGE, DEFAULT_SEEDS, SEED_ENV_VAR
from errors import ConfigError, MissingPath
from head import TrainConfig

logger = logging.getLogger(__name__)

# Config-file keys that are not TrainConfig fields
RUN_KEYS = {
    "train_csv",
    "dev_csv",
    "test_csv",
    "embeddings",
    "out_model",
    "language",
    "seeds",
    "workers",
}


@dataclass(frozen=True)
class RunConfig:
    train_csv: Path | None = None
    dev_csv: Path | None = None
    test_csv: Path | None = None
    embeddings: Path | None = None
    out_model: Path | None = None
    language: str = DEFAULT_LANGUAGE
    seeds: tuple[int, ...] = DEFAULT_SEEDS
    workers: int = 1
    train: TrainConfig = field(default_factory=TrainConfig)

    def __post_init__(self):
        if not self.seeds:
            raise ConfigError("seed list must not be empty")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")

    def require(self, *names: str) -> None:
        """Raises MissingPath for the first named path that is unset or absent on disk."""
        for name in names:
            value = getattr(self, name)
            if value is None:
                raise ConfigError(f"--{name.replace('_', '-')} is required")
            if not Path(value).exists():
                raise MissingPath(value, name.replace("_", " "))


def parse_seed_list(text: str) -> tuple[int, ...]:
    """'0,1,2' or '0 1 2' -> (0, 1, 2)."""
    try:
        seeds = tuple(int(tok) for tok in text.replace(",", " ").split())
    except ValueError:
        raise ConfigError(f"invalid seed list '{text}'") from None
    if not seeds:
        raise ConfigError("seed list must not be empty")
    return seeds


def default_seeds(environ: Mapping[str, str] | None = None) -> tuple[int, ...]:
    environ = os.environ if environ is None else environ
    raw = environ.get(SEED_ENV_VAR)
    if raw:
        seeds = parse_seed_list(raw)
        logger.debug("Using seeds %s from %s", seeds, SEED_ENV_VAR)
        return seeds
    return DEFAULT_SEEDS


def read_config_file(path: Path) -> dict[str, str]:
    """Parses a flat key=value file; keys are normalized to snake_case."""
    path = Path(path)
    if not path.is_file():
        raise MissingPath(path, "config file")
    values = dotenv_values(path, encoding="utf-8")
    parsed = {}
    for key, value in values.items():
        if value is None:
            raise ConfigError(f"{path}: key '{key}' has no value")
        parsed[key.strip().lower().replace("-", "_")] = value.strip()
    return parsed


def build_run_config(
    flags: Mapping[str, object],
    config_path: Path | None = None,
    environ: Mapping[str, str] | None = None,
) -> RunConfig:
    """
    Merges defaults, environment, config file and flags into a RunConfig.

    Args:
        flags: Values given on the command line; None means "not given".
        config_path: Optional key=value file.
        environ: Environment mapping (os.environ when None).

    Returns:
        The merged, validated RunConfig.
    """
    merged: dict[str, object] = {"seeds": default_seeds(environ)}
    if config_path is not None:
        merged.update(read_config_file(config_path))
    merged.update({k: v for k, v in flags.items() if v is not None})
    if "seed" in merged:
        raise ConfigError("'seed' is not a run option; list training seeds with 'seeds'")

    run_kwargs = {}
    train_overrides = {}
    for key, value in merged.items():
        if key in RUN_KEYS:
            run_kwargs[key] = value
        else:
            train_overrides[key] = value

    for key in ("train_csv", "dev_csv", "test_csv", "embeddings", "out_model"):
        if key in run_kwargs:
            run_kwargs[key] = Path(run_kwargs[key])
    seeds = run_kwargs.get("seeds")
    if isinstance(seeds, str):
        run_kwargs["seeds"] = parse_seed_list(seeds)
    elif seeds is not None:
        run_kwargs["seeds"] = tuple(int(s) for s in seeds)
    if "workers" in run_kwargs:
        try:
            run_kwargs["workers"] = int(run_kwargs["workers"])
        except ValueError:
            raise ConfigError(f"workers must be an integer, got {run_kwargs['workers']!r}") from None
    if "language" in run_kwargs:
        run_kwargs["language"] = str(run_kwargs["language"])

    return RunConfig(train=TrainConfig().with_overrides(train_overrides), **run_kwargs)
