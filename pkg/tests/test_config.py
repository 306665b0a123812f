from pathlib import Path

import pytest

from config import RunConfig, build_run_config, default_seeds, parse_seed_list, read_config_file
from constants import DEFAULT_SEEDS, SEED_ENV_VAR
from errors import ConfigError, MissingPath


def test_parse_seed_list_forms():
    assert parse_seed_list("0,1,2") == (0, 1, 2)
    assert parse_seed_list(" 3 4 ") == (3, 4)
    with pytest.raises(ConfigError):
        parse_seed_list("1,two")
    with pytest.raises(ConfigError):
        parse_seed_list(" , ")


def test_default_seeds_from_environment():
    assert default_seeds({}) == DEFAULT_SEEDS
    assert default_seeds({SEED_ENV_VAR: "7,8"}) == (7, 8)


def test_defaults_without_any_source():
    config = build_run_config({}, environ={})
    assert config.seeds == DEFAULT_SEEDS
    assert config.workers == 1
    assert config.train.learning_rate == 1e-5
    assert config.train.batch_size == 16


def test_read_config_file_normalizes_keys(tmp_path):
    path = tmp_path / "run.conf"
    path.write_text("# training run\nLearning-Rate=0.001\nbatch_size = 8\nTRAIN_CSV=data/train.csv\n", encoding="utf-8")
    assert read_config_file(path) == {"learning_rate": "0.001", "batch_size": "8", "train_csv": "data/train.csv"}


def test_read_config_file_missing(tmp_path):
    with pytest.raises(MissingPath):
        read_config_file(tmp_path / "absent.conf")


def test_precedence_flags_over_file_over_env(tmp_path):
    path = tmp_path / "run.conf"
    path.write_text("learning_rate=0.001\nbatch_size=8\nseeds=1,2\nworkers=3\n", encoding="utf-8")
    env = {SEED_ENV_VAR: "9"}

    from_env = build_run_config({}, environ=env)
    assert from_env.seeds == (9,)

    from_file = build_run_config({}, path, environ=env)
    assert from_file.seeds == (1, 2)
    assert from_file.train.learning_rate == 0.001
    assert from_file.train.batch_size == 8
    assert from_file.workers == 3

    flags = {"learning_rate": 0.05, "batch_size": None, "seeds": "4"}
    from_flags = build_run_config(flags, path, environ=env)
    assert from_flags.train.learning_rate == 0.05
    assert from_flags.train.batch_size == 8
    assert from_flags.seeds == (4,)


def test_paths_are_converted(tmp_path):
    config = build_run_config({"train_csv": str(tmp_path / "t.csv"), "language": "hin"}, environ={})
    assert config.train_csv == Path(tmp_path / "t.csv")
    assert config.language == "hin"


def test_unknown_and_invalid_keys(tmp_path):
    path = tmp_path / "run.conf"
    path.write_text("momentum=0.9\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        build_run_config({}, path, environ={})
    with pytest.raises(ConfigError):
        build_run_config({"batch_size": "many"}, environ={})
    with pytest.raises(ConfigError):
        build_run_config({"workers": "0"}, environ={})
    with pytest.raises(ConfigError):
        build_run_config({"threshold": 1.0}, environ={})


def test_single_seed_key_is_rejected(tmp_path):
    path = tmp_path / "run.conf"
    path.write_text("seed=3\n", encoding="utf-8")
    with pytest.raises(ConfigError, match="seeds"):
        build_run_config({}, path, environ={})
    path.write_text("seeds=3\n", encoding="utf-8")
    assert build_run_config({}, path, environ={}).seeds == (3,)


def test_require_reports_unset_and_missing_paths(tmp_path):
    existing = tmp_path / "train.csv"
    existing.write_text("text\n", encoding="utf-8")
    config = RunConfig(train_csv=existing, dev_csv=tmp_path / "dev.csv")
    config.require("train_csv")
    with pytest.raises(MissingPath) as info:
        config.require("train_csv", "dev_csv")
    assert info.value.role == "dev csv"
    with pytest.raises(ConfigError):
        config.require("embeddings")
