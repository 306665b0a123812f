# --- cli.py ---
"""
Command-line surface: embedding, training, evaluation, prediction, baselines
and reports.

Standard output carries results only; diagnostics go to standard error via
logging. Exit codes: 0 ok, 2 configuration error, 3 data error, 4 missing
embeddings.
"""

import argparse
import logging
from collections.abc import Sequence
from pathlib import Path

import yaml

from baselines import fit_multioutput, predict_dict, predict_matrix
from checkpoints import load_baseline_model, load_head_model, save_baseline_model
from config import build_run_config
from constants import (
    APP_NAME,
    APP_VERSION,
    BASELINE_KINDS,
    DEFAULT_HASH_DIM,
    DEFAULT_HASH_SEED,
    DEFAULT_MAX_TOKENS,
    EXIT_OK,
    LEADERBOARD_RESOURCE,
    REFERENCE_TABLE_RESOURCE,
    REMOTE_BATCH_SIZE,
    REMOTE_TIMEOUT,
    REPORT_FORMATS,
    SPLITS,
)
from embeddings import (
    EmbedderConfig,
    attach_embeddings,
    build_store,
    config_from_fingerprint,
    load_store,
    make_embedder,
    save_store,
)
from emotion_data import infer_schema, load_dataset, load_split_files, read_header, split_from_path, split_stats
from errors import (
    ConfigError,
    EmoClassError,
    EmptyText,
    FingerprintMismatch,
    IoError,
    MissingPath,
    SchemaMismatch,
)
from head import predict
from metrics import (
    EvalReport,
    aggregate_seeds,
    classification_report,
    format_classification_report,
    format_gap_table,
    format_results_table,
    format_seed_aggregate,
    leaderboard_compare,
    load_leaderboard,
    load_reference_rows,
    report_row,
)
from report_utils import dump_yaml, format_score, render_table
from utils import resource_path, safe_read_file, safe_write_file, setup_logging
from workers import SeedJob, SeedRunner

logger = logging.getLogger(__name__)

# Maps train flags onto TrainConfig field names
TRAIN_FLAGS = (
    "learning_rate",
    "weight_decay",
    "batch_size",
    "dropout_rate",
    "smoothing_alpha",
    "clip_max_norm",
    "patience",
    "max_epochs",
    "threshold",
)


# --- Helpers ---
def _require_file(path: Path | None, role: str) -> Path:
    if path is None:
        raise ConfigError(f"{role} is required")
    path = Path(path)
    if not path.is_file():
        raise MissingPath(path, role)
    return path


def _write_text(path: Path, content: str) -> None:
    ok, error = safe_write_file(Path(path), content)
    if not ok:
        raise IoError(error)
    logger.info("Wrote %s", path)


def _emit(text: str) -> None:
    print(text, end="" if text.endswith("\n") else "\n")


def _load_single(path: Path, language: str, split: str):
    path = _require_file(path, f"{split} csv")
    return load_dataset(path, infer_schema(read_header(path), language), split)


def _embedding_source(embeddings: Path | None, fingerprint: str, endpoint: str | None):
    """A store when a file is given, else the embedder described by the model's fingerprint."""
    if embeddings is not None:
        return load_store(_require_file(embeddings, "embeddings file"))
    return make_embedder(config_from_fingerprint(fingerprint, endpoint))


def _check_fingerprint(expected: str, actual: str) -> None:
    if expected and actual != expected:
        raise FingerprintMismatch(expected, actual)


def _parse_pair(text: str, what: str) -> tuple[str, str]:
    name, sep, value = text.partition("=")
    if not sep or not name or not value:
        raise ConfigError(f"expected {what} as NAME=PATH, got '{text}'")
    return name.strip(), value.strip()


# --- stats ---
def cmd_stats(args) -> int:
    paths = {split: getattr(args, f"{split}_csv") for split in SPLITS}
    if all(p is None for p in paths.values()):
        raise ConfigError("give at least one of --train-csv, --dev-csv, --test-csv")
    for split, path in paths.items():
        if path is not None:
            _require_file(path, f"{split} csv")
    datasets = load_split_files(paths, args.language)
    stats = split_stats(datasets.values())
    header = ["Split", "Samples", *(lab.capitalize() for lab in stats.labels)]
    rows = [
        [split, str(stats.split_counts[split]), *(str(stats.label_positives[split][lab]) for lab in stats.labels)]
        for split in SPLITS
    ]
    rows.append(["total", str(stats.total), *(str(stats.positives(lab)) for lab in stats.labels)])
    _emit(render_table(header, rows, separator_after={1}))
    return EXIT_OK


# --- embed-hash / embed-remote ---
def _embed_files(args, config: EmbedderConfig) -> int:
    embedder = make_embedder(config)
    keys, vectors = [], []
    for csv_path in args.csv:
        split = args.split or split_from_path(csv_path, "train")
        dataset = _load_single(csv_path, args.language, split)
        logger.info("Embedding %d texts from %s with %s", len(dataset), csv_path, embedder.fingerprint)
        keys.extend(dataset.keys)
        vectors.extend(embedder.embed(dataset.texts))
    store = build_store(keys, vectors, fingerprint=embedder.fingerprint)
    save_store(store, args.out)
    logger.info("Stored %d vectors of dim %d", len(store), store.dim)
    return EXIT_OK


def cmd_embed_hash(args) -> int:
    config = EmbedderConfig(backend="hashing", dim=args.dim, max_tokens=args.max_tokens, seed=args.seed)
    return _embed_files(args, config)


def cmd_embed_remote(args) -> int:
    config = EmbedderConfig(
        backend="remote",
        dim=args.dim,
        max_tokens=args.max_tokens,
        endpoint=args.endpoint,
        timeout=args.timeout,
        batch_size=args.batch_size,
    )
    return _embed_files(args, config)


# --- train ---
def cmd_train(args) -> int:
    flags = {
        "train_csv": args.train_csv,
        "dev_csv": args.dev_csv,
        "embeddings": args.embeddings,
        "out_model": args.out_model,
        "language": args.language,
        "seeds": args.seed,
        "workers": args.workers,
    }
    flags.update({name: getattr(args, name) for name in TRAIN_FLAGS})
    config = build_run_config(flags, args.config)
    config.require("train_csv", "dev_csv", "embeddings")
    if config.out_model is None:
        raise ConfigError("--out-model is required")

    datasets = load_split_files({"train": config.train_csv, "dev": config.dev_csv}, config.language)
    schema = datasets["train"].schema
    store = load_store(config.embeddings)
    train = attach_embeddings(datasets["train"], store)
    dev = attach_embeddings(datasets["dev"], store)
    logger.info(
        "Training on %d train / %d dev samples, %d labels, seeds %s", len(train), len(dev), len(schema), config.seeds
    )

    out_dir = Path(config.out_model)
    jobs = [
        SeedJob(
            seed=seed,
            train=train,
            dev=dev,
            schema=schema,
            config=config.train,
            out_path=out_dir / f"seed_{seed}.model.yaml",
        )
        for seed in config.seeds
    ]
    results = SeedRunner(jobs, workers=config.workers).run()

    aggregate = aggregate_seeds([r.dev_report for r in results])
    summary = {
        "language": schema.language,
        "seeds": [r.seed for r in results],
        "best_epochs": {r.seed: r.model.best_epoch for r in results},
        **aggregate.to_dict(),
    }
    _write_text(out_dir / "aggregate.yaml", dump_yaml(summary))
    history = ["seed\tepoch\ttrain_loss\tdev_macro_f1"]
    for r in results:
        history.extend(
            f"{r.seed}\t{rec.epoch}\t{rec.train_loss:.9g}\t{rec.dev_macro_f1:.9g}" for rec in r.model.history
        )
    _write_text(out_dir / "history.tsv", "\n".join(history) + "\n")
    _emit(format_seed_aggregate(aggregate))
    return EXIT_OK


# --- eval ---
def cmd_eval(args) -> int:
    model = load_head_model(_require_file(args.model, "model"))
    test_csv = _require_file(args.test_csv, "test csv")
    language = args.language or model.schema.language
    test_schema = infer_schema(read_header(test_csv), language)
    if not model.schema.same_labels(test_schema):
        raise SchemaMismatch(f"model labels {model.schema.labels} do not match test file labels {test_schema.labels}")
    dataset = load_dataset(test_csv, model.schema, "test")
    split = attach_embeddings(dataset, _embedding_source(args.embeddings, model.embedder_fingerprint, args.endpoint))
    _check_fingerprint(model.embedder_fingerprint, split.fingerprint)

    _, preds = predict(model, split.X, args.threshold)
    report = classification_report(preds, split.Y, model.schema)
    payload = {"language": language, **report.to_dict()}
    if args.out is not None:
        _write_text(args.out, dump_yaml(payload))
    _emit(dump_yaml(payload) if args.format == "yaml" else format_classification_report(report))
    return EXIT_OK


# --- predict ---
def cmd_predict(args) -> int:
    if not args.text or not args.text.strip():
        raise EmptyText("cannot predict emotions for empty text")
    model = load_head_model(_require_file(args.model, "model"))
    embedder = make_embedder(config_from_fingerprint(model.embedder_fingerprint, args.endpoint))
    probs, preds = predict(model, embedder.embed([args.text])[0], args.threshold)
    _emit(
        dump_yaml(
            {
                "emotions": {lab: int(v) for lab, v in zip(model.schema.labels, preds)},
                "probabilities": {lab: float(p) for lab, p in zip(model.schema.labels, probs)},
            }
        )
    )
    return EXIT_OK


# --- baseline ---
def _baseline_hyper(args, kind: str) -> dict:
    if kind == "logreg":
        hyper = {"l2_penalty": args.l2_penalty, "max_iter": args.max_iter}
    else:
        hyper = {"var_smoothing": args.var_smoothing}
    return {k: v for k, v in hyper.items() if v is not None}


def _baseline_splits(args, store):
    paths = {"train": _require_file(args.train_csv, "train csv"), "test": None}
    if args.test_csv is not None:
        paths["test"] = _require_file(args.test_csv, "test csv")
    datasets = load_split_files(paths, args.language)
    return {split: attach_embeddings(ds, store) for split, ds in datasets.items()}, datasets["train"].schema


def _evaluate_baseline(model, split) -> EvalReport:
    _, preds = predict_matrix(model, split.X)
    return classification_report(preds, split.Y, model.schema)


def cmd_baseline_fit(args) -> int:
    store = load_store(_require_file(args.embeddings, "embeddings file"))
    splits, schema = _baseline_splits(args, store)
    train = splits["train"]
    model = fit_multioutput(
        args.kind, train.X, train.Y, schema, train.fingerprint, n_jobs=args.n_jobs, **_baseline_hyper(args, args.kind)
    )
    if args.out_model is not None:
        save_baseline_model(model, args.out_model)
        logger.info("Wrote %s", args.out_model)

    reports = {name: _evaluate_baseline(model, split) for name, split in splits.items()}
    if args.format == "yaml":
        _emit(dump_yaml({"kind": args.kind, **{name: rep.to_dict() for name, rep in reports.items()}}))
    else:
        for name, rep in reports.items():
            _emit(f"[{name}] {args.kind}")
            _emit(format_classification_report(rep))
    return EXIT_OK


def cmd_baseline_predict(args) -> int:
    model = load_baseline_model(_require_file(args.model, "model"))
    if not args.text or not args.text.strip():
        raise EmptyText("cannot predict emotions for empty text")
    embedder = make_embedder(config_from_fingerprint(model.embedder_fingerprint, args.endpoint))
    _emit(dump_yaml({"emotions": predict_dict(model, args.text, embedder)}))
    return EXIT_OK


def cmd_baseline_compare(args) -> int:
    if not args.embeddings:
        raise ConfigError("give at least one --embeddings NAME=PATH")
    kinds = args.kind or list(BASELINE_KINDS)
    rows, records = [], []
    for pair in args.embeddings:
        name, path = _parse_pair(pair, "--embeddings")
        store = load_store(_require_file(Path(path), "embeddings file"))
        splits, schema = _baseline_splits(args, store)
        train = splits["train"]
        for kind in kinds:
            logger.info("Fitting %s on %s embeddings", kind, name)
            model = fit_multioutput(
                kind, train.X, train.Y, schema, train.fingerprint, n_jobs=args.n_jobs, **_baseline_hyper(args, kind)
            )
            scores = {split: _evaluate_baseline(model, data).macro_f1 for split, data in splits.items()}
            rows.append([name, kind, format_score(scores["train"]), format_score(scores.get("test"))])
            records.append({"embeddings": name, "kind": kind, **{f"{s}_macro_f1": v for s, v in scores.items()}})
    if args.format == "yaml":
        _emit(dump_yaml(records))
    else:
        _emit(render_table(["Embeddings", "Learner", "Train Macro", "Test Macro"], rows, separator_after={1}))
    return EXIT_OK


# --- report ---
def _load_eval_report(spec: str) -> tuple[str, EvalReport]:
    language, path = _parse_pair(spec, "report") if "=" in spec else (None, spec)
    content, error = safe_read_file(_require_file(Path(path), "report"))
    if error:
        raise IoError(error)
    try:
        data = yaml.safe_load(content)
        report = EvalReport.from_dict(data)
    except (yaml.YAMLError, KeyError, TypeError, ValueError) as e:
        raise IoError(f"{path} is not an evaluation report: {e}") from e
    language = language or str(data.get("language", Path(path).stem))
    return language, report


def cmd_report(args) -> int:
    if not args.reports and args.reference is None and args.leaderboard is None:
        raise ConfigError("nothing to report: give evaluation reports, --reference or --leaderboard")
    rows = load_reference_rows(_require_file(Path(args.reference), "reference table")) if args.reference else []
    ours = {}
    for spec in args.reports:
        language, report = _load_eval_report(spec)
        rows.append(report_row(language, report))
        ours[language] = report.macro_f1

    gaps = []
    if args.leaderboard is not None:
        board = load_leaderboard(_require_file(Path(args.leaderboard), "leaderboard"))
        if not ours:
            ours = {lang: e.reported_score for lang, e in board.items() if e.reported_score is not None}
        gaps = leaderboard_compare(ours, board)

    if args.format == "yaml":
        payload = {
            "results": {
                r.language: {"f1": dict(r.f1), "micro": r.micro_f1, "macro": r.macro_f1} for r in rows
            },
            "gaps": [
                {
                    "language": g.language,
                    "ours": g.ours,
                    "first": {"team": g.first_team, "score": g.first_score, "gap": g.gap_first},
                    "second": {"team": g.second_team, "score": g.second_score, "gap": g.gap_second},
                }
                for g in gaps
            ],
        }
        _emit(dump_yaml(payload))
        return EXIT_OK
    if rows:
        _emit(format_results_table(rows))
    if gaps:
        _emit(format_gap_table(gaps))
    return EXIT_OK


# --- Parser ---
def _add_train_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--learning-rate", type=float)
    p.add_argument("--weight-decay", type=float)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--dropout-rate", type=float)
    p.add_argument("--smoothing-alpha", type=float)
    p.add_argument("--clip-max-norm", type=float)
    p.add_argument("--patience", type=int)
    p.add_argument("--max-epochs", type=int)
    p.add_argument("--threshold", type=float)


def _add_baseline_data_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--train-csv", type=Path, required=True)
    p.add_argument("--test-csv", type=Path)
    p.add_argument("--language", default="und")
    p.add_argument("--n-jobs", type=int, default=1)
    p.add_argument("--l2-penalty", type=float)
    p.add_argument("--max-iter", type=int)
    p.add_argument("--var-smoothing", type=float)
    p.add_argument("--format", choices=REPORT_FORMATS, default="table")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=APP_NAME, description="Multi-label emotion classification toolkit.")
    parser.add_argument("--version", action="version", version=f"{APP_NAME} {APP_VERSION}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more logging (repeatable)")
    parser.add_argument("-q", "--quiet", action="count", default=0, help="less logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="sample and positive counts per split")
    p.add_argument("--train-csv", type=Path)
    p.add_argument("--dev-csv", type=Path)
    p.add_argument("--test-csv", type=Path)
    p.add_argument("--language", default="und")
    p.set_defaults(handler=cmd_stats)

    for name, handler in (("embed-hash", cmd_embed_hash), ("embed-remote", cmd_embed_remote)):
        p = sub.add_parser(name, help="embed CSV texts into an embeddings file")
        p.add_argument("--csv", type=Path, nargs="+", required=True)
        p.add_argument("--language", default="und")
        p.add_argument(
            "--split", choices=SPLITS, help="split tag for every file (default: from each file name, else train)"
        )
        p.add_argument("--max-tokens", type=int, default=DEFAULT_MAX_TOKENS)
        p.add_argument("--out", type=Path, required=True)
        p.set_defaults(handler=handler)
        if name == "embed-hash":
            p.add_argument("--dim", type=int, default=DEFAULT_HASH_DIM)
            p.add_argument("--seed", type=int, default=DEFAULT_HASH_SEED)
        else:
            p.add_argument("--endpoint", required=True)
            p.add_argument("--dim", type=int)
            p.add_argument("--batch-size", type=int, default=REMOTE_BATCH_SIZE)
            p.add_argument("--timeout", type=float, default=REMOTE_TIMEOUT)

    p = sub.add_parser("train", help="train the classification head for one or more seeds")
    p.add_argument("--train-csv", type=Path)
    p.add_argument("--dev-csv", type=Path)
    p.add_argument("--embeddings", type=Path)
    p.add_argument("--config", type=Path, help="flat key=value config file")
    p.add_argument("--seed", help="seed list, e.g. '0,1,2,3,4'")
    p.add_argument("--out-model", type=Path, help="output directory for checkpoints")
    p.add_argument("--language")
    p.add_argument("--workers", type=int)
    _add_train_flags(p)
    p.set_defaults(handler=cmd_train)

    p = sub.add_parser("eval", help="evaluate a trained head on a labelled file")
    p.add_argument("--model", type=Path, required=True)
    p.add_argument("--test-csv", type=Path, required=True)
    p.add_argument("--embeddings", type=Path)
    p.add_argument("--endpoint")
    p.add_argument("--language")
    p.add_argument("--threshold", type=float)
    p.add_argument("--format", choices=REPORT_FORMATS, default="table")
    p.add_argument("--out", type=Path, help="write the report as YAML")
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("predict", help="emotion dictionary for one text")
    p.add_argument("--model", type=Path, required=True)
    p.add_argument("--text", required=True)
    p.add_argument("--threshold", type=float)
    p.add_argument("--endpoint")
    p.set_defaults(handler=cmd_predict)

    baseline = sub.add_parser("baseline", help="classical multi-output baselines")
    bsub = baseline.add_subparsers(dest="baseline_command", required=True)
    p = bsub.add_parser("fit")
    p.add_argument("--kind", choices=BASELINE_KINDS, required=True)
    p.add_argument("--embeddings", type=Path, required=True)
    p.add_argument("--out-model", type=Path)
    _add_baseline_data_flags(p)
    p.set_defaults(handler=cmd_baseline_fit)
    p = bsub.add_parser("predict")
    p.add_argument("--model", type=Path, required=True)
    p.add_argument("--text", required=True)
    p.add_argument("--endpoint")
    p.set_defaults(handler=cmd_baseline_predict)
    p = bsub.add_parser("compare")
    p.add_argument("--embeddings", action="append", metavar="NAME=PATH")
    p.add_argument("--kind", action="append", choices=BASELINE_KINDS)
    _add_baseline_data_flags(p)
    p.set_defaults(handler=cmd_baseline_compare)

    p = sub.add_parser("report", help="per-language results table and leaderboard gaps")
    p.add_argument("reports", nargs="*", metavar="LANG=REPORT", help="YAML reports written by eval --out")
    p.add_argument("--reference", nargs="?", const=resource_path(REFERENCE_TABLE_RESOURCE))
    p.add_argument("--leaderboard", nargs="?", const=resource_path(LEADERBOARD_RESOURCE))
    p.add_argument("--format", choices=REPORT_FORMATS, default="table")
    p.set_defaults(handler=cmd_report)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """Parses arguments, runs one subcommand and maps library errors to exit codes."""
    args = build_parser().parse_args(argv)
    setup_logging(args.verbose - args.quiet)
    try:
        return args.handler(args)
    except EmoClassError as e:
        logger.error("%s", e)
        return e.exit_code
