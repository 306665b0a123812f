# --- metrics.py ---
"""
Multi-label evaluation: confusion counts, precision/recall/F1, micro and
macro F1, per-language result tables, multi-seed aggregation and leaderboard
gaps.

Zero-division convention: any 0/0 precision, recall or F1 is 0.
"""

import dataclasses
import logging
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from constants import EMOTION_LABELS
from errors import IoError, MissingLanguage, SchemaMismatch, ShapeMismatch
from report_utils import format_score, render_table
from utils import safe_read_file

logger = logging.getLogger(__name__)


# --- Counts & Scores ---
@dataclass(frozen=True)
class ConfusionCounts:
    labels: tuple[str, ...]
    tp: np.ndarray
    fp: np.ndarray
    fn: np.ndarray
    tn: np.ndarray

    @property
    def n_samples(self) -> int:
        return int(self.tp[0] + self.fp[0] + self.fn[0] + self.tn[0]) if len(self.labels) else 0

    def for_label(self, i: int) -> tuple[int, int, int]:
        return int(self.tp[i]), int(self.fp[i]), int(self.fn[i])


def _as_binary(matrix, name: str) -> np.ndarray:
    arr = np.asarray(matrix)
    if arr.ndim != 2:
        raise ShapeMismatch(f"{name} must be an N x L matrix, got shape {arr.shape}")
    if not np.isin(arr, (0, 1)).all():
        raise ShapeMismatch(f"{name} must contain only 0/1 entries")
    return arr.astype(np.int64)


def confusion(preds, golds, labels: Sequence[str] | None = None) -> ConfusionCounts:
    """Per-label tp/fp/fn/tn over all samples."""
    P = _as_binary(preds, "preds")
    G = _as_binary(golds, "golds")
    if P.shape != G.shape:
        raise ShapeMismatch(f"preds {P.shape} and golds {G.shape} differ")
    if labels is None:
        labels = tuple(f"label_{i}" for i in range(P.shape[1]))
    if len(labels) != P.shape[1]:
        raise ShapeMismatch(f"{len(labels)} labels for {P.shape[1]} columns")
    tp = np.sum((P == 1) & (G == 1), axis=0)
    fp = np.sum((P == 1) & (G == 0), axis=0)
    fn = np.sum((P == 0) & (G == 1), axis=0)
    tn = np.sum((P == 0) & (G == 0), axis=0)
    return ConfusionCounts(labels=tuple(labels), tp=tp, fp=fp, fn=fn, tn=tn)


def _safe_div(num: float, den: float) -> float:
    return num / den if den else 0.0


def prf1(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    precision = _safe_div(tp, tp + fp)
    recall = _safe_div(tp, tp + fn)
    f1 = _safe_div(2 * precision * recall, precision + recall)
    return precision, recall, f1


def micro_f1(counts: ConfusionCounts) -> float:
    """F1 of tp/fp/fn summed over every (sample, label) pair."""
    _, _, f1 = prf1(int(counts.tp.sum()), int(counts.fp.sum()), int(counts.fn.sum()))
    return f1


# --- Reports ---
@dataclass(frozen=True)
class EvalReport:
    labels: tuple[str, ...]
    precision: tuple[float, ...]
    recall: tuple[float, ...]
    f1: tuple[float, ...]
    support: tuple[int, ...]
    micro_f1: float
    macro_f1: float
    n_samples: int
    warnings: tuple[str, ...] = ()

    def f1_by_label(self) -> dict[str, float]:
        return dict(zip(self.labels, self.f1))

    def to_dict(self) -> dict:
        return {
            "labels": list(self.labels),
            "per_label": {
                lab: {
                    "precision": float(p),
                    "recall": float(r),
                    "f1": float(f),
                    "support": int(s),
                }
                for lab, p, r, f, s in zip(self.labels, self.precision, self.recall, self.f1, self.support)
            },
            "micro_f1": float(self.micro_f1),
            "macro_f1": float(self.macro_f1),
            "n_samples": int(self.n_samples),
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "EvalReport":
        labels = tuple(data["labels"])
        per = data["per_label"]
        return cls(
            labels=labels,
            precision=tuple(float(per[lab]["precision"]) for lab in labels),
            recall=tuple(float(per[lab]["recall"]) for lab in labels),
            f1=tuple(float(per[lab]["f1"]) for lab in labels),
            support=tuple(int(per[lab]["support"]) for lab in labels),
            micro_f1=float(data["micro_f1"]),
            macro_f1=float(data["macro_f1"]),
            n_samples=int(data["n_samples"]),
            warnings=tuple(data.get("warnings", ())),
        )


def macro_f1(report: EvalReport) -> float:
    """Arithmetic mean of per-label F1, zero-F1 labels included."""
    return sum(report.f1) / len(report.f1)


def classification_report(preds, golds, schema, log_warnings: bool = True) -> EvalReport:
    """
    Per-label precision/recall/F1 plus micro and macro F1.

    `schema` is a LabelSchema or a plain sequence of label names. Zero-division warnings
    are always kept on the report and logged at WARNING unless `log_warnings` is False.
    """
    labels = tuple(getattr(schema, "labels", schema))
    counts = confusion(preds, golds, labels)
    precision, recall, f1, support, warnings = [], [], [], [], []
    for i, label in enumerate(labels):
        tp, fp, fn = counts.for_label(i)
        p, r, f = prf1(tp, fp, fn)
        precision.append(p)
        recall.append(r)
        f1.append(f)
        support.append(tp + fn)
        if tp + fp == 0 or tp + fn == 0:
            warnings.append(
                f"{label}: no {'predicted' if tp + fp == 0 else 'gold'} positives; "
                "precision/recall/F1 set to 0 and still counted in the macro mean"
            )
    partial = EvalReport(
        labels=labels,
        precision=tuple(precision),
        recall=tuple(recall),
        f1=tuple(f1),
        support=tuple(support),
        micro_f1=micro_f1(counts),
        macro_f1=0.0,
        n_samples=counts.n_samples,
        warnings=tuple(warnings),
    )
    if log_warnings:
        for w in warnings:
            logger.warning("zero division: %s", w)
    return dataclasses.replace(partial, macro_f1=macro_f1(partial))


def format_classification_report(report: EvalReport) -> str:
    """Per-label precision/recall/F1/support rows followed by micro and macro rows."""
    rows = [
        [lab.capitalize(), format_score(p), format_score(r), format_score(f), str(s)]
        for lab, p, r, f, s in zip(report.labels, report.precision, report.recall, report.f1, report.support)
    ]
    total_support = str(sum(report.support))
    rows.append(["Micro", "", "", format_score(report.micro_f1), total_support])
    rows.append(["Macro", "", "", format_score(report.macro_f1), total_support])
    return render_table(["Emotion", "Precision", "Recall", "F1", "Support"], rows)


# --- Per-Language Results Table ---
@dataclass(frozen=True)
class ReportRow:
    """One language's line of the results table: per-emotion F1, then micro and macro."""

    language: str
    f1: dict[str, float]  # Missing labels are absent
    micro_f1: float
    macro_f1: float


def report_row(language: str, report: EvalReport) -> ReportRow:
    return ReportRow(language=language, f1=report.f1_by_label(), micro_f1=report.micro_f1, macro_f1=report.macro_f1)


def format_results_table(rows: Sequence[ReportRow]) -> str:
    """Language | Anger ... Surprise | Micro Macro, with a dash for labels a language lacks."""
    header = ["Language", *(lab.capitalize() for lab in EMOTION_LABELS), "Micro", "Macro"]
    body = [
        [
            row.language,
            *(format_score(row.f1.get(lab)) for lab in EMOTION_LABELS),
            format_score(row.micro_f1),
            format_score(row.macro_f1),
        ]
        for row in rows
    ]
    return render_table(header, body, separator_after={0, len(EMOTION_LABELS)})


def load_reference_rows(path: Path) -> list[ReportRow]:
    """Reads a stored per-language F1 table (YAML mapping language -> scores)."""
    data = _load_yaml(path)
    rows = []
    for language, entry in data.items():
        f1 = {lab: float(v) for lab, v in entry.get("f1", {}).items() if v is not None}
        rows.append(ReportRow(language, f1, float(entry["micro"]), float(entry["macro"])))
    return rows


# --- Seed Aggregation ---
@dataclass(frozen=True)
class SeedAggregate:
    labels: tuple[str, ...]
    n_runs: int
    mean: dict[str, float]
    std: dict[str, float]

    def to_dict(self) -> dict:
        return {
            "n_runs": self.n_runs,
            "labels": list(self.labels),
            "metrics": {name: {"mean": self.mean[name], "std": self.std[name]} for name in self.mean},
        }


def _metric_vector(report: EvalReport) -> dict[str, float]:
    values = {"micro_f1": report.micro_f1, "macro_f1": report.macro_f1}
    values.update({f"f1/{lab}": f for lab, f in zip(report.labels, report.f1)})
    return values


def aggregate_seeds(reports: Sequence[EvalReport]) -> SeedAggregate:
    """Mean and population std of every metric across runs."""
    if not reports:
        raise SchemaMismatch("aggregate_seeds needs at least one report")
    labels = reports[0].labels
    for rep in reports[1:]:
        if rep.labels != labels:
            raise SchemaMismatch(f"cannot aggregate reports over {labels} and {rep.labels}")
    vectors = [_metric_vector(r) for r in reports]
    mean, std = {}, {}
    for name in vectors[0]:
        values = np.array([v[name] for v in vectors], dtype=np.float64)
        mean[name] = float(values.mean())
        # All-identical runs must give exactly 0
        std[name] = 0.0 if np.all(values == values[0]) else float(values.std())
    return SeedAggregate(labels=labels, n_runs=len(reports), mean=mean, std=std)


def format_seed_aggregate(agg: SeedAggregate) -> str:
    rows = [[name, format_score(agg.mean[name]), format_score(agg.std[name])] for name in agg.mean]
    return render_table([f"Metric (n={agg.n_runs})", "Mean", "Std"], rows)


# --- Leaderboard ---
@dataclass(frozen=True)
class LeaderboardEntry:
    language: str
    first_team: str
    first_score: float
    second_team: str
    second_score: float
    reported_score: float | None = None  # Our published score, if the table carries one


@dataclass(frozen=True)
class GapRow:
    language: str
    ours: float
    first_team: str
    first_score: float
    gap_first: float
    second_team: str
    second_score: float
    gap_second: float


def _load_yaml(path: Path):
    content, error = safe_read_file(Path(path))
    if error:
        raise IoError(error)
    try:
        return yaml.safe_load(content) or {}
    except yaml.YAMLError as e:
        raise IoError(f"{path} is not valid YAML: {e}") from e


def load_leaderboard(path: Path) -> dict[str, LeaderboardEntry]:
    """
    Reads the reference leaderboard file.

    Expected layout (YAML):
        hin:
          first: {team: JNLP, score: 0.9257}
          second: {team: PAI, score: 0.9197}
          ours: 0.8901          # optional
    """
    data = _load_yaml(path)
    entries = {}
    for language, entry in data.items():
        try:
            entries[str(language)] = LeaderboardEntry(
                language=str(language),
                first_team=str(entry["first"]["team"]),
                first_score=float(entry["first"]["score"]),
                second_team=str(entry["second"]["team"]),
                second_score=float(entry["second"]["score"]),
                reported_score=float(entry["ours"]) if entry.get("ours") is not None else None,
            )
        except (KeyError, TypeError, ValueError) as e:
            raise IoError(f"{path}: malformed leaderboard entry for '{language}': {e}") from e
    return entries


def leaderboard_compare(ours: Mapping[str, float], reference: Mapping[str, LeaderboardEntry]) -> list[GapRow]:
    """Gap from our macro F1 to the 1st and 2nd ranked scores, per language, in input order."""
    rows = []
    for language, score in ours.items():
        entry = reference.get(language)
        if entry is None:
            raise MissingLanguage(language)
        rows.append(
            GapRow(
                language=language,
                ours=float(score),
                first_team=entry.first_team,
                first_score=entry.first_score,
                gap_first=entry.first_score - float(score),
                second_team=entry.second_team,
                second_score=entry.second_score,
                gap_second=entry.second_score - float(score),
            )
        )
    return rows


def format_gap_table(rows: Sequence[GapRow]) -> str:
    header = ["Language", "1st Team", "1st", "Gap", "2nd Team", "2nd", "Gap", "Ours"]
    body = [
        [
            r.language,
            r.first_team,
            format_score(r.first_score),
            format_score(r.gap_first),
            r.second_team,
            format_score(r.second_score),
            format_score(r.gap_second),
            format_score(r.ours),
        ]
        for r in rows
    ]
    return render_table(header, body, separator_after={0, 3, 6})
