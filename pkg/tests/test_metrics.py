import itertools
import logging
import math

import numpy as np
import pytest

from constants import LEADERBOARD_RESOURCE, REFERENCE_TABLE_RESOURCE
from errors import MissingLanguage, SchemaMismatch, ShapeMismatch
from metrics import (
    EvalReport,
    LeaderboardEntry,
    aggregate_seeds,
    classification_report,
    confusion,
    format_classification_report,
    format_gap_table,
    format_results_table,
    leaderboard_compare,
    load_leaderboard,
    load_reference_rows,
    macro_f1,
    micro_f1,
    prf1,
    report_row,
)
from utils import resource_path


def all_in_unit_interval(report):
    values = [*report.precision, *report.recall, *report.f1, report.micro_f1, report.macro_f1]
    return all(0.0 <= v <= 1.0 and not math.isnan(v) for v in values)


# --- Counts & scores ---
def test_confusion_identity_and_complement():
    golds = np.array([[1, 0], [0, 1], [1, 1]])
    same = confusion(golds, golds)
    assert same.fp.tolist() == [0, 0] and same.fn.tolist() == [0, 0]
    flipped = confusion(1 - golds, golds)
    assert flipped.tp.tolist() == [0, 0] and flipped.tn.tolist() == [0, 0]
    for i in range(2):
        assert sum(flipped.for_label(i)) + flipped.tn[i] == 3


def test_confusion_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        confusion(np.zeros((2, 2)), np.zeros((3, 2)))


def test_confusion_rejects_non_binary_cells():
    with pytest.raises(ShapeMismatch):
        confusion(np.array([[2, 0]]), np.array([[1, 0]]))
    with pytest.raises(ShapeMismatch):
        confusion(np.array([[1, 0]]), np.array([[1, -1]]))


def test_prf1_examples():
    p, r, f = prf1(1, 1, 0)
    assert (p, r) == (0.5, 1.0)
    assert abs(f - 2 / 3) < 1e-15
    assert prf1(0, 0, 0) == (0.0, 0.0, 0.0)
    assert prf1(7, 0, 0) == (1.0, 1.0, 1.0)


def test_macro_and_micro_examples():
    preds = np.array([[1, 0], [1, 0], [0, 1]])
    golds = np.array([[1, 0], [0, 0], [0, 0]])
    report = classification_report(preds, golds, ["anger", "fear"])
    assert abs(report.f1[0] - 2 / 3) < 1e-15
    assert report.f1[1] == 0.0
    assert abs(macro_f1(report) - 1 / 3) < 1e-15
    assert report.warnings  # fear has no gold positives
    assert report.warnings[0].startswith("fear: no gold positives")

    # summed tp=1, fp=1, fn=1
    counts_fn = confusion(np.array([[1, 1], [0, 0]]), np.array([[1, 0], [1, 0]]))
    assert micro_f1(counts_fn) == 0.5


def test_zero_division_is_logged_as_warning(caplog):
    preds = np.array([[1, 1], [0, 1]])
    golds = np.array([[1, 0], [1, 0]])
    with caplog.at_level(logging.WARNING, logger="metrics"):
        classification_report(preds, golds, ["anger", "fear"])
    assert "fear: no gold positives" in caplog.text

    caplog.clear()
    with caplog.at_level(logging.WARNING, logger="metrics"):
        report = classification_report(preds, golds, ["anger", "fear"], log_warnings=False)
    assert report.warnings
    assert caplog.text == ""


def test_perfect_predictions():
    golds = np.array([[1, 0, 1], [0, 1, 1]])
    report = classification_report(golds, golds, ["anger", "fear", "joy"])
    assert report.micro_f1 == 1.0
    assert report.macro_f1 == 1.0
    assert all_in_unit_interval(report)


def _brute_force_f1(preds, golds):
    """Independent tally over every (sample, label) cell."""

    def f1(tp, fp, fn):
        p = tp / (tp + fp) if tp + fp else 0.0
        r = tp / (tp + fn) if tp + fn else 0.0
        return 2 * p * r / (p + r) if p + r else 0.0

    per_label, total = [], [0, 0, 0]
    for j in range(golds.shape[1]):
        tp = fp = fn = 0
        for i in range(golds.shape[0]):
            if preds[i][j] and golds[i][j]:
                tp += 1
            elif preds[i][j]:
                fp += 1
            elif golds[i][j]:
                fn += 1
        per_label.append(f1(tp, fp, fn))
        total = [total[0] + tp, total[1] + fp, total[2] + fn]
    return f1(*total), sum(per_label) / len(per_label)


def test_exhaustive_oracle_equivalence():
    golds = np.array([[1, 0], [0, 1], [1, 1]])
    for bits in itertools.product((0, 1), repeat=6):
        preds = np.array(bits).reshape(3, 2)
        report = classification_report(preds, golds, ["joy", "sadness"])
        micro, macro = _brute_force_f1(preds, golds)
        assert report.micro_f1 == micro
        assert report.macro_f1 == macro
        assert all_in_unit_interval(report)


def test_sample_order_does_not_matter(rng):
    preds = rng.integers(0, 2, size=(20, 5))
    golds = rng.integers(0, 2, size=(20, 5))
    order = rng.permutation(20)
    labels = ["anger", "fear", "joy", "sadness", "surprise"]
    a = classification_report(preds, golds, labels)
    b = classification_report(preds[order], golds[order], labels)
    assert (a.micro_f1, a.macro_f1) == (b.micro_f1, b.macro_f1)


def test_report_dict_round_trip():
    report = classification_report(np.array([[1, 0]]), np.array([[1, 1]]), ["joy", "surprise"])
    assert EvalReport.from_dict(report.to_dict()) == report


def test_format_classification_report_rows():
    report = classification_report(np.array([[1, 0]]), np.array([[1, 1]]), ["joy", "surprise"])
    lines = format_classification_report(report).splitlines()
    assert lines[0].split() == ["Emotion", "Precision", "Recall", "F1", "Support"]
    assert lines[2].startswith("Joy")
    assert lines[-1].startswith("Macro") and "0.5000" in lines[-1]


# --- Results table ---
def test_reference_table_hindi_and_english_rows():
    rows = {r.language: r for r in load_reference_rows(resource_path(REFERENCE_TABLE_RESOURCE))}
    table = format_results_table([rows["hin"], rows["eng"]])
    header, _, hin, eng = table.splitlines()
    assert header.split() == [
        "Language", "|", "Anger", "Disgust", "Fear", "Joy", "Sadness", "Surprise", "|", "Micro", "Macro"
    ]
    assert hin.split()[-2:] == ["0.8903", "0.8901"]
    assert eng.split()[3] == "–"
    assert len(rows) == 13


def test_results_table_layout():
    report = classification_report(np.array([[1, 0, 1, 0, 1]]), np.array([[1, 0, 1, 0, 0]]),
                                   ["anger", "fear", "joy", "sadness", "surprise"])
    table = format_results_table([report_row("eng", report)])
    header = table.splitlines()[0]
    assert header.split()[:3] == ["Language", "|", "Anger"]
    assert header.split()[-4:] == ["Surprise", "|", "Micro", "Macro"]
    assert table.splitlines()[2].split()[3] == "–"  # disgust column


# --- Seed aggregation ---
def _report_with_macro(value, labels=("anger", "fear")):
    return EvalReport(
        labels=labels,
        precision=(value,) * len(labels),
        recall=(value,) * len(labels),
        f1=(value,) * len(labels),
        support=(1,) * len(labels),
        micro_f1=value,
        macro_f1=value,
        n_samples=1,
    )


def test_aggregate_identical_reports_have_zero_std():
    agg = aggregate_seeds([_report_with_macro(0.7)] * 5)
    assert agg.n_runs == 5
    assert abs(agg.mean["macro_f1"] - 0.7) < 1e-12
    assert agg.std["macro_f1"] == 0.0
    assert agg.std["f1/anger"] == 0.0


def test_aggregate_population_std():
    agg = aggregate_seeds([_report_with_macro(v) for v in (0.5, 0.6, 0.7, 0.8, 0.9)])
    assert abs(agg.mean["macro_f1"] - 0.7) < 1e-12
    assert abs(agg.std["macro_f1"] - math.sqrt(0.02)) < 1e-12


def test_aggregate_errors():
    with pytest.raises(SchemaMismatch):
        aggregate_seeds([])
    with pytest.raises(SchemaMismatch):
        aggregate_seeds([_report_with_macro(0.5), _report_with_macro(0.5, ("joy", "fear"))])


# --- Leaderboard ---
def test_bundled_leaderboard_gaps():
    board = load_leaderboard(resource_path(LEADERBOARD_RESOURCE))
    rows = {r.language: r for r in leaderboard_compare({"hin": 0.8901, "rus": 0.8831}, board)}
    assert f"{rows['hin'].gap_first:.4f}" == "0.0356"
    assert rows["hin"].first_team == "JNLP"
    assert f"{rows['rus'].gap_second:.4f}" == "0.0177"
    assert board["eng"].reported_score == 0.7340


def test_leaderboard_equal_scores_and_missing_language():
    reference = {"esp": LeaderboardEntry("esp", "PAI", 0.8488, "PA-oneteam-1", 0.8454)}
    (row,) = leaderboard_compare({"esp": 0.8488}, reference)
    assert row.gap_first == 0.0
    with pytest.raises(MissingLanguage):
        leaderboard_compare({"xxx": 0.5}, reference)


def test_gap_table_lists_teams():
    reference = {"hin": LeaderboardEntry("hin", "JNLP", 0.9257, "PAI", 0.9197)}
    table = format_gap_table(leaderboard_compare({"hin": 0.8901}, reference))
    assert "JNLP" in table and "0.0356" in table and "0.0296" in table
