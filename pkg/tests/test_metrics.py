from __future__ import annotations

import csv
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cardiofusion import metrics as mx
from cardiofusion.errors import EmptyInput, LengthMismatch, SingleClass


def pairwise_auc(y, scores):
    """O(n^2) oracle: P(score+ > score-) + half the ties."""
    y = np.asarray(y)
    scores = np.asarray(scores, dtype=float)
    pos = scores[y == 1]
    neg = scores[y == 0]
    wins = 0.0
    for p in pos:
        for q in neg:
            if p > q:
                wins += 1.0
            elif p == q:
                wins += 0.5
    return wins / (len(pos) * len(neg))


# --- accuracy ---------------------------------------------------------------

def test_accuracy_all_correct():
    assert mx.accuracy([1, 0, 1], [1, 0, 1]) == 1.0


def test_accuracy_two_thirds():
    assert mx.accuracy([1, 0, 1], [1, 1, 1]) == pytest.approx(2 / 3)


def test_accuracy_length_mismatch():
    with pytest.raises(LengthMismatch):
        mx.accuracy([1, 0], [1])


def test_accuracy_empty_input():
    with pytest.raises(EmptyInput):
        mx.accuracy([], [])


# --- roc_auc ----------------------------------------------------------------

def test_auc_perfectly_ordered():
    auc, points = mx.roc_auc([0, 0, 1, 1], [0.1, 0.2, 0.8, 0.9])
    assert auc == 1.0
    assert points[0] == (0.0, 0.0)
    assert points[-1] == (1.0, 1.0)


def test_auc_perfectly_inverted():
    auc, _ = mx.roc_auc([1, 1, 0, 0], [0.1, 0.2, 0.8, 0.9])
    assert auc == 0.0


def test_auc_single_class_rejected():
    with pytest.raises(SingleClass):
        mx.roc_auc([1, 1, 1], [0.1, 0.2, 0.3])


def test_auc_matches_pairwise_oracle_on_random_instances():
    rng = np.random.default_rng(123)
    for _ in range(50):
        n = int(rng.integers(5, 50))
        y = rng.integers(0, 2, size=n)
        if y.min() == y.max():
            y[0] = 1 - y[0]
        # coarse grid of scores forces plenty of ties
        scores = rng.integers(0, 6, size=n) / 5.0
        fast, _ = mx.roc_auc(y, scores)
        assert fast == pytest.approx(pairwise_auc(y, scores), abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 1), st.integers(0, 1000)),
                min_size=4, max_size=60))
def test_auc_invariant_under_monotone_transform(pairs):
    # scores on a coarse lattice so exp() stays injective in float arithmetic
    y = np.array([p[0] for p in pairs])
    s = np.array([p[1] for p in pairs], dtype=float) / 1000.0
    if y.min() == y.max():
        y[0] = 1 - y[0]
    base, _ = mx.roc_auc(y, s)
    squeezed, _ = mx.roc_auc(y, np.exp(3.0 * s))
    assert squeezed == pytest.approx(base, abs=1e-12)


def test_auc_complement_for_tie_free_scores():
    rng = np.random.default_rng(7)
    y = rng.integers(0, 2, size=40)
    y[0], y[1] = 0, 1
    s = rng.permutation(40) / 40.0  # distinct scores
    a, _ = mx.roc_auc(y, s)
    b, _ = mx.roc_auc(y, -s)
    assert a + b == pytest.approx(1.0, abs=1e-12)


# --- confusion and derived metrics ------------------------------------------

def test_confusion_all_correct_positive_only_counts():
    cm = mx.confusion([1, 1, 0], [1, 1, 0])
    assert (cm.tp, cm.fp, cm.tn, cm.fn) == (2, 0, 1, 0)


def test_no_predicted_positives_is_degenerate():
    cm = mx.confusion([1, 0], [0, 0])
    precision, degenerate = cm.precision()
    assert precision == 0.0
    assert degenerate


def test_precision_recall_f1_hand_example():
    cm = mx.ConfusionMatrix(tp=3, fp=1, tn=0, fn=1)
    assert cm.precision()[0] == pytest.approx(0.75)
    assert cm.recall()[0] == pytest.approx(0.75)
    assert cm.f1()[0] == pytest.approx(0.75)


def test_report_metrics_consistent_with_confusion():
    rng = np.random.default_rng(2)
    y = rng.integers(0, 2, 100)
    y[:2] = [0, 1]
    scores = rng.random(100)
    rep = mx.evaluate_scores("m", y, scores)
    cm = rep.confusion
    assert cm.total == 100
    assert rep.accuracy == pytest.approx((cm.tp + cm.tn) / cm.total, abs=1e-12)
    if cm.tp + cm.fp:
        assert rep.precision == pytest.approx(cm.tp / (cm.tp + cm.fp), abs=1e-12)
    if cm.tp + cm.fn:
        assert rep.recall == pytest.approx(cm.tp / (cm.tp + cm.fn), abs=1e-12)


# --- emit_report ------------------------------------------------------------

def make_report(model_id, accuracy):
    return mx.EvalReport(
        model_id=model_id, accuracy=accuracy, auc=0.9, precision=0.8,
        recall=0.7, f1=0.75, confusion=mx.ConfusionMatrix(7, 2, 8, 3),
        roc_points=[(0.0, 0.0), (1.0, 1.0)],
    )


def test_emit_report_empty_list_writes_header_only(tmp_path):
    paths = mx.emit_report([], tmp_path, stem="empty")
    with open(paths[0], newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows == [list(mx.REPORT_CSV_COLUMNS)]


def test_emit_report_json_roundtrip(tmp_path):
    rep = make_report("solo", 0.91)
    paths = mx.emit_report([rep], tmp_path, stem="one")
    loaded = json.loads(paths[1].read_text())
    assert loaded[0]["accuracy"] == rep.accuracy
    assert loaded[0]["tp"] == 7


def test_emit_report_sorted_descending_by_accuracy(tmp_path):
    paths = mx.emit_report([make_report("low", 0.7), make_report("high", 0.9)],
                           tmp_path, stem="two")
    with open(paths[0], newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert [r["model_id"] for r in rows] == ["high", "low"]


def test_svg_outputs_are_wellformed(tmp_path):
    rep = make_report("m", 0.9)
    assert mx.roc_svg([rep]).startswith("<svg")
    assert mx.confusion_svg([rep]).startswith("<svg")
