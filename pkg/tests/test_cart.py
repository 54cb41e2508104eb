from __future__ import annotations

import itertools

import numpy as np
import pytest

from cardiofusion.errors import EmptyData
from cardiofusion.models import best_split, predict_tree, train_cart


def test_pure_data_single_leaf():
    X = np.array([[0.0], [1.0], [2.0]])
    y = np.array([1, 1, 1])
    tree = train_cart(X, y)
    assert tree.is_leaf
    assert tree.leaf_value == 1.0


def test_single_threshold_feature_depth_one():
    X = np.array([[-2.0], [-1.0], [0.5], [1.0]])
    y = np.array([0, 0, 1, 1])
    tree = train_cart(X, y, max_depth=1)
    assert not tree.is_leaf
    assert np.array_equal(predict_tree(tree, X) >= 0.5, y.astype(bool))


def test_tie_breaks_lowest_column_then_threshold():
    # both columns split the labels perfectly -> equal gain; column 0 wins
    X = np.array([[0.0, 0.0], [0.0, 0.0], [1.0, 1.0], [1.0, 1.0]])
    y = np.array([0, 0, 1, 1])
    tree = train_cart(X, y, max_depth=1)
    assert tree.split_column == 0
    assert tree.threshold == pytest.approx(0.5)


def test_threshold_tie_prefers_lowest_threshold():
    # two candidate thresholds in one column with identical (zero) gain
    X = np.array([[0.0], [1.0], [2.0], [3.0]])
    y = np.array([0, 1, 0, 1])
    found = best_split(X, y, np.array([0]), min_samples_leaf=1)
    gain, col, threshold = found
    assert col == 0
    # lowest midpoint among the maximizers
    candidates = [0.5, 1.5, 2.5]
    gains = []
    for thr in candidates:
        left = y[X[:, 0] <= thr]
        right = y[X[:, 0] > thr]
        def gini(side):
            p = side.mean()
            return 1 - p * p - (1 - p) * (1 - p)
        gains.append(gini(y) - (len(left) * gini(left) + len(right) * gini(right)) / 4)
    best_gain = max(gains)
    assert gain == pytest.approx(best_gain)
    assert threshold == candidates[gains.index(best_gain)]


def test_empty_data_rejected():
    with pytest.raises(EmptyData):
        train_cart(np.empty((0, 2)), np.empty(0))


def test_min_samples_leaf_respected():
    X = np.arange(6.0).reshape(6, 1)
    y = np.array([0, 0, 0, 0, 0, 1])
    tree = train_cart(X, y, min_samples_leaf=2)
    def check(node):
        if node.is_leaf:
            assert node.n_samples >= 2
        else:
            check(node.left)
            check(node.right)
    check(tree)


def test_variance_criterion_fits_residuals():
    X = np.array([[0.0], [1.0], [2.0], [3.0]])
    residuals = np.array([-1.0, -1.0, 2.0, 2.0])
    tree = train_cart(X, residuals, max_depth=1, criterion="variance")
    predicted = predict_tree(tree, X)
    assert predicted[0] == pytest.approx(-1.0)
    assert predicted[-1] == pytest.approx(2.0)


def test_xor_solved_at_depth_two():
    X = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
    y = np.array([0, 1, 1, 0])
    tree = train_cart(X, y, max_depth=2)
    assert np.array_equal((predict_tree(tree, X) >= 0.5).astype(int), y)


# --- exhaustive-search oracle on tiny binary instances -----------------------

ROW_TYPES = [(x1, x2, lab) for x1 in (0.0, 1.0) for x2 in (0.0, 1.0)
             for lab in (0, 1)]


def enumerate_instances(max_rows):
    """All multisets of (x1, x2, y) rows up to max_rows rows."""
    for n in range(1, max_rows + 1):
        for combo in itertools.combinations_with_replacement(ROW_TYPES, n):
            X = np.array([[r[0], r[1]] for r in combo])
            y = np.array([r[2] for r in combo])
            yield X, y


def brute_force_best_gain(X, y):
    """Max Gini gain over every (feature, midpoint threshold) split."""
    def gini(labels):
        if labels.size == 0:
            return 0.0
        p = labels.mean()
        return 1 - p * p - (1 - p) * (1 - p)

    n = y.size
    parent = gini(y)
    best = None
    for f in (0, 1):
        values = np.unique(X[:, f])
        for lo, hi in zip(values, values[1:]):
            thr = (lo + hi) / 2
            mask = X[:, f] <= thr
            gain = parent - (mask.sum() * gini(y[mask])
                             + (~mask).sum() * gini(y[~mask])) / n
            if best is None or gain > best:
                best = gain
    return best


def best_tree_accuracy(X, y, depth):
    """Exhaustive search over depth-limited axis trees, majority leaves."""
    def leaf_correct(labels):
        majority = 1 if 2 * labels.sum() >= labels.size else 0
        return int((labels == majority).sum())

    def solve(rows, depth_left):
        labels = y[rows]
        best = leaf_correct(labels)
        if depth_left == 0 or labels.size < 2:
            return best
        for f in (0, 1):
            values = np.unique(X[rows, f])
            for lo, hi in zip(values, values[1:]):
                thr = (lo + hi) / 2
                mask = X[rows, f] <= thr
                score = solve(rows[mask], depth_left - 1) \
                    + solve(rows[~mask], depth_left - 1)
                best = max(best, score)
        return best

    return solve(np.arange(y.size), depth) / y.size


@pytest.mark.parametrize("max_rows", [5])
def test_cart_matches_exhaustive_search_small(max_rows):
    for X, y in enumerate_instances(max_rows):
        tree = train_cart(X, y, max_depth=2)
        greedy_acc = np.mean((predict_tree(tree, X) >= 0.5).astype(int) == y)
        assert greedy_acc == pytest.approx(best_tree_accuracy(X, y, 2), abs=1e-12)
        if not tree.is_leaf:
            found = best_split(X, y, np.array([0, 1]), min_samples_leaf=1)
            assert found[0] == pytest.approx(brute_force_best_gain(X, y), abs=1e-12)
