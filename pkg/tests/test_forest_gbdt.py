from __future__ import annotations

import numpy as np
import pytest

from cardiofusion.errors import EmptyData, SingleClass
from cardiofusion.models import (
    ForestConfig,
    GbdtConfig,
    GradientBoostedTrees,
    RandomForest,
    predict_proba,
    predict_tree,
    preset,
    train_cart,
    train_gbdt,
    train_random_forest,
)


def toy_problem(n=200, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.random((n, 6))
    y = ((X[:, 0] + 0.6 * X[:, 1] + 0.3 * (X[:, 2] > 0.5)) > 0.9).astype(int)
    return X, y


# --- random forest -----------------------------------------------------------

def test_single_tree_forest_on_pure_data_equals_cart():
    X = np.array([[0.0], [1.0], [2.0], [3.0]])
    y = np.array([0, 0, 1, 1])
    # seed 0 draws a bootstrap containing both boundary rows, so the lone
    # tree recovers the same decision function as a plain CART
    forest = train_random_forest(X, y, ForestConfig(n_estimators=1, max_depth=2,
                                                    min_samples_split=2,
                                                    min_samples_leaf=1,
                                                    max_features=1, seed=0))
    cart = train_cart(X, y, max_depth=2)
    assert np.array_equal(
        (predict_proba(forest, X) >= 0.5).astype(int),
        (predict_tree(cart, X) >= 0.5).astype(int),
    )


def test_forest_probabilities_within_unit_interval():
    X, y = toy_problem()
    model = train_random_forest(X, y, ForestConfig(n_estimators=30, seed=1))
    proba = predict_proba(model, X)
    assert np.all(proba >= 0.0)
    assert np.all(proba <= 1.0)


def test_forest_bit_reproducible():
    X, y = toy_problem()
    cfg = ForestConfig(n_estimators=15, seed=7)
    a = RandomForest(cfg).fit(X, y).predict_proba(X)
    b = RandomForest(cfg).fit(X, y).predict_proba(X)
    assert np.array_equal(a, b)


def test_forest_empty_data_rejected():
    with pytest.raises(EmptyData):
        RandomForest(ForestConfig()).fit(np.empty((0, 3)), np.empty(0))


def test_forest_config_validation():
    with pytest.raises(ValueError):
        ForestConfig(n_estimators=0)


# --- gradient boosting --------------------------------------------------------

def test_zero_learning_rate_predicts_class_prior():
    X, y = toy_problem(80)
    cfg = GbdtConfig(n_estimators=5, learning_rate=0.0, max_depth=2)
    model = GradientBoostedTrees(cfg).fit(X, y)
    proba = model.predict_proba(X)
    assert np.allclose(proba, y.mean(), atol=1e-12)


def test_single_class_rejected():
    X = np.random.default_rng(0).random((10, 2))
    with pytest.raises(SingleClass):
        GradientBoostedTrees(GbdtConfig(n_estimators=2, max_depth=2)).fit(
            X, np.ones(10))


def test_train_log_loss_non_increasing_first_order_full_sample():
    X, y = toy_problem(150, seed=3)
    cfg = GbdtConfig(n_estimators=60, learning_rate=0.1, max_depth=3,
                     subsample=1.0, gradient_order="first")
    model = GradientBoostedTrees(cfg).fit(X, y)
    losses = np.array(model.train_losses_)
    assert losses.size == 61
    assert np.all(np.diff(losses) <= 1e-12)


def test_second_order_leaf_value_formula():
    # one boosting round, depth-1 tree: leaf = -sum(g) / (sum(h) + lambda)
    X = np.array([[0.0], [0.0], [1.0], [1.0]])
    y = np.array([0, 0, 1, 1])
    lam = 0.7
    cfg = GbdtConfig(n_estimators=1, learning_rate=1.0, max_depth=1,
                     gradient_order="second", reg_lambda=lam)
    model = GradientBoostedTrees(cfg).fit(X, y)
    tree = model.trees_[0]
    p0 = 0.5  # prior is balanced, so F0 = 0 and p = 0.5 everywhere
    g_left = (p0 - 0.0) * 2
    h_left = p0 * (1 - p0) * 2
    assert tree.left.leaf_value == pytest.approx(-g_left / (h_left + lam))
    assert tree.right.leaf_value == pytest.approx(g_left / (h_left + lam))


def test_gamma_blocks_weak_splits():
    X, y = toy_problem(100, seed=5)
    base = GbdtConfig(n_estimators=1, max_depth=4, gradient_order="second")
    strict = GbdtConfig(n_estimators=1, max_depth=4, gradient_order="second",
                        gamma=1e9)
    grown = GradientBoostedTrees(base).fit(X, y).trees_[0]
    pruned = GradientBoostedTrees(strict).fit(X, y).trees_[0]
    assert not grown.is_leaf
    assert pruned.is_leaf


def test_leafwise_growth_respects_depth_cap():
    X, y = toy_problem(300, seed=8)
    cfg = GbdtConfig(n_estimators=1, max_depth=3, growth="leaf",
                     gradient_order="second")
    tree = GradientBoostedTrees(cfg).fit(X, y).trees_[0]

    def max_depth(node, depth=0):
        if node.is_leaf:
            return depth
        return max(max_depth(node.left, depth + 1), max_depth(node.right, depth + 1))

    assert max_depth(tree) <= 3


def test_presets_available_and_deterministic():
    X, y = toy_problem(120, seed=2)
    for name in ("gbm_like", "xgb_like", "lgbm_like", "catboost_like"):
        cfg = preset(name)
        cfg.n_estimators = 10
        a = train_gbdt(X, y, cfg, name)
        b = train_gbdt(X, y, cfg, name)
        assert np.array_equal(predict_proba(a, X), predict_proba(b, X))


def test_probabilities_in_unit_interval():
    X, y = toy_problem(100, seed=4)
    cfg = preset("xgb_like")
    cfg.n_estimators = 20
    model = train_gbdt(X, y, cfg)
    proba = predict_proba(model, X)
    assert np.all((proba >= 0.0) & (proba <= 1.0))


def test_config_validation():
    with pytest.raises(ValueError):
        GbdtConfig(subsample=0.0)
    with pytest.raises(ValueError):
        GbdtConfig(reg_lambda=-1.0)
    with pytest.raises(ValueError):
        GbdtConfig(gradient_order="third")
