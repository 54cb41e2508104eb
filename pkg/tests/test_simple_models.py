"""Logistic regression, Gaussian naive Bayes, and the MLP."""
from __future__ import annotations

import numpy as np
import pytest

from cardiofusion.errors import EmptyData, ShapeMismatch, SingleClass
from cardiofusion.models import (
    MlpClassifier,
    predict_labels,
    predict_proba,
    train_gnb,
    train_logreg,
    train_mlp,
)


# --- logistic regression ------------------------------------------------------

def test_logreg_separates_two_points():
    X = np.array([[0.0], [1.0]])
    y = np.array([0, 1])
    model = train_logreg(X, y)
    assert np.array_equal(predict_labels(model, X), y)


def test_logreg_single_class_rejected():
    with pytest.raises(SingleClass):
        train_logreg(np.array([[0.0], [1.0]]), np.array([1, 1]))


def test_logreg_empty_rejected():
    with pytest.raises(EmptyData):
        train_logreg(np.empty((0, 2)), np.empty(0))


def test_logreg_deterministic():
    rng = np.random.default_rng(0)
    X = rng.random((60, 4))
    y = (X[:, 0] > 0.5).astype(int)
    a = train_logreg(X, y)
    b = train_logreg(X, y)
    assert np.array_equal(a.learner.weights_, b.learner.weights_)


# --- Gaussian naive Bayes -----------------------------------------------------

def test_gnb_confident_on_separated_clusters():
    rng = np.random.default_rng(1)
    X = np.concatenate([rng.normal(-5, 0.3, (40, 1)), rng.normal(5, 0.3, (40, 1))])
    y = np.array([0] * 40 + [1] * 40)
    model = train_gnb(X, y)
    proba = predict_proba(model, np.array([[-5.0], [5.0]]))
    assert proba[0] < 0.01
    assert proba[1] > 0.99


def test_gnb_zero_variance_feature_survives():
    X = np.array([[1.0, 0.2], [1.0, 0.4], [1.0, 0.9], [1.0, 0.8]])
    y = np.array([0, 0, 1, 1])
    model = train_gnb(X, y)
    proba = predict_proba(model, X)
    assert np.all(np.isfinite(proba))


def test_gnb_variance_floor_holds():
    rng = np.random.default_rng(3)
    X = rng.random((50, 3))
    X[:, 2] = 7.0
    y = (X[:, 0] > 0.5).astype(int)
    model = train_gnb(X, y, var_smoothing=1e-6)
    floor = 1e-6 * X.var(axis=0).max()
    assert np.all(model.learner.var_ >= floor - 1e-18)


def test_gnb_priors_sum_to_one():
    rng = np.random.default_rng(4)
    X = rng.random((30, 2))
    y = (X[:, 0] > 0.4).astype(int)
    model = train_gnb(X, y)
    assert model.learner.priors_.sum() == pytest.approx(1.0)


# --- MLP -----------------------------------------------------------------------

def test_mlp_learns_separable_feature():
    rng = np.random.default_rng(5)
    X = rng.random((200, 1))
    y = (X[:, 0] > 0.5).astype(int)
    model = train_mlp(X, y, epochs=60, seed=0)
    train_acc = (predict_labels(model, X) == y).mean()
    assert train_acc >= 0.99


def test_mlp_deterministic_per_seed():
    rng = np.random.default_rng(6)
    X = rng.random((80, 3))
    y = (X[:, 0] + X[:, 1] > 1.0).astype(int)
    a = train_mlp(X, y, epochs=10, seed=11)
    b = train_mlp(X, y, epochs=10, seed=11)
    for wa, wb in zip(a.learner.weights_, b.learner.weights_):
        assert np.array_equal(wa, wb)


def test_mlp_gradients_match_finite_differences():
    rng = np.random.default_rng(7)
    X = rng.random((16, 4))
    y = (X[:, 0] > 0.5).astype(float)
    mlp = MlpClassifier(hidden=(8, 5), seed=3)
    mlp._init_params(X.shape[1], np.random.default_rng(3))

    _, grads_w, _ = mlp.loss_and_grads(X, y)
    h = 1e-6
    for _ in range(5):
        layer = int(rng.integers(0, len(mlp.weights_)))
        i = int(rng.integers(0, mlp.weights_[layer].shape[0]))
        j = int(rng.integers(0, mlp.weights_[layer].shape[1]))
        original = mlp.weights_[layer][i, j]
        mlp.weights_[layer][i, j] = original + h
        up, _, _ = mlp.loss_and_grads(X, y)
        mlp.weights_[layer][i, j] = original - h
        down, _, _ = mlp.loss_and_grads(X, y)
        mlp.weights_[layer][i, j] = original
        numeric = (up - down) / (2 * h)
        analytic = grads_w[layer][i, j]
        scale = max(abs(numeric), abs(analytic), 1e-8)
        assert abs(numeric - analytic) / scale < 1e-4


def test_mlp_single_class_rejected():
    with pytest.raises(SingleClass):
        train_mlp(np.random.default_rng(0).random((10, 2)), np.zeros(10))


# --- shared prediction surface ---------------------------------------------------

def test_predict_proba_empty_input_gives_empty_vector():
    X = np.array([[0.0], [1.0]])
    model = train_logreg(X, np.array([0, 1]))
    assert predict_proba(model, np.empty((0, 1))).shape == (0,)


def test_predict_proba_wrong_column_count_rejected():
    X = np.array([[0.0], [1.0]])
    model = train_logreg(X, np.array([0, 1]))
    with pytest.raises(ShapeMismatch):
        predict_proba(model, np.zeros((3, 4)))


def test_hard_label_threshold_is_half():
    X = np.array([[0.0], [1.0]])
    model = train_logreg(X, np.array([0, 1]))
    proba = predict_proba(model, X)
    assert np.array_equal(predict_labels(model, X), (proba >= 0.5).astype(int))
