"""Uniform training/prediction surface over the individual learners."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from ..errors import ShapeMismatch
from .bayes import GaussianNaiveBayes
from .cart import TreeNode, predict_tree, train_cart
from .forest import ForestConfig, RandomForest
from .gbdt import GbdtConfig, GradientBoostedTrees
from .linear import LogisticRegression
from .mlp import MlpClassifier

SCHEMA_VERSION = 1


@dataclass
class TrainedModel:
    """A fitted learner plus its identity and validation metrics."""

    model_id: str
    kind: str
    config: dict
    learner: object
    n_features: int
    validation_accuracy: float = 0.0
    validation_auc: float = 0.0


def predict_proba(model: TrainedModel, X: np.ndarray) -> np.ndarray:
    """Positive-class probability per row; empty input gives an empty vector."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ShapeMismatch(f"expected a 2-D matrix, got ndim={X.ndim}")
    if X.shape[0] == 0:
        return np.empty(0, dtype=np.float64)
    if X.shape[1] != model.n_features:
        raise ShapeMismatch(
            f"{model.model_id}: trained on {model.n_features} columns, got {X.shape[1]}"
        )
    if model.kind == "cart":
        return predict_tree(model.learner, X)
    return model.learner.predict_proba(X)


def predict_labels(model: TrainedModel, X: np.ndarray, threshold: float = 0.5) -> np.ndarray:
    return (predict_proba(model, X) >= threshold).astype(np.int64)


def train_decision_tree(X, y, model_id: str = "cart", **kwargs) -> TrainedModel:
    tree = train_cart(X, y, **kwargs)
    cfg = {k: kwargs.get(k) for k in
           ("max_depth", "min_samples_split", "min_samples_leaf",
            "feature_subset_rule", "seed", "criterion")}
    return TrainedModel(model_id, "cart", cfg, tree, np.asarray(X).shape[1])


def train_random_forest(X, y, config: ForestConfig, model_id: str = "random_forest") -> TrainedModel:
    learner = RandomForest(config).fit(X, y)
    return TrainedModel(model_id, "random_forest", asdict(config), learner,
                        np.asarray(X).shape[1])


def train_gbdt(X, y, config: GbdtConfig, model_id: str = "gbdt") -> TrainedModel:
    learner = GradientBoostedTrees(config).fit(X, y)
    return TrainedModel(model_id, "gbdt", asdict(config), learner,
                        np.asarray(X).shape[1])


def train_logreg(X, y, C: float = 10.0, max_iters: int = 20000, tol: float = 1e-7,
                 model_id: str = "logreg") -> TrainedModel:
    learner = LogisticRegression(C=C, max_iters=max_iters, tol=tol).fit(X, y)
    cfg = {"C": C, "max_iters": max_iters, "tol": tol}
    return TrainedModel(model_id, "logreg", cfg, learner, np.asarray(X).shape[1])


def train_gnb(X, y, var_smoothing: float = 1e-6, model_id: str = "gnb") -> TrainedModel:
    learner = GaussianNaiveBayes(var_smoothing=var_smoothing).fit(X, y)
    return TrainedModel(model_id, "gnb", {"var_smoothing": var_smoothing}, learner,
                        np.asarray(X).shape[1])


def train_mlp(X, y, layers: tuple[int, ...] = (100, 50), epochs: int = 100,
              lr: float = 0.04, batch_size: int = 32, seed: int = 42,
              model_id: str = "mlp") -> TrainedModel:
    learner = MlpClassifier(hidden=layers, epochs=epochs, lr=lr,
                            batch_size=batch_size, seed=seed).fit(X, y)
    cfg = {"layers": list(layers), "epochs": epochs, "lr": lr,
           "batch_size": batch_size, "seed": seed}
    return TrainedModel(model_id, "mlp", cfg, learner, np.asarray(X).shape[1])
