"""Random forest over bootstrap-sampled CART trees."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import EmptyData
from .cart import TreeNode, predict_tree, train_cart


@dataclass
class ForestConfig:
    n_estimators: int = 300
    max_depth: int = 7
    min_samples_split: int = 5
    min_samples_leaf: int = 2
    max_features: str | int = "sqrt"
    seed: int = 42

    def __post_init__(self):
        if self.n_estimators < 1 or (self.max_depth is not None and self.max_depth < 1):
            raise ValueError("n_estimators and max_depth must be >= 1")
        if self.min_samples_split < 1 or self.min_samples_leaf < 1:
            raise ValueError("sample minima must be >= 1")


class RandomForest:
    """Bagged Gini trees; prediction is the mean of leaf probabilities.

    Per-tree randomness derives from (seed, tree index), so results are
    identical whether trees are built sequentially or in parallel.
    """

    def __init__(self, config: ForestConfig):
        self.config = config
        self.trees_: list[TreeNode] = []
        self.n_features_: int | None = None

    def fit(self, X: np.ndarray, y: np.ndarray) -> "RandomForest":
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        if X.shape[0] == 0:
            raise EmptyData("cannot fit a forest on zero rows")
        self.n_features_ = X.shape[1]
        self.trees_ = []
        for t in range(self.config.n_estimators):
            rng = np.random.default_rng([self.config.seed, t])
            idx = rng.integers(0, X.shape[0], size=X.shape[0])
            tree = train_cart(
                X[idx], y[idx],
                max_depth=self.config.max_depth,
                min_samples_split=self.config.min_samples_split,
                min_samples_leaf=self.config.min_samples_leaf,
                feature_subset_rule=self.config.max_features,
                seed=rng,
            )
            self.trees_.append(tree)
        return self

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.shape[0] == 0:
            return np.empty(0, dtype=np.float64)
        acc = np.zeros(X.shape[0], dtype=np.float64)
        for tree in self.trees_:
            acc += predict_tree(tree, X)
        return acc / len(self.trees_)
