"""Configurable gradient-boosted decision trees for binary log-loss.

One engine covers the classic first-order residual fit and the
second-order (Newton) variant with L1/L2 leaf regularization and a
minimum split gain. Trees can grow level-wise (split every eligible node
per depth) or leaf-wise (always split the current best leaf). Additive
scores pass through a sigmoid to give probabilities.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from ..errors import EmptyData, SingleClass
from .cart import TreeNode, predict_tree


@dataclass
class GbdtConfig:
    n_estimators: int = 100
    learning_rate: float = 0.1
    max_depth: int = 3
    subsample: float = 1.0
    gradient_order: str = "first"    # "first" | "second"
    growth: str = "level"            # "level" | "leaf"
    reg_alpha: float = 0.0
    reg_lambda: float = 0.0
    gamma: float = 0.0
    min_samples_split: int = 2
    bagging_temperature: float | None = None
    seed: int = 42

    def __post_init__(self):
        if self.n_estimators < 1 or self.max_depth < 1:
            raise ValueError("n_estimators and max_depth must be >= 1")
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be >= 0")
        if not 0.0 < self.subsample <= 1.0:
            raise ValueError("subsample must be in (0, 1]")
        if self.reg_alpha < 0 or self.reg_lambda < 0 or self.gamma < 0:
            raise ValueError("regularization terms must be >= 0")
        if self.gradient_order not in ("first", "second"):
            raise ValueError(f"unknown gradient_order {self.gradient_order!r}")
        if self.growth not in ("level", "leaf"):
            raise ValueError(f"unknown growth {self.growth!r}")


#: Boosted-tree stand-ins for the three vendor libraries plus the classic
#: gradient-boosting machine, at the hyperparameters used for the study.
PRESETS: dict[str, GbdtConfig] = {
    "gbm_like": GbdtConfig(
        n_estimators=300, learning_rate=0.1, max_depth=5, subsample=0.9,
        gradient_order="first", growth="level", min_samples_split=2, seed=46,
    ),
    "xgb_like": GbdtConfig(
        n_estimators=300, learning_rate=0.1, max_depth=7, subsample=0.9,
        gradient_order="second", growth="level", reg_lambda=1.0, gamma=0.1,
        min_samples_split=2, seed=43,
    ),
    "lgbm_like": GbdtConfig(
        n_estimators=300, learning_rate=0.1, max_depth=5, subsample=1.0,
        gradient_order="second", growth="leaf", reg_alpha=0.1, reg_lambda=0.01,
        min_samples_split=2, seed=44,
    ),
    "catboost_like": GbdtConfig(
        n_estimators=300, learning_rate=0.1, max_depth=5, subsample=1.0,
        gradient_order="second", growth="level", reg_lambda=3.0,
        bagging_temperature=1.0, min_samples_split=2, seed=45,
    ),
}


def preset(name: str) -> GbdtConfig:
    try:
        return GbdtConfig(**vars(PRESETS[name]))
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; have {sorted(PRESETS)}") from None


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(x, -36.0, 36.0)))


def _log_loss(y: np.ndarray, p: np.ndarray) -> float:
    p = np.clip(p, 1e-12, 1.0 - 1e-12)
    return float(-np.mean(y * np.log(p) + (1.0 - y) * np.log(1.0 - p)))


def _soft_threshold(g: float, alpha: float) -> float:
    if g > alpha:
        return g - alpha
    if g < -alpha:
        return g + alpha
    return 0.0


def _leaf_weight(G: float, H: float, alpha: float, lam: float) -> float:
    return -_soft_threshold(G, alpha) / (H + lam)


def _split_score(G, H, alpha: float, lam: float):
    # Works elementwise on arrays; the L1 term shrinks G before scoring.
    Gs = np.sign(G) * np.maximum(np.abs(G) - alpha, 0.0)
    return Gs * Gs / (H + lam)


def _best_split_gh(
    X: np.ndarray,
    g: np.ndarray,
    h: np.ndarray,
    alpha: float,
    lam: float,
    gamma: float,
) -> tuple[float, int, float] | None:
    """Best (gain, column, threshold) under the regularized gain

        1/2 * (score(L) + score(R) - score(parent)) - gamma

    Midpoint thresholds; ties resolve to lowest column then lowest
    threshold; returns None unless some gain is strictly positive.
    """
    G, H = g.sum(), h.sum()
    parent = _split_score(G, H, alpha, lam)
    best: tuple[float, int, float] | None = None
    for f in range(X.shape[1]):
        xs = X[:, f]
        order = np.argsort(xs, kind="stable")
        xv = xs[order]
        cut = np.nonzero(xv[1:] > xv[:-1])[0]
        if cut.size == 0:
            continue
        GL = np.cumsum(g[order])[cut]
        HL = np.cumsum(h[order])[cut]
        gains = 0.5 * (
            _split_score(GL, HL, alpha, lam)
            + _split_score(G - GL, H - HL, alpha, lam)
            - parent
        ) - gamma
        k = int(np.argmax(gains))
        gain = float(gains[k])
        if gain <= 0.0:
            continue
        if best is None or gain > best[0]:
            thr = 0.5 * (xv[cut[k]] + xv[cut[k] + 1])
            best = (gain, f, float(thr))
    return best


def _grow_level(X, g, h, depth, cfg: GbdtConfig) -> TreeNode:
    node = TreeNode(
        leaf_value=_leaf_weight(g.sum(), h.sum(), cfg.reg_alpha, cfg.reg_lambda),
        n_samples=g.size,
    )
    if depth >= cfg.max_depth or g.size < cfg.min_samples_split:
        return node
    found = _best_split_gh(X, g, h, cfg.reg_alpha, cfg.reg_lambda, cfg.gamma)
    if found is None:
        return node
    _, col, thr = found
    mask = X[:, col] <= thr
    node.split_column, node.threshold, node.leaf_value = col, thr, None
    node.left = _grow_level(X[mask], g[mask], h[mask], depth + 1, cfg)
    node.right = _grow_level(X[~mask], g[~mask], h[~mask], depth + 1, cfg)
    return node


def _grow_leafwise(X, g, h, cfg: GbdtConfig) -> TreeNode:
    root = TreeNode(
        leaf_value=_leaf_weight(g.sum(), h.sum(), cfg.reg_alpha, cfg.reg_lambda),
        n_samples=g.size,
    )
    heap: list[tuple[float, int, dict]] = []
    counter = 0

    def consider(node: TreeNode, idx: np.ndarray, depth: int):
        nonlocal counter
        if depth >= cfg.max_depth or idx.size < cfg.min_samples_split:
            return
        found = _best_split_gh(X[idx], g[idx], h[idx],
                               cfg.reg_alpha, cfg.reg_lambda, cfg.gamma)
        if found is None:
            return
        gain, col, thr = found
        heapq.heappush(heap, (-gain, counter, {
            "node": node, "idx": idx, "depth": depth, "col": col, "thr": thr,
        }))
        counter += 1

    consider(root, np.arange(g.size), 0)
    while heap:
        _, _, item = heapq.heappop(heap)
        node, idx, depth = item["node"], item["idx"], item["depth"]
        col, thr = item["col"], item["thr"]
        mask = X[idx, col] <= thr
        left_idx, right_idx = idx[mask], idx[~mask]
        node.split_column, node.threshold, node.leaf_value = col, thr, None
        node.left = TreeNode(
            leaf_value=_leaf_weight(g[left_idx].sum(), h[left_idx].sum(),
                                    cfg.reg_alpha, cfg.reg_lambda),
            n_samples=left_idx.size,
        )
        node.right = TreeNode(
            leaf_value=_leaf_weight(g[right_idx].sum(), h[right_idx].sum(),
                                    cfg.reg_alpha, cfg.reg_lambda),
            n_samples=right_idx.size,
        )
        consider(node.left, left_idx, depth + 1)
        consider(node.right, right_idx, depth + 1)
    return root


class GradientBoostedTrees:
    """Additive model F = F0 + sum(lr * tree_m) trained on log-loss.

    F0 is the log-odds of the class prior. Each iteration may subsample a
    row fraction and, with a bagging temperature T, reweight rows by
    Bayesian-bootstrap weights (-log u)^T. Deterministic for a fixed
    seed: per-iteration randomness derives from (seed, iteration).
    """

    def __init__(self, config: GbdtConfig):
        self.config = config
        self.trees_: list[TreeNode] = []
        self.f0_: float = 0.0
        self.train_losses_: list[float] = []
        self.n_features_: int | None = None

    def fit(self, X: np.ndarray, y: np.ndarray) -> "GradientBoostedTrees":
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        if X.shape[0] == 0:
            raise EmptyData("cannot fit on zero rows")
        if not np.isin(y, (0.0, 1.0)).all():
            raise ValueError("labels must be binary 0/1")
        prior = float(y.mean())
        if prior in (0.0, 1.0):
            raise SingleClass("single-class data gives an infinite initial log-odds")

        cfg = self.config
        self.n_features_ = X.shape[1]
        self.f0_ = float(np.log(prior / (1.0 - prior)))
        F = np.full(y.size, self.f0_)
        self.trees_ = []
        self.train_losses_ = [_log_loss(y, _sigmoid(F))]

        n = y.size
        for m in range(cfg.n_estimators):
            rng = np.random.default_rng([cfg.seed, m])
            if cfg.subsample < 1.0:
                size = max(1, int(round(cfg.subsample * n)))
                rows = np.sort(rng.choice(n, size=size, replace=False))
            else:
                rows = np.arange(n)
            p = _sigmoid(F[rows])
            g = p - y[rows]
            h = p * (1.0 - p) if cfg.gradient_order == "second" else np.ones(rows.size)
            if cfg.bagging_temperature is not None:
                u = rng.random(rows.size)
                w = (-np.log1p(-u)) ** cfg.bagging_temperature
                g = g * w
                h = h * w

            Xs = X[rows]
            if cfg.growth == "leaf":
                tree = _grow_leafwise(Xs, g, h, cfg)
            else:
                tree = _grow_level(Xs, g, h, 0, cfg)
            self.trees_.append(tree)
            F = F + cfg.learning_rate * predict_tree(tree, X)
            self.train_losses_.append(_log_loss(y, _sigmoid(F)))
        return self

    def decision_scores(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        F = np.full(X.shape[0], self.f0_)
        for tree in self.trees_:
            F += self.config.learning_rate * predict_tree(tree, X)
        return F

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        if np.asarray(X).shape[0] == 0:
            return np.empty(0, dtype=np.float64)
        return _sigmoid(self.decision_scores(X))
