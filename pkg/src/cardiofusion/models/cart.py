"""Binary CART trees with exact threshold enumeration.

Split candidates are the midpoints between consecutive sorted unique
feature values, so the search is exact at this data scale. Ties between
equal-gain splits resolve to the lowest column index, then the lowest
threshold. Rows with value <= threshold go left.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import EmptyData


@dataclass
class TreeNode:
    split_column: int | None = None
    threshold: float | None = None
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    leaf_value: float | None = None
    n_samples: int = 0

    @property
    def is_leaf(self) -> bool:
        return self.split_column is None

    def to_dict(self) -> dict:
        if self.is_leaf:
            return {"leaf_value": float(self.leaf_value), "n_samples": self.n_samples}
        return {
            "split_column": int(self.split_column),
            "threshold": float(self.threshold),
            "n_samples": self.n_samples,
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TreeNode":
        if "leaf_value" in d:
            return cls(leaf_value=float(d["leaf_value"]), n_samples=int(d["n_samples"]))
        return cls(
            split_column=int(d["split_column"]),
            threshold=float(d["threshold"]),
            n_samples=int(d["n_samples"]),
            left=cls.from_dict(d["left"]),
            right=cls.from_dict(d["right"]),
        )


def _gini_impurity(n_pos: float, n: float) -> float:
    p = n_pos / n
    return 1.0 - p * p - (1.0 - p) * (1.0 - p)


def best_split(
    X: np.ndarray,
    y: np.ndarray,
    feature_ids: np.ndarray,
    min_samples_leaf: int = 1,
    criterion: str = "gini",
) -> tuple[float, int, float] | None:
    """Exhaustive best (gain, column, threshold) over the given features.

    Returns None when no split satisfies the leaf minimum. Gain is the
    Gini impurity decrease for classification or the per-node mean squared
    error decrease for regression targets.
    """
    n = y.size
    best: tuple[float, int, float] | None = None
    y = y.astype(np.float64)
    total = y.sum()
    if criterion == "gini":
        parent = _gini_impurity(total, n)
    else:
        parent = float(np.mean((y - y.mean()) ** 2))

    for f in np.sort(feature_ids):
        xs = X[:, f]
        order = np.argsort(xs, kind="stable")
        xv = xs[order]
        yv = y[order]
        cut = np.nonzero(xv[1:] > xv[:-1])[0]
        if cut.size == 0:
            continue
        n_left = (cut + 1).astype(np.float64)
        n_right = n - n_left
        valid = (n_left >= min_samples_leaf) & (n_right >= min_samples_leaf)
        if not valid.any():
            continue
        csum = np.cumsum(yv)[cut]
        if criterion == "gini":
            p_left = csum / n_left
            p_right = (total - csum) / n_right
            child = (
                n_left * (1.0 - p_left**2 - (1.0 - p_left) ** 2)
                + n_right * (1.0 - p_right**2 - (1.0 - p_right) ** 2)
            ) / n
        else:
            csq = np.cumsum(yv * yv)[cut]
            sse_left = csq - csum**2 / n_left
            sse_right = (np.sum(yv * yv) - csq) - (total - csum) ** 2 / n_right
            child = (sse_left + sse_right) / n
        gains = np.where(valid, parent - child, -np.inf)
        k = int(np.argmax(gains))
        if gains[k] == -np.inf:
            continue
        gain = float(gains[k])
        if best is None or gain > best[0]:
            thr = 0.5 * (xv[cut[k]] + xv[cut[k] + 1])
            best = (gain, int(f), float(thr))
    return best


def _leaf_value(y: np.ndarray, criterion: str) -> float:
    return float(np.mean(y))  # class-1 fraction for gini, mean target otherwise


def _grow(
    X: np.ndarray,
    y: np.ndarray,
    depth: int,
    max_depth: int | None,
    min_samples_split: int,
    min_samples_leaf: int,
    n_subset: int | None,
    criterion: str,
    rng: np.random.Generator | None,
) -> TreeNode:
    node = TreeNode(leaf_value=_leaf_value(y, criterion), n_samples=y.size)
    if max_depth is not None and depth >= max_depth:
        return node
    if y.size < min_samples_split or np.all(y == y[0]):
        return node

    if n_subset is None:
        found = best_split(X, y, np.arange(X.shape[1]), min_samples_leaf, criterion)
    else:
        # Draw features without replacement until n_subset non-constant
        # ones have been examined (constant columns do not use up draws).
        found = None
        informative = 0
        for f in rng.permutation(X.shape[1]):
            if informative >= n_subset:
                break
            candidate = best_split(X, y, np.array([f]), min_samples_leaf, criterion)
            xs = X[:, f]
            if xs.max() > xs.min():
                informative += 1
            if candidate is None:
                continue
            if (found is None or candidate[0] > found[0]
                    or (candidate[0] == found[0]
                        and (candidate[1], candidate[2]) < (found[1], found[2]))):
                found = candidate
    if found is None:
        return node

    _, col, thr = found
    mask = X[:, col] <= thr
    node.split_column = col
    node.threshold = thr
    node.leaf_value = None
    node.left = _grow(X[mask], y[mask], depth + 1, max_depth, min_samples_split,
                      min_samples_leaf, n_subset, criterion, rng)
    node.right = _grow(X[~mask], y[~mask], depth + 1, max_depth, min_samples_split,
                       min_samples_leaf, n_subset, criterion, rng)
    return node


def _resolve_subset(rule, n_features: int) -> int | None:
    if rule is None:
        return None
    if rule == "sqrt":
        return max(1, int(np.sqrt(n_features)))
    if rule == "log2":
        return max(1, int(np.log2(n_features)))
    if isinstance(rule, int):
        return max(1, min(rule, n_features))
    raise ValueError(f"unknown feature subset rule {rule!r}")


def train_cart(
    X: np.ndarray,
    y: np.ndarray,
    max_depth: int | None = None,
    min_samples_split: int = 2,
    min_samples_leaf: int = 1,
    feature_subset_rule=None,
    seed: int = 0,
    criterion: str = "gini",
) -> TreeNode:
    """Grow a single decision tree.

    criterion="gini" expects binary labels and stores the positive-class
    fraction at each leaf; criterion="variance" fits real targets (used
    to fit residuals inside boosting) and stores leaf means. Impure nodes
    are split even at zero gain so long as a valid split exists.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise EmptyData("training data must be a nonempty 2-D matrix")
    if X.shape[0] != y.shape[0]:
        raise EmptyData(f"{X.shape[0]} rows vs {y.shape[0]} labels")
    if criterion == "gini" and not np.isin(y, (0.0, 1.0)).all():
        raise ValueError("gini criterion expects binary 0/1 labels")
    if criterion not in ("gini", "variance"):
        raise ValueError(f"unknown criterion {criterion!r}")

    n_subset = _resolve_subset(feature_subset_rule, X.shape[1])
    rng = np.random.default_rng(seed) if n_subset is not None else None
    return _grow(X, y, 0, max_depth, min_samples_split, min_samples_leaf,
                 n_subset, criterion, rng)


def predict_tree(node: TreeNode, X: np.ndarray) -> np.ndarray:
    """Leaf values for every row of X."""
    X = np.asarray(X, dtype=np.float64)
    out = np.empty(X.shape[0], dtype=np.float64)
    if X.shape[0] == 0:
        return out
    _fill_predictions(node, X, np.arange(X.shape[0]), out)
    return out


def _fill_predictions(node: TreeNode, X: np.ndarray, idx: np.ndarray, out: np.ndarray) -> None:
    if node.is_leaf:
        out[idx] = node.leaf_value
        return
    mask = X[idx, node.split_column] <= node.threshold
    if mask.any():
        _fill_predictions(node.left, X, idx[mask], out)
    if (~mask).any():
        _fill_predictions(node.right, X, idx[~mask], out)
