"""L2-regularized logistic regression trained by plain gradient descent."""
from __future__ import annotations

import numpy as np

from ..errors import EmptyData, SingleClass


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(x, -36.0, 36.0)))


class LogisticRegression:
    """Minimizes mean log-loss + ||w||^2 / (2 C n) from a zero start.

    The step size is 1/L for the gradient's Lipschitz bound
    L = ||X||_2^2 / (4n) + 1/(C n), so descent is monotone and fully
    deterministic. The bias term is not regularized.
    """

    def __init__(self, C: float = 10.0, max_iters: int = 20000, tol: float = 1e-7):
        if C <= 0:
            raise ValueError("C must be positive")
        self.C = C
        self.max_iters = max_iters
        self.tol = tol
        self.weights_: np.ndarray | None = None
        self.bias_: float = 0.0
        self.n_iters_: int = 0

    def fit(self, X: np.ndarray, y: np.ndarray) -> "LogisticRegression":
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        if X.shape[0] == 0:
            raise EmptyData("cannot fit on zero rows")
        if np.unique(y).size < 2:
            raise SingleClass("logistic regression needs both classes")

        n, d = X.shape
        lam = 1.0 / (self.C * n)
        lipschitz = np.linalg.norm(X, 2) ** 2 / (4.0 * n) + lam
        step = 1.0 / lipschitz

        w = np.zeros(d)
        b = 0.0
        for it in range(self.max_iters):
            p = _sigmoid(X @ w + b)
            err = p - y
            grad_w = X.T @ err / n + lam * w
            grad_b = float(err.mean())
            if max(np.abs(grad_w).max(), abs(grad_b)) < self.tol:
                break
            w -= step * grad_w
            b -= step * grad_b
        self.weights_ = w
        self.bias_ = b
        self.n_iters_ = it + 1
        return self

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.shape[0] == 0:
            return np.empty(0, dtype=np.float64)
        return _sigmoid(X @ self.weights_ + self.bias_)
