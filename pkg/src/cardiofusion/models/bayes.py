"""Gaussian naive Bayes with variance smoothing."""
from __future__ import annotations

import numpy as np

from ..errors import EmptyData, SingleClass


class GaussianNaiveBayes:
    """Class-conditional Gaussians per feature, posterior in log space.

    Every per-class variance gets var_smoothing times the largest
    overall feature variance added, so zero-variance features stay
    finite.
    """

    def __init__(self, var_smoothing: float = 1e-6):
        self.var_smoothing = var_smoothing
        self.classes_: np.ndarray | None = None
        self.theta_: np.ndarray | None = None   # (n_classes, n_features) means
        self.var_: np.ndarray | None = None     # (n_classes, n_features) variances
        self.priors_: np.ndarray | None = None

    def fit(self, X: np.ndarray, y: np.ndarray) -> "GaussianNaiveBayes":
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        if X.shape[0] == 0:
            raise EmptyData("cannot fit on zero rows")
        self.classes_ = np.unique(y)
        if self.classes_.size < 2:
            raise SingleClass("naive Bayes needs both classes")

        eps = self.var_smoothing * float(X.var(axis=0).max())
        self.theta_ = np.stack([X[y == c].mean(axis=0) for c in self.classes_])
        self.var_ = np.stack([X[y == c].var(axis=0) + eps for c in self.classes_])
        self.priors_ = np.array([(y == c).mean() for c in self.classes_])
        return self

    def _joint_log_likelihood(self, X: np.ndarray) -> np.ndarray:
        jll = np.empty((X.shape[0], self.classes_.size))
        for k in range(self.classes_.size):
            log_norm = -0.5 * np.log(2.0 * np.pi * self.var_[k])
            quad = -0.5 * (X - self.theta_[k]) ** 2 / self.var_[k]
            jll[:, k] = np.log(self.priors_[k]) + (log_norm + quad).sum(axis=1)
        return jll

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        """Posterior probability of class 1."""
        X = np.asarray(X, dtype=np.float64)
        if X.shape[0] == 0:
            return np.empty(0, dtype=np.float64)
        jll = self._joint_log_likelihood(X)
        jll -= jll.max(axis=1, keepdims=True)
        post = np.exp(jll)
        post /= post.sum(axis=1, keepdims=True)
        pos = int(np.flatnonzero(self.classes_ == 1)[0])
        return post[:, pos]
