"""Small fully-connected network: ReLU hidden layers, sigmoid output,
trained on log-loss with plain mini-batch gradient descent."""
from __future__ import annotations

import numpy as np

from ..errors import EmptyData, SingleClass


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(x, -36.0, 36.0)))


class MlpClassifier:
    """Layer sizes (n_features, *hidden, 1); deterministic given the seed.

    He-normal initialization; per-epoch shuffling and weight updates all
    draw from a generator seeded at construction, so training is
    bit-reproducible.
    """

    def __init__(
        self,
        hidden: tuple[int, ...] = (100, 50),
        epochs: int = 200,
        lr: float = 0.05,
        batch_size: int = 32,
        seed: int = 42,
    ):
        self.hidden = tuple(hidden)
        self.epochs = epochs
        self.lr = lr
        self.batch_size = batch_size
        self.seed = seed
        self.weights_: list[np.ndarray] = []
        self.biases_: list[np.ndarray] = []

    def _init_params(self, n_features: int, rng: np.random.Generator) -> None:
        sizes = (n_features, *self.hidden, 1)
        self.weights_ = []
        self.biases_ = []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            scale = np.sqrt(2.0 / fan_in)
            self.weights_.append(rng.normal(0.0, scale, size=(fan_in, fan_out)))
            self.biases_.append(np.zeros(fan_out))

    def _forward(self, X: np.ndarray) -> tuple[list[np.ndarray], np.ndarray]:
        activations = [X]
        a = X
        last = len(self.weights_) - 1
        for i, (W, b) in enumerate(zip(self.weights_, self.biases_)):
            z = a @ W + b
            a = _sigmoid(z) if i == last else np.maximum(z, 0.0)
            activations.append(a)
        return activations, a[:, 0]

    def loss_and_grads(
        self, X: np.ndarray, y: np.ndarray
    ) -> tuple[float, list[np.ndarray], list[np.ndarray]]:
        """Mean log-loss on the batch plus analytic parameter gradients."""
        activations, p = self._forward(X)
        n = X.shape[0]
        eps = 1e-12
        loss = float(-np.mean(
            y * np.log(p + eps) + (1.0 - y) * np.log(1.0 - p + eps)
        ))
        # Sigmoid + log-loss cancel to (p - y) at the output layer.
        delta = ((p - y) / n)[:, None]
        grads_w: list[np.ndarray] = [None] * len(self.weights_)
        grads_b: list[np.ndarray] = [None] * len(self.weights_)
        for i in range(len(self.weights_) - 1, -1, -1):
            grads_w[i] = activations[i].T @ delta
            grads_b[i] = delta.sum(axis=0)
            if i > 0:
                delta = (delta @ self.weights_[i].T) * (activations[i] > 0.0)
        return loss, grads_w, grads_b

    def fit(self, X: np.ndarray, y: np.ndarray) -> "MlpClassifier":
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        if X.shape[0] == 0:
            raise EmptyData("cannot fit on zero rows")
        if np.unique(y).size < 2:
            raise SingleClass("need both classes to train")

        rng = np.random.default_rng(self.seed)
        self._init_params(X.shape[1], rng)
        n = X.shape[0]
        for _ in range(self.epochs):
            perm = rng.permutation(n)
            for start in range(0, n, self.batch_size):
                batch = perm[start:start + self.batch_size]
                _, grads_w, grads_b = self.loss_and_grads(X[batch], y[batch])
                for i in range(len(self.weights_)):
                    self.weights_[i] -= self.lr * grads_w[i]
                    self.biases_[i] -= self.lr * grads_b[i]
        return self

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.shape[0] == 0:
            return np.empty(0, dtype=np.float64)
        _, p = self._forward(X)
        return p
