"""ML-kNN: per-label MAP over neighbour-count statistics."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class MLkNNModel:
    train_features: np.ndarray
    train_labels: np.ndarray
    k: int
    smoothing: float
    prior1: np.ndarray  # (L,)
    cond1: np.ndarray  # (L, k + 1): P(count | label present)
    cond0: np.ndarray  # (L, k + 1): P(count | label absent)


def _neighbours(train, query, k, exclude_self=False):
    """Indices of the ``k`` nearest training rows (Euclidean), ties by index."""
    d = (
        np.sum(query**2, axis=1)[:, None]
        + np.sum(train**2, axis=1)[None, :]
        - 2.0 * query @ train.T
    )
    d = np.maximum(d, 0.0)
    if exclude_self:
        np.fill_diagonal(d, np.inf)
    # stable sort keeps the lower training index first among equal distances
    return np.argsort(d, axis=1, kind="stable")[:, :k]


def mlknn_fit(train_features, train_labels, k: int = 10, smoothing: float = 1.0) -> MLkNNModel:
    x = np.asarray(train_features, dtype=np.float64)
    y = np.asarray(train_labels).astype(np.int64)
    n, n_labels = y.shape
    if x.shape[0] != n:
        raise ValueError("features and labels disagree on the number of rows")
    if not 1 <= k <= n:
        raise ValueError(f"k={k} must lie in [1, n_train={n}]")
    s = float(smoothing)
    prior1 = (s + y.sum(axis=0)) / (2 * s + n)

    # leave-one-out neighbourhoods; a row cannot be its own neighbour
    nbrs = _neighbours(x, x, min(k, n - 1), exclude_self=True)
    counts = y[nbrs].sum(axis=1)  # (n, L) positives among each row's neighbours
    c1 = np.zeros((n_labels, k + 1))
    c0 = np.zeros((n_labels, k + 1))
    for j in range(n_labels):
        pos = y[:, j] == 1
        c1[j] = np.bincount(counts[pos, j], minlength=k + 1)
        c0[j] = np.bincount(counts[~pos, j], minlength=k + 1)
    cond1 = (s + c1) / (s * (k + 1) + c1.sum(axis=1, keepdims=True))
    cond0 = (s + c0) / (s * (k + 1) + c0.sum(axis=1, keepdims=True))
    return MLkNNModel(x, y, k, s, prior1, cond1, cond0)


def mlknn_predict(model: MLkNNModel, test_features) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(labels, scores)``; scores are posterior label probabilities."""
    q = np.asarray(test_features, dtype=np.float64)
    nbrs = _neighbours(model.train_features, q, model.k)
    counts = model.train_labels[nbrs].sum(axis=1)
    cols = np.arange(model.train_labels.shape[1])[None, :]
    p1 = model.prior1[None, :] * model.cond1[cols, counts]
    p0 = (1.0 - model.prior1)[None, :] * model.cond0[cols, counts]
    scores = p1 / (p1 + p0)
    labels = (p1 > p0).astype(np.int64)
    return labels, scores


class MLkNN:
    """Thin estimator-style wrapper around :func:`mlknn_fit`/:func:`mlknn_predict`."""

    def __init__(self, k: int = 10, smoothing: float = 1.0):
        self.k = k
        self.smoothing = smoothing
        self.model_ = None

    def fit(self, X, Y):
        self.model_ = mlknn_fit(X, Y, self.k, self.smoothing)
        return self

    def predict(self, X):
        return mlknn_predict(self.model_, X)
