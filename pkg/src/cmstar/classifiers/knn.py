from __future__ import annotations

import numpy as np

from .base import Classifier, Dataset
from ..errors import ValidationError


class KNearestNeighbors(Classifier):
    """k-nearest-neighbour vote fractions on z-scored features.

    Standardization parameters are learned on the training data; a feature
    with zero variance is divided by 1. Euclidean distance; when several
    training points tie at the k-th distance the lowest training index wins.
    """

    kind = "knn"

    def __init__(self, k_neighbors: int = 3):
        if k_neighbors < 1:
            raise ValidationError(f"k_neighbors must be >= 1, got {k_neighbors}")
        self.k_neighbors = k_neighbors

    def _fit(self, x, y):
        if self.k_neighbors > x.shape[0]:
            raise ValidationError(
                f"k_neighbors={self.k_neighbors} exceeds training size {x.shape[0]}"
            )
        self.mean_ = x.mean(axis=0)
        std = x.std(axis=0)
        self.scale_ = np.where(std > 0, std, 1.0)
        self.train_ = (x - self.mean_) / self.scale_
        self.codes_ = y

    def neighbors(self, x) -> np.ndarray:
        """Indices of the k nearest training points for each row of ``x``."""
        z = (np.asarray(x, dtype=np.float64) - self.mean_) / self.scale_
        diff = z[:, None, :] - self.train_[None, :, :]
        dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
        order = np.argsort(dist, axis=1, kind="stable")
        return order[:, : self.k_neighbors]

    def _predict_proba(self, x):
        votes = self.codes_[self.neighbors(x)]
        k = self.encoding.k
        counts = np.zeros((x.shape[0], k))
        for j in range(k):
            counts[:, j] = (votes == j).sum(axis=1)
        return counts / self.k_neighbors


def fit_knn(train: Dataset, k_neighbors: int = 3) -> KNearestNeighbors:
    return KNearestNeighbors(k_neighbors).fit(train.features, train.labels, train.encoding)
