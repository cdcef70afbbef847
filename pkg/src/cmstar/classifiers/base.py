from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DimensionError, ValidationError
from ..matrices import LabelEncoding, ProbabilityMatrix, encode_labels


@dataclass(frozen=True, eq=False)
class Dataset:
    """Feature matrix plus one class label per row.

    Parameters
    ----------
    features : array-like of shape (n, m)
    labels : sequence of n labels (stored as strings)
    feature_names : optional sequence of m names
    name : optional dataset name, used in reports
    """

    features: np.ndarray
    labels: tuple
    feature_names: tuple | None = None
    name: str = "dataset"
    encoding: LabelEncoding = field(init=False, repr=False)

    def __post_init__(self):
        x = np.array(self.features, dtype=np.float64, copy=True)
        if x.ndim == 1:
            x = x[:, None]
        if x.ndim != 2:
            raise DimensionError(f"features must be 2-D, got shape {x.shape}")
        labels = tuple(str(label) for label in self.labels)
        if len(labels) != x.shape[0]:
            raise DimensionError(f"{x.shape[0]} feature rows but {len(labels)} labels")
        bad = np.argwhere(~np.isfinite(x))
        if bad.size:
            i, j = bad[0]
            raise ValidationError("missing or non-finite feature value", row=int(i) + 1, column=int(j) + 1)
        if self.feature_names is not None and len(self.feature_names) != x.shape[1]:
            raise DimensionError(f"{x.shape[1]} features but {len(self.feature_names)} feature names")
        enc = encode_labels(labels)
        if len(labels) < enc.k:
            raise ValidationError(f"{len(labels)} instances for {enc.k} classes")
        x.setflags(write=False)
        object.__setattr__(self, "features", x)
        object.__setattr__(self, "labels", labels)
        if self.feature_names is not None:
            object.__setattr__(self, "feature_names", tuple(self.feature_names))
        object.__setattr__(self, "encoding", enc)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def m(self) -> int:
        return self.features.shape[1]

    @property
    def k(self) -> int:
        return self.encoding.k

    def codes(self, enc: LabelEncoding | None = None) -> np.ndarray:
        return (enc or self.encoding).encode(self.labels)


class Classifier:
    """Common surface of the fitted models.

    Subclasses set ``kind`` and implement ``_fit(x, codes)`` and
    ``_predict_proba(x)``. Probability columns follow ``encoding``, which is
    built from the training labels unless one is passed to :meth:`fit`; cross
    validation passes the full dataset's encoding so every fold agrees even
    when a training split lacks a class.
    """

    kind = "abstract"
    encoding: LabelEncoding

    def fit(self, features, labels, encoding: LabelEncoding | None = None):
        x = np.asarray(features, dtype=np.float64)
        if x.ndim == 1:
            x = x[:, None]
        if x.shape[0] != len(labels):
            raise DimensionError(f"{x.shape[0]} feature rows but {len(labels)} labels")
        if x.shape[0] == 0:
            raise ValidationError("cannot fit on an empty training set")
        self.encoding = encoding if encoding is not None else encode_labels(labels)
        self.n_features_ = x.shape[1]
        self._fit(x, self.encoding.encode(labels))
        return self

    def predict_proba(self, features) -> ProbabilityMatrix:
        x = np.asarray(features, dtype=np.float64)
        if x.ndim == 1:
            x = x[None, :]
        if x.shape[1] != self.n_features_:
            raise DimensionError(f"model was fit on {self.n_features_} features, got {x.shape[1]}")
        return ProbabilityMatrix(self._predict_proba(x))

    def predict(self, features) -> list[str]:
        q = self.predict_proba(features).values
        return self.encoding.decode(q.argmax(axis=1))

    def _fit(self, x: np.ndarray, y: np.ndarray):
        raise NotImplementedError

    def _predict_proba(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError
