"""Ground truth, prediction and confusion matrices.

Rows of every n x k matrix are instances, columns are classes in the order
fixed by a :class:`LabelEncoding`. The confusion matrices are k x k with true
classes on the rows and predicted classes on the columns.

    CM   = T^T P       (integer counts)
    CM*  = T^T Q       (probability mass)
    CM*  = T^T Q+ + T^T Q- = V + U
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DegenerateProblemError,
    DimensionError,
    EncodingError,
    ValidationError,
)

#: Probability rows whose sum falls within this distance of 1 are renormalized;
#: anything further away is rejected.
ROW_SUM_TOLERANCE = 1e-6


def _frozen(values, dtype):
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class LabelEncoding:
    """Sorted distinct class labels and their column positions."""

    classes: tuple[str, ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        classes = tuple(str(c) for c in self.classes)
        if len(set(classes)) != len(classes):
            raise EncodingError(f"duplicate class labels in {classes!r}")
        if len(classes) < 2:
            raise DegenerateProblemError(
                f"need at least 2 distinct classes, got {len(classes)}: {classes!r}"
            )
        object.__setattr__(self, "classes", classes)
        object.__setattr__(self, "_index", {c: i for i, c in enumerate(classes)})

    @property
    def k(self) -> int:
        return len(self.classes)

    def __len__(self):
        return len(self.classes)

    def __contains__(self, label):
        return str(label) in self._index

    def index(self, label) -> int:
        try:
            return self._index[str(label)]
        except KeyError:
            raise EncodingError(
                f"unknown class label {str(label)!r}; known classes: {list(self.classes)}"
            ) from None

    def encode(self, labels: Iterable) -> np.ndarray:
        """Map labels to integer codes in ``[0, k)``."""
        return np.array([self.index(label) for label in labels], dtype=np.intp)

    def decode(self, codes: Iterable[int]) -> list[str]:
        return [self.classes[int(c)] for c in codes]


def encode_labels(labels: Sequence) -> LabelEncoding:
    """Build the encoding for ``labels``: distinct values, lexicographically sorted.

    Raises
    ------
    DegenerateProblemError
        If fewer than two distinct labels are present.
    """
    distinct = sorted({str(label) for label in labels})
    if len(distinct) < 2:
        raise DegenerateProblemError(
            f"need at least 2 distinct class labels, got {len(distinct)}: {distinct!r}"
        )
    return LabelEncoding(tuple(distinct))


def _check_one_hot(values: np.ndarray, what: str):
    if values.ndim != 2:
        raise DimensionError(f"{what} must be 2-D, got shape {values.shape}")
    if not np.isin(values, (0, 1)).all():
        raise ValidationError(f"{what} entries must be 0 or 1")
    bad = np.flatnonzero(values.sum(axis=1) != 1)
    if bad.size:
        raise ValidationError(f"{what} row is not one-hot", row=int(bad[0]) + 1)


class _Matrix:
    """Shared read-only accessors; ``values`` is a frozen ndarray."""

    values: np.ndarray

    @property
    def shape(self):
        return self.values.shape

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)


@dataclass(frozen=True, eq=False)
class GroundTruthMatrix(_Matrix):
    """One-hot n x k matrix of true classes."""

    values: np.ndarray

    def __post_init__(self):
        values = _frozen(self.values, np.int64)
        _check_one_hot(values, "ground truth matrix")
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def k(self) -> int:
        return self.values.shape[1]

    @property
    def class_counts(self) -> np.ndarray:
        return self.values.sum(axis=0)

    @property
    def codes(self) -> np.ndarray:
        return self.values.argmax(axis=1)


@dataclass(frozen=True, eq=False)
class HardPredictionMatrix(_Matrix):
    """One-hot n x k matrix of predicted classes."""

    values: np.ndarray

    def __post_init__(self):
        values = _frozen(self.values, np.int64)
        _check_one_hot(values, "prediction matrix")
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def k(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True, eq=False)
class ProbabilityMatrix(_Matrix):
    """Row-stochastic n x k matrix of classifier outputs.

    Rows whose sum lies within ``ROW_SUM_TOLERANCE`` of 1 are rescaled to sum
    to 1; negative entries, non-finite entries and rows outside the band are
    rejected with the offending (1-based) row number.
    """

    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64, copy=True)
        if values.ndim != 2:
            raise DimensionError(f"probability matrix must be 2-D, got shape {values.shape}")
        if values.shape[1] < 2:
            raise DegenerateProblemError("probability matrix needs at least 2 columns")
        nonfinite = np.argwhere(~np.isfinite(values))
        if nonfinite.size:
            i, j = nonfinite[0]
            raise ValidationError("non-finite probability", row=int(i) + 1, column=int(j) + 1)
        negative = np.argwhere(values < 0)
        if negative.size:
            i, j = negative[0]
            raise ValidationError(
                f"negative probability {values[i, j]!r}", row=int(i) + 1, column=int(j) + 1
            )
        sums = values.sum(axis=1)
        bad = np.flatnonzero(np.abs(sums - 1.0) > ROW_SUM_TOLERANCE)
        if bad.size:
            i = int(bad[0])
            raise ValidationError(
                f"probabilities sum to {sums[i]!r}, expected 1 +/- {ROW_SUM_TOLERANCE}",
                row=i + 1,
            )
        values /= sums[:, None]
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def k(self) -> int:
        return self.values.shape[1]

    def is_one_hot(self) -> bool:
        return bool(np.isin(self.values, (0.0, 1.0)).all())


@dataclass(frozen=True, eq=False)
class ConfusionMatrix(_Matrix):
    """Integer k x k counts; ``values[i, j]`` = instances of class i predicted as j."""

    values: np.ndarray

    def __post_init__(self):
        values = _frozen(self.values, np.int64)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise DimensionError(f"confusion matrix must be square, got shape {values.shape}")
        if (values < 0).any():
            raise ValidationError("confusion matrix entries must be non-negative")
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return int(self.values.sum())

    @property
    def k(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True, eq=False)
class ProbabilisticConfusionMatrix(_Matrix):
    """Real k x k matrix of probability mass; ``n`` is the instance count."""

    values: np.ndarray
    n: int

    def __post_init__(self):
        values = _frozen(self.values, np.float64)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise DimensionError(
                f"probabilistic confusion matrix must be square, got shape {values.shape}"
            )
        if (values < 0).any():
            raise ValidationError("probabilistic confusion matrix entries must be non-negative")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "n", int(self.n))

    @property
    def k(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True, eq=False)
class CertaintyDecomposition:
    """CM* split into the certainty part ``V`` and the uncertainty part ``U``."""

    certainty: np.ndarray
    uncertainty: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "certainty", _frozen(self.certainty, np.float64))
        object.__setattr__(self, "uncertainty", _frozen(self.uncertainty, np.float64))
        if self.certainty.shape != self.uncertainty.shape:
            raise DimensionError(
                f"V has shape {self.certainty.shape} but U has shape {self.uncertainty.shape}"
            )

    @property
    def v(self) -> np.ndarray:
        return self.certainty

    @property
    def u(self) -> np.ndarray:
        return self.uncertainty

    @property
    def total(self) -> np.ndarray:
        """``V + U``, equal to CM*."""
        return self.certainty + self.uncertainty


def build_ground_truth(labels: Sequence, enc: LabelEncoding) -> GroundTruthMatrix:
    """One-hot encode ``labels`` against ``enc``.

    Raises
    ------
    EncodingError
        Naming the first label missing from ``enc``.
    """
    codes = enc.encode(labels)
    values = np.zeros((len(codes), enc.k), dtype=np.int64)
    values[np.arange(len(codes)), codes] = 1
    return GroundTruthMatrix(values)


def _winners(q: np.ndarray) -> np.ndarray:
    # np.argmax returns the first maximum, i.e. the lowest column index on ties
    return np.argmax(q, axis=1)


def harden(q: ProbabilityMatrix) -> HardPredictionMatrix:
    """Argmax of each row as a one-hot matrix; ties go to the lowest column."""
    q = _values(q)
    values = np.zeros(q.shape, dtype=np.int64)
    values[np.arange(q.shape[0]), _winners(q)] = 1
    return HardPredictionMatrix(values)


def split_q(q: ProbabilityMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Split ``q`` into its winning entries and the remainder.

    Returns
    -------
    q_plus : ndarray of shape (n, k)
        Only the argmax entry of each row (same tie-break as :func:`harden`).
    q_minus : ndarray of shape (n, k)
        All other entries, so that ``q_plus + q_minus == q``.
    """
    q = _values(q)
    rows = np.arange(q.shape[0])
    cols = _winners(q)
    q_plus = np.zeros_like(q, dtype=np.float64)
    q_plus[rows, cols] = q[rows, cols]
    q_minus = np.array(q, dtype=np.float64, copy=True)
    q_minus[rows, cols] = 0.0
    return q_plus, q_minus


def _values(m) -> np.ndarray:
    return m.values if isinstance(m, _Matrix) else np.asarray(m)


def _check_pair(t, other, what):
    if t.shape != other.shape:
        raise DimensionError(
            f"ground truth has shape {t.shape} but {what} has shape {other.shape}"
        )


def confusion(t: GroundTruthMatrix, p: HardPredictionMatrix) -> ConfusionMatrix:
    """Exact integer product ``T^T P``."""
    _check_pair(t, p, "prediction matrix")
    return ConfusionMatrix(t.values.T @ p.values)


def probabilistic_confusion(t: GroundTruthMatrix, q: ProbabilityMatrix) -> ProbabilisticConfusionMatrix:
    """Real product ``T^T Q``; row i sums to the number of class-i instances."""
    _check_pair(t, q, "probability matrix")
    return ProbabilisticConfusionMatrix(t.values.T.astype(np.float64) @ q.values, n=t.n)


def decompose(t: GroundTruthMatrix, q: ProbabilityMatrix) -> CertaintyDecomposition:
    """``V = T^T Q+`` and ``U = T^T Q-``."""
    _check_pair(t, q, "probability matrix")
    q_plus, q_minus = split_q(q)
    tt = t.values.T.astype(np.float64)
    return CertaintyDecomposition(tt @ q_plus, tt @ q_minus)
