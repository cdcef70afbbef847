"""Performance measures on k x k matrices and the certainty ratio.

Every measure here accepts any non-negative square matrix, so the same
function can be applied to CM, CM*, V or U. The raw functions
(:func:`accuracy`, :func:`macro_precision`, ...) raise
:class:`~cmstar.errors.ZeroMassError` on an all-zero matrix; the
:class:`Measure` wrappers returned by :func:`builtin_measures` apply the
zero-matrix convention instead (an all-zero matrix scores 0).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .errors import DimensionError, InconsistencyError, UndefinedRatioError, ZeroMassError
from .matrices import (
    CertaintyDecomposition,
    ConfusionMatrix,
    GroundTruthMatrix,
    ProbabilisticConfusionMatrix,
    ProbabilityMatrix,
    confusion,
    decompose,
    harden,
    probabilistic_confusion,
)


def _square(m) -> np.ndarray:
    m = np.asarray(getattr(m, "values", m), dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    return m


def _mass(m: np.ndarray, what="matrix") -> float:
    total = float(m.sum())
    if total <= 0.0:
        raise ZeroMassError(f"{what} has zero total mass")
    return total


def accuracy(m) -> float:
    """Trace over total sum."""
    m = _square(m)
    return float(np.trace(m)) / _mass(m)


def _per_class(numerator: np.ndarray, denominator: np.ndarray) -> np.ndarray:
    # classes with an empty denominator score 0
    out = np.zeros_like(numerator)
    np.divide(numerator, denominator, out=out, where=denominator > 0)
    return out


def macro_precision(m) -> float:
    m = _square(m)
    _mass(m)
    return float(_per_class(np.diag(m), m.sum(axis=0)).mean())


def macro_recall(m) -> float:
    m = _square(m)
    _mass(m)
    return float(_per_class(np.diag(m), m.sum(axis=1)).mean())


def macro_f_beta(m, beta: float = 1.0) -> float:
    """Unweighted mean over classes of the per-class F-beta score."""
    m = _square(m)
    _mass(m)
    diag = np.diag(m)
    precision = _per_class(diag, m.sum(axis=0))
    recall = _per_class(diag, m.sum(axis=1))
    b2 = beta * beta
    return float(_per_class((1 + b2) * precision * recall, b2 * precision + recall).mean())


def matthews_corrcoef(m) -> float:
    """Multiclass MCC (the R_K statistic); 0 when either marginal is degenerate."""
    m = _square(m)
    s = _mass(m)
    c = float(np.trace(m))
    t = m.sum(axis=1)
    p = m.sum(axis=0)
    cov_tp = c * s - float(t @ p)
    cov_pp = s * s - float(p @ p)
    cov_tt = s * s - float(t @ t)
    if cov_pp <= 0.0 or cov_tt <= 0.0:
        return 0.0
    return cov_tp / math.sqrt(cov_pp * cov_tt)


@dataclass(frozen=True)
class Measure:
    """A named performance measure with the zero-matrix convention applied."""

    name: str
    fn: Callable[[np.ndarray], float]

    def __call__(self, m) -> float:
        m = _square(m)
        if not m.any():
            return 0.0
        return float(self.fn(m))


def f_beta_measure(beta: float) -> Measure:
    name = "f1" if beta == 1 else f"f{beta:g}"
    return Measure(name, lambda m: macro_f_beta(m, beta))


ACCURACY = Measure("accuracy", accuracy)


def builtin_measures() -> Mapping[str, Measure]:
    """Catalog of the built-in measures keyed by name."""
    catalog = {
        "accuracy": ACCURACY,
        "precision": Measure("precision", macro_precision),
        "recall": Measure("recall", macro_recall),
        "f1": f_beta_measure(1.0),
        "mcc": Measure("mcc", matthews_corrcoef),
    }
    return dict(catalog)


def lambda_weights(v, u) -> tuple[float, float]:
    """Fractions of the total mass held by ``v`` and by ``u``."""
    v, u = _square(v), _square(u)
    sv, su = float(v.sum()), float(u.sum())
    total = sv + su
    if total <= 0.0:
        raise ZeroMassError("V and U both have zero total mass")
    return sv / total, su / total


@dataclass(frozen=True)
class AccuracyDecomposition:
    """Acc* split into certainty and uncertainty contributions.

    ``acc_star == lambda_v * acc_v + lambda_u * acc_u`` by construction.
    """

    acc_star: float
    lambda_v: float
    lambda_u: float
    acc_v: float
    acc_u: float


def accuracy_decomposition(v, u) -> AccuracyDecomposition:
    v, u = _square(v), _square(u)
    lambda_v, lambda_u = lambda_weights(v, u)
    acc_v = ACCURACY(v)
    acc_u = ACCURACY(u)
    return AccuracyDecomposition(
        acc_star=lambda_v * acc_v + lambda_u * acc_u,
        lambda_v=lambda_v,
        lambda_u=lambda_u,
        acc_v=acc_v,
        acc_u=acc_u,
    )


def divergence(cm: ConfusionMatrix, cm_star: ProbabilisticConfusionMatrix) -> float:
    """Frobenius distance between CM and CM*, divided by the instance count."""
    if cm.n != cm_star.n:
        raise InconsistencyError(f"CM covers {cm.n} instances but CM* covers {cm_star.n}")
    if cm.k != cm_star.k:
        raise DimensionError(f"CM is {cm.k}x{cm.k} but CM* is {cm_star.k}x{cm_star.k}")
    if cm.n == 0:
        raise ZeroMassError("no instances")
    diff = cm.values - cm_star.values
    return math.sqrt(float(np.sum(diff * diff))) / cm.n


def certainty_ratio(measure: Callable, v, u) -> float:
    """Share of the measured performance that comes from confident predictions.

    ``measure(V) / (measure(V) + measure(U))``, with ``measure`` evaluated under
    the zero-matrix convention. An all-zero ``U`` gives 1.

    Raises
    ------
    ZeroMassError
        If ``V`` and ``U`` are both all-zero.
    UndefinedRatioError
        If ``U`` is non-zero and the measure values do not form a proportion:
        both zero, or either negative (possible for MCC).
    """
    v, u = _square(v), _square(u)
    if v.shape != u.shape:
        raise DimensionError(f"V has shape {v.shape} but U has shape {u.shape}")
    if float(v.sum()) + float(u.sum()) <= 0.0:
        raise ZeroMassError("V and U both have zero total mass")
    if not u.any():
        return 1.0
    if not isinstance(measure, Measure):
        measure = Measure(getattr(measure, "__name__", "measure"), measure)
    mv, mu = measure(v), measure(u)
    name = measure.name
    if mv < 0.0 or mu < 0.0:
        raise UndefinedRatioError(
            f"{name} is negative on V ({mv:.6g}) or U ({mu:.6g}); ratio is not a proportion"
        )
    if mv + mu <= 0.0:
        raise UndefinedRatioError(f"{name} is 0 on both V and U")
    return mv / (mv + mu)


@dataclass(frozen=True)
class CertaintyReport:
    """Everything derived from one (T, Q) pair for one measure.

    ``certainty_ratio`` is ``None`` when the ratio is undefined.
    """

    measure: str
    certainty_ratio: float | None
    divergence: float
    measure_on_cm: float
    measure_on_cm_star: float
    measure_on_v: float
    measure_on_u: float
    decomposition: AccuracyDecomposition | None = None


@dataclass(frozen=True)
class Evaluation:
    """CM, CM* and its decomposition for one (T, Q) pair."""

    cm: ConfusionMatrix
    cm_star: ProbabilisticConfusionMatrix
    decomposition: CertaintyDecomposition

    @classmethod
    def from_predictions(cls, t: GroundTruthMatrix, q: ProbabilityMatrix) -> "Evaluation":
        return cls(
            cm=confusion(t, harden(q)),
            cm_star=probabilistic_confusion(t, q),
            decomposition=decompose(t, q),
        )

    @property
    def divergence(self) -> float:
        return divergence(self.cm, self.cm_star)

    def accuracy_decomposition(self) -> AccuracyDecomposition:
        return accuracy_decomposition(self.decomposition.v, self.decomposition.u)

    def report(self, measure: Measure = ACCURACY) -> CertaintyReport:
        v, u = self.decomposition.v, self.decomposition.u
        try:
            ratio = certainty_ratio(measure, v, u)
        except UndefinedRatioError:
            ratio = None
        return CertaintyReport(
            measure=measure.name,
            certainty_ratio=ratio,
            divergence=self.divergence,
            measure_on_cm=measure(self.cm.values),
            measure_on_cm_star=measure(self.cm_star.values),
            measure_on_v=measure(v),
            measure_on_u=measure(u),
            decomposition=self.accuracy_decomposition() if measure.name == "accuracy" else None,
        )
