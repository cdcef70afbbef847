from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import Classifier, Dataset
from .knn import KNearestNeighbors
from .naive_bayes import GaussianNaiveBayes
from .tree import DecisionTree, RandomForest
from ..errors import StratificationError, ValidationError
from ..matrices import GroundTruthMatrix, ProbabilityMatrix, build_ground_truth

DEFAULT_SEED = 42

#: short names used on the command line and in reports -> model kind
CLASSIFIER_KINDS = {
    "knn3": "knn",
    "nb": "gaussian-nb",
    "dt": "decision-tree",
    "rf": "random-forest",
}


@dataclass(frozen=True)
class CrossValidationPlan:
    """Stratified k-fold plan. Stratification is always on."""

    folds: int = 10
    seed: int = DEFAULT_SEED
    stratified: bool = True

    def __post_init__(self):
        if self.folds < 2:
            raise ValidationError(f"need at least 2 folds, got {self.folds}")
        if not self.stratified:
            raise ValidationError("only stratified cross validation is supported")


def stratified_folds(codes, folds: int, seed: int) -> np.ndarray:
    """Fold id for every instance.

    Each class's instances are shuffled with ``seed`` and dealt round-robin
    over the folds; the dealing position carries over from one class to the
    next so fold sizes stay balanced. Every fold then holds floor or ceil of
    ``n_c / folds`` instances of class c.
    """
    codes = np.asarray(codes)
    counts = np.bincount(codes)
    present = counts[counts > 0]
    if folds > present.min():
        raise StratificationError(
            f"{folds} folds requested but the smallest class has {present.min()} instances"
        )
    rng = np.random.default_rng(seed)
    assignment = np.empty(codes.shape[0], dtype=np.intp)
    offset = 0
    for c in np.flatnonzero(counts):
        members = rng.permutation(np.flatnonzero(codes == c))
        assignment[members] = (offset + np.arange(members.size)) % folds
        offset = (offset + members.size) % folds
    return assignment


def make_classifier(kind: str, seed: int = DEFAULT_SEED, **options) -> Classifier:
    """Unfitted model for a kind (``knn``/``knn3``, ``gaussian-nb``/``nb``, ...)."""
    kind = CLASSIFIER_KINDS.get(kind, kind)
    if kind == "knn":
        return KNearestNeighbors(options.pop("k_neighbors", 3), **options)
    if kind == "gaussian-nb":
        return GaussianNaiveBayes(**options)
    if kind == "decision-tree":
        return DecisionTree(**options)
    if kind == "random-forest":
        return RandomForest(seed=seed, **options)
    raise ValidationError(f"unknown classifier {kind!r}; choose from {sorted(CLASSIFIER_KINDS)}")


def cross_validate(
    data: Dataset, kind: str, plan: CrossValidationPlan = CrossValidationPlan(), **options
) -> tuple[ProbabilityMatrix, GroundTruthMatrix]:
    """Out-of-fold probabilities pooled into one matrix, row-aligned with ``data``.

    A fresh model is fit on each training split, always against the full
    dataset's label encoding. Fold f's random forest is seeded from
    ``(plan.seed, f)``.
    """
    codes = data.codes()
    fold_of = stratified_folds(codes, plan.folds, plan.seed)
    q = np.zeros((data.n, data.k))
    for f in range(plan.folds):
        test = np.flatnonzero(fold_of == f)
        train = np.flatnonzero(fold_of != f)
        seed = int(np.random.SeedSequence([plan.seed, f]).generate_state(1)[0])
        model = make_classifier(kind, seed=seed, **options)
        model.fit(data.features[train], [data.labels[i] for i in train], data.encoding)
        q[test] = model.predict_proba(data.features[test]).values
    return ProbabilityMatrix(q), build_ground_truth(data.labels, data.encoding)
