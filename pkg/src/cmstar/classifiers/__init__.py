"""Desk-scale classifiers emitting probability rows, and cross validation."""
from .base import Classifier, Dataset
from .knn import KNearestNeighbors, fit_knn
from .naive_bayes import GaussianNaiveBayes, fit_gaussian_nb
from .tree import DecisionTree, RandomForest, fit_decision_tree, fit_random_forest
from .validation import (
    CLASSIFIER_KINDS,
    DEFAULT_SEED,
    CrossValidationPlan,
    cross_validate,
    make_classifier,
    stratified_folds,
)

__all__ = [
    "CLASSIFIER_KINDS",
    "DEFAULT_SEED",
    "Classifier",
    "CrossValidationPlan",
    "Dataset",
    "DecisionTree",
    "GaussianNaiveBayes",
    "KNearestNeighbors",
    "RandomForest",
    "cross_validate",
    "fit_decision_tree",
    "fit_gaussian_nb",
    "fit_knn",
    "fit_random_forest",
    "make_classifier",
    "stratified_folds",
]
