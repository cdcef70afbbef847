"""Probabilistic confusion matrix and certainty ratio for classifier evaluation."""
from .errors import CmstarError
from .matrices import (
    CertaintyDecomposition,
    ConfusionMatrix,
    GroundTruthMatrix,
    HardPredictionMatrix,
    LabelEncoding,
    ProbabilisticConfusionMatrix,
    ProbabilityMatrix,
    build_ground_truth,
    confusion,
    decompose,
    encode_labels,
    harden,
    probabilistic_confusion,
    split_q,
)
from .measures import (
    AccuracyDecomposition,
    CertaintyReport,
    Evaluation,
    Measure,
    accuracy,
    accuracy_decomposition,
    builtin_measures,
    certainty_ratio,
    divergence,
    lambda_weights,
)

__version__ = "0.1.0"
