from __future__ import annotations

import math

import numpy as np

from .base import Classifier, Dataset
from ..errors import ValidationError

# relative slack under which two split scores count as tied
_TIE_RTOL = 1e-12


def _midpoint(a: float, b: float) -> float:
    mid = a + (b - a) / 2.0
    # a < mid < b can fail for adjacent floats; samples with x <= thr go left
    return a if mid >= b else mid


def best_split_on_feature(xs: np.ndarray, onehot: np.ndarray):
    """Best Gini split along one feature.

    Returns ``(score, threshold)`` where ``score`` is the sum over both
    children of ``sum_c count_c**2 / n_child`` (larger is better, and equals
    ``n * (1 - weighted child Gini)``), or ``None`` if the feature is
    constant. Among equal scores the lowest threshold wins.
    """
    n = xs.shape[0]
    order = np.argsort(xs, kind="stable")
    xs = xs[order]
    valid = xs[1:] > xs[:-1]
    if not valid.any():
        return None
    left = np.cumsum(onehot[order], axis=0)[:-1]
    right = left[-1] + onehot[order[-1]] - left
    n_left = np.arange(1, n, dtype=np.float64)
    score = (left * left).sum(axis=1) / n_left + (right * right).sum(axis=1) / (n - n_left)
    score[~valid] = -np.inf
    best = score.max()
    i = int(np.flatnonzero(score >= best - _TIE_RTOL * abs(best))[0])
    return float(score[i]), _midpoint(float(xs[i]), float(xs[i + 1]))


class DecisionTree(Classifier):
    """Binary CART tree with Gini impurity and axis-aligned thresholds.

    Thresholds sit midway between consecutive distinct feature values and
    samples with ``x <= threshold`` go left. Nodes are split until they are
    pure, cannot be split (every feature constant), or reach ``max_depth``.
    Leaves predict the class frequencies of their training samples.

    Parameters
    ----------
    max_depth : int or None
        None grows the tree fully.
    max_features : int or None
        Number of features examined per split, drawn at random with ``rng``;
        None examines every feature. If none of the drawn features can split
        the node, further features are examined one at a time until one can.
    rng : numpy.random.Generator, optional
        Required when ``max_features`` is smaller than the feature count.

    Split ties (equal Gini gain) go to the lowest feature index, then the
    lowest threshold.
    """

    kind = "decision-tree"

    def __init__(self, max_depth: int | None = None, max_features: int | None = None, rng=None):
        self.max_depth = max_depth
        self.max_features = max_features
        self.rng = rng

    def _candidate_order(self, m):
        if self.max_features is None or self.max_features >= m:
            return np.arange(m), m
        return self.rng.permutation(m), self.max_features

    def _find_split(self, x, onehot):
        order, n_draw = self._candidate_order(x.shape[1])
        found = []
        for pos, f in enumerate(order):
            if pos >= n_draw and found:
                break
            result = best_split_on_feature(x[:, f], onehot)
            if result is not None:
                found.append((result[0], int(f), result[1]))
        if not found:
            return None
        best = max(score for score, _, _ in found)
        tied = [s for s in found if s[0] >= best - _TIE_RTOL * abs(best)]
        score, feature, threshold = min(tied, key=lambda s: (s[1], s[2]))
        return feature, threshold

    def _fit(self, x, y):
        k = self.encoding.k
        onehot = np.eye(k)[y]
        feature, threshold, left, right, value = [], [], [], [], []

        def new_node(rows):
            feature.append(-1)
            threshold.append(np.nan)
            left.append(-1)
            right.append(-1)
            value.append(onehot[rows].mean(axis=0))
            return len(feature) - 1

        stack = [(new_node(np.arange(x.shape[0])), np.arange(x.shape[0]), 0)]
        while stack:
            node, rows, depth = stack.pop()
            counts = onehot[rows].sum(axis=0)
            if counts.max() == rows.size:
                continue
            if self.max_depth is not None and depth >= self.max_depth:
                continue
            split = self._find_split(x[rows], onehot[rows])
            if split is None:
                continue
            f, thr = split
            go_left = x[rows, f] <= thr
            rows_left, rows_right = rows[go_left], rows[~go_left]
            feature[node], threshold[node] = f, thr
            left[node] = new_node(rows_left)
            right[node] = new_node(rows_right)
            # right pushed first so the left subtree is expanded first
            stack.append((right[node], rows_right, depth + 1))
            stack.append((left[node], rows_left, depth + 1))

        self.feature_ = np.array(feature, dtype=np.intp)
        self.threshold_ = np.array(threshold, dtype=np.float64)
        self.left_ = np.array(left, dtype=np.intp)
        self.right_ = np.array(right, dtype=np.intp)
        self.value_ = np.array(value, dtype=np.float64)

    def apply(self, x) -> np.ndarray:
        """Leaf index reached by each row of ``x``."""
        x = np.asarray(x, dtype=np.float64)
        node = np.zeros(x.shape[0], dtype=np.intp)
        while True:
            f = self.feature_[node]
            idx = np.flatnonzero(f >= 0)
            if idx.size == 0:
                return node
            cur = node[idx]
            go_left = x[idx, f[idx]] <= self.threshold_[cur]
            node[idx] = np.where(go_left, self.left_[cur], self.right_[cur])

    def _predict_proba(self, x):
        return self.value_[self.apply(x)]

    @property
    def n_leaves(self) -> int:
        return int((self.feature_ < 0).sum())

    @property
    def depth(self) -> int:
        depth = np.zeros(len(self.feature_), dtype=np.intp)
        for node in range(len(self.feature_)):
            if self.feature_[node] >= 0:
                depth[self.left_[node]] = depth[self.right_[node]] = depth[node] + 1
        return int(depth.max())


def fit_decision_tree(train: Dataset, max_depth: int | None = None) -> DecisionTree:
    return DecisionTree(max_depth=max_depth).fit(train.features, train.labels, train.encoding)


class RandomForest(Classifier):
    """Bagged CART trees; probabilities are the unweighted mean over trees.

    Each tree is fully grown (unless ``max_depth`` is set) on a bootstrap
    sample of size n and examines ``max_features`` random features per split
    (``"sqrt"`` means ceil(sqrt(m))). Tree seeds are spawned from ``seed``,
    so a fixed seed gives bit-identical output.
    """

    kind = "random-forest"

    def __init__(
        self,
        n_trees: int = 100,
        seed: int = 42,
        max_features="sqrt",
        bootstrap: bool = True,
        max_depth: int | None = None,
    ):
        if n_trees < 1:
            raise ValidationError(f"n_trees must be >= 1, got {n_trees}")
        self.n_trees = n_trees
        self.seed = seed
        self.max_features = max_features
        self.bootstrap = bootstrap
        self.max_depth = max_depth

    def _n_features_per_split(self, m):
        if self.max_features is None:
            return None
        if self.max_features == "sqrt":
            return math.ceil(math.sqrt(m))
        return int(self.max_features)

    def _fit(self, x, y):
        n = x.shape[0]
        mf = self._n_features_per_split(x.shape[1])
        self.trees_ = []
        for child in np.random.SeedSequence(self.seed).spawn(self.n_trees):
            rng = np.random.default_rng(child)
            rows = rng.integers(0, n, size=n) if self.bootstrap else np.arange(n)
            tree = DecisionTree(max_depth=self.max_depth, max_features=mf, rng=rng)
            tree.encoding = self.encoding
            tree.n_features_ = x.shape[1]
            tree._fit(x[rows], y[rows])
            self.trees_.append(tree)

    def _predict_proba(self, x):
        total = np.zeros((x.shape[0], self.encoding.k))
        for tree in self.trees_:
            total += tree._predict_proba(x)
        return total / len(self.trees_)


def fit_random_forest(train: Dataset, n_trees: int = 100, seed: int = 42, **options) -> RandomForest:
    return RandomForest(n_trees=n_trees, seed=seed, **options).fit(
        train.features, train.labels, train.encoding
    )
