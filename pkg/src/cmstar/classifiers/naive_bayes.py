from __future__ import annotations

import numpy as np
from scipy.special import logsumexp

from .base import Classifier, Dataset

VAR_FLOOR = 1e-9


class GaussianNaiveBayes(Classifier):
    """Gaussian naive Bayes with class-frequency priors.

    Per-class, per-feature maximum-likelihood variances are floored at
    ``VAR_FLOOR`` times the largest feature variance of the training data.
    Classes absent from the training data get probability 0.
    """

    kind = "gaussian-nb"

    def _fit(self, x, y):
        k = self.encoding.k
        m = x.shape[1]
        self.counts_ = np.bincount(y, minlength=k)
        self.theta_ = np.zeros((k, m))
        self.var_ = np.ones((k, m))
        floor = VAR_FLOOR * float(x.var(axis=0).max())
        if floor <= 0.0:
            floor = VAR_FLOOR
        for c in np.flatnonzero(self.counts_):
            xc = x[y == c]
            self.theta_[c] = xc.mean(axis=0)
            self.var_[c] = np.maximum(xc.var(axis=0), floor)
        self.class_prior_ = self.counts_ / self.counts_.sum()

    def joint_log_likelihood(self, x) -> np.ndarray:
        """log P(c) + sum_f log N(x_f; mu_cf, var_cf), shape (n, k)."""
        present = self.counts_ > 0
        jll = np.full((x.shape[0], self.encoding.k), -np.inf)
        for c in np.flatnonzero(present):
            var = self.var_[c]
            log_density = -0.5 * np.log(2.0 * np.pi * var) - (x - self.theta_[c]) ** 2 / (2.0 * var)
            jll[:, c] = np.log(self.class_prior_[c]) + log_density.sum(axis=1)
        return jll

    def _predict_proba(self, x):
        jll = self.joint_log_likelihood(x)
        return np.exp(jll - logsumexp(jll, axis=1, keepdims=True))


def fit_gaussian_nb(train: Dataset) -> GaussianNaiveBayes:
    return GaussianNaiveBayes().fit(train.features, train.labels, train.encoding)
