"""AdaBoost.ML: gradient descent on the empirical logit risk.

Each round fits a weighted m-class classification tree, converts its
predictions into sum-zero unit-norm increment vectors, and line-searches
a nonnegative step length along that direction.
"""

from __future__ import annotations

import warnings

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from .data import FirstAppearanceEncoder
from .exceptions import InputError
from .gentleboost import _check_X
from .losses import LOSSES, empirical_risk
from .tree import FitConfig, fit_classification_tree, predict_tree_batch

_EXP_CLAMP = 700.0


def increment_vector(predicted_class: int, m: int) -> np.ndarray:
    """Sum-zero, unit-norm step: +sqrt((m-1)/m) at the predicted class,
    -1/sqrt(m(m-1)) elsewhere."""
    if m < 2:
        raise InputError("need at least 2 classes")
    if not 1 <= predicted_class <= m:
        raise InputError(f"class {predicted_class} out of range 1..{m}")
    a = np.sqrt((m - 1.0) / m)
    b = 1.0 / np.sqrt(m * (m - 1.0))
    g = np.full(m, -b)
    g[predicted_class - 1] = a
    return g


def _logit_value(t):
    return np.logaddexp(0.0, -t)


def line_search(own_margins, own_increments, gamma_max: float = 10.0,
                tol: float = 1e-6) -> float:
    """Minimize mean log(1+exp(-(f_i + gamma * g_i))) over gamma in [0, gamma_max].

    The objective is convex in gamma, so bisection on its derivative
    converges; a flat or increasing objective returns the leftmost
    minimizer gamma = 0.
    """
    f = np.asarray(own_margins, dtype=np.float64)
    g = np.asarray(own_increments, dtype=np.float64)
    if f.shape != g.shape or f.size == 0:
        raise InputError("margins and increments must be equal-length and non-empty")

    def dobj(gamma):
        t = np.clip(f + gamma * g, -_EXP_CLAMP, _EXP_CLAMP)
        # d/dgamma of mean logit loss: mean(-g / (1 + e^t))
        et = np.exp(-np.abs(t))
        sig = np.where(t >= 0, et / (1.0 + et), 1.0 / (1.0 + et))
        return float(np.mean(-g * sig))

    if dobj(0.0) >= 0.0:
        return 0.0
    if dobj(gamma_max) <= 0.0:
        return float(gamma_max)
    lo, hi = 0.0, float(gamma_max)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if dobj(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


class AdaBoostMLClassifier(ClassifierMixin, BaseEstimator):
    """Multiclass boosting of weighted classification trees under logit loss.

    Parameters
    ----------
    n_rounds : int
        Maximum number of boosting rounds.
    max_leaves : int or None
        Terminal-node budget of each classification tree; None uses the
        class count m.
    gamma_max : float
        Upper bound of the step-length line search.
    line_search_tol : float
        Interval tolerance of the line search.
    """

    def __init__(self, n_rounds=200, max_leaves=None, min_samples_leaf=1,
                 min_weight_leaf=0.0, gamma_max=10.0, line_search_tol=1e-6):
        self.n_rounds = n_rounds
        self.max_leaves = max_leaves
        self.min_samples_leaf = min_samples_leaf
        self.min_weight_leaf = min_weight_leaf
        self.gamma_max = gamma_max
        self.line_search_tol = line_search_tol

    def fit(self, X, y):
        if self.n_rounds < 1:
            raise InputError("n_rounds must be at least 1")
        X = _check_X(X)
        if len(y) != X.shape[0]:
            raise InputError("X and y length mismatch")
        enc = FirstAppearanceEncoder().fit(y)
        m = enc.m
        if m < 2:
            raise InputError("need at least 2 classes in the training data")
        labels = enc.encode(y)
        n = X.shape[0]
        cfg = FitConfig(self.max_leaves or m, self.min_samples_leaf,
                        self.min_weight_leaf)

        f = np.zeros((n, m))
        rows = np.arange(n)
        stages = []
        small_steps = 0
        for _ in range(self.n_rounds):
            own = np.clip(f[rows, labels - 1], -_EXP_CLAMP, _EXP_CLAMP)
            et = np.exp(-np.abs(own))
            w = np.where(own >= 0, et / (1.0 + et), 1.0 / (1.0 + et))
            w = w / w.sum()

            tree = fit_classification_tree(X, labels, w, cfg)
            pred = predict_tree_batch(tree, X).astype(np.int64)

            acc = float(w[pred == labels].sum())
            if acc <= 1.0 / m:
                warnings.warn(
                    f"base classifier weighted accuracy {acc:.4f} <= 1/m; "
                    "it is not a weak learner for this round",
                    stacklevel=2,
                )

            a = np.sqrt((m - 1.0) / m)
            b = 1.0 / np.sqrt(m * (m - 1.0))
            g_own = np.where(pred == labels, a, -b)
            gamma = line_search(f[rows, labels - 1], g_own,
                                gamma_max=self.gamma_max,
                                tol=self.line_search_tol)
            g_full = np.full((n, m), -b)
            g_full[rows, pred - 1] = a
            f = f + gamma * g_full
            stages.append((tree, float(gamma)))

            small_steps = small_steps + 1 if gamma < 1e-8 else 0
            if small_steps >= 5:
                # five dead rounds in a row: stop and drop them
                stages = stages[: len(stages) - 5]
                break
        if not stages:
            warnings.warn("all rounds produced negligible steps; model is empty",
                          stacklevel=2)

        self.encoder_ = enc
        self.classes_ = np.asarray(enc.class_names, dtype=object)
        self.n_classes_ = m
        self.n_features_in_ = X.shape[1]
        self.stages_ = stages
        self.effective_rounds_ = len(stages)
        self.train_risk_ = empirical_risk(LOSSES["logit"], f, labels) if n else None
        return self

    def decision_function(self, X):
        """Accumulated margin matrix (n, m); sums to zero across classes."""
        check_is_fitted(self, "stages_")
        X = _check_X(X, self.n_features_in_)
        n, m = X.shape[0], self.n_classes_
        a = np.sqrt((m - 1.0) / m)
        b = 1.0 / np.sqrt(m * (m - 1.0))
        f = np.zeros((n, m))
        rows = np.arange(n)
        for tree, gamma in self.stages_:
            pred = predict_tree_batch(tree, X).astype(np.int64)
            f -= gamma * b
            f[rows, pred - 1] += gamma * (a + b)
        return f

    def staged_decision_function(self, X):
        check_is_fitted(self, "stages_")
        X = _check_X(X, self.n_features_in_)
        n, m = X.shape[0], self.n_classes_
        a = np.sqrt((m - 1.0) / m)
        b = 1.0 / np.sqrt(m * (m - 1.0))
        f = np.zeros((n, m))
        rows = np.arange(n)
        for tree, gamma in self.stages_:
            pred = predict_tree_batch(tree, X).astype(np.int64)
            f -= gamma * b
            f[rows, pred - 1] += gamma * (a + b)
            yield f.copy()

    def predict(self, X):
        f = self.decision_function(X)
        return np.asarray(self.encoder_.decode(np.argmax(f, axis=1) + 1), dtype=object)

    def predict_proba(self, X):
        """Logit-loss inversion: p_j proportional to 1 + e^{f_j}."""
        f = np.clip(self.decision_function(X), -_EXP_CLAMP, _EXP_CLAMP)
        num = 1.0 + np.exp(f)
        return num / num.sum(axis=1, keepdims=True)
