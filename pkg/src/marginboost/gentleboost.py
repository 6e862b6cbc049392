"""Multicategory GentleBoost: stagewise weighted least-squares on regression trees.

Each round fits one regression tree per class to the fixed working
response 1/z_i with weights w_i * z_i^2, where z_i = -1/m + I(y_i = j),
then recomputes the centered margins and the exponential-risk weights
w_i = exp(-f_{y_i}(x_i)).
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from .data import FirstAppearanceEncoder
from .exceptions import InputError
from .losses import LOSSES, empirical_risk
from .tree import FitConfig, fit_regression_tree, predict_tree_batch

_EXP_CLAMP = 700.0


def _check_X(X, n_features=None):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.ndim != 2:
        raise InputError("expected a 2-dimensional feature matrix")
    if not np.all(np.isfinite(X)):
        raise InputError("feature matrix contains non-finite values")
    if n_features is not None and X.shape[1] != n_features:
        raise InputError(f"expected {n_features} features, got {X.shape[1]}")
    return X


class GentleBoostClassifier(ClassifierMixin, BaseEstimator):
    """Multiclass boosting of per-class regression trees under exponential loss.

    Parameters
    ----------
    n_rounds : int
        Number of boosting rounds (one tree per class per round).
    max_leaves : int
        Terminal-node budget of each regression tree.
    min_samples_leaf, min_weight_leaf : tree growth limits.
    learning_rate : float
        Optional shrinkage on each tree's contribution; 1.0 reproduces the
        plain algorithm.
    """

    def __init__(self, n_rounds=200, max_leaves=8, min_samples_leaf=1,
                 min_weight_leaf=0.0, learning_rate=1.0):
        self.n_rounds = n_rounds
        self.max_leaves = max_leaves
        self.min_samples_leaf = min_samples_leaf
        self.min_weight_leaf = min_weight_leaf
        self.learning_rate = learning_rate

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
        cfg = FitConfig(self.max_leaves, self.min_samples_leaf, self.min_weight_leaf)

        w = np.ones(n)
        G = np.zeros((n, m))
        rounds = []
        rows = np.arange(n)
        for _ in range(self.n_rounds):
            trees = []
            for j in range(1, m + 1):
                z = -1.0 / m + (labels == j)
                w_star = w * z * z
                w_star = w_star / w_star.sum()
                tree = fit_regression_tree(X, 1.0 / z, w_star, cfg)
                trees.append(tree)
                G[:, j - 1] += self.learning_rate * predict_tree_batch(tree, X)
            f = G - G.mean(axis=1, keepdims=True)
            w = np.exp(np.clip(-f[rows, labels - 1], -_EXP_CLAMP, _EXP_CLAMP))
            rounds.append(trees)

        self.encoder_ = enc
        self.classes_ = np.asarray(enc.class_names, dtype=object)
        self.n_classes_ = m
        self.n_features_in_ = X.shape[1]
        self.rounds_ = rounds
        self.train_margins_ = f
        self.train_weights_ = w
        self.train_risk_ = empirical_risk(LOSSES["exponential"], f, labels)
        return self

    def decision_function(self, X):
        """Centered margin matrix (n, m)."""
        check_is_fitted(self, "rounds_")
        X = _check_X(X, self.n_features_in_)
        G = np.zeros((X.shape[0], self.n_classes_))
        for trees in self.rounds_:
            for j, tree in enumerate(trees):
                G[:, j] += self.learning_rate * predict_tree_batch(tree, X)
        return G - G.mean(axis=1, keepdims=True)

    def staged_decision_function(self, X):
        """Yield the centered margin matrix after each round."""
        check_is_fitted(self, "rounds_")
        X = _check_X(X, self.n_features_in_)
        G = np.zeros((X.shape[0], self.n_classes_))
        for trees in self.rounds_:
            for j, tree in enumerate(trees):
                G[:, j] += self.learning_rate * predict_tree_batch(tree, X)
            yield G - G.mean(axis=1, keepdims=True)

    def predict(self, X):
        f = self.decision_function(X)
        return np.asarray(self.encoder_.decode(np.argmax(f, axis=1) + 1), dtype=object)

    def predict_proba(self, X):
        """Exponential-loss inversion: softmax of the margins."""
        f = self.decision_function(X)
        f = f - f.max(axis=1, keepdims=True)
        e = np.exp(f)
        return e / e.sum(axis=1, keepdims=True)
