"""Weighted CART-style trees grown best-first to an exact leaf budget.

Regression trees minimize weighted sum of squared errors; classification
trees minimize weighted Gini impurity.  Growth is best-first: the split
with the largest criterion reduction anywhere in the frontier is taken
next, so a ``max_leaves`` budget is hit exactly.  All tie-breaks are
deterministic (lowest feature index, then lowest threshold, then oldest
leaf), which makes fitting reproducible bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exceptions import InputError

_MIN_GAIN = 1e-12


@dataclass
class TreeNode:
    """Internal node (feature/threshold/children) or leaf (value).

    Routing: x[feature] <= threshold goes left.
    """

    feature: Optional[int] = None
    threshold: Optional[float] = None
    left: Optional["TreeNode"] = None
    right: Optional["TreeNode"] = None
    value: Optional[float] = None

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    def n_leaves(self) -> int:
        if self.is_leaf:
            return 1
        return self.left.n_leaves() + self.right.n_leaves()


@dataclass(frozen=True)
class FitConfig:
    """Growth limits. ``min_weight_leaf`` is a fraction of the total sample
    weight (weights are normalized internally, keeping fits invariant to a
    positive rescaling of the weights)."""

    max_leaves: int = 8
    min_samples_leaf: int = 1
    min_weight_leaf: float = 0.0

    def __post_init__(self):
        if self.max_leaves < 2:
            raise InputError("max_leaves must be at least 2")
        if self.min_samples_leaf < 1:
            raise InputError("min_samples_leaf must be at least 1")
        if self.min_weight_leaf < 0:
            raise InputError("min_weight_leaf must be nonnegative")


@dataclass
class _Split:
    gain: float
    feature: int
    threshold: float


class _Frontier:
    """One growable leaf: its sample indices and cached best split."""

    __slots__ = ("node", "indices", "split", "order")

    def __init__(self, node, indices, split, order):
        self.node = node
        self.indices = indices
        self.split = split
        self.order = order  # creation order, used for tie-breaking


def _validate(X, w):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0 or X.shape[1] == 0:
        raise InputError("feature matrix must be non-empty and 2-dimensional")
    if not np.all(np.isfinite(X)):
        raise InputError("feature matrix contains non-finite values")
    w = np.asarray(w, dtype=np.float64)
    if w.shape != (X.shape[0],):
        raise InputError("one weight per sample required")
    if np.any(w < 0):
        raise InputError("weights must be nonnegative")
    total = w.sum()
    if total <= 0:
        raise InputError("total weight must be positive")
    # split criteria are ratio quantities; normalizing makes the fitted
    # tree exactly invariant to a positive rescaling of the weights
    return X, w / total


def _best_split_sse(X, y, w, idx, cfg):
    """Best WSSE-reducing split of one leaf, or None."""
    yw = y[idx] * w[idx]
    sw = w[idx].sum()
    if sw <= 0:
        return None
    parent_sse = float(np.dot(y[idx], yw) - (yw.sum() ** 2) / sw)
    best = None
    n = idx.size
    for feat in range(X.shape[1]):
        xs_all = X[idx, feat]
        order = np.argsort(xs_all, kind="stable")
        xs = xs_all[order]
        ws = w[idx][order]
        ys = y[idx][order]
        cw = np.cumsum(ws)
        cwy = np.cumsum(ws * ys)
        cwyy = np.cumsum(ws * ys * ys)
        pos = np.nonzero(xs[:-1] < xs[1:])[0]
        if pos.size == 0:
            continue
        keep = (
            (pos + 1 >= cfg.min_samples_leaf)
            & (n - pos - 1 >= cfg.min_samples_leaf)
            & (cw[pos] > 0)
            & (cw[-1] - cw[pos] > 0)
            & (cw[pos] >= cfg.min_weight_leaf)
            & (cw[-1] - cw[pos] >= cfg.min_weight_leaf)
        )
        pos = pos[keep]
        if pos.size == 0:
            continue
        lw, ly, lyy = cw[pos], cwy[pos], cwyy[pos]
        rw, ry, ryy = cw[-1] - lw, cwy[-1] - ly, cwyy[-1] - lyy
        sse = (lyy - ly * ly / lw) + (ryy - ry * ry / rw)
        gains = parent_sse - sse
        k = int(np.argmax(gains))  # first max: lowest threshold wins ties
        gain = float(gains[k])
        if gain > _MIN_GAIN and (best is None or gain > best.gain):
            thr = 0.5 * (xs[pos[k]] + xs[pos[k] + 1])
            best = _Split(gain, feat, float(thr))
    return best


def _best_split_gini(X, onehot_w, w, idx, cfg):
    """Best Gini-reducing split of one leaf, or None.

    ``onehot_w`` is the (n, m) matrix of per-class sample weights.
    """
    sw = w[idx].sum()
    if sw <= 0:
        return None
    totals = onehot_w[idx].sum(axis=0)
    parent = float(sw - np.dot(totals, totals) / sw)
    best = None
    n = idx.size
    for feat in range(X.shape[1]):
        xs_all = X[idx, feat]
        order = np.argsort(xs_all, kind="stable")
        xs = xs_all[order]
        cw = np.cumsum(w[idx][order])
        cc = np.cumsum(onehot_w[idx][order], axis=0)
        pos = np.nonzero(xs[:-1] < xs[1:])[0]
        if pos.size == 0:
            continue
        keep = (
            (pos + 1 >= cfg.min_samples_leaf)
            & (n - pos - 1 >= cfg.min_samples_leaf)
            & (cw[pos] > 0)
            & (cw[-1] - cw[pos] > 0)
            & (cw[pos] >= cfg.min_weight_leaf)
            & (cw[-1] - cw[pos] >= cfg.min_weight_leaf)
        )
        pos = pos[keep]
        if pos.size == 0:
            continue
        lw = cw[pos]
        rw = cw[-1] - lw
        lc = cc[pos]
        rc = totals[None, :] - lc
        impurity = (lw - np.einsum("ij,ij->i", lc, lc) / lw) + (
            rw - np.einsum("ij,ij->i", rc, rc) / rw
        )
        gains = parent - impurity
        k = int(np.argmax(gains))
        gain = float(gains[k])
        if gain > _MIN_GAIN and (best is None or gain > best.gain):
            thr = 0.5 * (xs[pos[k]] + xs[pos[k] + 1])
            best = _Split(gain, feat, float(thr))
    return best


def _grow(X, w, cfg, best_split, leaf_value):
    root = TreeNode(value=leaf_value(np.arange(X.shape[0])))
    frontier = [
        _Frontier(root, np.arange(X.shape[0]), best_split(np.arange(X.shape[0])), 0)
    ]
    n_leaves = 1
    order_counter = 1
    while n_leaves < cfg.max_leaves:
        candidates = [f for f in frontier if f.split is not None]
        if not candidates:
            break
        # largest gain first; oldest leaf breaks exact ties
        chosen = max(candidates, key=lambda f: (f.split.gain, -f.order))
        frontier.remove(chosen)
        split = chosen.split
        mask = X[chosen.indices, split.feature] <= split.threshold
        left_idx = chosen.indices[mask]
        right_idx = chosen.indices[~mask]
        node = chosen.node
        node.feature = split.feature
        node.threshold = split.threshold
        node.value = None
        node.left = TreeNode(value=leaf_value(left_idx))
        node.right = TreeNode(value=leaf_value(right_idx))
        frontier.append(_Frontier(node.left, left_idx, best_split(left_idx), order_counter))
        frontier.append(_Frontier(node.right, right_idx, best_split(right_idx), order_counter + 1))
        order_counter += 2
        n_leaves += 1
    return root


def fit_regression_tree(X, y, w, cfg: FitConfig) -> TreeNode:
    """Weighted least-squares regression tree; leaves predict weighted means."""
    X, w = _validate(X, w)
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (X.shape[0],):
        raise InputError("one response per sample required")

    def leaf_value(idx):
        sw = w[idx].sum()
        return float(np.dot(y[idx], w[idx]) / sw)

    return _grow(X, w, cfg, lambda idx: _best_split_sse(X, y, w, idx, cfg), leaf_value)


def fit_classification_tree(X, labels, w, cfg: FitConfig) -> TreeNode:
    """Weighted Gini classification tree; leaves predict the weighted majority class."""
    X, w = _validate(X, w)
    labels = np.asarray(labels, dtype=np.int64)
    if labels.shape != (X.shape[0],):
        raise InputError("one label per sample required")
    if labels.min() < 1:
        raise InputError("labels must be 1-based class indices")
    m = int(labels.max())
    onehot_w = np.zeros((X.shape[0], m))
    onehot_w[np.arange(X.shape[0]), labels - 1] = w

    def leaf_value(idx):
        return int(np.argmax(onehot_w[idx].sum(axis=0))) + 1

    return _grow(
        X, w, cfg, lambda idx: _best_split_gini(X, onehot_w, w, idx, cfg), leaf_value
    )


def predict_tree(tree: TreeNode, x):
    """Route a single feature vector to its leaf prediction."""
    x = np.asarray(x, dtype=np.float64)
    node = tree
    while not node.is_leaf:
        if node.feature >= x.size or not np.isfinite(x[node.feature]):
            raise InputError(f"feature {node.feature} missing or non-finite")
        node = node.left if x[node.feature] <= node.threshold else node.right
    return node.value


def predict_tree_batch(tree: TreeNode, X) -> np.ndarray:
    """Vectorized routing of many rows at once."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise InputError("expected a 2-dimensional feature matrix")
    out = np.empty(X.shape[0])
    stack = [(tree, np.arange(X.shape[0]))]
    while stack:
        node, idx = stack.pop()
        if idx.size == 0:
            continue
        if node.is_leaf:
            out[idx] = node.value
            continue
        if node.feature >= X.shape[1]:
            raise InputError(f"feature {node.feature} missing from input")
        mask = X[idx, node.feature] <= node.threshold
        stack.append((node.left, idx[mask]))
        stack.append((node.right, idx[~mask]))
    return out
