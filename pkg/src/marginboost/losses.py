"""Margin-vector arithmetic, the five convex loss families, and risk functionals.

A margin vector assigns one real score per class under a sum-to-zero
constraint; the class with the largest margin is the predicted class.
Each loss family evaluates a scalar margin and supplies first/second
derivative information needed by the population solvers.
"""

from __future__ import annotations

import numpy as np

from .exceptions import InputError

# exp() overflows float64 near 709; clamp arguments symmetrically
_EXP_CLAMP = 700.0


class MarginVector:
    """m per-class scores constrained to sum to zero.

    Arbitrary finite inputs are accepted and re-centered by subtracting
    the mean, which never changes the argmax.
    """

    __slots__ = ("values",)

    def __init__(self, values):
        v = np.asarray(values, dtype=np.float64)
        if v.ndim != 1 or v.size < 2:
            raise InputError("margin vector needs at least 2 entries")
        if not np.all(np.isfinite(v)):
            raise InputError("margin vector entries must be finite")
        v = v - v.mean()
        if abs(v.sum()) > 1e-9:
            raise InputError("margin vector failed to re-center")
        self.values = v
        self.values.flags.writeable = False

    def __len__(self):
        return self.values.size

    def __getitem__(self, j):
        return self.values[j]

    def argmax_class(self) -> int:
        """1-based index of the largest margin (first one on ties)."""
        return int(np.argmax(self.values)) + 1

    def __repr__(self):
        return f"MarginVector({self.values.tolist()})"


class ProbabilityVector:
    """Point on the m-simplex: conditional class probabilities."""

    __slots__ = ("probs",)

    def __init__(self, probs):
        p = np.asarray(probs, dtype=np.float64)
        if p.ndim != 1 or p.size < 2:
            raise InputError("probability vector needs at least 2 entries")
        if np.any(p < 0) or np.any(p > 1):
            raise InputError("probabilities must lie in [0, 1]")
        if abs(p.sum() - 1.0) > 1e-12:
            raise InputError("probabilities must sum to 1")
        self.probs = p
        self.probs.flags.writeable = False

    def __len__(self):
        return self.probs.size

    def __getitem__(self, j):
        return self.probs[j]

    def argmax_class(self) -> int:
        return int(np.argmax(self.probs)) + 1

    def __repr__(self):
        return f"ProbabilityVector({self.probs.tolist()})"


class Loss:
    """One convex margin loss: value, derivative, and the pieces the
    constrained population solver needs.

    ``deriv_inf`` is the infimum of the derivative over the real line;
    ``deriv_inverse`` inverts the derivative on (deriv_inf, 0).  Families
    that turn exactly linear below a knot set ``linear_knot`` to it, which
    makes ``deriv_inf`` attainable and triggers boundary handling in the
    solver.
    """

    name: str = ""
    deriv_inf: float = -np.inf
    linear_knot: float | None = None  # t2 where the loss becomes linear

    def value(self, t):
        raise NotImplementedError

    def deriv(self, t):
        raise NotImplementedError

    def deriv_inverse(self, u):
        raise NotImplementedError

    def __repr__(self):
        return f"<{type(self).__name__}>"


class ExponentialLoss(Loss):
    name = "exponential"

    def value(self, t):
        return np.exp(np.clip(-np.asarray(t, dtype=np.float64), -_EXP_CLAMP, _EXP_CLAMP))

    def deriv(self, t):
        return -self.value(t)

    def deriv_inverse(self, u):
        return -np.log(-np.asarray(u, dtype=np.float64))


class LogitLoss(Loss):
    name = "logit"
    deriv_inf = -1.0

    def value(self, t):
        # log(1 + e^{-t}) via logaddexp, stable for any magnitude
        return np.logaddexp(0.0, -np.asarray(t, dtype=np.float64))

    def deriv(self, t):
        t = np.asarray(t, dtype=np.float64)
        # -1/(1+e^t), evaluated through e^{-|t|} so neither side overflows
        et = np.exp(-np.abs(t))
        return np.where(t >= 0, -et / (1.0 + et), -1.0 / (1.0 + et))

    def deriv_inverse(self, u):
        u = np.asarray(u, dtype=np.float64)
        # inverse of -1/(1+e^t): t = log(-1/u - 1)
        return np.log(-(1.0 + u) / u)


class LeastSquaresLoss(Loss):
    name = "least_squares"

    def value(self, t):
        t = np.asarray(t, dtype=np.float64)
        return (1.0 - t) ** 2

    def deriv(self, t):
        t = np.asarray(t, dtype=np.float64)
        return 2.0 * (t - 1.0)

    def deriv_inverse(self, u):
        return 1.0 + np.asarray(u, dtype=np.float64) / 2.0


class SquaredHingeLoss(Loss):
    """Least squares made flat above t = 1; still linear-free below."""

    name = "squared_hinge"

    def value(self, t):
        t = np.asarray(t, dtype=np.float64)
        return np.where(t < 1.0, (1.0 - t) ** 2, 0.0)

    def deriv(self, t):
        t = np.asarray(t, dtype=np.float64)
        return np.where(t < 1.0, 2.0 * (t - 1.0), 0.0)

    def deriv_inverse(self, u):
        # only called with u < 0, where the quadratic branch is active
        return 1.0 + np.asarray(u, dtype=np.float64) / 2.0


class ModifiedHuberLoss(Loss):
    """Quadratic on (-1, 1), linear slope -4 below, flat above."""

    name = "modified_huber"
    deriv_inf = -4.0
    linear_knot = -1.0

    def value(self, t):
        t = np.asarray(t, dtype=np.float64)
        return np.where(t <= -1.0, -4.0 * t, np.where(t < 1.0, (t - 1.0) ** 2, 0.0))

    def deriv(self, t):
        t = np.asarray(t, dtype=np.float64)
        return np.where(t <= -1.0, -4.0, np.where(t < 1.0, 2.0 * (t - 1.0), 0.0))

    def deriv_inverse(self, u):
        return 1.0 + np.asarray(u, dtype=np.float64) / 2.0


LOSSES: dict[str, Loss] = {
    loss.name: loss
    for loss in (
        ExponentialLoss(),
        LogitLoss(),
        LeastSquaresLoss(),
        SquaredHingeLoss(),
        ModifiedHuberLoss(),
    )
}

SMOOTH_FAMILIES = ("exponential", "logit", "least_squares")
LINEARIZED_FAMILIES = ("squared_hinge", "modified_huber")


def get_loss(name: str) -> Loss:
    key = name.strip().lower().replace("-", "_")
    if key not in LOSSES:
        raise InputError(
            f"unknown loss family {name!r}; choose from {sorted(LOSSES)}"
        )
    return LOSSES[key]


def expected_risk(loss: Loss, p: ProbabilityVector, f: MarginVector) -> float:
    """Probability-weighted loss of the per-class margins at one point."""
    if len(p) != len(f):
        raise InputError(f"dimension mismatch: {len(p)} probabilities vs {len(f)} margins")
    return float(np.dot(loss.value(f.values), p.probs))


def empirical_risk(loss: Loss, margins, labels) -> float:
    """Mean loss of each sample's own-class margin.

    ``margins`` is an (n, m) array (or a sequence of MarginVector);
    ``labels`` holds 1-based class indices.
    """
    if isinstance(margins, (list, tuple)) and margins and isinstance(margins[0], MarginVector):
        margins = np.stack([mv.values for mv in margins])
    margins = np.asarray(margins, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if margins.ndim != 2 or margins.shape[0] == 0:
        raise InputError("empirical risk needs at least one sample")
    if labels.shape != (margins.shape[0],):
        raise InputError("one label per margin row required")
    if labels.min() < 1 or labels.max() > margins.shape[1]:
        raise InputError("labels must lie in 1..m")
    own = margins[np.arange(margins.shape[0]), labels - 1]
    return float(np.mean(loss.value(own)))
