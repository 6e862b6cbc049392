"""Constrained population minimizers and margin-to-probability inversion.

For a fixed class-probability vector p, the population problem minimizes
sum_j phi(f_j) p_j over sum-to-zero margin vectors f.  Stationarity gives
phi'(f_j) p_j = -lambda for a single multiplier lambda > 0, so solving
reduces to a one-dimensional monotone root-find in lambda.  Closed forms
exist for the exponential and least-squares families, and a semi-closed
root equation for the logit family; the generic bisection solver covers
all five and serves as the cross-check oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import InputError, NumericError
from .losses import (
    Loss,
    MarginVector,
    ProbabilityVector,
    get_loss,
)

_MAX_BISECT = 200
_RESIDUAL_TOL = 1e-12
# floor on -phi' when inverting arbitrary (non-optimal) margins; learned
# margins can land in the flat region of the linearized losses
_DERIV_FLOOR = -1e-10


def _check_positive(p: ProbabilityVector) -> np.ndarray:
    probs = p.probs
    if np.any(probs <= 0):
        raise InputError("population minimizer requires every class probability > 0")
    return probs


def _margin_sum(loss: Loss, lam: float, probs: np.ndarray) -> float:
    """Sum of candidate margins psi(-lam/p_j); the bisection residual."""
    u = -lam / probs
    if np.any(u <= loss.deriv_inf):
        return -np.inf
    return float(np.sum(loss.deriv_inverse(u)))


def population_minimizer(family, p: ProbabilityVector, tol: float = 1e-8) -> MarginVector:
    """Solve the sum-to-zero population problem by bisection on the multiplier.

    The residual sum_j psi(-lam/p_j) is strictly decreasing in lam, so a
    sign-changing bracket pins the root.  Families that are exactly linear
    below a knot can push the multiplier to its boundary value
    -phi'(t2) * min_j p_j; there the smallest-probability class margin is
    recovered from the sum constraint instead of the inverse derivative.
    """
    loss = family if isinstance(family, Loss) else get_loss(family)
    probs = _check_positive(p)
    p_min = float(probs.min())

    boundary = None
    if loss.linear_knot is not None:
        boundary = -float(loss.deriv(loss.linear_knot)) * p_min

    # expand downward until the residual is positive
    lo = -float(loss.deriv(0.0)) * p_min
    if boundary is not None:
        lo = min(lo, boundary / 2.0)
    for _ in range(_MAX_BISECT):
        if _margin_sum(loss, lo, probs) > 0.0:
            break
        lo /= 2.0
    else:
        raise NumericError("failed to bracket the multiplier from below")

    if boundary is not None:
        # the inverse-derivative formula extends continuously to the knot,
        # so evaluate the boundary residual without the domain guard
        s_boundary = float(np.sum(loss.deriv_inverse(-boundary / probs)))
        if s_boundary > _RESIDUAL_TOL:
            # boundary case: lam sits at -phi'(t2) p_min and the smallest
            # class margin is fixed by the sum-to-zero constraint
            j_min = int(np.argmin(probs))
            f = np.asarray(loss.deriv_inverse(-boundary / probs), dtype=np.float64)
            others = np.delete(f, j_min)
            f[j_min] = -others.sum()
            return MarginVector(f)
        hi = boundary
    else:
        cap = -loss.deriv_inf * p_min  # finite for logit, inf otherwise
        hi = lo
        for _ in range(_MAX_BISECT):
            hi = hi * 2.0 if not np.isfinite(cap) else (hi + cap) / 2.0
            if _margin_sum(loss, hi, probs) < 0.0:
                break
        else:
            raise NumericError("failed to bracket the multiplier from above")

    lam = 0.5 * (lo + hi)
    resid = _margin_sum(loss, lam, probs)
    for _ in range(_MAX_BISECT):
        # stop when the residual is tiny or the bracket has collapsed to
        # float resolution (near a steep root the residual cannot shrink
        # further even though the margins are fully resolved)
        if abs(resid) <= _RESIDUAL_TOL or (hi - lo) <= 4.0 * np.spacing(hi):
            break
        if resid > 0.0:
            lo = lam
        else:
            hi = lam
        lam = 0.5 * (lo + hi)
        resid = _margin_sum(loss, lam, probs)
    else:
        raise NumericError("multiplier bisection exhausted its iteration budget")

    # pick the bracket end whose margins actually sum closer to zero
    if np.isinf(resid):
        lam = lo
        resid = _margin_sum(loss, lam, probs)
    if not np.isfinite(resid):
        raise NumericError("multiplier bisection produced a non-finite residual")
    return MarginVector(loss.deriv_inverse(-lam / probs))


def exponential_minimizer_closed_form(p: ProbabilityVector) -> MarginVector:
    """Centered log-probabilities: the exponential-loss optimum."""
    probs = _check_positive(p)
    logs = np.log(probs)
    return MarginVector(logs - logs.mean())


def least_squares_minimizer_closed_form(p: ProbabilityVector) -> MarginVector:
    """f_j = 1 - (1/p_j) / mean(1/p)."""
    probs = _check_positive(p)
    inv = 1.0 / probs
    return MarginVector(1.0 - inv / inv.mean())


def logit_minimizer(p: ProbabilityVector, tol: float = 1e-8) -> MarginVector:
    """Logit optimum via the root of sum_j log(-1 + p_j * lam) = 0.

    The left side is strictly increasing on lam > 1/min_j p_j and equals
    the margin sum, so bisection runs until |sum f_j| <= tol.
    """
    probs = _check_positive(p)
    lam_floor = 1.0 / float(probs.min())

    def margin_sum(lam: float) -> float:
        return float(np.sum(np.log(-1.0 + probs * lam)))

    lo = lam_floor * (1.0 + 1e-12)
    if margin_sum(lo) > 0.0:
        raise NumericError("logit root bracket failed at its lower end")
    hi = max(2.0 * lam_floor, float(len(p)) + 1.0)
    for _ in range(_MAX_BISECT):
        if margin_sum(hi) > 0.0:
            break
        hi *= 2.0
    else:
        raise NumericError("logit root bracket failed at its upper end")

    lam = 0.5 * (lo + hi)
    for _ in range(_MAX_BISECT):
        s = margin_sum(lam)
        if abs(s) <= min(tol, 1e-12) or (hi - lo) <= 1e-15 * lam:
            break
        if s > 0.0:
            hi = lam
        else:
            lo = lam
        lam = 0.5 * (lo + hi)
    return MarginVector(np.log(-1.0 + probs * lam))


def margins_to_probabilities(family, f: MarginVector) -> ProbabilityVector:
    """Invert margins to probabilities via p_j proportional to 1/phi'(f_j).

    The derivative is floored away from zero so that learned margins in a
    flat loss region never divide by zero.
    """
    loss = family if isinstance(family, Loss) else get_loss(family)
    d = np.minimum(np.asarray(loss.deriv(f.values), dtype=np.float64), _DERIV_FLOOR)
    inv = 1.0 / d
    probs = inv / inv.sum()
    # clip tiny negative rounding and renormalize
    probs = np.clip(probs, 0.0, 1.0)
    return ProbabilityVector(probs / probs.sum())


@dataclass(frozen=True)
class ConsistencyReport:
    argmax_match: bool
    roundtrip_error: float


def check_fisher_consistency(family, p: ProbabilityVector, tol: float = 1e-8) -> ConsistencyReport:
    """Solve the population problem, invert it, and compare against p."""
    loss = family if isinstance(family, Loss) else get_loss(family)
    f = population_minimizer(loss, p, tol=tol)
    recovered = margins_to_probabilities(loss, f)
    err = float(np.max(np.abs(recovered.probs - p.probs)))
    return ConsistencyReport(
        argmax_match=(f.argmax_class() == p.argmax_class()),
        roundtrip_error=err,
    )


def random_simplex_point(
    m: int,
    rng: np.random.Generator,
    min_prob: float = 1e-3,
    min_gap: float = 1e-6,
) -> ProbabilityVector:
    """Dirichlet(1) draw conditioned on interior mass and a unique argmax."""
    if m < 2:
        raise InputError("need at least 2 classes")
    while True:
        p = rng.dirichlet(np.ones(m))
        top = np.sort(p)
        if p.min() >= min_prob and (top[-1] - top[-2]) >= min_gap:
            return ProbabilityVector(p / p.sum())
