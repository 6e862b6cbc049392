import numpy as np
import pytest
from hypothesis import given, strategies as st

from marginboost import (
    LOSSES,
    InputError,
    MarginVector,
    ProbabilityVector,
    empirical_risk,
    expected_risk,
    get_loss,
)

FAMILIES = sorted(LOSSES)
KNOTS = {"squared_hinge": [1.0], "modified_huber": [-1.0, 1.0]}


def test_loss_value_examples():
    assert LOSSES["exponential"].value(0.0) == pytest.approx(1.0)
    assert LOSSES["modified_huber"].value(-2.0) == pytest.approx(8.0)
    assert LOSSES["squared_hinge"].value(2.0) == 0.0
    assert LOSSES["logit"].value(0.0) == pytest.approx(np.log(2.0))
    assert LOSSES["least_squares"].value(0.0) == pytest.approx(1.0)


def test_loss_deriv_examples():
    assert LOSSES["logit"].deriv(0.0) == pytest.approx(-0.5)
    assert LOSSES["least_squares"].deriv(0.0) == pytest.approx(-2.0)
    assert LOSSES["modified_huber"].deriv(1.5) == 0.0
    # printed piecewise branches at the knots
    assert LOSSES["modified_huber"].deriv(-1.0) == pytest.approx(-4.0)
    assert LOSSES["modified_huber"].deriv(1.0) == 0.0
    assert LOSSES["squared_hinge"].deriv(1.0) == 0.0


@pytest.mark.parametrize("family", FAMILIES)
def test_loss_grid_properties(family):
    loss = LOSSES[family]
    t = np.linspace(-10, 10, 2001)
    v = loss.value(t)
    d = loss.deriv(t)
    assert np.all(v >= 0)
    # least squares turns increasing above t = 1; all others never do
    region = t <= 1.0 if family == "least_squares" else slice(None)
    assert np.all(np.asarray(d)[region] <= 1e-15)
    # convexity: derivative non-decreasing
    assert np.all(np.diff(d) >= -1e-12)
    assert loss.deriv(0.0) < 0


@pytest.mark.parametrize("family", FAMILIES)
def test_finite_difference_matches_deriv(family):
    loss = LOSSES[family]
    h = 1e-4
    grid = np.linspace(-10, 10, 401)
    knots = np.asarray(KNOTS.get(family, []))
    for t in grid:
        if knots.size and np.min(np.abs(t - knots)) <= h:
            continue
        fd = (loss.value(t + h) - loss.value(t - h)) / (2 * h)
        # relative slack covers the exponential's large curvature at t = -10
        assert fd == pytest.approx(float(loss.deriv(t)), abs=1e-5, rel=1e-6)


def test_extreme_margins_stay_finite():
    for family in FAMILIES:
        loss = LOSSES[family]
        for t in (-1e8, 1e8):
            assert np.isfinite(loss.value(t))
            assert np.isfinite(loss.deriv(t))


def test_get_loss_normalizes_names():
    assert get_loss("Modified-Huber") is LOSSES["modified_huber"]
    with pytest.raises(InputError):
        get_loss("hinge")


@given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=8))
def test_margin_vector_recenters_and_keeps_argmax(values):
    from hypothesis import assume

    mv = MarginVector(values)
    assert abs(mv.values.sum()) <= 1e-9
    top = np.sort(values)
    assume(top[-1] - top[-2] > 1e-3)  # rounding can merge near-ties
    assert mv.argmax_class() == int(np.argmax(values)) + 1


def test_margin_vector_rejects_bad_input():
    with pytest.raises(InputError):
        MarginVector([1.0])
    with pytest.raises(InputError):
        MarginVector([1.0, np.inf])


def test_probability_vector_validation():
    ProbabilityVector([0.5, 0.5])
    with pytest.raises(InputError):
        ProbabilityVector([0.6, 0.6])
    with pytest.raises(InputError):
        ProbabilityVector([1.2, -0.2])


def test_expected_risk_examples():
    loss = LOSSES["exponential"]
    p = ProbabilityVector([0.2, 0.3, 0.5])
    f = MarginVector([0.0, 0.0, 0.0])
    assert expected_risk(loss, p, f) == pytest.approx(1.0)

    ls = LOSSES["least_squares"]
    assert expected_risk(ls, ProbabilityVector([1.0, 0.0]), MarginVector([1.0, -1.0])) == 0.0

    logit = LOSSES["logit"]
    p3 = ProbabilityVector([1 / 3, 1 / 3, 1 / 3])
    assert expected_risk(logit, p3, MarginVector([0.0, 0.0, 0.0])) == pytest.approx(np.log(2.0))

    with pytest.raises(InputError):
        expected_risk(loss, ProbabilityVector([0.5, 0.5]), MarginVector([0.0, 0.0, 0.0]))


def test_empirical_risk_examples():
    exp = LOSSES["exponential"]
    margins = np.zeros((10, 3))
    labels = np.arange(10) % 3 + 1
    assert empirical_risk(exp, margins, labels) == pytest.approx(1.0)

    logit = LOSSES["logit"]
    big = np.tile([50.0, -25.0, -25.0], (4, 1))
    assert empirical_risk(logit, big, np.ones(4, dtype=int)) < 1e-20

    ls = LOSSES["least_squares"]
    two = np.tile([1.0, -1.0], (5, 1))
    assert empirical_risk(ls, two, np.ones(5, dtype=int)) == 0.0

    with pytest.raises(InputError):
        empirical_risk(exp, np.zeros((0, 3)), np.array([], dtype=int))
    with pytest.raises(InputError):
        empirical_risk(exp, margins, labels + 5)


def test_empirical_matches_expected_for_shared_x():
    # all samples at one x: empirical risk equals expected risk under the
    # empirical label distribution
    rng = np.random.default_rng(3)
    f = MarginVector(rng.normal(size=4))
    labels = np.array([1, 1, 2, 3, 4, 4, 4, 2])
    margins = np.tile(f.values, (labels.size, 1))
    counts = np.bincount(labels, minlength=5)[1:]
    p = ProbabilityVector(counts / counts.sum())
    for family in FAMILIES:
        loss = LOSSES[family]
        assert empirical_risk(loss, margins, labels) == pytest.approx(
            expected_risk(loss, p, f), rel=1e-12
        )


def test_empirical_risk_accepts_margin_vector_sequence():
    exp = LOSSES["exponential"]
    mvs = [MarginVector([0.5, -0.5]), MarginVector([1.0, -1.0])]
    expected = np.mean([np.exp(-0.5), np.exp(-1.0)])
    assert empirical_risk(exp, mvs, [1, 1]) == pytest.approx(expected)
