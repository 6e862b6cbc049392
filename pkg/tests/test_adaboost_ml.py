import numpy as np
import pytest

from marginboost import (
    AdaBoostMLClassifier,
    FitConfig,
    InputError,
    LOSSES,
    empirical_risk,
    fit_classification_tree,
    increment_vector,
    line_search,
    predict_tree_batch,
    synth_blobs,
)


def test_increment_vector_examples():
    g = increment_vector(1, 3)
    assert np.allclose(g, [0.816497, -0.408248, -0.408248], atol=1e-6)
    g = increment_vector(1, 2)
    assert np.allclose(g, [0.707107, -0.707107], atol=1e-6)
    for m in range(2, 13):
        for cls in (1, m):
            g = increment_vector(cls, m)
            assert abs(g.sum()) <= 1e-12
            assert abs(np.dot(g, g) - 1.0) <= 1e-12
    with pytest.raises(InputError):
        increment_vector(0, 3)
    with pytest.raises(InputError):
        increment_vector(1, 1)


def test_line_search_flat_objective_returns_zero():
    assert line_search(np.zeros(4), np.zeros(4)) == 0.0


def test_line_search_all_correct_hits_gamma_max():
    a = np.sqrt(0.5)
    assert line_search(np.zeros(4), np.full(4, a), gamma_max=10.0) == 10.0


def test_line_search_symmetric_case_is_zero():
    g = np.array([1.0, -1.0]) / np.sqrt(2.0)
    assert line_search(np.zeros(2), g) == 0.0


def test_line_search_matches_dense_grid():
    rng = np.random.default_rng(12)
    f = rng.normal(size=20)
    g = rng.choice([np.sqrt(0.5), -np.sqrt(0.5)], size=20, p=[0.7, 0.3])
    gamma = line_search(f, g, gamma_max=10.0, tol=1e-8)
    grid = np.linspace(0.0, 10.0, 200001)
    obj = np.logaddexp(0.0, -(f[None, :] + grid[:, None] * g[None, :])).mean(axis=1)
    assert gamma == pytest.approx(grid[np.argmin(obj)], abs=1e-3)
    assert obj[np.argmin(obj)] <= obj[0] + 1e-15


def test_round_one_matches_manual_construction():
    rng = np.random.default_rng(13)
    X = rng.normal(size=(40, 2))
    labels = rng.integers(1, 4, size=40)
    m = 3
    model = AdaBoostMLClassifier(n_rounds=1).fit(X, labels)
    # internal class indices follow first-appearance order of the labels
    enc = model.encoder_.encode([str(v) for v in labels])

    # at f = 0 the normalized weights are uniform
    w = np.full(40, 1.0 / 40)
    tree = fit_classification_tree(X, enc, w, FitConfig(max_leaves=m))
    pred = predict_tree_batch(tree, X).astype(int)
    a = np.sqrt(2.0 / 3.0)
    b = 1.0 / np.sqrt(6.0)
    g_own = np.where(pred == enc, a, -b)
    gamma = line_search(np.zeros(40), g_own)
    expected = np.full((40, m), -gamma * b)
    expected[np.arange(40), pred - 1] = gamma * a
    assert np.allclose(model.decision_function(X), expected, atol=1e-12)
    assert model.stages_[0][1] == pytest.approx(gamma)


def test_margins_sum_to_zero_every_round():
    data, _ = synth_blobs(3, 100, 2, 2.0, seed=4)
    model = AdaBoostMLClassifier(n_rounds=6).fit(data.features, data.labels)
    for f in model.staged_decision_function(data.features):
        assert np.max(np.abs(f.sum(axis=1))) <= 1e-9


def test_logit_risk_non_increasing():
    data, _ = synth_blobs(3, 150, 2, 2.0, seed=5)
    model = AdaBoostMLClassifier(n_rounds=20).fit(data.features, data.labels)
    labels = model.encoder_.encode([str(j) for j in data.labels])
    logit = LOSSES["logit"]
    risks = [np.log(2.0)]  # round-0 value at f = 0
    for f in model.staged_decision_function(data.features):
        risks.append(empirical_risk(logit, f, labels))
    assert all(b <= a + 1e-12 for a, b in zip(risks, risks[1:]))


def test_separable_blobs_reach_zero_training_error():
    data, _ = synth_blobs(3, 300, 2, 20.0, seed=1)
    model = AdaBoostMLClassifier(n_rounds=50).fit(data.features, data.labels)
    names = np.asarray([str(j) for j in data.labels], dtype=object)
    assert np.mean(model.predict(data.features) != names) == 0.0


def test_non_weak_learner_warns():
    # constant feature: the tree cannot beat the 1/2 constant baseline
    X = np.zeros((8, 1))
    labels = np.array([1, 2] * 4)
    with pytest.warns(UserWarning, match="weak learner"):
        AdaBoostMLClassifier(n_rounds=1).fit(X, labels)


def test_predict_proba_properties():
    data, _ = synth_blobs(3, 90, 2, 2.0, seed=6)
    model = AdaBoostMLClassifier(n_rounds=4).fit(data.features, data.labels)
    proba = model.predict_proba(data.features)
    assert np.max(np.abs(proba.sum(axis=1) - 1.0)) <= 1e-12
    assert np.all(proba > 0) and np.all(proba < 1)

    model.stages_ = []
    assert np.allclose(model.predict_proba(data.features[:3]), 1 / 3, atol=1e-12)


def test_binary_margin_inversion_example():
    model = AdaBoostMLClassifier(n_rounds=1)
    model.fit(np.array([[0.0], [1.0]]), ["a", "b"])
    # direct check of the inversion formula on fixed margins
    f = np.array([[np.log(3.0), -np.log(3.0)]])
    num = 1.0 + np.exp(f)
    assert np.allclose(num / num.sum(), [0.75, 0.25], atol=1e-12)


def test_gamma_is_nonnegative_and_stored():
    data, _ = synth_blobs(3, 120, 2, 3.0, seed=9)
    model = AdaBoostMLClassifier(n_rounds=10).fit(data.features, data.labels)
    assert model.effective_rounds_ == len(model.stages_)
    assert all(gamma >= 0.0 for _, gamma in model.stages_)
