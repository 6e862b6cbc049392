import numpy as np
import pytest
from hypothesis import given, strategies as st

from marginboost import (
    Dataset,
    FirstAppearanceEncoder,
    InputError,
    error_standard_error,
    load_delimited,
    misclassification_error,
    synth_blobs,
)


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_load_toy_file(tmp_path):
    path = write(tmp_path, "toy.csv", "1.0,2.0,A\n3.0,4.0,B\n5.0,6.0,A\n")
    data = load_delimited(path)
    assert (data.n, data.d, data.m) == (3, 2, 2)
    assert list(data.labels) == [1, 2, 1]
    assert data.class_names == ("A", "B")
    assert np.allclose(data.features, [[1, 2], [3, 4], [5, 6]])


def test_load_is_order_preserving_and_deterministic(tmp_path):
    text = "1,x\n2,y\n3,x\n4,z\n"
    p1 = write(tmp_path, "a.csv", text)
    d1 = load_delimited(p1)
    d2 = load_delimited(p1)
    assert np.array_equal(d1.features, d2.features)
    assert np.array_equal(d1.labels, d2.labels)
    assert d1.class_names == ("x", "y", "z")  # first-appearance order
    assert list(d1.labels) == [1, 2, 1, 3]


def test_load_whitespace_label_column_header(tmp_path):
    path = write(tmp_path, "ws.txt", "label f1 f2\nA 1 2\nB 3 4\n")
    data = load_delimited(path, delimiter=None, label_column=0, skip_header=True)
    assert (data.n, data.d, data.m) == (2, 2, 2)
    assert np.allclose(data.features, [[1, 2], [3, 4]])


def test_load_errors_carry_location(tmp_path):
    ragged = write(tmp_path, "r.csv", "1,2,A\n1,B\n")
    with pytest.raises(InputError, match="ragged"):
        load_delimited(ragged)
    bad = write(tmp_path, "b.csv", "1,2,A\n1,zap,B\n")
    with pytest.raises(InputError, match="column 1"):
        load_delimited(bad)
    with pytest.raises(InputError, match="cannot read"):
        load_delimited(str(tmp_path / "missing.csv"))


def test_dataset_invariants():
    with pytest.raises(InputError):
        Dataset(np.array([[np.inf]]), np.array([1]), ("a",))
    with pytest.raises(InputError):
        Dataset(np.ones((2, 1)), np.array([1, 1]), ("a", "b"))  # class b absent


def test_encoder_round_trip():
    enc = FirstAppearanceEncoder().fit(["dog", "cat", "dog", "bird"])
    assert enc.class_names == ["dog", "cat", "bird"]
    idx = enc.encode(["bird", "dog"])
    assert list(idx) == [3, 1]
    assert enc.decode(idx) == ["bird", "dog"]
    with pytest.raises(InputError):
        enc.encode(["fish"])


def test_synth_blobs_determinism():
    d1, b1 = synth_blobs(3, 50, 2, 2.0, seed=42)
    d2, b2 = synth_blobs(3, 50, 2, 2.0, seed=42)
    assert np.array_equal(d1.features, d2.features)
    assert np.array_equal(d1.labels, d2.labels)
    assert b1 == b2
    d3, _ = synth_blobs(3, 50, 2, 2.0, seed=43)
    assert not np.array_equal(d1.features, d3.features)


def test_synth_blobs_bayes_extremes():
    _, b0 = synth_blobs(4, 40, 3, 0.0, seed=0)
    assert b0 == pytest.approx(3 / 4, abs=0.01)
    _, b20 = synth_blobs(3, 30, 2, 20.0, seed=0)
    assert b20 < 0.001


def test_synth_blobs_every_class_present():
    data, _ = synth_blobs(5, 5, 3, 1.0, seed=7)
    assert sorted(set(data.labels)) == [1, 2, 3, 4, 5]
    with pytest.raises(InputError):
        synth_blobs(3, 2, 2, 1.0, seed=0)


def test_misclassification_error():
    assert misclassification_error([1, 2, 3], [1, 2, 3]) == 0.0
    assert misclassification_error([1, 1], [2, 2]) == 1.0
    pred = np.zeros(5000, dtype=int)
    actual = np.zeros(5000, dtype=int)
    actual[:911] = 1
    assert misclassification_error(pred, actual) == pytest.approx(0.1822)
    with pytest.raises(InputError):
        misclassification_error([], [])
    with pytest.raises(InputError):
        misclassification_error([1], [1, 2])


def test_error_standard_error_values():
    assert error_standard_error(0.1822, 5000) == pytest.approx(0.00546, abs=5e-5)
    assert error_standard_error(0.0518, 1797) == pytest.approx(0.00523, abs=5e-5)
    assert error_standard_error(0.0, 100) == 0.0
    with pytest.raises(InputError):
        error_standard_error(1.5, 100)
    with pytest.raises(InputError):
        error_standard_error(0.5, 0)


@given(st.floats(0.0, 1.0), st.integers(1, 10**6))
def test_error_standard_error_symmetry(err, n):
    se = error_standard_error(err, n)
    # 1.0 - err rounds; the perturbation moves the SE by up to ~1e-8 near 0
    assert se == pytest.approx(error_standard_error(1.0 - err, n), abs=1e-7)
    assert se <= error_standard_error(0.5, n) + 1e-15
