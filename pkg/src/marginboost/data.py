"""Dataset ingestion, label encoding, synthetic blobs, and error metrics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .exceptions import InputError


class FirstAppearanceEncoder:
    """Maps original labels to contiguous 1..m in order of first appearance.

    First-appearance order is deterministic and auditable from the raw file,
    unlike lexicographic order which depends on the label type.
    """

    def __init__(self, class_names: Sequence[str] = ()):
        self.class_names: list[str] = list(class_names)
        self._index = {c: j + 1 for j, c in enumerate(self.class_names)}

    def fit(self, labels) -> "FirstAppearanceEncoder":
        self.class_names = []
        self._index = {}
        for lab in labels:
            key = str(lab)
            if key not in self._index:
                self.class_names.append(key)
                self._index[key] = len(self.class_names)
        return self

    @property
    def m(self) -> int:
        return len(self.class_names)

    def encode(self, labels) -> np.ndarray:
        out = np.empty(len(labels), dtype=np.int64)
        for i, lab in enumerate(labels):
            key = str(lab)
            if key not in self._index:
                raise InputError(f"unknown class label {key!r}")
            out[i] = self._index[key]
        return out

    def decode(self, indices) -> list[str]:
        out = []
        for j in indices:
            j = int(j)
            if not 1 <= j <= self.m:
                raise InputError(f"class index {j} out of range 1..{self.m}")
            out.append(self.class_names[j - 1])
        return out


@dataclass(frozen=True)
class Dataset:
    """Feature matrix, 1-based integer labels, and the original class names."""

    features: np.ndarray
    labels: np.ndarray
    class_names: tuple[str, ...]
    weights: Optional[np.ndarray] = None

    def __post_init__(self):
        X = np.asarray(self.features, dtype=np.float64)
        y = np.asarray(self.labels, dtype=np.int64)
        if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
            raise InputError("dataset needs at least one sample and one feature")
        if not np.all(np.isfinite(X)):
            raise InputError("dataset contains non-finite feature values")
        if y.shape != (X.shape[0],):
            raise InputError("one label per sample required")
        m = len(self.class_names)
        if m < 1 or y.min() < 1 or y.max() > m:
            raise InputError("labels must lie in 1..m")
        present = np.unique(y)
        if present.size != m:
            raise InputError("every class must appear at least once")
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)
        object.__setattr__(self, "class_names", tuple(self.class_names))
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=np.float64)
            if w.shape != (X.shape[0],) or np.any(w < 0):
                raise InputError("weights must be nonnegative, one per sample")
            object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    @property
    def m(self) -> int:
        return len(self.class_names)


def load_delimited(path, delimiter: Optional[str] = ",", label_column="last",
                   skip_header: bool = False) -> Dataset:
    """Parse a delimited text file into a Dataset.

    ``delimiter=None`` splits on arbitrary whitespace.  ``label_column`` is a
    0-based column index or "last".  Labels are encoded by first appearance.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc

    rows = []
    raw_labels = []
    n_cols = None
    start = 1 if skip_header else 0
    for lineno, line in enumerate(lines, start=1):
        if lineno <= start or not line.strip():
            continue
        cells = line.split(delimiter) if delimiter else line.split()
        cells = [c.strip() for c in cells]
        if n_cols is None:
            n_cols = len(cells)
            if n_cols < 2:
                raise InputError(f"{path}:{lineno}: need at least 2 columns")
            lab_idx = n_cols - 1 if label_column == "last" else int(label_column)
            if not 0 <= lab_idx < n_cols:
                raise InputError(f"label column {label_column} out of range for {n_cols} columns")
        if len(cells) != n_cols:
            raise InputError(
                f"{path}:{lineno}: ragged row ({len(cells)} columns, expected {n_cols})"
            )
        raw_labels.append(cells[lab_idx])
        feats = []
        for col, cell in enumerate(cells):
            if col == lab_idx:
                continue
            try:
                feats.append(float(cell))
            except ValueError:
                raise InputError(
                    f"{path}:{lineno}: column {col}: non-numeric feature {cell!r}"
                ) from None
        rows.append(feats)
    if not rows:
        raise InputError(f"{path}: no data rows")

    encoder = FirstAppearanceEncoder().fit(raw_labels)
    return Dataset(
        features=np.asarray(rows, dtype=np.float64),
        labels=encoder.encode(raw_labels),
        class_names=tuple(encoder.class_names),
    )


def _simplex_centers(m: int, d: int, separation: float) -> np.ndarray:
    """m class centers, pairwise ``separation`` apart, embedded in d dims.

    Built from the centered standard simplex; if d < m-1 the embedding is
    truncated and centers are closer than requested.
    """
    A = np.eye(m) - 1.0 / m
    # rank m-1; orthonormal coordinates via SVD
    U, S, _ = np.linalg.svd(A)
    coords = U[:, : m - 1] * S[: m - 1]
    coords *= separation / np.sqrt(2.0)  # unit simplex vertices are sqrt(2) apart
    centers = np.zeros((m, d))
    k = min(d, m - 1)
    centers[:, :k] = coords[:, :k]
    return centers


def synth_blobs(m: int, n: int, d: int, separation: float, seed: int,
                bayes_draws: int = 100_000):
    """Equal-prior spherical Gaussian mixture with a Monte-Carlo Bayes error.

    Returns ``(Dataset, bayes_error_estimate)``.  The Bayes rule for this
    mixture is nearest-center assignment; its error is estimated on
    ``bayes_draws`` fresh draws from an independent stream of the same seed.
    """
    if m < 2 or n < m or d < 1:
        raise InputError("need m >= 2, n >= m, d >= 1")
    centers = _simplex_centers(m, d, separation)
    rng = np.random.default_rng([seed, 0])

    # guarantee every class appears: first m labels cycle through classes
    labels = np.concatenate([np.arange(1, m + 1), rng.integers(1, m + 1, size=n - m)])
    X = centers[labels - 1] + rng.standard_normal((n, d))
    data = Dataset(features=X, labels=labels,
                   class_names=tuple(str(j) for j in range(1, m + 1)))

    mc = np.random.default_rng([seed, 1])
    mc_labels = mc.integers(0, m, size=bayes_draws)
    mc_X = centers[mc_labels] + mc.standard_normal((bayes_draws, d))
    # equal priors, unit spherical covariance: the true posterior peaks at
    # the nearest center
    d2 = ((mc_X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    bayes_pred = np.argmin(d2, axis=1)
    bayes_error = float(np.mean(bayes_pred != mc_labels))
    return data, bayes_error


def bayes_predict(m: int, d: int, separation: float, X) -> np.ndarray:
    """Nearest-center Bayes rule for the synth_blobs mixture; 1-based labels."""
    centers = _simplex_centers(m, d, separation)
    X = np.asarray(X, dtype=np.float64)
    d2 = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    return np.argmin(d2, axis=1) + 1


def misclassification_error(predicted, actual) -> float:
    predicted = np.asarray(predicted)
    actual = np.asarray(actual)
    if predicted.shape != actual.shape or predicted.size == 0:
        raise InputError("predicted and actual must be equal-length and non-empty")
    return float(np.mean(predicted != actual))


def error_standard_error(err: float, n_test: int) -> float:
    """Binomial standard error of a test error rate."""
    if not 0.0 <= err <= 1.0 or n_test < 1:
        raise InputError("err must lie in [0,1] and n_test must be positive")
    return float(np.sqrt(err * (1.0 - err) / n_test))
