"""Synthetic blobs and a thresholded nearest-centroid open-set recognizer.

The recognizer turns centroid distances into a probability vector
(``softmax(-distance / temperature)``) and rejects a sample as UNKNOWN when
its top probability falls below ``threshold``.
"""
from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._seeding import numpy_generator
from .core import UNKNOWN, ClassCatalog, OSREvalError, PredictionRecord


class InvalidShape(OSREvalError):
    pass


class EmptyClass(OSREvalError):
    pass


@dataclass(frozen=True)
class SyntheticDataset:
    X: np.ndarray
    y: np.ndarray
    labels: tuple[str, ...]
    class_means: np.ndarray
    spread: float

    def __len__(self):
        return len(self.y)

    def subset(self, idx) -> "SyntheticDataset":
        return SyntheticDataset(self.X[idx], self.y[idx], self.labels, self.class_means, self.spread)


def _place_means(k: int, dim: int, distance: float, rng: np.random.Generator) -> np.ndarray:
    if dim >= k:
        # regular simplex: k scaled orthonormal directions, all pairwise distances equal
        q, _ = np.linalg.qr(rng.standard_normal((dim, k)))
        return q.T * (distance / np.sqrt(2.0))
    # low dimension: rejection sampling in a box that grows until the points fit
    side = distance * max(2.0, 2.0 * k ** (1.0 / dim))
    for _ in range(200):
        pts = rng.uniform(-side / 2, side / 2, size=(k, dim))
        d = np.linalg.norm(pts[:, None] - pts[None], axis=-1)
        if d[np.triu_indices(k, 1)].min() >= distance:
            return pts
        side *= 1.05
    raise RuntimeError("could not place class means")  # pragma: no cover


def generate_blobs(k_classes: int, dim: int, per_class: int, separation: float = 8.0,
                   seed: int = 0, spread: float = 1.0, label_prefix: str = "b") -> SyntheticDataset:
    """Isotropic Gaussian clusters whose means are at least ``separation * spread`` apart.

    When ``dim >= k_classes`` the means form a randomly rotated regular
    simplex, so every pair sits exactly ``separation * spread`` apart and no
    cluster is closer to some classes than to others.
    """
    if k_classes < 2 or dim < 1 or per_class < 0:
        raise InvalidShape(f"need k_classes >= 2, dim >= 1, per_class >= 0; got "
                           f"{k_classes}, {dim}, {per_class}")
    if separation <= 0 or spread <= 0:
        raise InvalidShape("separation and spread must be positive")
    rng = numpy_generator(seed, "blobs")
    means = _place_means(k_classes, dim, separation * spread, rng)
    labels = tuple(f"{label_prefix}{i}" for i in range(k_classes))
    X = (np.repeat(means, per_class, axis=0)
         + rng.standard_normal((k_classes * per_class, dim)) * spread)
    y = np.repeat(np.array(labels, dtype=object), per_class)
    return SyntheticDataset(X, y, labels, means, float(spread))


def write_dataset_csv(dataset: SyntheticDataset, path) -> None:
    """Columns ``label, f0 .. f{d-1}``."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["label"] + [f"f{j}" for j in range(dataset.X.shape[1])])
        for x, label in zip(dataset.X, dataset.y):
            w.writerow([label] + [repr(float(v)) for v in x])


def read_features_csv(path) -> tuple[np.ndarray, np.ndarray]:
    with open(path, newline="", encoding="utf-8") as fh:
        r = csv.reader(fh)
        header = next(r)
        if not header or header[0] != "label":
            raise InvalidShape("feature CSV must start with a 'label' column")
        rows = list(r)
    y = np.array([row[0] for row in rows], dtype=object)
    X = np.array([[float(v) for v in row[1:]] for row in rows], dtype=float).reshape(
        len(rows), len(header) - 1)
    return X, y


@dataclass(frozen=True)
class CentroidModel:
    labels: tuple[str, ...]
    centroids: np.ndarray
    temperature: float = 1.0
    threshold: float = 0.5

    def with_threshold(self, threshold: float) -> "CentroidModel":
        return CentroidModel(self.labels, self.centroids, self.temperature, float(threshold))

    def scores(self, X: np.ndarray) -> np.ndarray:
        """Row-stochastic score matrix, one row per sample."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        dist = np.linalg.norm(X[:, None, :] - self.centroids[None, :, :], axis=-1)
        logits = -dist / self.temperature
        logits -= logits.max(axis=1, keepdims=True)
        e = np.exp(logits)
        return e / e.sum(axis=1, keepdims=True)

    def predict(self, X: np.ndarray) -> tuple[list[str], list[str], np.ndarray]:
        """(open_preds, closed_preds, scores) for a batch of samples."""
        s = self.scores(X)
        best = np.argmax(s, axis=1)
        closed = [self.labels[i] for i in best]
        accept = s[np.arange(len(s)), best] >= self.threshold
        open_ = [c if a else UNKNOWN for c, a in zip(closed, accept)]
        return open_, closed, s


def fit_centroid_model(X: np.ndarray, y: Sequence[str], kkc_labels: Sequence[str] | None = None,
                       temperature: float = 1.0, threshold: float = 0.5) -> CentroidModel:
    """Per-class feature means of the known classes.

    Samples whose label is not in ``kkc_labels`` are ignored.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray([str(v) for v in y], dtype=object)
    if kkc_labels is None:
        kkc_labels = sorted(set(y))
    kkc_labels = tuple(str(c) for c in kkc_labels)
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    centroids = []
    for label in kkc_labels:
        mask = y == label
        if not mask.any():
            raise EmptyClass(f"no training samples for known class {label!r}")
        centroids.append(X[mask].mean(axis=0))
    centroids = np.array(centroids)
    d = np.linalg.norm(centroids[:, None] - centroids[None], axis=-1)
    if len(kkc_labels) > 1 and (d[np.triu_indices(len(kkc_labels), 1)] == 0).any():
        warnings.warn("some known classes have identical centroids", RuntimeWarning, stacklevel=2)
    return CentroidModel(kkc_labels, centroids, float(temperature), float(threshold))


def predict_open(model: CentroidModel, x: np.ndarray) -> tuple[str, str, tuple[float, ...]]:
    """Open-set prediction, closed-set prediction and scores for one sample."""
    open_, closed, s = model.predict(np.asarray(x, dtype=float)[None, :])
    return open_[0], closed[0], tuple(float(v) for v in s[0])


def predict_records(model: CentroidModel, X: np.ndarray, y_true: Sequence[str]) -> list[PredictionRecord]:
    open_, closed, s = model.predict(X)
    return [PredictionRecord(str(t), o, c, tuple(float(v) for v in row))
            for t, o, c, row in zip(y_true, open_, closed, s)]


def tune_threshold(model: CentroidModel, X_val: np.ndarray, y_val: Sequence[str],
                   grid: Sequence[float] | None = None, tolerance: float = 0.02) -> float:
    """Pick a rejection threshold from known-class validation data only.

    Halfpoint balanced accuracy is computed for every candidate threshold;
    the largest threshold within ``tolerance`` of the best value wins.  On
    known-only data the best value is always reached by never rejecting, so
    the tolerance is what buys room for rejecting unknowns later.
    """
    from .scores import balanced_accuracy

    y_val = [str(v) for v in y_val]
    if grid is None:
        grid = np.linspace(0.0, 1.0, 201)
    s = model.scores(X_val)
    best = np.argmax(s, axis=1)
    top = s[np.arange(len(s)), best]
    idx = {c: i for i, c in enumerate(model.labels)}
    true = np.array([idx[c] for c in y_val])
    k = len(model.labels)

    values = []
    for t in grid:
        pred = np.where(top >= t, best, k)
        m = np.zeros((k + 1, k + 1), dtype=np.int64)
        np.add.at(m, (true, pred), 1)
        values.append(balanced_accuracy(m))
    values = np.array(values)
    ok = np.flatnonzero(values >= values.max() - tolerance)
    return float(np.asarray(grid)[ok].max())


def catalog_for(model: CentroidModel, uuc_labels: Sequence[str]) -> ClassCatalog:
    return ClassCatalog(model.labels, tuple(uuc_labels))
