"""Random-prediction baselines and the openness/sample-imbalance grid.

A random predictor labels each sample "known" with probability ``p``:
``0.5`` in ``DEFAULT_HALF`` mode, the true known fraction ``q`` in
``PRIOR_AWARE`` mode.  Under both modes balanced accuracy centres on 0.5,
while F1 and accuracy drift with the known/unknown ratio.
"""
from __future__ import annotations

import csv
import enum
import io
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import stats

from ._seeding import derive_seed_array, to_unit_interval
from .core import BinaryConfusionMatrix
from .protocol import openness

SIMULATION_SCHEMA = "osreval/simulation-report/1"
N_BINS = 101
BIN_EDGES = np.linspace(0.0, 1.0, N_BINS + 1)
METRICS = ("f1", "accuracy", "balanced_accuracy")

DEFAULT_GRID = [(k, u) for k in (2, 4, 8, 16, 32) for u in (2, 10, 100, 1000)]


class RandomPredictorMode(str, enum.Enum):
    DEFAULT_HALF = "default"
    PRIOR_AWARE = "prior"


def positive_rate(n_pos: int, n_neg: int, mode: RandomPredictorMode) -> float:
    mode = RandomPredictorMode(mode)
    if mode is RandomPredictorMode.DEFAULT_HALF:
        return 0.5
    return n_pos / (n_pos + n_neg)


def random_outer_trial(n_pos: int, n_neg: int, mode: RandomPredictorMode,
                       rng: np.random.Generator) -> BinaryConfusionMatrix:
    """One random-prediction trial, drawing an independent coin for every sample."""
    if n_pos < 0 or n_neg < 0 or n_pos + n_neg == 0:
        raise ValueError("need a positive number of samples")
    p = positive_rate(n_pos, n_neg, mode)
    tp = int((rng.random(n_pos) < p).sum())
    fp = int((rng.random(n_neg) < p).sum())
    return BinaryConfusionMatrix(tp=tp, fn=n_pos - tp, fp=fp, tn=n_neg - fp)


def _binomial_from_uniform(u: np.ndarray, n: int, p: float) -> np.ndarray:
    """Inverse binomial CDF: smallest k with CDF(k) >= u."""
    if n == 0 or p == 0.0:
        return np.zeros_like(u, dtype=np.int64)
    if p == 1.0:
        return np.full_like(u, n, dtype=np.int64)
    cdf = np.cumsum(stats.binom.pmf(np.arange(n + 1), n, p))
    return np.minimum(np.searchsorted(cdf, u, side="left"), n).astype(np.int64)


def outer_metrics(tp, fn, fp, tn) -> dict[str, np.ndarray]:
    """F1, accuracy and balanced accuracy for arrays of binary counts.

    Matches :mod:`osreval.scores` element-wise: F1 is 0 when tp is 0 and
    empty classes are skipped in the balanced-accuracy mean.
    """
    tp, fn, fp, tn = (np.asarray(a, dtype=float) for a in (tp, fn, fp, tn))
    total = tp + fn + fp + tn
    with np.errstate(invalid="ignore", divide="ignore"):
        f1 = np.where(tp > 0, 2 * tp / (2 * tp + fp + fn), 0.0)
        acc = (tp + tn) / total
        tpr = np.where(tp + fn > 0, tp / (tp + fn), np.nan)
        tnr = np.where(fp + tn > 0, tn / (fp + tn), np.nan)
    bac = np.nanmean(np.stack([tpr, tnr]), axis=0)
    return {"f1": f1, "accuracy": acc, "balanced_accuracy": bac}


def simulate_cell(n_pos: int, n_neg: int, trials: int, mode: RandomPredictorMode, seed: int,
                  cell_index: int = 0) -> dict[str, np.ndarray]:
    """Per-trial metric values for one known/unknown sample configuration.

    Each trial's predicted-positive counts are drawn from a binomial through
    uniforms hashed from (seed, cell, trial, role), so a trial's outcome does
    not depend on which other trials or cells are run.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if n_pos < 0 or n_neg < 0 or n_pos + n_neg == 0:
        raise ValueError("need a positive number of samples")
    p = positive_rate(n_pos, n_neg, mode)
    t = np.arange(trials, dtype=np.uint64)
    u_pos = to_unit_interval(derive_seed_array(seed, ["random-baseline", cell_index], t, ["pos"]))
    u_neg = to_unit_interval(derive_seed_array(seed, ["random-baseline", cell_index], t, ["neg"]))
    tp = _binomial_from_uniform(u_pos, n_pos, p)
    fp = _binomial_from_uniform(u_neg, n_neg, p)
    return outer_metrics(tp, n_pos - tp, fp, n_neg - fp)


@dataclass(frozen=True)
class MetricSummary:
    mean: float
    std: float
    histogram: tuple[int, ...]

    @classmethod
    def from_values(cls, values: np.ndarray) -> "MetricSummary":
        hist, _ = np.histogram(values, bins=BIN_EDGES)
        return cls(float(np.mean(values)), float(np.std(values)), tuple(int(h) for h in hist))


@dataclass(frozen=True)
class CellSummary:
    n_kkc_classes: int
    n_uuc_classes: int
    n_pos: int
    n_neg: int
    trials: int
    metrics: dict[str, MetricSummary]

    @property
    def positive_fraction(self) -> float:
        return self.n_pos / (self.n_pos + self.n_neg)


@dataclass(frozen=True)
class SimulationReport:
    mode: RandomPredictorMode
    seed: int
    trials: int
    per_class_count: int
    cells: tuple[CellSummary, ...] = field(default=())

    def cell(self, n_kkc_classes: int, n_uuc_classes: int) -> CellSummary:
        for c in self.cells:
            if (c.n_kkc_classes, c.n_uuc_classes) == (n_kkc_classes, n_uuc_classes):
                return c
        raise KeyError((n_kkc_classes, n_uuc_classes))

    def to_dict(self) -> dict:
        return {
            "schema": SIMULATION_SCHEMA,
            "mode": self.mode.value,
            "seed": self.seed,
            "trials": self.trials,
            "per_class_count": self.per_class_count,
            "bin_edges": [float(x) for x in BIN_EDGES],
            "cells": [
                {
                    "n_kkc_classes": c.n_kkc_classes,
                    "n_uuc_classes": c.n_uuc_classes,
                    "n_pos": c.n_pos,
                    "n_neg": c.n_neg,
                    "openness": openness(c.n_kkc_classes, c.n_uuc_classes),
                    "trials": c.trials,
                    "metrics": {
                        name: {"mean": m.mean, "std": m.std, "histogram": list(m.histogram)}
                        for name, m in c.metrics.items()
                    },
                }
                for c in self.cells
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        """Long format: one row per cell x metric x bin."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n_kkc_classes", "n_uuc_classes", "metric", "bin_left", "bin_right", "count"])
        for c in self.cells:
            for name, m in c.metrics.items():
                for b, count in enumerate(m.histogram):
                    w.writerow([c.n_kkc_classes, c.n_uuc_classes, name,
                                f"{BIN_EDGES[b]:.2f}", f"{BIN_EDGES[b + 1]:.2f}", count])
        return buf.getvalue()


def random_baseline_study(grid: Sequence[tuple[int, int]] = DEFAULT_GRID, per_class_count: int = 20,
                          trials: int = 1000,
                          mode: RandomPredictorMode = RandomPredictorMode.DEFAULT_HALF,
                          seed: int = 0) -> SimulationReport:
    """Histogram F1, accuracy and balanced accuracy of random predictions per grid cell.

    Every class contributes ``per_class_count`` test samples; a cell
    ``(k, u)`` therefore has ``k * per_class_count`` known and
    ``u * per_class_count`` unknown samples.
    """
    mode = RandomPredictorMode(mode)
    if per_class_count < 1:
        raise ValueError("per_class_count must be at least 1")
    cells = []
    for ci, (k, u) in enumerate(grid):
        if k < 1 or u < 0:
            raise ValueError(f"invalid grid cell {(k, u)}")
        n_pos, n_neg = k * per_class_count, u * per_class_count
        values = simulate_cell(n_pos, n_neg, trials, mode, seed, ci)
        cells.append(CellSummary(k, u, n_pos, n_neg, trials,
                                 {m: MetricSummary.from_values(values[m]) for m in METRICS}))
    return SimulationReport(mode, int(seed), trials, per_class_count, tuple(cells))


def expected_prior_aware_accuracy(q: float) -> float:
    return q * q + (1 - q) * (1 - q)


# ---------------------------------------------------------------------------
# openness vs. sample imbalance

@dataclass(frozen=True)
class ImbalanceGridRow:
    n_kkc: int
    n_uuc: int
    openness: float
    kkc_test_samples: int
    uuc_test_samples: int

    @property
    def ratio_infinite(self) -> bool:
        return self.uuc_test_samples == 0

    @property
    def imbalance_ratio(self) -> float:
        if self.uuc_test_samples == 0:
            return math.inf
        return self.kkc_test_samples / self.uuc_test_samples


def imbalance_grid(kkc_per_class_test_count: int, uuc_per_class_test_count: int,
                   max_kkc: int, max_uuc: int, class_budget: int | None = None,
                   ) -> list[ImbalanceGridRow]:
    """Test-set known/unknown sample counts for every (n_kkc, n_uuc) in ``1..max``.

    ``class_budget`` restricts to ``n_kkc + n_uuc <= budget``, as when both
    sides are drawn from one dataset.
    """
    if kkc_per_class_test_count < 0 or uuc_per_class_test_count < 0:
        raise ValueError("per-class counts must be non-negative")
    rows = []
    for k in range(1, max_kkc + 1):
        for u in range(1, max_uuc + 1):
            if class_budget is not None and k + u > class_budget:
                continue
            rows.append(ImbalanceGridRow(k, u, openness(k, u),
                                         k * kkc_per_class_test_count,
                                         u * uuc_per_class_test_count))
    return rows


def imbalance_grid_csv(rows: Sequence[ImbalanceGridRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n_kkc", "n_uuc", "openness", "kkc_test_samples", "uuc_test_samples",
                "imbalance_ratio", "ratio_infinite"])
    for r in rows:
        ratio = "inf" if r.ratio_infinite else repr(r.imbalance_ratio)
        w.writerow([r.n_kkc, r.n_uuc, f"{r.openness:.6f}", r.kkc_test_samples,
                    r.uuc_test_samples, ratio, int(r.ratio_infinite)])
    return buf.getvalue()
