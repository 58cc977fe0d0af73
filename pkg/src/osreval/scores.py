"""The four open-set scores and the base metrics applied to them.

========== ================================================================
Inner      known samples only; rejected ones fall back to their closed-set
           prediction, so rejection never costs anything
Outer      binary known (positive) vs unknown (negative)
Halfpoint  known rows of the general matrix, UNKNOWN column included;
           false unknowns count as errors, the unknown row is zeroed
Overall    full general matrix, "unknown" treated as one more class
========== ================================================================
"""
from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np

from .core import (
    UNKNOWN,
    BinaryConfusionMatrix,
    ClassCatalog,
    GeneralConfusionMatrix,
    MissingClosedPred,
    OSREvalError,
    _as_record_set,
    build_general_matrix,
)


class NoSupport(OSREvalError):
    pass


class BaseMetric(str, enum.Enum):
    BALANCED_ACCURACY = "balanced-accuracy"
    ACCURACY = "accuracy"
    F1_BINARY = "f1"


# ---------------------------------------------------------------------------
# matrix derivations

def derive_inner_matrix(records, catalog: ClassCatalog) -> np.ndarray:
    """K x K matrix over known-class samples using the effective closed-set prediction.

    The effective prediction is ``open_pred`` when it names a known class and
    ``closed_pred`` otherwise.  Unknown-class samples are ignored.
    """
    rs = _as_record_set(records, catalog)
    k = catalog.n_kkc
    out = np.zeros((k, k), dtype=np.int64)
    for r in rs:
        if not catalog.is_known(r.true_label):
            continue
        pred = r.open_pred if r.open_pred != UNKNOWN else r.closed_pred
        if pred is None:
            raise MissingClosedPred(
                f"sample of class {r.true_label!r} was rejected but has no closed_pred or scores")
        out[catalog.index(r.true_label), catalog.index(pred)] += 1
    return out


def derive_outer_matrix(general: GeneralConfusionMatrix) -> BinaryConfusionMatrix:
    c, k = general.counts, general.k
    return BinaryConfusionMatrix(
        tp=int(c[:k, :k].sum()),
        fn=int(c[:k, k].sum()),
        fp=int(c[k, :k].sum()),
        tn=int(c[k, k]),
    )


def derive_halfpoint_matrix(general: GeneralConfusionMatrix) -> np.ndarray:
    out = np.array(general.counts, dtype=np.int64)
    out[general.k, :] = 0
    return out


def derive_overall_matrix(general: GeneralConfusionMatrix) -> np.ndarray:
    return np.array(general.counts, dtype=np.int64)


# ---------------------------------------------------------------------------
# base metrics

def _square(matrix) -> np.ndarray:
    if isinstance(matrix, BinaryConfusionMatrix):
        return matrix.as_array()
    if isinstance(matrix, GeneralConfusionMatrix):
        return np.asarray(matrix.counts)
    m = np.asarray(matrix)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return m


def per_class_recall(matrix) -> np.ndarray:
    """Row-wise recall; NaN where a row has no samples."""
    m = _square(matrix).astype(float)
    support = m.sum(axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(support > 0, np.diag(m) / support, np.nan)


def balanced_accuracy(matrix) -> float:
    """Mean recall over rows that have at least one sample.

    Empty rows (such as the zeroed unknown row of the Halfpoint matrix) are
    left out of the mean rather than counted as zero.
    """
    recall = per_class_recall(matrix)
    if np.isnan(recall).all():
        raise NoSupport("no row of the matrix has any samples")
    return float(np.nanmean(recall))


def excluded_rows(matrix) -> int:
    """Number of rows that :func:`balanced_accuracy` skips for lack of support."""
    return int(np.isnan(per_class_recall(matrix)).sum())


def accuracy(matrix) -> float:
    m = _square(matrix)
    total = m.sum()
    if total == 0:
        raise NoSupport("matrix is empty")
    return float(np.trace(m) / total)


class PRF(NamedTuple):
    precision: float
    recall: float
    f1: float
    degenerate: bool


def precision_recall_f1(matrix: BinaryConfusionMatrix) -> PRF:
    """Precision, recall and F1 of the known class; all zero (and flagged) when tp == 0."""
    tp, fn, fp = matrix.tp, matrix.fn, matrix.fp
    if tp == 0:
        return PRF(0.0, 0.0, 0.0, True)
    p = tp / (tp + fp)
    r = tp / (tp + fn)
    return PRF(p, r, 2 * p * r / (p + r), False)


def f1_binary(matrix: BinaryConfusionMatrix) -> float:
    return precision_recall_f1(matrix).f1


# ---------------------------------------------------------------------------
# suite

@dataclass(frozen=True)
class ScoreSuite:
    inner: float | None
    outer: float
    halfpoint: float | None
    overall: float | None
    base_metric: BaseMetric
    imbalance_ratio: float
    n_kkc_true: int
    n_uuc_true: int
    false_unknowns: int
    false_knowns: int
    notes: tuple[str, ...] = field(default=())

    def scores(self) -> dict[str, float | None]:
        return {"inner": self.inner, "outer": self.outer,
                "halfpoint": self.halfpoint, "overall": self.overall}

    def to_dict(self) -> dict:
        d = asdict(self)
        d["base_metric"] = self.base_metric.value
        d["imbalance_ratio"] = None if math.isinf(self.imbalance_ratio) else self.imbalance_ratio
        d["notes"] = list(self.notes)
        return d


def imbalance_ratio(n_kkc_true: int, n_uuc_true: int) -> float:
    """Known-to-unknown test sample ratio; ``inf`` without unknown samples."""
    if n_uuc_true == 0:
        return math.inf if n_kkc_true else math.nan
    return n_kkc_true / n_uuc_true


def score_suite(records, catalog: ClassCatalog,
                base_metric: BaseMetric = BaseMetric.BALANCED_ACCURACY) -> ScoreSuite:
    """Inner, Outer, Halfpoint and Overall under one base metric.

    With ``F1_BINARY`` only Outer is defined.  Inner is left undefined (with a
    note) if some rejected known sample lacks a closed-set fallback.
    """
    base_metric = BaseMetric(base_metric)
    rs = _as_record_set(records, catalog)
    if len(rs) == 0:
        raise NoSupport("no records to score")
    general = build_general_matrix(rs, catalog)
    outer_m = derive_outer_matrix(general)
    notes = []

    inner = halfpoint = overall = None
    if base_metric is BaseMetric.F1_BINARY:
        outer = f1_binary(outer_m)
        notes.append("F1 is defined on the binary known/unknown split only; "
                     "inner, halfpoint and overall are not computed")
    else:
        metric = balanced_accuracy if base_metric is BaseMetric.BALANCED_ACCURACY else accuracy
        outer = metric(outer_m)
        if catalog.n_kkc < 2:
            notes.append("a single known class: only the outer score is defined")
        else:
            if rs.n_kkc_true:
                halfpoint = metric(derive_halfpoint_matrix(general))
                try:
                    inner = metric(derive_inner_matrix(rs, catalog))
                except MissingClosedPred as exc:
                    notes.append(f"inner undefined: {exc}")
            else:
                notes.append("no known-class samples: inner and halfpoint undefined")
            overall = metric(derive_overall_matrix(general))

    return ScoreSuite(
        inner=inner, outer=outer, halfpoint=halfpoint, overall=overall,
        base_metric=base_metric,
        imbalance_ratio=imbalance_ratio(rs.n_kkc_true, rs.n_uuc_true),
        n_kkc_true=rs.n_kkc_true, n_uuc_true=rs.n_uuc_true,
        false_unknowns=general.false_unknowns, false_knowns=general.false_knowns,
        notes=tuple(notes),
    )
