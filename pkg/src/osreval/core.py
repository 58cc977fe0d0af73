"""Domain types and general confusion matrix construction.

Rows of the general matrix are true classes, columns are open-set
predictions.  Index ``K`` (the last row/column) aggregates every unknown
class on the truth side and the UNKNOWN verdict on the prediction side.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

UNKNOWN = "__unknown__"


class OSREvalError(ValueError):
    """Base class for toolkit errors."""


class UnknownLabel(OSREvalError):
    pass


class UucPrediction(OSREvalError):
    pass


class ScoreLengthMismatch(OSREvalError):
    pass


class MissingClosedPred(OSREvalError):
    pass


class InvalidCatalog(OSREvalError):
    pass


@dataclass(frozen=True)
class ClassCatalog:
    """Known (KKC) and unknown (UUC) class identifiers of one recognition problem."""

    kkc_labels: tuple[str, ...]
    uuc_labels: tuple[str, ...] = ()

    def __post_init__(self):
        kkc = tuple(str(c) for c in self.kkc_labels)
        uuc = tuple(str(c) for c in self.uuc_labels)
        object.__setattr__(self, "kkc_labels", kkc)
        object.__setattr__(self, "uuc_labels", uuc)
        if not kkc:
            raise InvalidCatalog("kkc_labels must not be empty")
        for name, labels in (("kkc_labels", kkc), ("uuc_labels", uuc)):
            dup = [c for c, n in Counter(labels).items() if n > 1]
            if dup:
                raise InvalidCatalog(f"duplicate labels in {name}: {dup}")
            if UNKNOWN in labels:
                raise InvalidCatalog(f"{UNKNOWN!r} is reserved and cannot be a class label")
        shared = set(kkc) & set(uuc)
        if shared:
            raise InvalidCatalog(f"labels are both known and unknown: {sorted(shared)}")
        object.__setattr__(self, "_kkc_index", {c: i for i, c in enumerate(kkc)})
        object.__setattr__(self, "_uuc_set", frozenset(uuc))

    @property
    def n_kkc(self) -> int:
        return len(self.kkc_labels)

    @property
    def n_uuc(self) -> int:
        return len(self.uuc_labels)

    def is_known(self, label: str) -> bool:
        return label in self._kkc_index

    def is_unknown_class(self, label: str) -> bool:
        return label in self._uuc_set

    def index(self, label: str) -> int:
        """Matrix index of a label; every UUC label and UNKNOWN map to ``K``."""
        if label in self._kkc_index:
            return self._kkc_index[label]
        if label == UNKNOWN or label in self._uuc_set:
            return self.n_kkc
        raise UnknownLabel(f"label {label!r} is not in the catalog")


@dataclass(frozen=True)
class PredictionRecord:
    """One test sample.

    ``open_pred`` is the open-set decision (a KKC label or ``UNKNOWN``);
    ``closed_pred`` is the best KKC guess, used when the sample was rejected.
    """

    true_label: str
    open_pred: str
    closed_pred: str | None = None
    scores: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.scores is not None:
            object.__setattr__(self, "scores", tuple(float(s) for s in self.scores))


@dataclass(frozen=True)
class RecordSet:
    """Records checked against a catalog, with ``closed_pred`` materialized from scores."""

    records: tuple[PredictionRecord, ...]
    catalog: ClassCatalog
    n_kkc_true: int
    n_uuc_true: int
    missing_closed_pred: int = 0

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)


@dataclass(frozen=True)
class GeneralConfusionMatrix:
    counts: np.ndarray
    kkc_labels: tuple[str, ...]

    def __post_init__(self):
        counts = np.array(self.counts, dtype=np.int64)
        k = len(self.kkc_labels)
        if counts.shape != (k + 1, k + 1):
            raise ValueError(f"expected a {(k + 1, k + 1)} matrix, got {counts.shape}")
        if (counts < 0).any():
            raise ValueError("counts must be non-negative")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "kkc_labels", tuple(self.kkc_labels))

    @property
    def k(self) -> int:
        return len(self.kkc_labels)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def false_unknowns(self) -> int:
        """KKC samples rejected as unknown."""
        return int(self.counts[: self.k, self.k].sum())

    @property
    def false_knowns(self) -> int:
        """UUC samples accepted as some known class."""
        return int(self.counts[self.k, : self.k].sum())


@dataclass(frozen=True)
class BinaryConfusionMatrix:
    """Known-vs-unknown dichotomy; KKC is the positive class."""

    tp: int
    fn: int
    fp: int
    tn: int

    def __post_init__(self):
        for name in ("tp", "fn", "fp", "tn"):
            v = int(getattr(self, name))
            if v < 0:
                raise ValueError(f"{name} must be non-negative")
            object.__setattr__(self, name, v)

    @property
    def total(self) -> int:
        return self.tp + self.fn + self.fp + self.tn

    def as_array(self) -> np.ndarray:
        """2x2 view with the positive (known) class first: [[tp, fn], [fp, tn]]."""
        return np.array([[self.tp, self.fn], [self.fp, self.tn]], dtype=np.int64)


def argmax_label(scores: Sequence[float], kkc_labels: Sequence[str]) -> str:
    # np.argmax returns the first maximum, i.e. the lowest index on ties
    return kkc_labels[int(np.argmax(np.asarray(scores, dtype=float)))]


def validate_records(records: Iterable[PredictionRecord], catalog: ClassCatalog) -> RecordSet:
    """Check records against ``catalog`` and fill ``closed_pred`` from scores.

    Rejected known samples with neither ``closed_pred`` nor ``scores`` are
    accepted and counted in ``missing_closed_pred``; only the Inner
    derivation needs their fallback.
    """
    out = []
    n_kkc = n_uuc = missing = 0
    for i, rec in enumerate(records):
        if catalog.is_known(rec.true_label):
            n_kkc += 1
        elif catalog.is_unknown_class(rec.true_label):
            n_uuc += 1
        else:
            raise UnknownLabel(f"record {i}: true label {rec.true_label!r} is not in the catalog")

        if catalog.is_unknown_class(rec.open_pred):
            raise UucPrediction(f"record {i}: open_pred names unknown class {rec.open_pred!r}")
        if rec.open_pred != UNKNOWN and not catalog.is_known(rec.open_pred):
            raise UnknownLabel(f"record {i}: open_pred {rec.open_pred!r} is not a known class")

        closed = rec.closed_pred
        if closed is not None and not catalog.is_known(closed):
            if catalog.is_unknown_class(closed):
                raise UucPrediction(f"record {i}: closed_pred names unknown class {closed!r}")
            raise UnknownLabel(f"record {i}: closed_pred {closed!r} is not a known class")
        if rec.scores is not None:
            if len(rec.scores) != catalog.n_kkc:
                raise ScoreLengthMismatch(
                    f"record {i}: {len(rec.scores)} scores for {catalog.n_kkc} known classes")
            if any(not np.isfinite(s) or s < 0 for s in rec.scores):
                raise OSREvalError(f"record {i}: scores must be finite and non-negative")
            if closed is None:
                closed = argmax_label(rec.scores, catalog.kkc_labels)
        if closed is None and rec.open_pred == UNKNOWN and catalog.is_known(rec.true_label):
            missing += 1
        if closed is not rec.closed_pred:
            rec = PredictionRecord(rec.true_label, rec.open_pred, closed, rec.scores)
        out.append(rec)
    return RecordSet(tuple(out), catalog, n_kkc, n_uuc, missing)


def _as_record_set(records, catalog: ClassCatalog) -> RecordSet:
    if isinstance(records, RecordSet) and records.catalog == catalog:
        return records
    return validate_records(records, catalog)


def build_general_matrix(records, catalog: ClassCatalog) -> GeneralConfusionMatrix:
    """Count (true class, open-set prediction) pairs into a (K+1)x(K+1) matrix."""
    rs = _as_record_set(records, catalog)
    k = catalog.n_kkc
    if len(rs) == 0:
        return GeneralConfusionMatrix(np.zeros((k + 1, k + 1), dtype=np.int64), catalog.kkc_labels)
    rows = np.fromiter((catalog.index(r.true_label) for r in rs), dtype=np.int64, count=len(rs))
    cols = np.fromiter((catalog.index(r.open_pred) for r in rs), dtype=np.int64, count=len(rs))
    counts = np.bincount(rows * (k + 1) + cols, minlength=(k + 1) ** 2).reshape(k + 1, k + 1)
    return GeneralConfusionMatrix(counts, catalog.kkc_labels)


def records_from_matrix(general: GeneralConfusionMatrix, uuc_labels: Sequence[str] = ("unknown_0",),
                        ) -> list[PredictionRecord]:
    """Expand a general matrix back into records, one per counted sample.

    UUC-true samples are spread round-robin over ``uuc_labels``.  ``closed_pred``
    equals ``open_pred`` for accepted samples and is left empty for rejected ones.
    """
    labels = list(general.kkc_labels)
    k = general.k
    out = []
    uuc_i = 0
    for i in range(k + 1):
        for j in range(k + 1):
            pred = labels[j] if j < k else UNKNOWN
            closed = pred if j < k else None
            for _ in range(int(general.counts[i, j])):
                if i < k:
                    true = labels[i]
                else:
                    true = uuc_labels[uuc_i % len(uuc_labels)]
                    uuc_i += 1
                out.append(PredictionRecord(true, pred, closed))
    return out


def per_uuc_class_breakdown(records, catalog: ClassCatalog) -> dict[str, dict[str, int]]:
    """Diagnostic: for each UUC label, how often it was rejected vs accepted as known."""
    rs = _as_record_set(records, catalog)
    out = {c: {"rejected": 0, "accepted": 0} for c in catalog.uuc_labels}
    for r in rs:
        if catalog.is_unknown_class(r.true_label):
            out[r.true_label]["rejected" if r.open_pred == UNKNOWN else "accepted"] += 1
    return out
