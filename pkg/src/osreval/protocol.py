"""Openness and seeded known/unknown split plans.

Plans are pure functions of their inputs and seed.  Every entry draws its
classes from its own sub-seed ``derive_seed(seed, config_index, repetition,
role)`` (see :mod:`osreval._seeding`), so entries are independent of the
order they are generated in.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from ._seeding import SplitMix64Stream, derive_seed
from .core import OSREvalError

PLAN_SCHEMA = "osreval/split-plan/1"


class InvalidCount(OSREvalError):
    pass


class InsufficientClasses(OSREvalError):
    pass


class Protocol(str, enum.Enum):
    HOLDOUT = "holdout"
    OUTLIER = "outlier"


def openness(n_kkc: int, n_uuc: int) -> float:
    """Openness of a problem with ``n_kkc`` training and ``n_kkc + n_uuc`` test classes.

    ``1 - sqrt(2 * n_train / (n_train + n_test))``; 0 for a closed problem
    and strictly below 1 otherwise.
    """
    if int(n_kkc) != n_kkc or int(n_uuc) != n_uuc:
        raise InvalidCount("class counts must be integers")
    if n_kkc < 1:
        raise InvalidCount(f"n_kkc must be at least 1, got {n_kkc}")
    if n_uuc < 0:
        raise InvalidCount(f"n_uuc must be non-negative, got {n_uuc}")
    if n_uuc == 0:
        return 0.0
    n_test = n_kkc + n_uuc
    return 1.0 - math.sqrt(2 * n_kkc / (n_kkc + n_test))


@dataclass(frozen=True, order=True)
class OpennessConfig:
    n_kkc: int
    n_uuc: int

    @property
    def openness(self) -> float:
        return openness(self.n_kkc, self.n_uuc)

    def to_dict(self) -> dict:
        return {"n_kkc": self.n_kkc, "n_uuc": self.n_uuc, "openness": self.openness}


def _as_config(c) -> OpennessConfig:
    if isinstance(c, OpennessConfig):
        return c
    n_kkc, n_uuc = c
    openness(n_kkc, n_uuc)  # validates
    return OpennessConfig(int(n_kkc), int(n_uuc))


def enumerate_configs(max_kkc: int | None = None, max_uuc: int | None = None,
                      dataset_class_budget: int | None = None) -> list[OpennessConfig]:
    """All (n_kkc, n_uuc) pairs within bounds, sorted by openness then n_kkc.

    Without a budget this is a grid starting at 2 on both axes.  With
    ``dataset_class_budget`` (one dataset split into known and unknown
    classes) both counts start at 1 and ``n_kkc + n_uuc`` may not exceed the
    budget; missing bounds default to ``budget - 1``.
    """
    if dataset_class_budget is None:
        if max_kkc is None or max_uuc is None:
            raise InvalidCount("max_kkc and max_uuc are required without a class budget")
        lo = 2
    else:
        lo = 1
        max_kkc = dataset_class_budget - 1 if max_kkc is None else max_kkc
        max_uuc = dataset_class_budget - 1 if max_uuc is None else max_uuc
    out = [
        OpennessConfig(k, u)
        for k in range(lo, max_kkc + 1)
        for u in range(lo, max_uuc + 1)
        if dataset_class_budget is None or k + u <= dataset_class_budget
    ]
    out.sort(key=lambda c: (c.openness, c.n_kkc))
    return out


@dataclass(frozen=True)
class SplitEntry:
    config: OpennessConfig
    config_index: int
    repetition: int
    kkc_labels: tuple[str, ...]
    uuc_labels: tuple[str, ...]
    fold_seed: int
    fold_assignments: Mapping[str, tuple[int, ...]] | None = None

    def assign_folds(self, y: Sequence[str], folds: int) -> np.ndarray:
        """Fold index for every sample label in ``y``, stratified per class.

        Samples of classes outside this entry get ``-1``.  Within a class the
        sample order is shuffled with this entry's fold sub-seed and dealt
        round-robin, so each class is spread evenly over the folds.
        """
        y = [str(v) for v in y]
        out = np.full(len(y), -1, dtype=np.int64)
        by_class: dict[str, list[int]] = {}
        for i, label in enumerate(y):
            by_class.setdefault(label, []).append(i)
        for label in self.kkc_labels + self.uuc_labels:
            idx = by_class.get(label, [])
            fold_of = _deal_folds(len(idx), folds, derive_seed(self.fold_seed, label))
            out[idx] = fold_of
        return out

    def train_test_indices(self, y: Sequence[str], folds: int, fold: int):
        """(train, test) sample indices for one fold.

        Training keeps known classes only; testing takes every entry class.
        """
        assignment = self.assign_folds(y, folds)
        known = np.isin(np.asarray([str(v) for v in y]), list(self.kkc_labels))
        in_entry = assignment >= 0
        train = np.flatnonzero(in_entry & known & (assignment != fold))
        test = np.flatnonzero(in_entry & (assignment == fold))
        return train, test

    def to_dict(self) -> dict:
        return {
            "config_index": self.config_index,
            "repetition": self.repetition,
            "n_kkc": self.config.n_kkc,
            "n_uuc": self.config.n_uuc,
            "openness": self.config.openness,
            "kkc_labels": list(self.kkc_labels),
            "uuc_labels": list(self.uuc_labels),
            "fold_seed": self.fold_seed,
            "fold_assignments": None if self.fold_assignments is None else {
                k: list(v) for k, v in self.fold_assignments.items()},
        }


def _deal_folds(n: int, folds: int, seed: int) -> list[int]:
    order = list(range(n))
    SplitMix64Stream(seed).shuffle(order)
    out = [0] * n
    for pos, i in enumerate(order):
        out[i] = pos % folds
    return out


@dataclass(frozen=True)
class SplitPlan:
    protocol: Protocol
    seed: int
    folds: int
    repetitions: int
    entries: tuple[SplitEntry, ...] = field(default=())

    def __len__(self):
        return len(self.entries)

    def to_dict(self) -> dict:
        return {
            "schema": PLAN_SCHEMA,
            "protocol": self.protocol.value,
            "seed": self.seed,
            "folds": self.folds,
            "repetitions": self.repetitions,
            "entries": [e.to_dict() for e in self.entries],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: Mapping) -> "SplitPlan":
        if d.get("schema") != PLAN_SCHEMA:
            raise ValueError(f"not a split plan document (schema={d.get('schema')!r})")
        entries = tuple(
            SplitEntry(
                config=OpennessConfig(e["n_kkc"], e["n_uuc"]),
                config_index=e["config_index"],
                repetition=e["repetition"],
                kkc_labels=tuple(e["kkc_labels"]),
                uuc_labels=tuple(e["uuc_labels"]),
                fold_seed=e["fold_seed"],
                fold_assignments=None if e["fold_assignments"] is None else {
                    k: tuple(v) for k, v in e["fold_assignments"].items()},
            )
            for e in d["entries"]
        )
        return cls(Protocol(d["protocol"]), d["seed"], d["folds"], d["repetitions"], entries)


def _check_plan_args(repetitions: int, folds: int, seed: int):
    if repetitions < 1:
        raise InvalidCount("repetitions must be positive")
    if folds < 1:
        raise InvalidCount("folds must be positive")
    if not 0 <= int(seed) < 2 ** 64:
        raise InvalidCount("seed must be a 64-bit unsigned integer")


def _in_source_order(chosen: list[str], source: Sequence[str]) -> tuple[str, ...]:
    pos = {c: i for i, c in enumerate(source)}
    return tuple(sorted(chosen, key=pos.__getitem__))


def _make_entry(protocol, seed, ci, rep, cfg, kkc, uuc, folds, class_sizes) -> SplitEntry:
    fold_seed = derive_seed(seed, ci, rep, f"{protocol.value}:folds")
    assignments = None
    if class_sizes is not None:
        assignments = {
            label: tuple(_deal_folds(int(class_sizes[label]), folds, derive_seed(fold_seed, label)))
            for label in kkc + uuc
        }
    return SplitEntry(cfg, ci, rep, kkc, uuc, fold_seed, assignments)


def holdout_plan(class_labels: Sequence[str], configs, repetitions: int = 5, folds: int = 2,
                 seed: int = 0, class_sizes: Mapping[str, int] | None = None) -> SplitPlan:
    """Disjoint known/unknown class draws from a single dataset.

    For every config and repetition, ``n_kkc + n_uuc`` classes are drawn
    uniformly without replacement; the first ``n_kkc`` become known.  If
    ``class_sizes`` is given, per-sample fold indices are stored in the plan.
    """
    labels = [str(c) for c in class_labels]
    if len(set(labels)) != len(labels):
        raise InsufficientClasses("class labels must be distinct")
    _check_plan_args(repetitions, folds, seed)
    configs = [_as_config(c) for c in configs]
    entries = []
    for ci, cfg in enumerate(configs):
        if cfg.n_kkc + cfg.n_uuc > len(labels):
            raise InsufficientClasses(
                f"config {cfg.n_kkc}:{cfg.n_uuc} needs {cfg.n_kkc + cfg.n_uuc} classes, "
                f"only {len(labels)} available")
        for rep in range(repetitions):
            stream = SplitMix64Stream(derive_seed(seed, ci, rep, "holdout:classes"))
            drawn = stream.sample(labels, cfg.n_kkc + cfg.n_uuc)
            kkc = _in_source_order(drawn[:cfg.n_kkc], labels)
            uuc = _in_source_order(drawn[cfg.n_kkc:], labels)
            entries.append(_make_entry(Protocol.HOLDOUT, seed, ci, rep, cfg, kkc, uuc, folds,
                                       class_sizes))
    return SplitPlan(Protocol.HOLDOUT, int(seed), folds, repetitions, tuple(entries))


def outlier_plan(kkc_source_labels: Sequence[str], uuc_source_labels: Sequence[str], configs,
                 repetitions: int = 5, folds: int = 2, seed: int = 0,
                 class_sizes: Mapping[str, int] | None = None) -> SplitPlan:
    """Known classes from one dataset, unknown classes from another.

    The two label lists must not share identifiers; prefix them
    (``"cifar:3"``, ``"svhn:3"``) when the datasets reuse names.
    """
    src_a = [str(c) for c in kkc_source_labels]
    src_b = [str(c) for c in uuc_source_labels]
    if len(set(src_a)) != len(src_a) or len(set(src_b)) != len(src_b):
        raise InsufficientClasses("class labels must be distinct within each source")
    shared = set(src_a) & set(src_b)
    if shared:
        raise InsufficientClasses(
            f"source datasets share labels {sorted(shared)}; prefix them to keep them apart")
    _check_plan_args(repetitions, folds, seed)
    configs = [_as_config(c) for c in configs]
    entries = []
    for ci, cfg in enumerate(configs):
        if cfg.n_kkc > len(src_a) or cfg.n_uuc > len(src_b):
            raise InsufficientClasses(
                f"config {cfg.n_kkc}:{cfg.n_uuc} exceeds sources of {len(src_a)} and {len(src_b)} "
                "classes")
        for rep in range(repetitions):
            sa = SplitMix64Stream(derive_seed(seed, ci, rep, "outlier:kkc"))
            sb = SplitMix64Stream(derive_seed(seed, ci, rep, "outlier:uuc"))
            kkc = _in_source_order(sa.sample(src_a, cfg.n_kkc), src_a)
            uuc = _in_source_order(sb.sample(src_b, cfg.n_uuc), src_b)
            entries.append(_make_entry(Protocol.OUTLIER, seed, ci, rep, cfg, kkc, uuc, folds,
                                       class_sizes))
    return SplitPlan(Protocol.OUTLIER, int(seed), folds, repetitions, tuple(entries))
