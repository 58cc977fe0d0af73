"""Prediction file readers/writers and evaluation report assembly.

Prediction files
----------------
JSONL, one object per line::

    {"true": "cat", "open_pred": "__unknown__", "closed_pred": "dog", "scores": [0.4, 0.6]}

``closed_pred`` and ``scores`` are optional.  The catalog comes from a
sidecar JSON file (``{"kkc": [...], "uuc": [...]}``) or from an inline
first line ``{"catalog": {"kkc": [...], "uuc": [...]}}``.

CSV with header ``true,open_pred,closed_pred,score_0,...,score_{K-1}``
(score columns optional, empty ``closed_pred`` means absent); CSV files
always need the sidecar catalog.
"""
from __future__ import annotations

import csv
import json
import math
import statistics
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from . import __version__
from .core import UNKNOWN, ClassCatalog, InvalidCatalog, OSREvalError, PredictionRecord
from .scores import BaseMetric, ScoreSuite

REPORT_SCHEMA = "osreval/evaluation-report/1"
SCORE_NAMES = ("inner", "outer", "halfpoint", "overall")


class RecordFormatError(OSREvalError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def catalog_from_dict(d: Mapping) -> ClassCatalog:
    kkc = d.get("kkc", d.get("kkc_labels"))
    uuc = d.get("uuc", d.get("uuc_labels", []))
    if not isinstance(kkc, list) or not isinstance(uuc, list):
        raise InvalidCatalog("catalog needs a 'kkc' list and an optional 'uuc' list")
    return ClassCatalog(tuple(kkc), tuple(uuc))


def catalog_to_dict(catalog: ClassCatalog) -> dict:
    return {"kkc": list(catalog.kkc_labels), "uuc": list(catalog.uuc_labels)}


def read_catalog(path) -> ClassCatalog:
    with open(path, encoding="utf-8") as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidCatalog(f"{path}: {exc}") from None
    return catalog_from_dict(d)


def _label(v, line: int, field: str, optional: bool = False) -> str | None:
    if v is None and optional:
        return None
    if not isinstance(v, str) or not v:
        raise RecordFormatError(line, f"{field!r} must be a non-empty string")
    return v


def _record_from_obj(obj, line: int) -> PredictionRecord:
    if not isinstance(obj, dict):
        raise RecordFormatError(line, "expected a JSON object")
    extra = set(obj) - {"true", "open_pred", "closed_pred", "scores"}
    if extra:
        raise RecordFormatError(line, f"unexpected fields {sorted(extra)}")
    if "true" not in obj or "open_pred" not in obj:
        raise RecordFormatError(line, "'true' and 'open_pred' are required")
    true = _label(obj["true"], line, "true")
    if true == UNKNOWN:
        raise RecordFormatError(line, f"{UNKNOWN!r} cannot be a true label")
    closed = _label(obj.get("closed_pred"), line, "closed_pred", optional=True)
    scores = obj.get("scores")
    if scores is not None:
        if not isinstance(scores, list) or not all(
                isinstance(s, (int, float)) and not isinstance(s, bool) for s in scores):
            raise RecordFormatError(line, "'scores' must be an array of numbers")
        if any(not math.isfinite(s) or s < 0 for s in scores):
            raise RecordFormatError(line, "'scores' must be finite and non-negative")
    return PredictionRecord(true, _label(obj["open_pred"], line, "open_pred"), closed,
                            None if scores is None else tuple(scores))


def _check_against(rec: PredictionRecord, catalog: ClassCatalog, line: int) -> None:
    # line-numbered version of the checks in core.validate_records
    if not (catalog.is_known(rec.true_label) or catalog.is_unknown_class(rec.true_label)):
        raise RecordFormatError(line, f"true label {rec.true_label!r} is not in the catalog")
    if rec.open_pred != UNKNOWN and not catalog.is_known(rec.open_pred):
        raise RecordFormatError(line, f"open_pred {rec.open_pred!r} is not a known class or "
                                      f"{UNKNOWN!r}")
    if rec.closed_pred is not None and not catalog.is_known(rec.closed_pred):
        raise RecordFormatError(line, f"closed_pred {rec.closed_pred!r} is not a known class")
    if rec.scores is not None and len(rec.scores) != catalog.n_kkc:
        raise RecordFormatError(line, f"{len(rec.scores)} scores for {catalog.n_kkc} known classes")


def read_predictions_jsonl(path, catalog: ClassCatalog | None = None,
                           ) -> tuple[list[PredictionRecord], ClassCatalog]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise RecordFormatError(lineno, f"invalid JSON ({exc.msg})") from None
            if isinstance(obj, dict) and "catalog" in obj:
                if records:
                    raise RecordFormatError(lineno, "inline catalog must precede the records")
                inline = catalog_from_dict(obj["catalog"])
                if catalog is not None and inline != catalog:
                    raise RecordFormatError(lineno, "inline catalog disagrees with the sidecar")
                catalog = inline
                continue
            if catalog is None:
                raise RecordFormatError(lineno, "no catalog: pass a sidecar or put "
                                                "{\"catalog\": ...} on the first line")
            rec = _record_from_obj(obj, lineno)
            _check_against(rec, catalog, lineno)
            records.append(rec)
    if catalog is None:
        raise RecordFormatError(0, "no catalog: pass a sidecar or declare one inline")
    if not records:
        raise RecordFormatError(0, "prediction file contains no records")
    return records, catalog


def read_predictions_csv(path, catalog: ClassCatalog) -> list[PredictionRecord]:
    records = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise RecordFormatError(1, "empty file") from None
        if header[:3] != ["true", "open_pred", "closed_pred"]:
            raise RecordFormatError(1, "header must start with true,open_pred,closed_pred")
        score_cols = header[3:]
        if score_cols and score_cols != [f"score_{j}" for j in range(catalog.n_kkc)]:
            raise RecordFormatError(1, f"expected score_0..score_{catalog.n_kkc - 1} columns")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise RecordFormatError(lineno, f"expected {len(header)} fields, got {len(row)}")
            obj = {"true": row[0], "open_pred": row[1], "closed_pred": row[2] or None}
            raw_scores = row[3:]
            if any(raw_scores):
                if not all(raw_scores):
                    raise RecordFormatError(lineno, "score columns must be all filled or all empty")
                try:
                    obj["scores"] = [float(v) for v in raw_scores]
                except ValueError:
                    raise RecordFormatError(lineno, "scores must be numbers") from None
            rec = _record_from_obj(obj, lineno)
            _check_against(rec, catalog, lineno)
            records.append(rec)
    if not records:
        raise RecordFormatError(0, "prediction file contains no records")
    return records


def read_predictions(path, catalog: ClassCatalog | None = None,
                     ) -> tuple[list[PredictionRecord], ClassCatalog]:
    """Read a ``.csv`` or JSONL prediction file (format chosen by suffix)."""
    if Path(path).suffix.lower() == ".csv":
        if catalog is None:
            raise RecordFormatError(0, "CSV prediction files need a sidecar catalog")
        return read_predictions_csv(path, catalog), catalog
    return read_predictions_jsonl(path, catalog)


def _record_obj(r: PredictionRecord) -> dict:
    obj = {"true": r.true_label, "open_pred": r.open_pred}
    if r.closed_pred is not None:
        obj["closed_pred"] = r.closed_pred
    if r.scores is not None:
        obj["scores"] = list(r.scores)
    return obj


def write_predictions_jsonl(records: Iterable[PredictionRecord], path,
                            catalog: ClassCatalog | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        if catalog is not None:
            fh.write(json.dumps({"catalog": catalog_to_dict(catalog)}, sort_keys=True) + "\n")
        for r in records:
            fh.write(json.dumps(_record_obj(r), sort_keys=True) + "\n")


def write_predictions_csv(records: Sequence[PredictionRecord], path, catalog: ClassCatalog) -> None:
    with_scores = any(r.scores is not None for r in records)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["true", "open_pred", "closed_pred"]
                   + ([f"score_{j}" for j in range(catalog.n_kkc)] if with_scores else []))
        for r in records:
            row = [r.true_label, r.open_pred, r.closed_pred or ""]
            if with_scores:
                row += [repr(s) for s in r.scores] if r.scores is not None else [""] * catalog.n_kkc
            w.writerow(row)


# ---------------------------------------------------------------------------
# reports

@dataclass(frozen=True)
class RunResult:
    """One scored evaluation run (a fold of a plan entry, or a single file)."""

    suite: ScoreSuite
    n_kkc: int
    n_uuc: int
    config_index: int | None = None
    repetition: int | None = None
    fold: int | None = None
    openness: float | None = None
    extra: Mapping | None = None

    def to_dict(self) -> dict:
        s = self.suite.to_dict()
        d = {
            "config_index": self.config_index,
            "repetition": self.repetition,
            "fold": self.fold,
            "n_kkc": self.n_kkc,
            "n_uuc": self.n_uuc,
            "openness": self.openness,
            "scores": {k: s[k] for k in SCORE_NAMES},
            "diagnostics": {
                "imbalance_ratio": s["imbalance_ratio"],
                "ratio_infinite": math.isinf(self.suite.imbalance_ratio),
                "n_kkc_true": s["n_kkc_true"],
                "n_uuc_true": s["n_uuc_true"],
                "false_unknowns": s["false_unknowns"],
                "false_knowns": s["false_knowns"],
            },
            "notes": s["notes"],
        }
        if self.extra:
            d["extra"] = dict(self.extra)
        return d


def _mean_std(values: list[float | None]) -> tuple[float | None, float | None]:
    vals = [v for v in values if v is not None]
    if not vals or len(vals) != len(values):
        return None, None
    return statistics.fmean(vals), statistics.pstdev(vals)


def aggregate_runs(runs: Sequence[RunResult]) -> list[dict]:
    """Mean and population std over repetitions, per configuration.

    Folds of one repetition are averaged first, so each repetition counts once.
    A score is reported as null if any repetition left it undefined.
    """
    groups: dict[tuple, dict[int | None, list[RunResult]]] = {}
    for r in runs:
        groups.setdefault((r.config_index, r.n_kkc, r.n_uuc), {}).setdefault(r.repetition, []).append(r)
    out = []
    for (ci, n_kkc, n_uuc), reps in sorted(groups.items(), key=lambda kv: (kv[0][0] is None, kv[0])):
        per_rep = {name: [] for name in SCORE_NAMES}
        ratios = []
        for rep_runs in reps.values():
            for name in SCORE_NAMES:
                vals = [getattr(r.suite, name) for r in rep_runs]
                per_rep[name].append(None if None in vals else statistics.fmean(vals))
            ratios.extend(r.suite.imbalance_ratio for r in rep_runs)
        entry = {
            "config_index": ci,
            "n_kkc": n_kkc,
            "n_uuc": n_uuc,
            "openness": next(iter(reps.values()))[0].openness,
            "repetitions": len(reps),
            "mean": {},
            "std": {},
            "imbalance_ratio_mean": (None if any(math.isinf(x) for x in ratios)
                                     else statistics.fmean(ratios)),
        }
        for name in SCORE_NAMES:
            entry["mean"][name], entry["std"][name] = _mean_std(per_rep[name])
        out.append(entry)
    return out


def build_report(runs: Sequence[RunResult], base_metric: BaseMetric, seed: int | None = None,
                 catalog: ClassCatalog | None = None, plan: Mapping | None = None) -> dict:
    d = {
        "schema": REPORT_SCHEMA,
        "tool_version": __version__,
        "base_metric": BaseMetric(base_metric).value,
        "seed": seed,
        "catalog": None,
        "runs": [r.to_dict() for r in runs],
        "aggregate": aggregate_runs(runs),
    }
    if catalog is not None:
        from .protocol import openness

        d["catalog"] = {
            "kkc_labels": list(catalog.kkc_labels),
            "uuc_labels": list(catalog.uuc_labels),
            "n_kkc": catalog.n_kkc,
            "n_uuc": catalog.n_uuc,
            "openness": openness(catalog.n_kkc, catalog.n_uuc),
        }
    if plan is not None:
        d["plan"] = dict(plan)
    return d


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"
