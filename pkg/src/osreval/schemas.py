"""JSON Schemas (draft 2020-12) for every document the toolkit writes.

Each document carries its schema identifier in a top-level ``"schema"`` field.
"""
from .formats import REPORT_SCHEMA
from .protocol import PLAN_SCHEMA
from .simulate import N_BINS, SIMULATION_SCHEMA

_nullable_unit = {"type": ["number", "null"], "minimum": 0, "maximum": 1}
_scores = {
    "type": "object",
    "required": ["inner", "outer", "halfpoint", "overall"],
    "properties": {k: _nullable_unit for k in ("inner", "outer", "halfpoint", "overall")},
    "additionalProperties": False,
}

EVALUATION_REPORT = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "$id": REPORT_SCHEMA,
    "type": "object",
    "required": ["schema", "tool_version", "base_metric", "seed", "catalog", "runs", "aggregate"],
    "properties": {
        "schema": {"const": REPORT_SCHEMA},
        "tool_version": {"type": "string"},
        "base_metric": {"enum": ["balanced-accuracy", "accuracy", "f1"]},
        "seed": {"type": ["integer", "null"], "minimum": 0},
        "catalog": {
            "type": ["object", "null"],
            "required": ["kkc_labels", "uuc_labels", "n_kkc", "n_uuc", "openness"],
        },
        "plan": {"type": "object"},
        "runs": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["n_kkc", "n_uuc", "openness", "scores", "diagnostics", "notes"],
                "properties": {
                    "scores": _scores,
                    "diagnostics": {
                        "type": "object",
                        "required": ["imbalance_ratio", "ratio_infinite", "n_kkc_true",
                                     "n_uuc_true", "false_unknowns", "false_knowns"],
                        "properties": {
                            "imbalance_ratio": {"type": ["number", "null"], "minimum": 0},
                            "ratio_infinite": {"type": "boolean"},
                            "n_kkc_true": {"type": "integer", "minimum": 0},
                            "n_uuc_true": {"type": "integer", "minimum": 0},
                            "false_unknowns": {"type": "integer", "minimum": 0},
                            "false_knowns": {"type": "integer", "minimum": 0},
                        },
                    },
                    "notes": {"type": "array", "items": {"type": "string"}},
                },
            },
        },
        "aggregate": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["n_kkc", "n_uuc", "repetitions", "mean", "std",
                             "imbalance_ratio_mean"],
                "properties": {"mean": _scores, "std": {"type": "object"}},
            },
        },
    },
}

SPLIT_PLAN = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "$id": PLAN_SCHEMA,
    "type": "object",
    "required": ["schema", "protocol", "seed", "folds", "repetitions", "entries"],
    "properties": {
        "schema": {"const": PLAN_SCHEMA},
        "protocol": {"enum": ["holdout", "outlier"]},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2 ** 64 - 1},
        "folds": {"type": "integer", "minimum": 1},
        "repetitions": {"type": "integer", "minimum": 1},
        "entries": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["config_index", "repetition", "n_kkc", "n_uuc", "openness",
                             "kkc_labels", "uuc_labels", "fold_seed", "fold_assignments"],
                "properties": {
                    "n_kkc": {"type": "integer", "minimum": 1},
                    "n_uuc": {"type": "integer", "minimum": 0},
                    "openness": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
                    "kkc_labels": {"type": "array", "items": {"type": "string"}, "minItems": 1},
                    "uuc_labels": {"type": "array", "items": {"type": "string"}},
                    "fold_seed": {"type": "integer", "minimum": 0},
                    "fold_assignments": {"type": ["object", "null"]},
                },
            },
        },
    },
}

_metric_summary = {
    "type": "object",
    "required": ["mean", "std", "histogram"],
    "properties": {
        "mean": {"type": "number", "minimum": 0, "maximum": 1},
        "std": {"type": "number", "minimum": 0},
        "histogram": {"type": "array", "items": {"type": "integer", "minimum": 0},
                      "minItems": N_BINS, "maxItems": N_BINS},
    },
}

SIMULATION_REPORT = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "$id": SIMULATION_SCHEMA,
    "type": "object",
    "required": ["schema", "mode", "seed", "trials", "per_class_count", "bin_edges", "cells"],
    "properties": {
        "schema": {"const": SIMULATION_SCHEMA},
        "mode": {"enum": ["default", "prior"]},
        "seed": {"type": "integer", "minimum": 0},
        "trials": {"type": "integer", "minimum": 1},
        "bin_edges": {"type": "array", "minItems": N_BINS + 1, "maxItems": N_BINS + 1},
        "cells": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["n_kkc_classes", "n_uuc_classes", "n_pos", "n_neg", "trials",
                             "metrics"],
                "properties": {
                    "metrics": {
                        "type": "object",
                        "required": ["f1", "accuracy", "balanced_accuracy"],
                        "additionalProperties": _metric_summary,
                    },
                },
            },
        },
    },
}

BY_ID = {s["$id"]: s for s in (EVALUATION_REPORT, SPLIT_PLAN, SIMULATION_REPORT)}
