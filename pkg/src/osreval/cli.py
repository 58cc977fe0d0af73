"""Command-line entry point: ``osreval {score,plan,simulate,grid,demo}``.

Exit codes: 0 success, 2 malformed input or arguments, 3 metric preconditions
not met.  ``OSREVAL_SEED`` sets the default seed.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .core import InvalidCatalog, OSREvalError
from .formats import RecordFormatError, RunResult, build_report, dump_json, read_catalog, \
    read_predictions
from .protocol import InsufficientClasses, InvalidCount, holdout_plan, openness, outlier_plan
from .scores import BaseMetric, score_suite
from .simulate import DEFAULT_GRID, RandomPredictorMode, imbalance_grid, imbalance_grid_csv, \
    random_baseline_study

EXIT_INPUT = 2
EXIT_METRIC = 3

BIAS_CAVEAT = ("warning: {name} depends on the known/unknown sample ratio and rewards "
               "trivial predictors on imbalanced test sets; balanced accuracy is preferred")


class UsageError(Exception):
    pass


def _default_seed() -> int:
    raw = os.environ.get("OSREVAL_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"OSREVAL_SEED must be an integer, got {raw!r}") from None


def parse_pairs(spec: str) -> list[tuple[int, int]]:
    """``"2:8,3:4"`` -> ``[(2, 8), (3, 4)]``."""
    pairs = []
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            a, b = part.split(":")
            pairs.append((int(a), int(b)))
        except ValueError:
            raise UsageError(f"malformed pair {part!r}; expected KKC:UUC") from None
    if not pairs:
        raise UsageError("no KKC:UUC pairs given")
    return pairs


def read_label_list(path) -> list[str]:
    """One label per line, or a JSON array."""
    text = Path(path).read_text(encoding="utf-8")
    if text.lstrip().startswith("["):
        labels = json.loads(text)
        if not all(isinstance(x, str) for x in labels):
            raise UsageError(f"{path}: labels must be strings")
        return labels
    return [line.strip() for line in text.splitlines() if line.strip()]


def _emit(text: str, output) -> None:
    if output is None or str(output) == "-":
        sys.stdout.write(text)
    else:
        Path(output).parent.mkdir(parents=True, exist_ok=True)
        Path(output).write_text(text, encoding="utf-8")


def cmd_score(args) -> int:
    catalog = read_catalog(args.catalog) if args.catalog else None
    records, catalog = read_predictions(args.predictions, catalog)
    base = BaseMetric(args.base)
    if base is not BaseMetric.BALANCED_ACCURACY:
        print(BIAS_CAVEAT.format(name=base.value), file=sys.stderr)
    suite = score_suite(records, catalog, base)
    for note in suite.notes:
        print(f"note: {note}", file=sys.stderr)
    run = RunResult(suite, catalog.n_kkc, catalog.n_uuc,
                    openness=openness(catalog.n_kkc, catalog.n_uuc))
    _emit(dump_json(build_report([run], base, seed=None, catalog=catalog)), args.output)
    return 0


def cmd_plan(args) -> int:
    configs = parse_pairs(args.configs)
    labels = read_label_list(args.classes)
    if args.protocol == "holdout":
        if args.uuc_classes:
            raise UsageError("--uuc-classes is only used with --protocol outlier")
        plan = holdout_plan(labels, configs, args.repetitions, args.folds, args.seed)
    else:
        if not args.uuc_classes:
            raise UsageError("--protocol outlier needs --uuc-classes")
        plan = outlier_plan(labels, read_label_list(args.uuc_classes), configs,
                            args.repetitions, args.folds, args.seed)
    _emit(plan.to_json(), args.output)
    return 0


def cmd_simulate(args) -> int:
    grid = parse_pairs(args.grid) if args.grid else DEFAULT_GRID
    if any(k < 1 or u < 0 for k, u in grid):
        raise UsageError("grid cells need KKC >= 1 and UUC >= 0")
    if args.trials < 1 or args.per_class < 1:
        raise UsageError("--trials and --per-class must be positive")
    report = random_baseline_study(grid, args.per_class, args.trials,
                                   RandomPredictorMode(args.mode), args.seed)
    out = Path(args.output)
    _emit(report.to_json(), out)
    _emit(report.to_csv(), out.with_suffix(".csv"))
    return 0


def cmd_grid(args) -> int:
    if min(args.kkc_count, args.uuc_count) < 0:
        raise UsageError("per-class counts must be non-negative")
    if args.max_kkc < 1 or args.max_uuc < 1:
        raise UsageError("--max-kkc and --max-uuc must be at least 1")
    rows = imbalance_grid(args.kkc_count, args.uuc_count, args.max_kkc, args.max_uuc,
                          args.class_budget)
    if args.uuc_count == 0:
        print("note: no unknown test samples; imbalance ratios are infinite", file=sys.stderr)
    _emit(imbalance_grid_csv(rows), args.output)
    return 0


def cmd_demo(args) -> int:
    from .demo import run_demo

    report = run_demo(args.output_dir, seed=args.seed, n_classes=args.classes, dim=args.dim,
                      per_class=args.per_class, separation=args.separation)
    for agg in report["aggregate"]:
        m = agg["mean"]
        print(f"{agg['n_kkc']}:{agg['n_uuc']}  openness={agg['openness']:.3f}  "
              + "  ".join(f"{k}={m[k]:.3f}" for k in ("inner", "outer", "halfpoint", "overall")))
    return 0


def build_parser() -> argparse.ArgumentParser:
    seed = _default_seed()
    p = argparse.ArgumentParser(prog="osreval", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("score", help="score a prediction file with the four open-set metrics")
    s.add_argument("predictions", help="JSONL or CSV prediction file")
    s.add_argument("--catalog", help="JSON catalog {\"kkc\": [...], \"uuc\": [...]}")
    s.add_argument("--base", choices=[m.value for m in BaseMetric],
                   default=BaseMetric.BALANCED_ACCURACY.value)
    s.add_argument("-o", "--output", help="report path (default: stdout)")
    s.set_defaults(func=cmd_score)

    s = sub.add_parser("plan", help="generate a seeded known/unknown split plan")
    s.add_argument("--protocol", choices=["holdout", "outlier"], default="holdout")
    s.add_argument("--classes", required=True,
                   help="class label file (known-class source for outlier)")
    s.add_argument("--uuc-classes", help="unknown-class source label file (outlier only)")
    s.add_argument("--configs", required=True, help="comma-separated KKC:UUC pairs, e.g. 2:8,3:4")
    s.add_argument("--repetitions", type=int, default=5)
    s.add_argument("--folds", type=int, default=2)
    s.add_argument("--seed", type=int, default=seed)
    s.add_argument("-o", "--output", help="plan path (default: stdout)")
    s.set_defaults(func=cmd_plan)

    s = sub.add_parser("simulate", help="random-prediction baseline histograms")
    s.add_argument("--grid", help="comma-separated KKC:UUC class-count cells")
    s.add_argument("--per-class", type=int, default=20)
    s.add_argument("--trials", type=int, default=1000)
    s.add_argument("--mode", choices=[m.value for m in RandomPredictorMode], default="default")
    s.add_argument("--seed", type=int, default=seed)
    s.add_argument("-o", "--output", required=True,
                   help="JSON report path; the long-format CSV goes next to it")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("grid", help="known/unknown test sample counts against openness")
    s.add_argument("--kkc-count", type=int, required=True, help="test samples per known class")
    s.add_argument("--uuc-count", type=int, required=True, help="test samples per unknown class")
    s.add_argument("--max-kkc", type=int, required=True)
    s.add_argument("--max-uuc", type=int, required=True)
    s.add_argument("--class-budget", type=int, help="cap on KKC + UUC (single-dataset holdout)")
    s.add_argument("-o", "--output", help="CSV path (default: stdout)")
    s.set_defaults(func=cmd_grid)

    s = sub.add_parser("demo", help="end-to-end holdout evaluation on synthetic blobs")
    s.add_argument("--seed", type=int, default=seed)
    s.add_argument("--classes", type=int, default=10)
    s.add_argument("--dim", type=int, default=16)
    s.add_argument("--per-class", type=int, default=80)
    s.add_argument("--separation", type=float, default=8.0)
    s.add_argument("-o", "--output-dir", default="osreval-demo")
    s.set_defaults(func=cmd_demo)
    return p


def main(argv=None) -> int:
    try:
        parser = build_parser()
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, RecordFormatError, InvalidCatalog, InsufficientClasses, InvalidCount) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSREvalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_METRIC
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
