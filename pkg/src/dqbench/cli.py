"""Command line entry point: measure, pollute, split, run, report."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

from .polluters import (DIMENSIONS, ClassBalanceSpec, CompletenessSpec, ConsistencySpec,
                        DuplicateCount, FeatureAccuracySpec, TargetAccuracySpec, UniquenessSpec,
                        pollute)
from .quality import RepresentationMap, measure
from .report import emit_report, read_results
from .rng import derive_rng
from .runner import ExperimentConfig, run_experiment, write_pollution_log
from .scenarios import split_summary, stratified_split
from .tabular import DataError, DatasetManifest, class_labels, load_csv, save_csv

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(suppress: bool = False) -> argparse.ArgumentParser:
    # subcommands repeat the global flags with suppressed defaults so that a
    # flag given before the subcommand is not reset by the subparser
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=d(None), help="master seed")
    p.add_argument("--manifest", default=d(None), help="dataset manifest (JSON)")
    p.add_argument("--out", default=d(None), help="output file or directory")
    p.add_argument("--threads", type=int, default=d(None), help="worker threads (wall time only)")
    p.add_argument("-v", "--verbose", action="store_true", default=d(False))
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dqbench", description=__doc__, parents=[_common()])
    common = _common(suppress=True)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    m = sub.add_parser("measure", parents=[common], help="score the quality dimensions of a CSV")
    m.add_argument("data")
    m.add_argument("--rep-map", help="representation map (JSON)")
    m.add_argument("--ground-truth", help="ground-truth CSV with the same manifest")

    p = sub.add_parser("pollute", parents=[common], help="degrade one dimension of a CSV")
    p.add_argument("data")
    p.add_argument("--dimension", required=True, choices=DIMENSIONS)
    p.add_argument("--level", required=True, help="fraction, variance, degree or duplication factor (e.g. 10/9)")
    p.add_argument("--k", type=int, default=2, help="representations per value (consistency)")
    p.add_argument("--dup-dist", default="one", choices=("one", "uniform", "normal", "zipf"))
    p.add_argument("--dup-params", type=float, nargs=2, default=(1.0, 1.0), metavar=("A", "B"))
    p.add_argument("--n-total", type=int, default=None, help="rows after class-balance pollution")

    s = sub.add_parser("split", parents=[common], help="stratified train/test split")
    s.add_argument("data")
    s.add_argument("--fraction", type=float, default=0.8)

    r = sub.add_parser("run", parents=[common], help="run an experiment grid")
    r.add_argument("config")
    r.add_argument("--keep-intermediate", action="store_true")

    rep = sub.add_parser("report", parents=[common], help="re-emit tables from results.csv/json")
    rep.add_argument("results")
    rep.add_argument("--format", choices=("csv", "json", "both"), default="both")
    return parser


def _manifest(args) -> DatasetManifest:
    if not args.manifest:
        raise UsageError("--manifest is required")
    return DatasetManifest.load(args.manifest)


def _spec(args):
    d, raw = args.dimension, args.level
    try:
        value = float(Fraction(raw))
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"cannot parse level {raw!r}") from None
    if d == "consistency":
        return ConsistencySpec(value, args.k)
    if d == "completeness":
        return CompletenessSpec(value)
    if d == "feature_accuracy":
        return FeatureAccuracySpec(value)
    if d == "target_accuracy":
        return TargetAccuracySpec(value)
    if d == "uniqueness":
        a, b = args.dup_params
        return UniquenessSpec(Fraction(raw), DuplicateCount(args.dup_dist, a, b))
    return ClassBalanceSpec(value, args.n_total)


def cmd_measure(args) -> int:
    man = _manifest(args)
    ds = load_csv(args.data, man)
    gt = load_csv(args.ground_truth, man) if args.ground_truth else None
    rep_map = RepresentationMap.load(args.rep_map) if args.rep_map else None
    labels = class_labels(ds, man.bin_step) if (man.bin_step and ds.target.kind != "categorical") else None
    text = measure(ds, gt, rep_map, labels).to_json()
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_pollute(args) -> int:
    man = _manifest(args)
    ds = load_csv(args.data, man)
    spec = _spec(args)
    labels = None
    if args.dimension in ("uniqueness", "class_balance") and ds.target.kind != "categorical":
        labels = class_labels(ds, man.bin_step)
    seed = 0 if args.seed is None else args.seed
    result = pollute(ds, spec, derive_rng(seed, ["pollute", args.dimension]), labels)
    out = Path(args.out or "polluted")
    out.mkdir(parents=True, exist_ok=True)
    save_csv(result.dataset, out / "polluted.csv", man.delimiter)
    write_pollution_log(result, out / "pollution_log.jsonl")
    if result.rep_map is not None:
        result.rep_map.save(out / "representation_map.json")
    if result.plan is not None:
        plan = result.plan
        with open(out / "balance_plan.json", "w", encoding="utf-8") as fh:
            json.dump({"degree": plan.degree, "degree_effective": plan.degree_effective,
                       "degree_cap": plan.degree_cap, "n_total": plan.n_total, "m": plan.m,
                       "delta": plan.delta, "s_max": plan.s_max, "s_min": plan.s_min,
                       "counts": {str(k): v for k, v in plan.counts.items()}}, fh, indent=2)
            fh.write("\n")
    return EXIT_OK


def cmd_split(args) -> int:
    man = _manifest(args)
    ds = load_csv(args.data, man)
    labels = class_labels(ds, man.bin_step)
    seed = 0 if args.seed is None else args.seed
    train, test = stratified_split(ds, derive_rng(seed, ["split"]), args.fraction, labels)
    out = Path(args.out or "split")
    out.mkdir(parents=True, exist_ok=True)
    save_csv(train, out / "train.csv", man.delimiter)
    save_csv(test, out / "test.csv", man.delimiter)
    summary = split_summary(train, test, seed, args.fraction, class_labels(train, man.bin_step),
                            class_labels(test, man.bin_step))
    with open(out / "split.json", "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return EXIT_OK


def cmd_run(args) -> int:
    cfg = ExperimentConfig.load(args.config)
    if args.out:
        cfg.out = args.out
    if args.threads:
        cfg.threads = args.threads
    if args.seed is not None:
        cfg.seeds = [args.seed]
    if args.manifest:
        cfg.manifest = args.manifest
    cfg.keep_intermediate = cfg.keep_intermediate or args.keep_intermediate
    result = run_experiment(cfg)
    print(f"{len(result.records)} result rows, {len(result.runs)} runs, "
          f"{len(result.failures)} failed cells -> {cfg.out}")
    return EXIT_OK


def cmd_report(args) -> int:
    records = read_results(args.results)
    formats = ("csv", "json") if args.format == "both" else (args.format,)
    out = args.out or str(Path(args.results).parent)
    for path in emit_report(records, out, formats):
        print(path)
    return EXIT_OK


COMMANDS = {"measure": cmd_measure, "pollute": cmd_pollute, "split": cmd_split,
            "run": cmd_run, "report": cmd_report}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            raise UsageError("a subcommand is required")
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    except (DataError, FileNotFoundError, KeyError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
