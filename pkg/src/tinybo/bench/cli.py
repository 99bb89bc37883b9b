"""``bench`` command line.

    bench run --functions branin,hartmann6 --replicates 25 --budget 200 \\
        --init 10 --hp-opt both --seed 42 --parallelism 4 \\
        --out results.csv [--summary summary.json] [--full]
    bench list

Exit status: 0 on success, 1 if any record failed, 2 on invalid arguments.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from ..config import apply_overrides, parse_config_text
from ..core import InvalidArgument, NotFound
from .functions import REGISTRY
from .runner import (
    CI_REPLICATES,
    FULL_REPLICATES,
    HP_SETTINGS,
    default_bench_params,
    records_to_csv,
    run_benchmark,
    run_meta,
    summary_json,
)

EXIT_OK, EXIT_FAILED_RECORDS, EXIT_USAGE = 0, 1, 2


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bench", description="Replicated BO benchmarks")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run replicated benchmarks and write a CSV")
    run.add_argument("--functions", default="branin",
                     help="comma-separated registered names (see 'bench list')")
    run.add_argument("--replicates", type=int, default=None,
                     help=f"replicates per setting (default {CI_REPLICATES}, {FULL_REPLICATES} with --full)")
    run.add_argument("--budget", type=int, default=None,
                     help="total objective evaluations per replicate (default 200)")
    run.add_argument("--init", type=int, default=None, help="initial random samples (default 10)")
    run.add_argument("--hp-opt", choices=sorted(HP_SETTINGS), default="both",
                     help="hyperparameter learning on, off, or both")
    run.add_argument("--seed", type=int, default=42, help="master seed")
    run.add_argument("--parallelism", type=int, default=1, help="worker processes")
    run.add_argument("--out", required=True, help="CSV output path ('-' for stdout)")
    run.add_argument("--summary", default=None, help="optional summary JSON path")
    run.add_argument("--full", action="store_true",
                     help=f"{FULL_REPLICATES} replicates over every registered function")
    run.add_argument("--config", default=None, help="key/value config file (section.key = value)")
    run.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                     help="override one config key; repeatable, applied after --config")
    run.add_argument("--no-timing", action="store_true",
                     help="write 0 for wall times so repeated runs give identical files")
    run.add_argument("-v", "--verbose", action="store_true")

    sub.add_parser("list", help="list registered test functions")
    return ap


def _params_from_args(args):
    params = default_bench_params()
    if args.config:
        params = apply_overrides(params, parse_config_text(Path(args.config).read_text(), args.config))
    overrides = {}
    for item in args.set:
        key, sep, value = item.partition("=")
        if not sep:
            raise InvalidArgument(f"--set expects KEY=VALUE, got {item!r}")
        overrides[key.strip()] = value.strip()
    if args.budget is not None:
        overrides["bo.max_evaluations"] = args.budget
    if args.init is not None:
        overrides["bo.init_samples"] = args.init
    return apply_overrides(params, overrides)


def _cmd_run(args) -> int:
    params = _params_from_args(args)
    if args.full:
        functions = list(REGISTRY)
        default_replicates = FULL_REPLICATES
    else:
        functions = [f.strip() for f in args.functions.split(",") if f.strip()]
        default_replicates = CI_REPLICATES
    replicates = default_replicates if args.replicates is None else args.replicates
    if not functions:
        raise InvalidArgument("no functions selected")

    records = run_benchmark(
        functions,
        replicates,
        hp_opt=args.hp_opt,
        params=params,
        master_seed=args.seed,
        parallelism=args.parallelism,
        timing=not args.no_timing,
    )
    text = records_to_csv(records)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)
    if args.summary:
        meta = run_meta(params, seed=args.seed, replicates=replicates, hp_opt=args.hp_opt)
        Path(args.summary).write_text(summary_json(records, meta))

    failed = [r for r in records if not r.ok]
    for r in failed:
        print(f"failed: {r.function} replicate {r.replicate} hp_opt={r.hp_opt}: {r.status}",
              file=sys.stderr)
    return EXIT_FAILED_RECORDS if failed else EXIT_OK


def _cmd_list(args) -> int:
    for f in REGISTRY.values():
        bounds = ", ".join(f"[{lo:g}, {hi:g}]" for lo, hi in f.bounds)
        print(f"{f.name:16s} d={f.dim}  best={f.known_best_value!r}  domain={bounds}")
    return EXIT_OK


def main(argv=None) -> int:
    ap = _build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_list(args)
    except (InvalidArgument, NotFound, OSError) as exc:
        print(f"bench: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
