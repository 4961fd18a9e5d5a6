"""Command-line entry point.

Subcommands:
  run            execute an experiment config (bundled name or TOML path)
  verify         print brute-force optima and structural checks for a problem
  list-problems  show known problem ids and bundled configs
  aggregate      recompute convergence CSVs from a directory of trace files
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from . import harness
from .problems import list_problem_ids


def _cmd_run(args) -> int:
    config = harness.resolve_config(args.config)
    if args.seed is not None:
        config = dataclasses.replace(config, base_seed=args.seed)
    curves = harness.run_experiment(config, args.out, jobs=args.jobs)
    print(f"problem {config.problem}: {config.repetitions} runs x {len(config.variants)} variants -> {args.out}")
    for variant, curve in curves.items():
        print(f"  {variant:>4}: final mean best {curve.mean_best[-1]:.6g} (std {curve.std_best[-1]:.3g}, n={curve.n_runs})")
    return 0


def _cmd_verify(args) -> int:
    print(harness.verify(args.problem_id))
    return 0


def _cmd_list(args) -> int:
    print("problems:")
    for pid in list_problem_ids():
        print(f"  {pid}")
    print("bundled configs:")
    for name in harness.list_bundled_configs():
        print(f"  {name}")
    return 0


def _cmd_aggregate(args) -> int:
    result = harness.aggregate_directory(args.trace_dir, args.out)
    for problem_id, curves in result.items():
        for variant, curve in curves.items():
            print(f"{problem_id}/{variant}: final mean best {curve.mean_best[-1]:.6g} over {curve.n_runs} runs")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qaboa", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment config")
    p_run.add_argument("--config", required=True, help="TOML path or bundled config name")
    p_run.add_argument("--out", default="results", help="output directory (default: results)")
    p_run.add_argument("--seed", type=int, default=None, help="override the config base seed")
    p_run.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    p_run.set_defaults(func=_cmd_run)

    p_verify = sub.add_parser("verify", help="brute-force and consistency report for a problem")
    p_verify.add_argument("problem_id")
    p_verify.set_defaults(func=_cmd_verify)

    p_list = sub.add_parser("list-problems", help="list problem ids and bundled configs")
    p_list.set_defaults(func=_cmd_list)

    p_agg = sub.add_parser("aggregate", help="recompute aggregate CSVs from trace files")
    p_agg.add_argument("trace_dir")
    p_agg.add_argument("--out", default=None, help="output directory (default: trace_dir)")
    p_agg.set_defaults(func=_cmd_aggregate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
