"""Command-line front end.

Subcommands: run (experiment batch from a config file), oracle (brute-force
similarity of two graph files), plan (modeled distribution-cost table), and
tail (compact-encoding tail table).  Exit codes: 0 success, 1 validation
error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import configparser
import sys
from dataclasses import replace

from . import graphs, permutations
from .harness import DISTRIBUTION_SCHEMES, DistributionPlan, ExperimentConfig, distribution_cost, run_experiment

_MODE_FLAGS = {"edge": "edge_difference", "alternate": "alternate_penalty"}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="graphsim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment batch and write a CSV")
    run.add_argument("--config", help="INI config file (flags below override it)")
    run.add_argument("--out", help="output CSV path")
    run.add_argument("--threads", type=int)
    run.add_argument("--method", help="comma-separated optimizer methods")
    run.add_argument("--seed", type=int, help="master seed")
    run.add_argument("--p", help="comma-separated decomposition depths")
    run.add_argument("--graph-size", type=int)
    run.add_argument("--mode", choices=sorted(_MODE_FLAGS), help="cost-function variant")
    run.add_argument("--samples", type=int, help="final sampling count (default V^2)")
    run.add_argument("--trials", type=int)
    run.add_argument("--x-tol", type=float, help="optimizer parameter tolerance")
    run.add_argument("--f-tol", type=float, help="optimizer objective tolerance")

    oracle = sub.add_parser("oracle", help="brute-force similarity of two graph files")
    oracle.add_argument("first")
    oracle.add_argument("second")

    plan = sub.add_parser("plan", help="modeled execution-time table for the distribution schemes")
    plan.add_argument("--q", type=int, default=16, help="qubit count (state length 2**q)")
    plan.add_argument("--max-p", type=int, default=64, help="largest processor count (powers of two)")
    plan.add_argument("--alpha", type=float, default=1e-9, help="seconds per scalar operation")
    plan.add_argument("--latency", type=float, default=1e-6, help="seconds per message")
    plan.add_argument("--buffer", type=float, default=65536.0, help="message buffer length")

    tail = sub.add_parser("tail", help="tail counts of the compact permutation encoding")
    tail.add_argument("--max-v", type=int, default=10)
    tail.add_argument("--csv", action="store_true", help="machine-readable output")
    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    cfg = ExperimentConfig.from_file(args.config) if args.config else ExperimentConfig()
    overrides = {}
    if args.out is not None:
        overrides["output"] = args.out
    if args.threads is not None:
        overrides["threads"] = args.threads
    if args.method is not None:
        overrides["methods"] = tuple(args.method.split(","))
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.p is not None:
        overrides["p_list"] = tuple(int(tok) for tok in args.p.split(","))
    if args.graph_size is not None:
        overrides["graph_size"] = args.graph_size
    if args.mode is not None:
        overrides["cost_mode"] = _MODE_FLAGS[args.mode]
    if args.samples is not None:
        overrides["samples"] = args.samples
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.x_tol is not None:
        overrides["x_tol"] = args.x_tol
    if args.f_tol is not None:
        overrides["f_tol"] = args.f_tol
    cfg = replace(cfg, **overrides)
    cfg.validate()
    records = run_experiment(cfg)
    failures = sum(1 for r in records if r.error)
    print(f"wrote {len(records)} rows to {cfg.output} ({failures} failed trials)")
    return 0


def _cmd_oracle(args: argparse.Namespace) -> int:
    g1 = graphs.load_graph(args.first)
    g2 = graphs.load_graph(args.second)
    perm, d_min = graphs.brute_force_best(g1, g2)
    g1p, _ = graphs.pad_to_common_size(g1, g2)
    print(f"similarity {1.0 - d_min / g1p.num_slots if g1p.num_slots else 1.0!r}")
    print(f"edge_difference {d_min}")
    print(f"permutation {' '.join(str(int(i)) for i in perm)}")
    return 0


def _cmd_plan(args: argparse.Namespace) -> int:
    if args.q < 1:
        raise ValueError("q must be >= 1")
    n = 1 << args.q
    print(f"n = 2**{args.q} = {n}")
    print(f"{'P':>8} {'column':>14} {'row':>14} {'checkerboard':>14}")
    p = 1
    while p <= args.max_p:
        costs = [
            distribution_cost(
                DistributionPlan(scheme, n, p, alpha=args.alpha, latency=args.latency, buffer_length=args.buffer)
            )
            for scheme in DISTRIBUTION_SCHEMES
        ]
        print(f"{p:>8} " + " ".join(f"{c:>14.6g}" for c in costs))
        p *= 2
    return 0


def _cmd_tail(args: argparse.Namespace) -> int:
    if args.max_v < 2:
        raise ValueError("--max-v must be >= 2")
    if args.max_v > permutations.MAX_ORDER:
        raise ValueError(f"--max-v must be <= {permutations.MAX_ORDER}")
    rows = []
    for v in range(2, args.max_v + 1):
        q = permutations.qubit_count(v)
        tail, ratio = permutations.tail_stats(v)
        rows.append((v, permutations.factorial(v), q, 1 << q, tail, ratio))
    if args.csv:
        print("V,factorial,q,states,difference,ratio")
        for row in rows:
            print(",".join([*map(str, row[:5]), format(row[5], ".17g")]))
    else:
        print(f"{'V':>3} {'V!':>16} {'q':>3} {'2^q':>16} {'2^q - V!':>16} {'ratio':>10}")
        for v, fact, q, states, tail, ratio in rows:
            print(f"{v:>3} {fact:>16} {q:>3} {states:>16} {tail:>16} {ratio:>10.4f}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "oracle":
            return _cmd_oracle(args)
        if args.command == "plan":
            return _cmd_plan(args)
        return _cmd_tail(args)
    except (ValueError, FileNotFoundError, IsADirectoryError, configparser.Error) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # runtime failure
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
