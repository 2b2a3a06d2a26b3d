"""Command-line harness.

Subcommands: solve, sweep, bench, sat, hunt.  Exit codes for solve:
0 = Hamilton path found, 1 = no-path claim, 2 = expansion budget
exceeded, >2 = usage or input error.  Reports printed to stdout are
deterministic for fixed arguments and seeds; wall-clock timing is
emitted separately on stderr (or via --timing-out) because it can
never be byte-reproducible.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .engine import BudgetExceeded, SolverConfig, find_h_path, outcome_record
from .graph import ParseError, load_graph
from .harness import (
    bench,
    hunt,
    render_bench,
    render_bench_timing,
    render_hunt,
    render_sweep,
    render_sweep_timing,
    sat_pipeline,
    sweep,
)
from .sat import ParseError as CnfParseError
from .sat import parse_cnf

EXIT_FOUND = 0
EXIT_NO_PATH = 1
EXIT_BUDGET = 2
EXIT_INPUT = 3
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    # argparse's default usage-error exit code is 2, which this tool
    # reserves for BudgetExceeded
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _solver_config(args) -> SolverConfig:
    trace = None
    if getattr(args, "no_trace", False):
        trace = False
    return SolverConfig(
        mode=args.mode,
        ledger_mode=args.ledger,
        initial_order_seed=args.order_seed,
        max_expansions_per_stage=args.max_expansions,
        dedup=args.dedup,
        trace=trace,
    )


def _add_solver_flags(p: argparse.ArgumentParser):
    p.add_argument("--mode", choices=["fixed-st", "any-endpoints"], default="fixed-st")
    p.add_argument("--ledger", choices=["unified", "split"], default="unified")
    p.add_argument("--order-seed", type=int, default=None,
                   help="seed for shuffling the initial order's interior")
    p.add_argument("--max-expansions", type=int, default=None,
                   help="per-stage expansion cap (default n^2)")
    p.add_argument("--dedup", action="store_true",
                   help="skip duplicate states within a stage")
    p.add_argument("--no-trace", action="store_true")


def _write_or_print(text: str, path: str | None):
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_solve(args) -> int:
    try:
        g = load_graph(args.graph)
    except (OSError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    cfg = _solver_config(args)
    try:
        outcome = find_h_path(g, cfg)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    print(outcome_record(outcome))
    return EXIT_FOUND if outcome.kind == "hamilton-path" else EXIT_NO_PATH


def cmd_sweep(args) -> int:
    cfg = _solver_config(args)
    if args.cx_dir:
        Path(args.cx_dir).mkdir(parents=True, exist_ok=True)
    report = sweep(
        max_n=args.max_n,
        mode=args.sweep_mode,
        count=args.count,
        seed=args.seed,
        cfg=cfg,
        out_dir=args.cx_dir,
        min_n=args.min_n,
        max_degree=args.degree_cap,
    )
    _write_or_print(render_sweep(report), args.out)
    timing = render_sweep_timing(report)
    if args.timing_out:
        Path(args.timing_out).write_text(timing, encoding="utf-8")
    else:
        sys.stderr.write(timing)
    return EXIT_FOUND


def cmd_bench(args) -> int:
    sizes = [int(tok) for tok in args.sizes.split(",") if tok]
    report = bench(sizes=sizes, count=args.count, seed=args.seed)
    _write_or_print(render_bench(report), args.out)
    timing = render_bench_timing(report)
    if args.timing_out:
        Path(args.timing_out).write_text(timing, encoding="utf-8")
    else:
        sys.stderr.write(timing)
    return EXIT_FOUND


def cmd_sat(args) -> int:
    try:
        text = Path(args.cnf).read_text(encoding="utf-8")
        formula = parse_cnf(text)
    except (OSError, CnfParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    cfg = _solver_config(args)
    result = sat_pipeline(formula, cfg)
    if result["sat_claim"]:
        bits = " ".join(
            f"x{i + 1}={'1' if v else '0'}"
            for i, v in enumerate(result["assignment"])
        )
        print(f"SAT {bits}")
    else:
        print("UNSAT-claim")
    print(
        f"dpll={'sat' if result['dpll_sat'] else 'unsat'}"
        f" agreement={result['agreement']}"
        f" reduced_n={result['reduced_n']}"
    )
    if result["agreement"] == "DISAGREEMENT":
        print(
            "DISAGREEMENT: solver and DPLL differ on this formula;"
            " this instance is a counterexample worth exporting",
            file=sys.stderr,
        )
        return 5
    if result["budget_exceeded"]:
        return EXIT_BUDGET
    return EXIT_FOUND if result["sat_claim"] else EXIT_NO_PATH


def cmd_hunt(args) -> int:
    cfg = _solver_config(args)
    if args.cx_dir:
        Path(args.cx_dir).mkdir(parents=True, exist_ok=True)
    report = hunt(
        n=args.n, count=args.count, seed=args.seed, cfg=cfg, out_dir=args.cx_dir
    )
    _write_or_print(render_hunt(report), args.out)
    return EXIT_FOUND


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="broadpath", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one graph file")
    p.add_argument("graph")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="cross-checked suite over small graphs")
    p.add_argument("--max-n", type=int, default=8)
    p.add_argument("--min-n", type=int, default=1)
    p.add_argument("--sweep-mode", choices=["exhaustive", "sampled"], default="exhaustive")
    p.add_argument("--count", type=int, default=0, help="instances in sampled mode")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--degree-cap", type=int, default=4)
    p.add_argument("--out", default=None, help="write canonical report here")
    p.add_argument("--timing-out", default=None)
    p.add_argument("--cx-dir", default=None, help="directory for counterexample exports")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("bench", help="scaling run on planted instances")
    p.add_argument("--sizes", default="50,100,200,400")
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.add_argument("--timing-out", default=None)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("sat", help="3SAT via reduction to Hamilton path")
    p.add_argument("cnf")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_sat)

    p = sub.add_parser("hunt", help="sampled counterexample hunt")
    p.add_argument("--n", type=int, default=12)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.add_argument("--cx-dir", default=None)
    _add_solver_flags(p)
    p.set_defaults(func=cmd_hunt)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
