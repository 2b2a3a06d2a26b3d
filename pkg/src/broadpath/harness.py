"""Verification harness: sweeps, benchmarks, counterexample hunting.

Every suite here is a deterministic function of its parameters and
seeds.  Canonical report renderings therefore never include wall-clock
measurements; timing goes into a separate sidecar rendering that is
explicitly non-reproducible.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .engine import BudgetExceeded, SolverConfig, find_h_path
from .graph import Graph, connected, generate_low_degree, plant_hamiltonian, save_graph
from .oracle import (
    AGREE,
    SOLVER_INCOMPLETE,
    SOLVER_UNSOUND,
    cross_check,
    minimize_counterexample,
)
from .sat import Formula, decode_assignment, dpll_solve, reduce_3sat

BUDGET_EXCEEDED = "BudgetExceeded"


# ---------------------------------------------------------------------------
# small-graph enumeration (up to isomorphism via color-refined canonical keys)

def _refine_colors(n: int, adj_sets) -> tuple[int, ...]:
    colors = tuple(len(adj_sets[v]) for v in range(n))
    for _ in range(n):
        sig = [
            (colors[v], tuple(sorted(colors[w] for w in adj_sets[v])))
            for v in range(n)
        ]
        palette = {s: i for i, s in enumerate(sorted(set(sig)))}
        new = tuple(palette[s] for s in sig)
        if new == colors:
            break
        colors = new
    return colors


def canonical_key(n: int, edges) -> tuple[int, int]:
    """Isomorphism-invariant key: minimum adjacency bitstring over all
    color-class-preserving relabelings."""
    adj_sets = [set() for _ in range(n)]
    for u, v in edges:
        adj_sets[u].add(v)
        adj_sets[v].add(u)
    colors = _refine_colors(n, adj_sets)
    classes: dict[int, list[int]] = {}
    for v in range(n):
        classes.setdefault(colors[v], []).append(v)
    ordered = [classes[c] for c in sorted(classes)]
    best = None
    for parts in itertools.product(*(itertools.permutations(cls) for cls in ordered)):
        label = {}
        idx = 0
        for part in parts:
            for v in part:
                label[v] = idx
                idx += 1
        code = 0
        for u, v in edges:
            a, b = label[u], label[v]
            if a > b:
                a, b = b, a
            code |= 1 << (a * n + b)
        if best is None or code < best:
            best = code
    return (n, best if best is not None else 0)


_REP_CACHE: dict[tuple[int, int], list[tuple[int, ...]]] = {}


def _reps_upto_iso(n: int, max_degree: int) -> list[tuple[tuple[int, int], ...]]:
    """All graphs on n vertices with max degree bound, one labeled
    representative per isomorphism class (connected or not), built by
    augmenting the (n-1)-vertex representatives."""
    key = (n, max_degree)
    if key in _REP_CACHE:
        return _REP_CACHE[key]
    if n == 1:
        reps = [()]
    else:
        reps_prev = _reps_upto_iso(n - 1, max_degree)
        seen: dict[tuple[int, int], tuple] = {}
        for edges in reps_prev:
            deg = [0] * (n - 1)
            for u, v in edges:
                deg[u] += 1
                deg[v] += 1
            eligible = [v for v in range(n - 1) if deg[v] < max_degree]
            for size in range(0, min(max_degree, len(eligible)) + 1):
                for nbrs in itertools.combinations(eligible, size):
                    new_edges = tuple(sorted(edges + tuple((v, n - 1) for v in nbrs)))
                    ck = canonical_key(n, new_edges)
                    if ck not in seen:
                        seen[ck] = new_edges
        reps = sorted(seen.values())
    _REP_CACHE[key] = reps
    return reps


def _augmented_candidates(n: int, max_degree: int):
    """Every n-vertex graph obtainable by adding one vertex to an
    (n-1)-vertex representative; covers all isomorphism classes but may
    repeat some (duplicates are harmless for verification)."""
    for edges in _reps_upto_iso(n - 1, max_degree):
        deg = [0] * (n - 1)
        for u, v in edges:
            deg[u] += 1
            deg[v] += 1
        eligible = [v for v in range(n - 1) if deg[v] < max_degree]
        for size in range(0, min(max_degree, len(eligible)) + 1):
            for nbrs in itertools.combinations(eligible, size):
                yield tuple(sorted(edges + tuple((v, n - 1) for v in nbrs)))


ISO_DEDUP_LIMIT = 7


def enumerate_low_degree_graphs(
    min_n: int, max_n: int, max_degree: int = 4, connected_only: bool = True
):
    """Deterministic stream of (n, Graph).

    Up to ISO_DEDUP_LIMIT vertices the stream holds exactly one graph
    per isomorphism class; beyond that, one-vertex augmentation of the
    previous level's representatives still covers every class but may
    emit duplicates (isomorph rejection gets expensive there and
    duplicates only repeat verification work).
    """
    for n in range(min_n, max_n + 1):
        if n <= ISO_DEDUP_LIMIT:
            source = _reps_upto_iso(n, max_degree)
        else:
            source = _augmented_candidates(n, max_degree)
        for edges in source:
            g = Graph(n, edges)
            if connected_only and not connected(g):
                continue
            yield n, g


def count_labeled_low_degree(n: int, max_degree: int = 4) -> int:
    """Independent recount: connected labeled graphs with the degree
    bound, by brute force over all edge subsets.  Only sane for n <= 5."""
    pairs = list(itertools.combinations(range(n), 2))
    count = 0
    for bits in range(1 << len(pairs)):
        edges = [pairs[i] for i in range(len(pairs)) if bits >> i & 1]
        deg = [0] * n
        for u, v in edges:
            deg[u] += 1
            deg[v] += 1
        if any(d > max_degree for d in deg):
            continue
        if connected(Graph(n, edges)):
            count += 1
    return count


# ---------------------------------------------------------------------------
# instance execution

def run_instance(g: Graph, cfg: SolverConfig) -> dict:
    """Solve one instance and cross-check it against the exact oracle."""
    endpoints = "any" if cfg.mode == "any-endpoints" else "fixed"
    row = {"n": g.n}
    try:
        outcome = find_h_path(g, cfg)
    except BudgetExceeded as exc:
        row.update(
            verdict=BUDGET_EXCEEDED,
            hp_found=False,
            expansions=exc.stats.expansions,
            stages=exc.stats.stages,
            elapsed=exc.stats.elapsed,
        )
        return row
    verdict = cross_check(g, outcome, endpoints)
    row.update(
        verdict=verdict,
        hp_found=outcome.kind == "hamilton-path",
        expansions=outcome.stats.expansions,
        stages=outcome.stats.stages,
        elapsed=outcome.stats.elapsed,
    )
    return row


@dataclass
class SweepReport:
    params: dict
    per_n: list[dict] = field(default_factory=list)
    counterexamples: list[str] = field(default_factory=list)
    totals: dict = field(default_factory=dict)
    elapsed_total: float = 0.0


def sweep(
    max_n: int,
    mode: str = "exhaustive",
    count: int = 0,
    seed: int = 0,
    cfg: SolverConfig | None = None,
    out_dir: str | Path | None = None,
    min_n: int = 1,
    max_degree: int = 4,
) -> SweepReport:
    """Cross-check the solver against the oracle over a graph suite.

    Exhaustive mode walks every connected max-degree-bounded graph up
    to max_n vertices (per enumerate_low_degree_graphs); sampled mode
    draws `count` seeded degree-{3,4} instances at n = max_n.  Every
    SolverIncomplete instance is minimized and exported.
    """
    if cfg is None:
        cfg = SolverConfig()
    params = {
        "max_n": max_n, "min_n": min_n, "mode": mode, "count": count,
        "seed": seed, "max_degree": max_degree,
        "solver_mode": cfg.mode, "ledger_mode": cfg.ledger_mode,
    }
    report = SweepReport(params=params)
    if mode == "exhaustive":
        instances = enumerate_low_degree_graphs(min_n, max_n, max_degree)
    elif mode == "sampled":
        instances = (
            (max_n, generate_low_degree(max_n, seed + i)) for i in range(count)
        )
    else:
        raise ValueError(f"unknown sweep mode {mode!r}")

    stats_by_n: dict[int, dict] = {}
    cx_index = 0
    for n, g in instances:
        row = run_instance(g, cfg)
        bucket = stats_by_n.setdefault(
            n,
            {
                "n": n, "instances": 0, "agree": 0, "solver_incomplete": 0,
                "solver_unsound": 0, "budget_exceeded": 0, "hp_found": 0,
                "expansions_sum": 0, "expansions_max": 0, "elapsed_sum": 0.0,
            },
        )
        bucket["instances"] += 1
        bucket["expansions_sum"] += row["expansions"]
        bucket["expansions_max"] = max(bucket["expansions_max"], row["expansions"])
        bucket["elapsed_sum"] += row["elapsed"]
        if row["hp_found"]:
            bucket["hp_found"] += 1
        verdict = row["verdict"]
        if verdict == AGREE:
            bucket["agree"] += 1
        elif verdict == SOLVER_INCOMPLETE:
            bucket["solver_incomplete"] += 1
            name = f"cx_n{n}_{cx_index:04d}.graph"
            cx_index += 1
            if out_dir is not None:
                small = minimize_counterexample(g, cfg)
                path = Path(out_dir) / name
                save_graph(
                    small,
                    path,
                    comments=[
                        "verdict: SolverIncomplete",
                        f"solver_mode: {cfg.mode} ledger: {cfg.ledger_mode}",
                        f"original_n: {n}",
                    ],
                )
            report.counterexamples.append(name)
        elif verdict == SOLVER_UNSOUND:
            bucket["solver_unsound"] += 1
        elif verdict == BUDGET_EXCEEDED:
            bucket["budget_exceeded"] += 1

    report.per_n = [stats_by_n[n] for n in sorted(stats_by_n)]
    totals = {
        k: sum(b[k] for b in report.per_n)
        for k in (
            "instances", "agree", "solver_incomplete", "solver_unsound",
            "budget_exceeded", "hp_found",
        )
    }
    totals["agreement_rate"] = (
        totals["agree"] / totals["instances"] if totals["instances"] else 1.0
    )
    report.totals = totals
    report.elapsed_total = sum(b["elapsed_sum"] for b in report.per_n)
    return report


def render_sweep(report: SweepReport) -> str:
    """Canonical deterministic rendering (no wall-clock content)."""
    lines = []
    meta = " ".join(f"{k}={report.params[k]}" for k in sorted(report.params))
    lines.append(f"record=sweep-meta {meta}")
    for b in report.per_n:
        mean = b["expansions_sum"] / b["instances"] if b["instances"] else 0.0
        lines.append(
            "record=sweep-n"
            f" agree={b['agree']}"
            f" budget_exceeded={b['budget_exceeded']}"
            f" expansions_max={b['expansions_max']}"
            f" expansions_mean={mean:.6f}"
            f" hp_found={b['hp_found']}"
            f" instances={b['instances']}"
            f" n={b['n']}"
            f" solver_incomplete={b['solver_incomplete']}"
            f" solver_unsound={b['solver_unsound']}"
        )
    for name in report.counterexamples:
        lines.append(f"record=sweep-counterexample file={name}")
    t = report.totals
    lines.append(
        "record=sweep-summary"
        f" agree={t['agree']}"
        f" agreement_rate={t['agreement_rate']:.6f}"
        f" budget_exceeded={t['budget_exceeded']}"
        f" hp_found={t['hp_found']}"
        f" instances={t['instances']}"
        f" solver_incomplete={t['solver_incomplete']}"
        f" solver_unsound={t['solver_unsound']}"
    )
    return "\n".join(lines) + "\n"


def render_sweep_timing(report: SweepReport) -> str:
    lines = ["# timing sidecar (wall clock, not reproducible)"]
    for b in report.per_n:
        mean = b["elapsed_sum"] / b["instances"] if b["instances"] else 0.0
        lines.append(f"timing sweep n={b['n']} elapsed_mean={mean:.6f}")
    lines.append(f"timing sweep elapsed_total={report.elapsed_total:.6f}")
    return "\n".join(lines) + "\n"


@dataclass
class BenchReport:
    params: dict
    per_n: list[dict] = field(default_factory=list)
    slope_expansions: float = 0.0
    slope_time: float = 0.0


def bench(
    sizes=(50, 100, 200, 400),
    count: int = 10,
    seed: int = 0,
    cfg: SolverConfig | None = None,
) -> BenchReport:
    """Scaling run on planted-Hamilton degree-{3,4} instances.

    Per size: solver success rate, expansion and wall-time aggregates.
    Each run is capped at the ledger bound n(n-1)/2 + 1 expansions per
    stage, so any BudgetExceeded tally is a falsified bound.  The
    log-log slope over mean expansions is deterministic; the wall-time
    slope lives in the timing sidecar.
    """
    sizes = tuple(sizes)
    report = BenchReport(
        params={"sizes": ",".join(str(n) for n in sizes), "count": count, "seed": seed}
    )
    for n in sizes:
        if cfg is None:
            run_cfg = SolverConfig(max_expansions_per_stage=n * (n - 1) // 2 + 1)
        else:
            run_cfg = cfg
        bucket = {
            "n": n, "instances": 0, "success": 0, "budget_exceeded": 0,
            "expansions_sum": 0, "expansions_max": 0,
            "stages_sum": 0, "elapsed_sum": 0.0, "elapsed_max": 0.0,
        }
        for i in range(count):
            inst_seed = seed * 1_000_003 + n * 10_007 + i
            g, _witness = plant_hamiltonian(n, inst_seed)
            bucket["instances"] += 1
            try:
                outcome = find_h_path(g, run_cfg)
            except BudgetExceeded as exc:
                bucket["budget_exceeded"] += 1
                bucket["expansions_sum"] += exc.stats.expansions
                bucket["expansions_max"] = max(
                    bucket["expansions_max"], exc.stats.expansions
                )
                bucket["elapsed_sum"] += exc.stats.elapsed
                continue
            stats = outcome.stats
            if outcome.kind == "hamilton-path":
                bucket["success"] += 1
            bucket["expansions_sum"] += stats.expansions
            bucket["expansions_max"] = max(bucket["expansions_max"], stats.expansions)
            bucket["stages_sum"] += stats.stages
            bucket["elapsed_sum"] += stats.elapsed
            bucket["elapsed_max"] = max(bucket["elapsed_max"], stats.elapsed)
        report.per_n.append(bucket)

    xs = [b["n"] for b in report.per_n if b["instances"]]
    if len(xs) >= 2:
        log_n = np.log([float(x) for x in xs])
        mean_exp = [
            max(b["expansions_sum"] / b["instances"], 1e-9)
            for b in report.per_n
            if b["instances"]
        ]
        mean_t = [
            max(b["elapsed_sum"] / b["instances"], 1e-12)
            for b in report.per_n
            if b["instances"]
        ]
        report.slope_expansions = float(np.polyfit(log_n, np.log(mean_exp), 1)[0])
        report.slope_time = float(np.polyfit(log_n, np.log(mean_t), 1)[0])
    return report


def render_bench(report: BenchReport) -> str:
    """Canonical deterministic rendering (expansions, not wall time)."""
    lines = []
    meta = " ".join(f"{k}={report.params[k]}" for k in sorted(report.params))
    lines.append(f"record=bench-meta {meta}")
    for b in report.per_n:
        inst = b["instances"] or 1
        lines.append(
            "record=bench-n"
            f" budget_exceeded={b['budget_exceeded']}"
            f" expansions_max={b['expansions_max']}"
            f" expansions_mean={b['expansions_sum'] / inst:.6f}"
            f" instances={b['instances']}"
            f" n={b['n']}"
            f" stages_mean={b['stages_sum'] / inst:.6f}"
            f" success={b['success']}"
            f" success_rate={b['success'] / inst:.6f}"
        )
    lines.append(
        f"record=bench-summary slope_expansions={report.slope_expansions:.6f}"
    )
    return "\n".join(lines) + "\n"


def render_bench_timing(report: BenchReport) -> str:
    lines = ["# timing sidecar (wall clock, not reproducible)"]
    for b in report.per_n:
        inst = b["instances"] or 1
        lines.append(
            f"timing bench n={b['n']}"
            f" elapsed_mean={b['elapsed_sum'] / inst:.6f}"
            f" elapsed_max={b['elapsed_max']:.6f}"
        )
    lines.append(f"timing bench slope_time={report.slope_time:.6f}")
    return "\n".join(lines) + "\n"


@dataclass
class HuntReport:
    params: dict
    instances: int = 0
    verdicts: dict = field(default_factory=dict)
    counterexamples: list[str] = field(default_factory=list)


def hunt(
    n: int,
    count: int,
    seed: int = 0,
    cfg: SolverConfig | None = None,
    out_dir: str | Path | None = None,
) -> HuntReport:
    """Sampled counterexample hunt: random degree-{3,4} graphs at one
    size, cross-checked; every SolverIncomplete hit is minimized and
    exported."""
    if cfg is None:
        cfg = SolverConfig()
    report = HuntReport(params={"n": n, "count": count, "seed": seed})
    verdicts: dict[str, int] = {}
    for i in range(count):
        g = generate_low_degree(n, seed + i)
        row = run_instance(g, cfg)
        verdicts[row["verdict"]] = verdicts.get(row["verdict"], 0) + 1
        report.instances += 1
        if row["verdict"] == SOLVER_INCOMPLETE:
            name = f"hunt_n{n}_seed{seed + i}.graph"
            if out_dir is not None:
                small = minimize_counterexample(g, cfg)
                save_graph(
                    small,
                    Path(out_dir) / name,
                    comments=[
                        "verdict: SolverIncomplete",
                        f"solver_mode: {cfg.mode} ledger: {cfg.ledger_mode}",
                        f"generator_seed: {seed + i}",
                    ],
                )
            report.counterexamples.append(name)
    report.verdicts = verdicts
    return report


def render_hunt(report: HuntReport) -> str:
    lines = []
    meta = " ".join(f"{k}={report.params[k]}" for k in sorted(report.params))
    lines.append(f"record=hunt-meta {meta}")
    for verdict in sorted(report.verdicts):
        lines.append(f"record=hunt-verdict count={report.verdicts[verdict]} verdict={verdict}")
    for name in report.counterexamples:
        lines.append(f"record=hunt-counterexample file={name}")
    lines.append(f"record=hunt-summary instances={report.instances}")
    return "\n".join(lines) + "\n"


def sat_pipeline(formula: Formula, cfg: SolverConfig | None = None) -> dict:
    """reduce -> solve -> decode -> verify, cross-checked against DPLL.

    Returns a dict with the solver's claim, the decoded assignment (if
    any), DPLL's answer, and whether they agree.  The solver claiming
    UNSAT while DPLL finds a model is a live counterexample to the
    heuristic's completeness and is marked disagreement.
    """
    if cfg is None:
        cfg = SolverConfig()
    rmap = reduce_3sat(formula)
    dpll = dpll_solve(formula)
    result = {
        "num_vars": formula.num_vars,
        "num_clauses": len(formula.clauses),
        "reduced_n": rmap.graph.n,
        "dpll_sat": dpll is not None,
    }
    try:
        outcome = find_h_path(rmap.graph, cfg)
        budget_exceeded = False
    except BudgetExceeded:
        outcome = None
        budget_exceeded = True
    result["budget_exceeded"] = budget_exceeded
    if outcome is not None and outcome.kind == "hamilton-path":
        assignment = decode_assignment(outcome.witness, rmap)
        result["sat_claim"] = True
        result["assignment"] = assignment
    else:
        result["sat_claim"] = False
        result["assignment"] = None
    if budget_exceeded:
        result["agreement"] = "budget-exceeded"
    else:
        result["agreement"] = (
            "agree" if result["sat_claim"] == result["dpll_sat"] else "DISAGREEMENT"
        )
    return result
