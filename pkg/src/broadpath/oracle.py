"""Ground-truth Hamilton path decisions for small graphs.

Two engines: a bitmask dynamic program over (visited subset, last
vertex) states for n <= 24, and budgeted backtracking with sound
pruning beyond that.  Both are deterministic.  Also houses the
solver-vs-oracle verdict logic and counterexample minimization.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .graph import Graph, connected, is_hamilton_path

DP_LIMIT = 24
DEFAULT_NODE_BUDGET = 20_000_000

AGREE = "Agree"
SOLVER_UNSOUND = "SolverUnsound"
SOLVER_INCOMPLETE = "SolverIncomplete"


class TooLarge(ValueError):
    """Instance outside every supported exact regime."""


class Unknown(RuntimeError):
    """Backtracking node budget exhausted before a decision."""


class NotAFailure(ValueError):
    """minimize_counterexample called on a non-reproducing instance."""


@dataclass(frozen=True)
class OracleAnswer:
    exists: bool
    witness: tuple[int, ...] | None
    method: str


def _popcount(arr: np.ndarray) -> np.ndarray:
    v = arr - ((arr >> 1) & 0x55555555)
    v = (v & 0x33333333) + ((v >> 2) & 0x33333333)
    return (((v + (v >> 4)) & 0x0F0F0F0F) * 0x01010101) >> 24


def _dp_hpath(g: Graph, fixed: bool) -> OracleAnswer:
    """Subset DP: dp[mask] = bitset of feasible last vertices."""
    n = g.n
    if n == 1:
        return OracleAnswer(True, (0,), "bitmask-dp")
    nbr = np.zeros(n, dtype=np.uint32)
    for v in range(n):
        bits = 0
        for w in g.neighbors(v):
            bits |= 1 << w
        nbr[v] = bits

    size = 1 << n
    dp = np.zeros(size, dtype=np.uint32)
    masks = np.arange(size, dtype=np.uint32)
    pc = _popcount(masks)
    if fixed:
        dp[1 << 0] = 1 << 0
    else:
        for v in range(n):
            dp[1 << v] = np.uint32(1 << v)

    order = np.argsort(pc, kind="stable")
    layer_starts = np.searchsorted(pc[order], np.arange(n + 2))
    for k in range(2, n + 1):
        layer = order[layer_starts[k]:layer_starts[k + 1]]
        if fixed:
            layer = layer[(layer & 1) != 0]
        if layer.size == 0:
            continue
        for v in range(n):
            bit = np.uint32(1 << v)
            cand = layer[(layer & bit) != 0]
            if fixed and v == 0:
                continue
            if cand.size == 0:
                continue
            prev = dp[cand ^ bit]
            ok = (prev & nbr[v]) != 0
            if ok.any():
                hit = cand[ok]
                dp[hit] |= bit

    full = np.uint32(size - 1)
    finals = int(dp[full])
    if fixed:
        finals &= 1 << (n - 1)
    if finals == 0:
        return OracleAnswer(False, None, "bitmask-dp")

    # walk the table backwards, always taking the smallest predecessor
    v = (n - 1) if fixed else (finals & -finals).bit_length() - 1
    mask = size - 1
    path = [v]
    while mask & (mask - 1):
        parent = mask ^ (1 << v)
        prev_bits = int(dp[parent]) & int(nbr[v])
        assert prev_bits, "dp table inconsistent"
        v = (prev_bits & -prev_bits).bit_length() - 1
        path.append(v)
        mask = parent
    path.reverse()
    return OracleAnswer(True, tuple(path), "bitmask-dp")


def _backtrack_hpath(g: Graph, fixed: bool, node_budget: int) -> OracleAnswer:
    n = g.n
    if n == 1:
        return OracleAnswer(True, (0,), "backtracking")
    neighbors = [list(g.neighbors(v)) for v in range(n)]
    visited = [False] * n
    path: list[int] = []
    nodes = 0
    target = n - 1 if fixed else None

    def avail_degree(v: int, current: int) -> int:
        d = 0
        for w in neighbors[v]:
            if not visited[w] or w == current:
                d += 1
        return d

    def prune(current: int) -> bool:
        # unreachable or degree-starved remainder means a dead branch
        lone = 0
        for v in range(n):
            if visited[v] or v == current:
                continue
            d = avail_degree(v, current)
            if d == 0:
                return True
            if d == 1:
                if fixed:
                    if v != target:
                        return True
                else:
                    lone += 1
                    if lone > 1:
                        return True
        seen = {current}
        queue = deque([current])
        while queue:
            u = queue.popleft()
            for w in neighbors[u]:
                if not visited[w] and w not in seen:
                    seen.add(w)
                    queue.append(w)
        remaining = n - sum(visited)
        return len(seen) != remaining + 1

    def dfs(current: int) -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > node_budget:
            raise Unknown(f"node budget {node_budget} exhausted at n={n}")
        if len(path) == n:
            return target is None or current == target
        if prune(current):
            return False
        cand = [w for w in neighbors[current] if not visited[w]]
        cand.sort(key=lambda w: (avail_degree(w, current), w))
        for w in cand:
            if w == target and len(path) != n - 1:
                continue
            visited[w] = True
            path.append(w)
            if dfs(w):
                return True
            visited[w] = False
            path.pop()
        return False

    starts = [0] if fixed else list(range(n))
    for s in starts:
        visited = [False] * n
        visited[s] = True
        path = [s]
        if dfs(s):
            return OracleAnswer(True, tuple(path), "backtracking")
    return OracleAnswer(False, None, "backtracking")


def oracle_has_hpath(
    g: Graph,
    endpoints: str = "fixed",
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> OracleAnswer:
    """Exact Hamilton path decision with witness.

    endpoints: "fixed" pins the path to run 0 .. n-1; "any" accepts
    arbitrary endpoints.  Raises Unknown when the backtracking budget
    runs out; answers are deterministic otherwise.
    """
    if endpoints not in ("fixed", "any"):
        raise ValueError(f"endpoints must be 'fixed' or 'any', got {endpoints!r}")
    fixed = endpoints == "fixed"
    if not connected(g) and g.n > 1:
        return OracleAnswer(False, None, "bitmask-dp" if g.n <= DP_LIMIT else "backtracking")
    if g.n <= DP_LIMIT:
        answer = _dp_hpath(g, fixed)
    else:
        answer = _backtrack_hpath(g, fixed, node_budget)
    if answer.witness is not None:
        assert is_hamilton_path(g, answer.witness)
    return answer


def cross_check(g: Graph, outcome, endpoints: str = "fixed") -> str:
    """Verdict for a solver outcome against the exact oracle.

    outcome needs .kind ("hamilton-path" | "no-path-claim") and
    .witness; Agree / SolverUnsound / SolverIncomplete returned.
    SolverUnsound must never occur; SolverIncomplete falsifies the
    completeness claim and should be exported as a counterexample.
    """
    if outcome.kind == "hamilton-path":
        if not is_hamilton_path(g, outcome.witness):
            return SOLVER_UNSOUND
        if endpoints == "fixed" and g.n > 1:
            w = outcome.witness
            if w[0] != 0 or w[-1] != g.n - 1:
                return SOLVER_UNSOUND
        return AGREE
    answer = oracle_has_hpath(g, endpoints)
    return SOLVER_INCOMPLETE if answer.exists else AGREE


def _delete_vertex(g: Graph, victim: int) -> Graph:
    relabel = [v if v < victim else v - 1 for v in range(g.n)]
    edges = [
        (relabel[u], relabel[v])
        for u, v in g.edges
        if u != victim and v != victim
    ]
    return Graph(g.n - 1, edges)


def minimize_counterexample(g: Graph, cfg=None, endpoints: str = "fixed") -> Graph:
    """Greedy delta-debugging of a SolverIncomplete instance.

    Repeatedly drops single edges, then single vertices, keeping each
    removal only while the solver still claims no path and the oracle
    still finds one.  The result is a local minimum: no single removal
    preserves the failure.
    """
    from .engine import BudgetExceeded, SolverConfig, find_h_path

    if cfg is None:
        cfg = SolverConfig()

    def reproduces(h: Graph) -> bool:
        if h.n < 2:
            return False
        try:
            outcome = find_h_path(h, cfg)
        except BudgetExceeded:
            return False
        if outcome.kind != "no-path-claim":
            return False
        try:
            return oracle_has_hpath(h, endpoints).exists
        except (Unknown, TooLarge):
            return False

    if not reproduces(g):
        raise NotAFailure("instance does not reproduce SolverIncomplete")

    current = g
    improved = True
    while improved:
        improved = False
        for edge in list(current.edges):
            trial = Graph(current.n, [e for e in current.edges if e != edge])
            if reproduces(trial):
                current = trial
                improved = True
        for victim in range(current.n - 1, -1, -1):
            if current.n <= 2:
                break
            trial = _delete_vertex(current, victim)
            if reproduces(trial):
                current = trial
                improved = True
    return current
