"""Broad-path cut-and-insert search for Hamilton paths.

A broad path is a permutation of all n vertices pinned to start at
vertex 0 and end at n-1; consecutive vertices need not be adjacent.
Each non-adjacent consecutive pair is a break point, and one break is
designated the main break point.  The only move is "cut and insert":
excise a contiguous segment whose far end abuts the main break and
splice it (forwards or reversed) into another gap of the sequence,

    0 .. x y .. a b .. c*d .. n-1   ->   0 .. x b .. c y .. a d .. n-1

where c*d is the main break and (x,y) the target gap.  The move
destroys three consecutive pairs (the gap, the segment boundary, the
main break) and creates three new junctions: (x, inserted-left-end),
(inserted-right-end, y), and (a, d).  Moves are classed by how many of
the new junctions are non-edges: Do0 heals the break outright, Do1
trades it for one new break, Do2 for two.  Every new main break point
must be globally fresh within a stage: a symmetric ledger of vertex
pairs is consumed as states are enqueued, which bounds the whole
search by n(n-1)/2 expansions per stage.

The driver turns an arbitrary start permutation into a Hamilton path
of the input graph by treating the permutation's initial breaks as
virtual edges and deleting them one per stage, re-running the
breadth-first repair search each time.  The mirror image of the
pattern above (segment to the right of the break, gap further right)
is enumerated as side="right"; with pinned endpoints the sequence can
never be reversed wholesale, so both sides are needed for full
coverage.
"""

from __future__ import annotations

import logging
import random
from collections import deque
from dataclasses import dataclass, field
from time import perf_counter

import numpy as np

from .graph import Graph, connected, is_hamilton_path

log = logging.getLogger("broadpath.engine")


class StructuralError(ValueError):
    """Cut-and-insert ranges overlap or touch a pinned endpoint."""


class BudgetExceeded(RuntimeError):
    """A stage passed the hard expansion cap.

    This is a distinct outcome, never folded into a no-path claim: it
    signals a violation of the polynomial expansion bound, not a
    property of the input graph.
    """

    def __init__(self, message: str, stats: "SearchStats"):
        super().__init__(message)
        self.stats = stats


@dataclass(frozen=True)
class SolverConfig:
    mode: str = "fixed-st"              # "fixed-st" | "any-endpoints"
    ledger_mode: str = "unified"        # "unified" | "split"
    initial_order_seed: int | None = None
    max_expansions_per_stage: int | None = None   # None -> n*n
    dedup: bool = False
    trace: bool | None = None           # None -> on for n <= 64


@dataclass(frozen=True)
class BroadPath:
    """A search state: the order, its break positions, its main break.

    breaks lists every position i with order[i] not adjacent to
    order[i+1], ascending; main_break is a sorted vertex pair and must
    be one of the break pairs whenever breaks is non-empty.
    """

    order: tuple[int, ...]
    breaks: tuple[int, ...]
    main_break: tuple[int, int] | None


@dataclass(frozen=True)
class CutMove:
    """One cut-and-insert candidate.

    gap is the position of the consecutive pair (x, y); seg the
    position range [lo, hi] of the cut segment.  orientation "forward"
    splices the segment in its original sequence order, "reversed"
    flips it (for side="right" the original order reads from the break
    outwards, mirroring the side="left" pattern).  b names the segment
    end away from the main break, c the end abutting it, a the vertex
    just outside the segment opposite c, and d the vertex across the
    main break from c.  new_main is the child's main break pair; None
    only for Do0 moves whose child has no breaks left.
    """

    side: str                 # "left" | "right"
    gap: int
    seg: tuple[int, int]
    orientation: str          # "forward" | "reversed"
    do_class: int             # 0 | 1 | 2
    new_main: tuple[int, int] | None
    x: int
    y: int
    a: int
    b: int
    c: int
    d: int


@dataclass
class SearchStats:
    expansions: int = 0
    children_kept: int = 0
    ledger_consumed: dict = field(default_factory=lambda: {"B": 0, "B1": 0})
    max_queue: int = 0
    stages: int = 0
    elapsed: float = 0.0
    # per-stage expansion counts; instrumentation only, not serialized
    per_stage_expansions: list = field(default_factory=list)


@dataclass
class SearchOutcome:
    kind: str                                  # "hamilton-path" | "no-path-claim"
    witness: tuple[int, ...] | None
    stats: SearchStats
    trace: list[CutMove] | None = None
    initial_order: tuple[int, ...] | None = None


class Ledger:
    """Symmetric availability table over unordered vertex pairs.

    Unified mode keeps one table B; split mode adds B1 and routes each
    consumption by the child's break count (1 -> B, 2 -> B1).  Entries
    only ever move from available to consumed within a stage.
    """

    def __init__(self, n: int, mode: str = "unified"):
        if mode not in ("unified", "split"):
            raise ValueError(f"bad ledger mode {mode!r}")
        self.n = n
        self.mode = mode
        self.tables = {"B": np.ones((n, n), dtype=bool)}
        if mode == "split":
            self.tables["B1"] = np.ones((n, n), dtype=bool)
        self.consumed = {"B": 0, "B1": 0}

    def _name(self, child_breaks: int) -> str:
        return "B1" if self.mode == "split" and child_breaks == 2 else "B"

    def table(self, child_breaks: int = 1) -> np.ndarray:
        return self.tables[self._name(child_breaks)]

    def available(self, pair: tuple[int, int], child_breaks: int = 1) -> bool:
        u, v = pair
        return bool(self.table(child_breaks)[u, v])

    def try_consume(self, pair: tuple[int, int], child_breaks: int = 1) -> bool:
        u, v = pair
        name = self._name(child_breaks)
        t = self.tables[name]
        if not t[u, v]:
            return False
        t[u, v] = t[v, u] = False
        self.consumed[name] += 1
        return True


def _pair(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


def compute_breaks(g: Graph, order) -> tuple[int, ...]:
    """Positions i where order[i] and order[i+1] are not adjacent."""
    arr = np.asarray(order)
    if arr.size <= 1:
        return ()
    bad = ~g.adj[arr[:-1], arr[1:]]
    return tuple(np.flatnonzero(bad).tolist())


def make_broad_path(g: Graph, order, main_break=None) -> BroadPath:
    """Build a validated BroadPath; main_break defaults to the first break."""
    order = tuple(order)
    n = len(order)
    if sorted(order) != list(range(n)) or order[0] != 0 or order[-1] != n - 1:
        raise StructuralError("order must be a 0..n-1 permutation pinned at 0 and n-1")
    breaks = compute_breaks(g, order)
    if main_break is None and breaks:
        i = breaks[0]
        main_break = _pair(order[i], order[i + 1])
    if breaks:
        pairs = {_pair(order[i], order[i + 1]) for i in breaks}
        if main_break not in pairs:
            raise StructuralError(f"main break {main_break} is not a break of the order")
    return BroadPath(order, breaks, main_break if breaks else None)


def _splice(seq: tuple, gap: int, lo: int, hi: int, reverse: bool) -> tuple:
    seg = seq[lo:hi + 1]
    if reverse:
        seg = seg[::-1]
    if hi < gap:
        return seq[:lo] + seq[hi + 1:gap + 1] + seg + seq[gap + 1:]
    return seq[:gap + 1] + seg + seq[gap + 1:lo] + seq[hi + 1:]


def cut_and_insert(s, m: CutMove) -> tuple[int, ...]:
    """Pure sequence surgery; adjacency is never consulted here."""
    seq = tuple(s)
    n = len(seq)
    lo, hi = m.seg
    gap = m.gap
    if not (1 <= lo <= hi <= n - 2):
        raise StructuralError(f"segment {m.seg} touches an endpoint of a {n}-sequence")
    if not (0 <= gap <= n - 2):
        raise StructuralError(f"gap {gap} out of range")
    if not (gap + 1 < lo or gap > hi):
        raise StructuralError(f"gap {gap} overlaps segment {m.seg}")
    return _splice(seq, gap, lo, hi, m.orientation == "reversed")


def _scan_grids(adj: np.ndarray, o: np.ndarray, k: int):
    """Junction masks for every structurally valid (side, gap, segment).

    Returns one bundle per side with, for each orientation, the
    adjacency of the three new junctions over the (gap, segment-outer)
    grid.  The gap pair and the segment's outer boundary pair must both
    be edges: they are destroyed by the move, and spending a break
    there would change the break algebra (it also silently excludes
    the secondary break of a two-break state from both roles).
    """
    n = o.size
    grids = []
    if k >= 2:
        i_vals = np.arange(0, k - 1)
        s_vals = np.arange(2, k + 1)
        gap_edge = adj[o[i_vals], o[i_vals + 1]]
        outer_edge = adj[o[s_vals - 1], o[s_vals]]
        valid = (
            (i_vals[:, None] <= s_vals[None, :] - 2)
            & gap_edge[:, None]
            & outer_edge[None, :]
        )
        if valid.any():
            grids.append({
                "side": "left", "i_vals": i_vals, "s_vals": s_vals,
                "valid": valid,
                "j3": adj[o[s_vals - 1], o[k + 1]],
                "orients": {
                    "forward": {
                        "j1": adj[np.ix_(o[i_vals], o[s_vals])],
                        "j2": adj[o[k], o[i_vals + 1]],
                    },
                    "reversed": {
                        "j1": adj[np.ix_(o[i_vals + 1], o[s_vals])],
                        "j2": adj[o[i_vals], o[k]],
                    },
                },
            })
    if k <= n - 4:
        s_vals = np.arange(k + 1, n - 2)
        i_vals = np.arange(k + 2, n - 1)
        gap_edge = adj[o[i_vals], o[i_vals + 1]]
        outer_edge = adj[o[s_vals], o[s_vals + 1]]
        valid = (
            (i_vals[:, None] >= s_vals[None, :] + 1)
            & gap_edge[:, None]
            & outer_edge[None, :]
        )
        if valid.any():
            grids.append({
                "side": "right", "i_vals": i_vals, "s_vals": s_vals,
                "valid": valid,
                "j3": adj[o[s_vals + 1], o[k]],
                "orients": {
                    "forward": {
                        "j1": adj[np.ix_(o[i_vals + 1], o[s_vals])],
                        "j2": adj[o[i_vals], o[k + 1]],
                    },
                    "reversed": {
                        "j1": adj[np.ix_(o[i_vals], o[s_vals])],
                        "j2": adj[o[k + 1], o[i_vals + 1]],
                    },
                },
            })
    return grids


def _grid_pair_arrays(bundle, o, k, orient, rows, cols):
    """Junction vertex-pair arrays for selected cells of one bundle."""
    side = bundle["side"]
    i = bundle["i_vals"][rows]
    s = bundle["s_vals"][cols]
    if side == "left":
        if orient == "forward":
            p1 = (o[i], o[s])                  # (x, b)
            p2 = (np.full_like(i, o[k]), o[i + 1])   # (c, y)
        else:
            p1 = (o[i + 1], o[s])              # (b, y) stored grid-side
            p2 = (o[i], np.full_like(i, o[k]))       # (x, c)
        p3 = (o[s - 1], np.full_like(s, o[k + 1]))   # (a, d)
    else:
        if orient == "forward":
            p1 = (o[i + 1], o[s])              # (b, y)
            p2 = (o[i], np.full_like(i, o[k + 1]))   # (x, c)
        else:
            p1 = (o[i], o[s])                  # (x, b)
            p2 = (np.full_like(i, o[k + 1]), o[i + 1])  # (c, y)
        p3 = (o[s + 1], np.full_like(s, o[k]))       # (a, d)
    return p1, p2, p3


def _cell_move(bundle, o, k, orient, r, c, do_class, new_main) -> CutMove:
    side = bundle["side"]
    i = int(bundle["i_vals"][r])
    s = int(bundle["s_vals"][c])
    if side == "left":
        seg = (s, k)
        a, b, cc, d = int(o[s - 1]), int(o[s]), int(o[k]), int(o[k + 1])
    else:
        seg = (k + 1, s)
        a, b, cc, d = int(o[s + 1]), int(o[s]), int(o[k + 1]), int(o[k])
    return CutMove(
        side=side, gap=i, seg=seg, orientation=orient, do_class=do_class,
        new_main=new_main, x=int(o[i]), y=int(o[i + 1]), a=a, b=b, c=cc, d=d,
    )


def _broken_counts(bundle, orient):
    g1 = ~bundle["orients"][orient]["j1"]
    g2 = ~bundle["orients"][orient]["j2"]
    g3 = ~bundle["j3"]
    return g1.astype(np.int8) + g2[:, None] + g3[None, :]


def enumerate_moves(g_adj, p: BroadPath, led: Ledger) -> list[CutMove]:
    """All classified cut-and-insert moves of one state, in generation
    order (side, gap position, segment outer boundary, orientation; a
    Do2 cell yields its gap-junction-main move before its (a,d)-main
    move).  Moves whose new main break pair is already consumed are
    excluded; Do0 moves on a one-break state carry new_main=None and
    are always included.

    g_adj may be a Graph or a boolean adjacency matrix.
    """
    adj = g_adj.adj if isinstance(g_adj, Graph) else g_adj
    if not (1 <= len(p.breaks) <= 2) or p.main_break is None:
        raise StructuralError("state must have one or two breaks and a main break")
    o = np.asarray(p.order)
    n = o.size
    k = _main_position(p)
    parent_breaks = len(p.breaks)
    secondary = _secondary_pair(p)
    moves: list[tuple] = []

    for bundle in _scan_grids(adj, o, k):
        side_code = 0 if bundle["side"] == "left" else 1
        valid = bundle["valid"]
        for orient_code, orient in enumerate(("forward", "reversed")):
            cnt = _broken_counts(bundle, orient)
            ad_broken = ~bundle["j3"]
            for do_class in (0, 1, 2):
                if parent_breaks - 1 + do_class > 2:
                    continue
                mask = valid & (cnt == do_class)
                if do_class == 2:
                    mask &= ad_broken[None, :]
                if not mask.any():
                    continue
                rows, cols = np.nonzero(mask)
                p1, p2, p3 = _grid_pair_arrays(bundle, o, k, orient, rows, cols)
                b1 = ~bundle["orients"][orient]["j1"][rows, cols]
                b2 = ~bundle["orients"][orient]["j2"][rows]
                b3 = ad_broken[cols]
                for t in range(rows.size):
                    r, c = int(rows[t]), int(cols[t])
                    i_pos = int(bundle["i_vals"][r])
                    s_pos = int(bundle["s_vals"][c])
                    key = (side_code, i_pos, s_pos, orient_code)
                    if do_class == 0:
                        nm = secondary if parent_breaks == 2 else None
                        moves.append((key + (0,), bundle, orient, r, c, 0, nm))
                    elif do_class == 1:
                        if b1[t]:
                            nm = _pair(int(p1[0][t]), int(p1[1][t]))
                        elif b2[t]:
                            nm = _pair(int(p2[0][t]), int(p2[1][t]))
                        else:
                            nm = _pair(int(p3[0][t]), int(p3[1][t]))
                        moves.append((key + (0,), bundle, orient, r, c, 1, nm))
                    else:
                        gap_nm = (
                            _pair(int(p1[0][t]), int(p1[1][t]))
                            if b1[t]
                            else _pair(int(p2[0][t]), int(p2[1][t]))
                        )
                        ad_nm = _pair(int(p3[0][t]), int(p3[1][t]))
                        moves.append((key + (0,), bundle, orient, r, c, 2, gap_nm))
                        moves.append((key + (1,), bundle, orient, r, c, 2, ad_nm))

    moves.sort(key=lambda rec: rec[0])
    out = []
    for key, bundle, orient, r, c, do_class, nm in moves:
        child_breaks = parent_breaks - 1 + do_class
        if nm is not None and not led.available(nm, max(child_breaks, 1)):
            continue
        out.append(_cell_move(bundle, o, k, orient, r, c, do_class, nm))
    return out


def _main_position(p: BroadPath) -> int:
    for i in p.breaks:
        if _pair(p.order[i], p.order[i + 1]) == p.main_break:
            return i
    raise StructuralError(f"main break {p.main_break} not found among breaks")


def _secondary_pair(p: BroadPath) -> tuple[int, int] | None:
    if len(p.breaks) < 2:
        return None
    main_pos = _main_position(p)
    for i in p.breaks:
        if i != main_pos:
            return _pair(p.order[i], p.order[i + 1])
    return None


def expand(g_adj, p: BroadPath, led: Ledger):
    """Apply one state's moves class by class, consuming the ledger.

    Do0 first: on a one-break state the first Do0 child is a Hamilton
    path and is returned immediately with no children (it consumes
    nothing).  Otherwise Do1 children then Do2 children are kept, each
    consuming its new main break pair at enqueue time; a move whose
    pair was just consumed by an earlier sibling is dropped.
    Returns (hamilton_path_or_None, kept_children).
    """
    adj = g_adj.adj if isinstance(g_adj, Graph) else g_adj
    parent_breaks = len(p.breaks)
    moves = enumerate_moves(adj, p, led)
    children: list[BroadPath] = []
    for do_class in (0, 1, 2):
        for m in moves:
            if m.do_class != do_class:
                continue
            child_order = cut_and_insert(p.order, m)
            if do_class == 0 and parent_breaks == 1:
                return child_order, []
            child_breaks = parent_breaks - 1 + do_class
            if led.try_consume(m.new_main, child_breaks):
                children.append(
                    BroadPath(child_order, _child_breaks(adj, child_order), m.new_main)
                )
    return None, children


def _child_breaks(adj: np.ndarray, order: tuple) -> tuple[int, ...]:
    arr = np.asarray(order)
    return tuple(np.flatnonzero(~adj[arr[:-1], arr[1:]]).tolist())


def _lexsorted_cells(entries):
    """entries: list of (side_code, i_arr, s_arr, orient_code, extra arrays...).
    Concatenate and lexsort by (side, i, s, orient, block)."""
    if not entries:
        return None
    cols = [np.concatenate([e[j] for e in entries]) for j in range(len(entries[0]))]
    order = np.lexsort(tuple(reversed(cols[:5])))
    return [c[order] for c in cols]


def _expand_fast(adj, o_arr, p: BroadPath, led: Ledger, want_moves: bool):
    """Batched equivalent of expand(): identical consumption order, but
    cells that cannot win their ledger pair are never materialized.

    Returns (hp_order, hp_move, children) where children is a list of
    (child_order, main_pair, move_or_None).
    """
    n = o_arr.size
    k = _main_position(p)
    parent_breaks = len(p.breaks)
    secondary = _secondary_pair(p)
    grids = _scan_grids(adj, o_arr, k)
    order_t = p.order

    def build_child(bundle, orient, r, c, do_class, nm):
        side = bundle["side"]
        i = int(bundle["i_vals"][r])
        s = int(bundle["s_vals"][c])
        lo, hi = (s, k) if side == "left" else (k + 1, s)
        child = _splice(order_t, i, lo, hi, orient == "reversed")
        move = _cell_move(bundle, o_arr, k, orient, r, c, do_class, nm) if want_moves else None
        return child, move

    # Do0: only the lexicographically first cell can matter
    best = None
    for g_i, bundle in enumerate(grids):
        side_code = 0 if bundle["side"] == "left" else 1
        for orient_code, orient in enumerate(("forward", "reversed")):
            mask = bundle["valid"] & (_broken_counts(bundle, orient) == 0)
            rows_any = mask.any(axis=1)
            if not rows_any.any():
                continue
            r = int(np.argmax(rows_any))
            c = int(np.argmax(mask[r]))
            key = (side_code, int(bundle["i_vals"][r]), int(bundle["s_vals"][c]), orient_code)
            if best is None or key < best[0]:
                best = (key, bundle, orient, r, c)
    children: list[tuple] = []
    if best is not None:
        _, bundle, orient, r, c = best
        if parent_breaks == 1:
            child, move = build_child(bundle, orient, r, c, 0, None)
            return child, move, []
        if led.try_consume(secondary, 1):
            child, move = build_child(bundle, orient, r, c, 0, secondary)
            children.append((child, secondary, move))

    # Do1 then Do2, each phase batched; first emission per pair wins
    for do_class in (1, 2):
        child_breaks = parent_breaks - 1 + do_class
        if child_breaks > 2:
            continue
        entries = []
        for g_i, bundle in enumerate(grids):
            side_code = 0 if bundle["side"] == "left" else 1
            ad_broken = ~bundle["j3"]
            for orient_code, orient in enumerate(("forward", "reversed")):
                cnt = _broken_counts(bundle, orient)
                mask = bundle["valid"] & (cnt == do_class)
                if do_class == 2:
                    mask &= ad_broken[None, :]
                if not mask.any():
                    continue
                rows, cols = np.nonzero(mask)
                p1, p2, p3 = _grid_pair_arrays(bundle, o_arr, k, orient, rows, cols)
                b1 = ~bundle["orients"][orient]["j1"][rows, cols]
                b2 = ~bundle["orients"][orient]["j2"][rows]
                i_pos = bundle["i_vals"][rows]
                s_pos = bundle["s_vals"][cols]
                side_col = np.full(rows.size, side_code, dtype=np.int64)
                orient_col = np.full(rows.size, orient_code, dtype=np.int64)
                gcol = np.full(rows.size, g_i, dtype=np.int64)
                if do_class == 1:
                    u = np.where(b1, p1[0], np.where(b2, p2[0], p3[0]))
                    v = np.where(b1, p1[1], np.where(b2, p2[1], p3[1]))
                    block = np.zeros(rows.size, dtype=np.int64)
                    entries.append([side_col, i_pos, s_pos, orient_col, block,
                                    u, v, rows, cols, gcol])
                else:
                    gu = np.where(b1, p1[0], p2[0])
                    gv = np.where(b1, p1[1], p2[1])
                    for block_id, (uu, vv) in enumerate(((gu, gv), p3)):
                        block = np.full(rows.size, block_id, dtype=np.int64)
                        entries.append([side_col, i_pos, s_pos, orient_col, block,
                                        np.asarray(uu), np.asarray(vv), rows, cols, gcol])
        cells = _lexsorted_cells(entries)
        if cells is None:
            continue
        side_col, i_pos, s_pos, orient_col, block, u, v, rows, cols, gcol = cells
        lo = np.minimum(u, v)
        hi = np.maximum(u, v)
        codes = lo * n + hi
        _, first = np.unique(codes, return_index=True)
        first.sort()
        table = led.table(child_breaks)
        for t in first:
            pair = (int(lo[t]), int(hi[t]))
            if not table[pair[0], pair[1]]:
                continue
            led.try_consume(pair, child_breaks)
            bundle = grids[int(gcol[t])]
            orient = "forward" if orient_col[t] == 0 else "reversed"
            child, move = build_child(bundle, orient, int(rows[t]), int(cols[t]), do_class, pair)
            children.append((child, pair, move))
    return None, None, children


def initial_order(n: int, seed: int | None = None) -> tuple[int, ...]:
    """Identity permutation, or a seeded shuffle of the interior."""
    order = list(range(n))
    if seed is not None and n > 3:
        interior = order[1:-1]
        random.Random(seed).shuffle(interior)
        order = [0] + interior + [n - 1]
    return tuple(order)


def _wrap_any_endpoints(g: Graph) -> Graph:
    """Two auxiliary vertices adjacent to every original vertex, pinned
    as the new endpoints 0 and n+1; originals shift up by one."""
    n = g.n
    edges = [(u + 1, v + 1) for u, v in g.edges]
    edges += [(0, v + 1) for v in range(n)]
    edges += [(v + 1, n + 1) for v in range(n)]
    return Graph(n + 2, edges)


def _bfs_stage(stage_adj, root_order, removed_pair, cfg, stats, trace_on, n):
    """One virtual-edge stage: repair a single break breadth-first.

    Returns (found_order, move_chain) or (None, None) when the frontier
    empties without producing a Hamilton path of the stage graph.
    """
    ledger = Ledger(n, cfg.ledger_mode)
    cap = cfg.max_expansions_per_stage if cfg.max_expansions_per_stage is not None else n * n
    root_breaks = _child_breaks(stage_adj, root_order)
    root = BroadPath(tuple(root_order), root_breaks, removed_pair)
    assert len(root_breaks) == 1, "stage root must have exactly one break"
    consumed = ledger.try_consume(removed_pair, 1)
    assert consumed
    stats.children_kept += 1

    arena: list[tuple[BroadPath, int, CutMove | None]] = [(root, -1, None)]
    queue = deque([0])
    seen = {root.order} if cfg.dedup else None
    stats.max_queue = max(stats.max_queue, 1)
    expansions_here = 0

    def chain(idx: int, last_move: CutMove | None) -> list[CutMove] | None:
        if not trace_on:
            return None
        moves = []
        while idx >= 0:
            state, parent, mv = arena[idx]
            if mv is not None:
                moves.append(mv)
            idx = parent
        moves.reverse()
        if last_move is not None:
            moves.append(last_move)
        return moves

    while queue:
        idx = queue.popleft()
        state = arena[idx][0]
        stats.expansions += 1
        expansions_here += 1
        if expansions_here > cap:
            stats.per_stage_expansions.append(expansions_here)
            raise BudgetExceeded(
                f"stage expansion cap {cap} exceeded (n={n})", stats
            )
        o_arr = np.asarray(state.order)
        hp, hp_move, kids = _expand_fast(stage_adj, o_arr, state, ledger, trace_on)
        if hp is not None:
            stats.per_stage_expansions.append(expansions_here)
            for name, count in ledger.consumed.items():
                stats.ledger_consumed[name] = stats.ledger_consumed.get(name, 0) + count
            return hp, chain(idx, hp_move)
        for child_order, pair, move in kids:
            if seen is not None:
                if child_order in seen:
                    continue
                seen.add(child_order)
            child = BroadPath(child_order, _child_breaks(stage_adj, child_order), pair)
            arena.append((child, idx, move))
            queue.append(len(arena) - 1)
            stats.children_kept += 1
        stats.max_queue = max(stats.max_queue, len(queue))
    stats.per_stage_expansions.append(expansions_here)
    for name, count in ledger.consumed.items():
        stats.ledger_consumed[name] = stats.ledger_consumed.get(name, 0) + count
    return None, None


def find_h_path(g: Graph, cfg: SolverConfig | None = None) -> SearchOutcome:
    """Staged broad-path search for a Hamilton path of g.

    The initial permutation's break pairs become virtual edges; each
    stage deletes one virtual edge still in use and runs a
    breadth-first repair with a fresh ledger until a Hamilton path of
    the (still possibly augmented) graph is found.  When every virtual
    edge is gone the current path is a Hamilton path of g itself; a
    stage whose frontier empties yields a no-path claim, which is the
    heuristic's answer, not ground truth.  Raises BudgetExceeded when a
    stage passes the hard expansion cap.

    In any-endpoints mode the graph is wrapped in two universal
    auxiliary endpoints, solved in fixed mode, and stripped; traces are
    not kept for wrapped runs.
    """
    if cfg is None:
        cfg = SolverConfig()
    if cfg.mode == "any-endpoints":
        wrapped = _wrap_any_endpoints(g)
        inner = SolverConfig(
            mode="fixed-st",
            ledger_mode=cfg.ledger_mode,
            initial_order_seed=cfg.initial_order_seed,
            max_expansions_per_stage=cfg.max_expansions_per_stage,
            dedup=cfg.dedup,
            trace=False,
        )
        outcome = find_h_path(wrapped, inner)
        if outcome.kind == "hamilton-path":
            stripped = tuple(v - 1 for v in outcome.witness[1:-1])
            assert is_hamilton_path(g, stripped)
            return SearchOutcome("hamilton-path", stripped, outcome.stats, None, None)
        return SearchOutcome(outcome.kind, None, outcome.stats, None, None)
    if cfg.mode != "fixed-st":
        raise ValueError(f"unknown mode {cfg.mode!r}")

    stats = SearchStats()
    t0 = perf_counter()
    n = g.n
    trace_on = cfg.trace if cfg.trace is not None else (n <= 64)

    if n > 1 and not connected(g):
        log.info("pre-filtered: graph is disconnected, no Hamilton path possible")
        stats.elapsed = perf_counter() - t0
        return SearchOutcome("no-path-claim", None, stats, None, None)

    start = initial_order(n, cfg.initial_order_seed)
    virtual = {
        _pair(start[i], start[i + 1]) for i in compute_breaks(g, start)
    }
    current = start
    trace: list[CutMove] | None = [] if trace_on else None

    while True:
        used = {
            _pair(current[i], current[i + 1])
            for i in range(n - 1)
        }
        virtual &= used
        if not virtual:
            break
        positions = {
            _pair(current[i], current[i + 1]): i for i in range(n - 1)
        }
        removed = min(virtual, key=lambda e: positions[e])
        virtual.discard(removed)
        stage_graph = Graph(n, list(g.edges) + sorted(virtual))
        stats.stages += 1
        found, moves = _bfs_stage(
            stage_graph.adj, current, removed, cfg, stats, trace_on, n
        )
        if found is None:
            stats.elapsed = perf_counter() - t0
            return SearchOutcome("no-path-claim", None, stats, None, start)
        if trace is not None and moves is not None:
            trace.extend(moves)
        current = found

    witness = tuple(current)
    assert is_hamilton_path(g, witness), "unsound witness, this is a bug"
    stats.elapsed = perf_counter() - t0
    return SearchOutcome("hamilton-path", witness, stats, trace, start)


def replay_trace(start_order, trace) -> tuple[int, ...]:
    """Re-apply a trace's moves from the run's initial order."""
    seq = tuple(start_order)
    for move in trace:
        seq = cut_and_insert(seq, move)
    return seq


def outcome_record(outcome: SearchOutcome) -> str:
    """One-line key-ordered serialization of a search outcome."""
    stats = outcome.stats
    witness = (
        ",".join(str(v) for v in outcome.witness)
        if outcome.witness is not None
        else "-"
    )
    fields = {
        "children_kept": stats.children_kept,
        "elapsed": f"{stats.elapsed:.6f}",
        "expansions": stats.expansions,
        "ledger_consumed_b": stats.ledger_consumed.get("B", 0),
        "ledger_consumed_b1": stats.ledger_consumed.get("B1", 0),
        "max_queue": stats.max_queue,
        "result": outcome.kind,
        "stages": stats.stages,
        "witness": witness,
    }
    return " ".join(f"{k}={fields[k]}" for k in sorted(fields))
