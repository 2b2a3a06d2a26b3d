"""3SAT to Hamilton path reduction, decoding, and a DPLL reference solver.

The reduced graph is a fixed-endpoint instance (source 0, sink n-1)
built from variable zones and clause zones threaded on a forced rail;
the full construction with its correctness argument lives in
docs/reduction.md.  In brief:

* Variable zone: each variable i owns a terminal pair (t_i, f_i) with
  both of its occurrence chains strung in parallel between the
  terminals: t - [positive slots] - f and t - [negative slots] - f
  (an empty chain is a direct t-f edge).  The spine junctions between
  zones have degree exactly two, so every Hamilton path runs
  s_{i-1} -> t_i -> (one chain) -> f_i -> s_i, covering the slots of
  one polarity inline.  Covered-inline slots are the FALSE literals;
  x_i is True iff the walk takes the negative chain.

* Clause zone: a degree-two gate g forces the path into the fan
  vertex gamma, whose only other edges lead to the clause's three
  slot vertices.  Every Hamilton path therefore enters some slot
  directly from gamma: a structural certificate that this literal's
  slot was NOT consumed by its chain, i.e. that the literal is true.
  From the certificate slot the path moves to the collector r and onto
  a bypass rail u_0..u_3 whose per-slot cells absorb the clause's
  remaining true-literal slots; false-literal slots are bypassed.

* Decoding reads one certificate per clause off the gammas; setting
  exactly the certified literals true satisfies every clause, and
  remaining variables are read off their zone walks.

Every satisfying assignment yields a Hamilton path by construction;
the converse direction (no Hamilton path when unsatisfiable) rests on
the forced gates plus certificate consistency and is verified
empirically by the exhaustive dual-oracle suites.  Clauses are padded
to exactly three literal slots by repeating their last literal; an
empty clause's fan has no slots, leaving its gamma uncoverable, so a
Hamilton path is impossible.

Vertex count: 2V terminals + 10C clause-zone vertices + (V + 2)
rail/spine vertices = 3V + 10C + 2.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .graph import Graph, is_hamilton_path


class ParseError(ValueError):
    """Malformed DIMACS CNF content or invalid formula structure."""


class ClauseTooWide(ParseError):
    """Clause with more than three literals."""


class DecodeError(ValueError):
    """Hamilton path does not fit the reduction's gadget structure."""


@dataclass(frozen=True)
class Formula:
    """CNF with at most three literals per clause.

    Literals are DIMACS-style signed 1-based integers; clauses are
    tuples.  Contradictory clauses (x and not-x together) are invalid;
    an empty clause is allowed and marks the formula unsatisfiable.
    """

    num_vars: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.num_vars < 0:
            raise ParseError(f"negative variable count {self.num_vars}")
        for idx, clause in enumerate(self.clauses):
            if len(clause) > 3:
                raise ClauseTooWide(f"clause {idx} has {len(clause)} literals")
            seen = set()
            for lit in clause:
                if lit == 0:
                    raise ParseError(f"zero literal in clause {idx}")
                if abs(lit) > self.num_vars:
                    raise ParseError(
                        f"literal {lit} out of range for {self.num_vars} variables"
                    )
                if -lit in seen:
                    raise ParseError(f"contradictory clause {idx}: {clause}")
                seen.add(lit)


def parse_cnf(text: str) -> Formula:
    """Parse DIMACS CNF; comments ignored, clauses may span lines."""
    num_vars = None
    num_clauses = None
    tokens: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError(f"line {lineno}: bad problem line {line!r}")
            try:
                num_vars, num_clauses = int(parts[2]), int(parts[3])
            except ValueError:
                raise ParseError(f"line {lineno}: bad problem line {line!r}") from None
            continue
        if num_vars is None:
            raise ParseError(f"line {lineno}: clause before 'p cnf' header")
        try:
            tokens.extend(int(tok) for tok in line.split())
        except ValueError:
            raise ParseError(f"line {lineno}: non-integer token in {line!r}") from None
    if num_vars is None:
        raise ParseError("missing 'p cnf' header")
    clauses: list[tuple[int, ...]] = []
    current: list[int] = []
    for tok in tokens:
        if tok == 0:
            clauses.append(tuple(current))
            current = []
        else:
            current.append(tok)
    if current:
        raise ParseError("trailing clause without terminating 0")
    if num_clauses is not None and len(clauses) != num_clauses:
        raise ParseError(
            f"header announces {num_clauses} clauses, found {len(clauses)}"
        )
    return Formula(num_vars, tuple(clauses))


def evaluate(f: Formula, assignment: Sequence[bool]) -> bool:
    """True iff the assignment satisfies every clause."""
    if len(assignment) < f.num_vars:
        raise ValueError("assignment too short")
    for clause in f.clauses:
        if not any(
            assignment[abs(lit) - 1] == (lit > 0) for lit in clause
        ):
            return False
    return True


def _simplify(clauses: list[tuple[int, ...]], lit: int):
    out = []
    for clause in clauses:
        if lit in clause:
            continue
        if -lit in clause:
            reduced = tuple(x for x in clause if x != -lit)
            if not reduced:
                return None
            out.append(reduced)
        else:
            out.append(clause)
    return out


def dpll_solve(f: Formula) -> tuple[bool, ...] | None:
    """Exact satisfiability with witness; None when unsatisfiable.

    Unit propagation, pure-literal elimination, then branching on the
    smallest unassigned variable, true first.  Deterministic.  Intended
    regime is formulas of at most ~20 variables.
    """
    def solve(clauses, assign):
        while True:
            if any(len(c) == 0 for c in clauses):
                return None
            units = sorted({c[0] for c in clauses if len(c) == 1}, key=abs)
            if units:
                lit = units[0]
                assign = dict(assign)
                assign[abs(lit)] = lit > 0
                clauses = _simplify(clauses, lit)
                if clauses is None:
                    return None
                continue
            lits = {lit for c in clauses for lit in c}
            pures = sorted(
                (lit for lit in lits if -lit not in lits), key=abs
            )
            if pures:
                lit = pures[0]
                assign = dict(assign)
                assign[abs(lit)] = lit > 0
                clauses = _simplify(clauses, lit)
                if clauses is None:
                    return None
                continue
            break
        if not clauses:
            return assign
        var = min(abs(lit) for c in clauses for lit in c)
        for value in (True, False):
            lit = var if value else -var
            reduced = _simplify(clauses, lit)
            if reduced is None:
                continue
            result = solve(reduced, {**assign, var: value})
            if result is not None:
                return result
        return None

    result = solve(list(f.clauses), {})
    if result is None:
        return None
    return tuple(result.get(v, False) for v in range(1, f.num_vars + 1))


@dataclass(frozen=True)
class ReductionMap:
    """Reduced graph plus everything needed to decode a witness."""

    graph: Graph
    formula: Formula
    var_anchor: tuple[tuple[int, int], ...]      # (t_i, f_i) per variable
    clause_block: tuple[tuple[int, ...], ...]    # full vertex range per clause
    occurrences: tuple[tuple[int, int, int, int], ...]  # (vertex, clause, k, literal)
    spine: tuple[int, ...]                       # s_0..s_V
    gates: tuple[int, ...]                       # g_c per clause (degree-2)
    fans: tuple[int, ...]                        # gamma_c per clause
    collectors: tuple[int, ...]                  # r_c per clause
    rails: tuple[tuple[int, ...], ...]           # u_{c,0..3} per clause
    source: int
    sink: int
    gadget_size: int = 10


def _padded_clauses(f: Formula) -> list[tuple[int, ...]]:
    padded = []
    for clause in f.clauses:
        c = tuple(clause)
        if c:
            while len(c) < 3:
                c = c + (c[-1],)
        padded.append(c)
    return padded


def reduce_3sat(f: Formula) -> ReductionMap:
    """Build the Hamilton path instance for a 3CNF formula.

    The reduced graph has a Hamilton path from 0 to n-1 iff the
    formula is satisfiable; vertex count is 3V + 10C + 2.
    """
    V, C = f.num_vars, len(f.clauses)
    padded = _padded_clauses(f)
    n = 3 * V + 10 * C + 2

    def s(i):  # spine junction after variable i; s(0) is the source
        return 3 * i

    t = lambda i: 3 * (i - 1) + 1
    fv = lambda i: 3 * (i - 1) + 2

    def base(c):  # clause zones sit after the variable spine
        return 3 * V + 10 * (c - 1)

    gate = lambda c: base(c) + 1
    fan = lambda c: base(c) + 2
    slot = lambda c, k: base(c) + 2 + k       # k = 1..3
    collector = lambda c: base(c) + 6
    rail = lambda c, j: base(c) + 7 + j       # j = 0..3
    z = 3 * V + 10 * C + 1
    assert z == n - 1

    edges: list[tuple[int, int]] = []
    pos_chain: dict[int, list[int]] = {i: [] for i in range(1, V + 1)}
    neg_chain: dict[int, list[int]] = {i: [] for i in range(1, V + 1)}
    occurrences = []
    for c_idx, clause in enumerate(padded, start=1):
        for k, lit in enumerate(clause, start=1):
            vtx = slot(c_idx, k)
            occurrences.append((vtx, c_idx, k, lit))
            var = abs(lit)
            (pos_chain if lit > 0 else neg_chain)[var].append(vtx)

    for i in range(1, V + 1):
        edges.append((s(i - 1), t(i)))
        edges.append((fv(i), s(i)))
        if not pos_chain[i] and not neg_chain[i]:
            edges.append((t(i), fv(i)))
        else:
            for chain in (pos_chain[i], neg_chain[i]):
                node = t(i)
                for vtx in chain:
                    edges.append((node, vtx))
                    node = vtx
                edges.append((node, fv(i)))

    exit_vertex = s(V)
    for c_idx, clause in enumerate(padded, start=1):
        edges.append((exit_vertex, gate(c_idx)))
        edges.append((gate(c_idx), fan(c_idx)))
        edges.append((collector(c_idx), rail(c_idx, 0)))
        for j in range(3):
            edges.append((rail(c_idx, j), rail(c_idx, j + 1)))
        for k in range(1, len(clause) + 1):
            vtx = slot(c_idx, k)
            edges.append((fan(c_idx), vtx))
            edges.append((vtx, collector(c_idx)))
            edges.append((rail(c_idx, k - 1), vtx))
            edges.append((vtx, rail(c_idx, k)))
        exit_vertex = rail(c_idx, 3)
    edges.append((exit_vertex, z))

    return ReductionMap(
        graph=Graph(n, sorted(set(tuple(sorted(e)) for e in edges))),
        formula=f,
        var_anchor=tuple((t(i), fv(i)) for i in range(1, V + 1)),
        clause_block=tuple(
            tuple(range(base(c) + 1, base(c) + 11)) for c in range(1, C + 1)
        ),
        occurrences=tuple(occurrences),
        spine=tuple(s(i) for i in range(V + 1)),
        gates=tuple(gate(c) for c in range(1, C + 1)),
        fans=tuple(fan(c) for c in range(1, C + 1)),
        collectors=tuple(collector(c) for c in range(1, C + 1)),
        rails=tuple(
            tuple(rail(c, j) for j in range(4)) for c in range(1, C + 1)
        ),
        source=0,
        sink=z,
    )


def _path_neighbors(path, pos, v, n):
    idx = pos[v]
    nbrs = set()
    if idx > 0:
        nbrs.add(path[idx - 1])
    if idx < n - 1:
        nbrs.add(path[idx + 1])
    return nbrs


def decode_assignment(path: Sequence[int], rmap: ReductionMap) -> tuple[bool, ...]:
    """Read the assignment off a Hamilton path of the reduced graph.

    Primary signal: each clause's fan vertex is entered from its gate
    and exits into exactly one slot, certifying that slot's literal
    true; the certificates alone satisfy every clause.  Variables
    without a certificate are read off their zone walk (the vertex the
    walk visits right after the t terminal says which chain it took).
    Raises DecodeError when the sequence is not a Hamilton path, when
    the gadget structure is violated, or when the result fails the
    formula (the latter would be a reduction bug).
    """
    if not is_hamilton_path(rmap.graph, path):
        raise DecodeError("sequence is not a Hamilton path of the reduced graph")
    pos = {v: i for i, v in enumerate(path)}
    n = rmap.graph.n
    lit_of = {vtx: lit for vtx, _c, _k, lit in rmap.occurrences}
    values: dict[int, bool] = {}
    for c_idx, (g, gamma) in enumerate(zip(rmap.gates, rmap.fans), start=1):
        nbrs = _path_neighbors(path, pos, gamma, n)
        if g not in nbrs or len(nbrs) != 2:
            raise DecodeError(f"clause {c_idx} fan is not entered from its gate")
        cert = (nbrs - {g}).pop()
        if cert not in lit_of:
            raise DecodeError(f"clause {c_idx} fan exits into a non-slot vertex")
        lit = lit_of[cert]
        var, val = abs(lit), lit > 0
        if values.setdefault(var, val) != val:
            raise DecodeError(f"conflicting certificates for variable {var}")
    pos_first: dict[int, int] = {}
    neg_first: dict[int, int] = {}
    for vtx, _c, _k, lit in rmap.occurrences:  # occurrences are in chain order
        (pos_first if lit > 0 else neg_first).setdefault(abs(lit), vtx)
    for i, (t_i, f_i) in enumerate(rmap.var_anchor, start=1):
        if i in values:
            continue
        nbrs = _path_neighbors(path, pos, t_i, n)
        spine_prev = rmap.spine[i - 1]
        if spine_prev not in nbrs or len(nbrs) != 2:
            raise DecodeError(f"zone entry for variable {i} is malformed")
        successor = (nbrs - {spine_prev}).pop()
        if successor == neg_first.get(i, f_i):
            values[i] = True
        elif successor == pos_first.get(i, f_i):
            values[i] = False
        else:
            raise DecodeError(f"variable {i} walk leaves t on a non-chain edge")
    assignment = tuple(values[i] for i in range(1, rmap.formula.num_vars + 1))
    if not evaluate(rmap.formula, assignment):
        raise DecodeError("decoded assignment does not satisfy the formula")
    return assignment


def serialize_decode_map(rmap: ReductionMap) -> str:
    """Stable sidecar text describing the reduction layout."""
    lines = [
        f"vars {rmap.formula.num_vars}",
        f"clauses {len(rmap.formula.clauses)}",
        f"vertices {rmap.graph.n}",
        f"source {rmap.source}",
        f"sink {rmap.sink}",
        f"gadget_size {rmap.gadget_size}",
    ]
    for i, (t_i, f_i) in enumerate(rmap.var_anchor, start=1):
        lines.append(f"var {i} true_terminal {t_i} false_terminal {f_i}")
    for c in range(len(rmap.clause_block)):
        rail = " ".join(str(v) for v in rmap.rails[c])
        lines.append(
            f"clause {c + 1} gate {rmap.gates[c]} fan {rmap.fans[c]}"
            f" collector {rmap.collectors[c]} rail {rail}"
        )
    for vtx, c, k, lit in rmap.occurrences:
        lines.append(f"occurrence {vtx} clause {c} position {k} literal {lit}")
    return "\n".join(lines) + "\n"
