"""Simple undirected graphs: parsing, generation, and path checking.

Graph file format (one graph per file):

    n m
    u v
    ...

Line 1 gives the vertex count and edge count; each of the m following
lines names one undirected edge with 0 <= u, v < n.  Blank lines and
lines starting with '#' are ignored, so files may carry commented
headers.  The serializer emits edges sorted lexicographically.
"""

from __future__ import annotations

import random
from collections import deque
from typing import Iterable, Sequence

import numpy as np


class ParseError(ValueError):
    """Malformed graph file content."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class InvalidEdge(ParseError):
    """Self-loop, duplicate edge, or out-of-range endpoint."""


class InfeasibleDegreeSequence(ValueError):
    """No simple graph with the requested degree constraints exists."""


class Graph:
    """Immutable simple undirected graph on vertices 0..n-1.

    Adjacency is queryable in O(1) via a boolean matrix; the matrix is
    shared, not copied, so callers must not mutate it.
    """

    __slots__ = ("n", "_adj", "_edges", "_neighbors")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]]):
        if n < 1:
            raise ValueError(f"vertex count must be >= 1, got {n}")
        self.n = n
        adj = np.zeros((n, n), dtype=bool)
        canon = []
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise InvalidEdge(f"edge ({u},{v}) out of range for n={n}")
            if u == v:
                raise InvalidEdge(f"self-loop at vertex {u}")
            a, b = (u, v) if u < v else (v, u)
            if adj[a, b]:
                raise InvalidEdge(f"duplicate edge ({a},{b})")
            adj[a, b] = adj[b, a] = True
            canon.append((a, b))
        self._adj = adj
        self._edges = tuple(sorted(canon))
        self._neighbors: tuple[tuple[int, ...], ...] | None = None

    @property
    def adj(self) -> np.ndarray:
        """Boolean adjacency matrix (do not mutate)."""
        return self._adj

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return self._edges

    @property
    def edge_count(self) -> int:
        return len(self._edges)

    def adjacent(self, u: int, v: int) -> bool:
        return bool(self._adj[u, v])

    def neighbors(self, v: int) -> tuple[int, ...]:
        if self._neighbors is None:
            self._neighbors = tuple(
                tuple(np.flatnonzero(self._adj[u]).tolist()) for u in range(self.n)
            )
        return self._neighbors[v]

    def degree(self, v: int) -> int:
        return int(self._adj[v].sum())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self._edges == other._edges

    def __hash__(self) -> int:
        return hash((self.n, self._edges))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.edge_count})"


def parse_graph(text: str) -> Graph:
    """Parse the edge-list format; rejects loops, duplicates, bad counts."""
    header: tuple[int, int] | None = None
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"expected two integers, got {line!r}", lineno)
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"non-integer field in {line!r}", lineno) from None
        if header is None:
            if a < 1 or b < 0:
                raise ParseError(f"bad header n={a} m={b}", lineno)
            header = (a, b)
            continue
        n = header[0]
        if not (0 <= a < n and 0 <= b < n):
            raise InvalidEdge(f"edge ({a},{b}) out of range for n={n}", lineno)
        if a == b:
            raise InvalidEdge(f"self-loop at vertex {a}", lineno)
        key = (min(a, b), max(a, b))
        if key in seen:
            raise InvalidEdge(f"duplicate edge ({a},{b})", lineno)
        seen.add(key)
        edges.append(key)
    if header is None:
        raise ParseError("empty graph file")
    if len(edges) != header[1]:
        raise ParseError(f"header announces {header[1]} edges, found {len(edges)}")
    return Graph(header[0], edges)


def serialize_graph(g: Graph, comments: Sequence[str] = ()) -> str:
    """Inverse of parse_graph; optional '#' comment header lines."""
    lines = [f"# {c}" for c in comments]
    lines.append(f"{g.n} {g.edge_count}")
    lines.extend(f"{u} {v}" for u, v in g.edges)
    return "\n".join(lines) + "\n"


def load_graph(path) -> Graph:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_graph(fh.read())


def save_graph(g: Graph, path, comments: Sequence[str] = ()) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_graph(g, comments))


def is_hamilton_path(g: Graph, seq: Sequence[int]) -> bool:
    """True iff seq is a permutation of 0..n-1 with every consecutive
    pair adjacent in g.  Malformed sequences return False, never raise."""
    try:
        order = [int(v) for v in seq]
    except (TypeError, ValueError):
        return False
    n = g.n
    if len(order) != n or set(order) != set(range(n)):
        return False
    if n == 1:
        return True
    arr = np.asarray(order)
    return bool(g.adj[arr[:-1], arr[1:]].all())


def connected(g: Graph) -> bool:
    if g.n == 1:
        return True
    seen = {0}
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for w in g.neighbors(u):
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return len(seen) == g.n


def _lift_degrees(
    rng: random.Random,
    n: int,
    edges: set[tuple[int, int]],
    deg: list[int],
    lo: int,
    hi: int,
) -> bool:
    """Add random chords until every degree reaches lo, never passing hi.
    Returns False when stuck (caller retries with a fresh skeleton)."""
    while True:
        low = [v for v in range(n) if deg[v] < lo]
        if not low:
            return True
        u = min(low, key=lambda v: (deg[v], v))
        candidates = [
            w
            for w in range(n)
            if w != u and deg[w] < hi and (min(u, w), max(u, w)) not in edges
        ]
        if not candidates:
            return False
        w = rng.choice(candidates)
        edges.add((min(u, w), max(u, w)))
        deg[u] += 1
        deg[w] += 1


def generate_low_degree(
    n: int, seed: int, degrees: tuple[int, int] = (3, 4)
) -> Graph:
    """Random connected graph with every vertex degree in [lo, hi].

    Deterministic per seed.  Built from a random Hamilton-cycle skeleton
    plus random chords; retried up to 1000 times on dead ends.
    """
    lo, hi = degrees
    if n < 4 or lo > hi or lo < 2:
        raise InfeasibleDegreeSequence(f"n={n}, degrees={degrees}")
    if lo > n - 1:
        raise InfeasibleDegreeSequence(f"degree {lo} impossible on {n} vertices")
    hi = min(hi, n - 1)
    if lo == hi and (lo * n) % 2 == 1:
        raise InfeasibleDegreeSequence(
            f"odd degree sum: {n} vertices of degree {lo}"
        )
    rng = random.Random(seed)
    for _ in range(1000):
        cycle = list(range(n))
        rng.shuffle(cycle)
        edges = {
            (min(a, b), max(a, b))
            for a, b in zip(cycle, cycle[1:] + cycle[:1])
        }
        deg = [2] * n
        if _lift_degrees(rng, n, edges, deg, lo, hi):
            return Graph(n, sorted(edges))
    raise RuntimeError(f"degree-{degrees} generation failed after 1000 tries")


def plant_hamiltonian(n: int, seed: int) -> tuple[Graph, tuple[int, ...]]:
    """Graph built around a known Hamilton path from 0 to n-1.

    The witness path visits the interior vertices in seeded random
    order; extra chords lift degrees into {3,4} where achievable.
    """
    if n < 4:
        raise InfeasibleDegreeSequence(f"n={n} too small to plant")
    rng = random.Random(seed)
    interior = list(range(1, n - 1))
    rng.shuffle(interior)
    order = [0] + interior + [n - 1]
    edges = {
        (min(a, b), max(a, b)) for a, b in zip(order, order[1:])
    }
    deg = [0] * n
    for u, v in edges:
        deg[u] += 1
        deg[v] += 1
    hi = min(4, n - 1)
    _lift_degrees(rng, n, edges, deg, min(3, n - 1), hi)
    return Graph(n, sorted(edges)), tuple(order)
