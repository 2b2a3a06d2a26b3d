"""Rotation-extension baseline for Hamilton path search.

Grow a path from a random start; when the tail endpoint has an
unvisited neighbor, extend, otherwise rotate: pick a neighbor u of the
tail inside the path and reverse everything after u, which exposes a
new endpoint.  Restart from scratch after 10*n rotations without an
extension.  Absence of a result means the rotation budget ran out,
never that no path exists.
"""

from __future__ import annotations

import random

from .graph import Graph, is_hamilton_path


def posa_find(g: Graph, budget: int, seed: int) -> tuple[int, ...] | None:
    """Any-endpoints rotation-extension search, deterministic per seed.

    budget counts rotations across all restarts.
    """
    n = g.n
    if n == 1:
        return (0,)
    rng = random.Random(seed)
    rotations = 0
    stagnation_limit = 10 * n

    while rotations <= budget:
        path = [rng.randrange(n)]
        in_path = [False] * n
        in_path[path[0]] = True
        stagnant = 0
        while rotations <= budget:
            tail = path[-1]
            fresh = [w for w in g.neighbors(tail) if not in_path[w]]
            if fresh:
                w = fresh[rng.randrange(len(fresh))]
                path.append(w)
                in_path[w] = True
                stagnant = 0
                if len(path) == n:
                    result = tuple(path)
                    assert is_hamilton_path(g, result)
                    return result
                continue
            if stagnant >= stagnation_limit or len(path) < 3:
                break
            pivots = [
                i
                for i in range(len(path) - 2)
                if g.adjacent(path[i], tail)
            ]
            if not pivots:
                break
            i = pivots[rng.randrange(len(pivots))]
            path[i + 1:] = reversed(path[i + 1:])
            rotations += 1
            stagnant += 1
    return None
