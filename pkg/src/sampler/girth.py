"""
Girth Conditioning
==================

Removes short cycles from a sampled Tanner graph by targeted edge swaps.

For every variable a breadth-first search labelled by root branch finds
the shortest cycle through it. If that cycle is too short, one of its
edges (v1, c1) is swapped with a random edge (v2, c2) whose check sits at
the same position: v1 takes c2 and v2 takes c1. Check degrees, socket
positions and node positions are untouched, so every property of the
ensemble's positional structure survives. Any cycle created by a swap
passes through v1 or v2, which are queued for re-checking.
"""

import logging
from collections import deque
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np

from .graph import TannerGraph
from .sampling import position_generators
from ..utils.exceptions import ConditioningError, ValidationError

logger = logging.getLogger(__name__)

# Edge as (variable id, check id)
Edge = Tuple[int, int]


def _check_lists(var_checks: np.ndarray, num_checks: int) -> List[List[int]]:
    lists: List[List[int]] = [[] for _ in range(num_checks)]
    for v, row in enumerate(var_checks.tolist()):
        for c in row:
            lists[c].append(v)
    return lists


def shortest_cycle_through(v: int, var_adj: Sequence[Sequence[int]],
                           check_adj: Sequence[Sequence[int]],
                           limit: int) -> Optional[List[Edge]]:
    """
    Edges of a shortest cycle through variable ``v`` of length <= ``limit``,
    or None if there is none.

    Nodes are encoded as ints: variables as v >= 0, checks as ~c < 0.
    """
    dist: Dict[int, int] = {v: 0}
    parent: Dict[int, int] = {v: v}
    branch: Dict[int, int] = {v: v}
    frontier = [v]
    depth = 0
    while frontier and 2 * depth <= limit:
        best: Optional[Tuple[int, int, int]] = None
        nxt = []
        for a in frontier:
            neighbours = [~c for c in var_adj[a]] if a >= 0 else check_adj[~a]
            for b in neighbours:
                if b == parent[a]:
                    continue
                if b in dist:
                    if branch[b] != branch[a]:
                        length = dist[a] + dist[b] + 1
                        if length <= limit and (best is None or length < best[0]):
                            best = (length, a, b)
                    continue
                dist[b] = dist[a] + 1
                parent[b] = a
                branch[b] = b if a == v else branch[a]
                nxt.append(b)
        if best is not None:
            _, a, b = best
            return _cycle_edges(v, a, b, parent)
        frontier = nxt
        depth += 1
    return None


def _cycle_edges(root: int, a: int, b: int, parent: Dict[int, int]) -> List[Edge]:
    def path(node: int) -> List[int]:
        out = [node]
        while node != root:
            node = parent[node]
            out.append(node)
        return out

    nodes = path(a)[::-1] + path(b)[:-1]
    ring = nodes + [root]
    edges: List[Edge] = []
    for x, y in zip(ring, ring[1:]):
        var, chk = (x, ~y) if x >= 0 else (y, ~x)
        edges.append((var, chk))
    return edges


def find_short_cycles(graph: TannerGraph, limit: int) -> Dict[int, List[Edge]]:
    """Map each variable lying on a cycle of length <= ``limit`` to one such cycle."""
    var_adj = graph.var_checks.tolist()
    check_adj = _check_lists(graph.var_checks, graph.num_checks)
    found = {}
    for v in range(graph.num_variables):
        cycle = shortest_cycle_through(v, var_adj, check_adj, limit)
        if cycle is not None:
            found[v] = cycle
    return found


def girth(graph: TannerGraph, limit: int = 12) -> Optional[int]:
    """Length of the shortest cycle if it is <= ``limit``, else None."""
    var_adj = graph.var_checks.tolist()
    check_adj = _check_lists(graph.var_checks, graph.num_checks)
    best = None
    for v in range(graph.num_variables):
        cycle = shortest_cycle_through(v, var_adj, check_adj, limit if best is None else best - 2)
        if cycle is not None:
            best = len(cycle)
            if best == 4:
                break
    return best


class GirthConditioner:
    """
    Swap-based short-cycle removal for one graph.

    Attributes:
        max_removed_cycle: Remove every cycle of this length or shorter
        max_swaps: Swap budget; None means 20 swaps per variable plus 1000
        swaps: Swaps performed by the last ``condition`` call
    """

    def __init__(self, max_removed_cycle: int = 6, max_swaps: Optional[int] = None):
        if max_removed_cycle < 2 or max_removed_cycle % 2:
            raise ValidationError("must be an even number >= 2", field="max_removed_cycle",
                                  value=max_removed_cycle)
        self.max_removed_cycle = max_removed_cycle
        self.max_swaps = max_swaps
        self.swaps = 0

    def condition(self, graph: TannerGraph, seed: int) -> TannerGraph:
        """
        Return a copy of ``graph`` with no cycle of length <= max_removed_cycle.

        Raises:
            ConditioningError: If the swap budget runs out
        """
        limit = self.max_removed_cycle
        params = graph.params
        rng = position_generators(seed, 1)[0]
        budget = self.max_swaps if self.max_swaps is not None else 20 * graph.num_variables + 1000

        var_adj = [list(row) for row in graph.var_checks.tolist()]
        check_adj = [set(vs) for vs in _check_lists(graph.var_checks, graph.num_checks)]
        var_pos = graph.var_positions.tolist()

        # Sockets landing at each check position: (variable, socket j)
        slots: Dict[int, List[Tuple[int, int]]] = {i: [] for i in params.check_positions}
        for v, pos in enumerate(var_pos):
            for j in range(params.d_v):
                slots[pos + j].append((v, j))

        pending = deque(range(graph.num_variables))
        queued: Set[int] = set(pending)
        self.swaps = 0

        while pending:
            v = pending.popleft()
            queued.discard(v)
            cycle = shortest_cycle_through(v, var_adj, check_adj, limit)
            if cycle is None:
                continue
            if self.swaps >= budget:
                pending.appendleft(v)
                break

            v1, c1 = cycle[int(rng.integers(len(cycle)))]
            j1 = var_adj[v1].index(c1)
            candidates = slots[var_pos[v1] + j1]
            if len(candidates) < 2:
                self.swaps += 1
                continue
            v2, j2 = candidates[int(rng.integers(len(candidates)))]
            c2 = var_adj[v2][j2]
            if c2 == c1:
                self.swaps += 1
                if v not in queued:
                    pending.append(v)
                    queued.add(v)
                continue

            var_adj[v1][j1], var_adj[v2][j2] = c2, c1
            check_adj[c1].discard(v1)
            check_adj[c1].add(v2)
            check_adj[c2].discard(v2)
            check_adj[c2].add(v1)
            self.swaps += 1

            for w in (v, v1, v2):
                if w not in queued:
                    pending.append(w)
                    queued.add(w)

        conditioned = graph.with_var_checks(np.array(var_adj, dtype=np.int64).reshape(-1, params.d_v),
                                            girth_conditioned=True, max_removed_cycle=limit)
        remaining = find_short_cycles(conditioned, limit)
        if remaining:
            raise ConditioningError(f"Girth conditioning gave up after {self.swaps} swaps",
                                    remaining_cycles=len(remaining), max_cycle=limit)

        conditioned.validate()
        logger.info(f"Girth conditioning of {params.label()} M={params.M}: {self.swaps} swaps")
        return conditioned


def condition_girth(graph: TannerGraph, max_removed_cycle: int = 6, seed: int = 0,
                    max_swaps: Optional[int] = None) -> TannerGraph:
    """
    Remove all cycles of length <= ``max_removed_cycle`` by same-position
    edge swaps. A graph that is already clean comes back with identical
    edges (zero swaps).
    """
    return GirthConditioner(max_removed_cycle, max_swaps).condition(graph, seed)
