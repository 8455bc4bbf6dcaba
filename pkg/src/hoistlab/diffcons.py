"""Difference constraints with a parametric cycle time.

An edge ``(a, b, w, k)`` encodes ``t_b - t_a >= w + k * C``. For a fixed C the
system is feasible iff the constraint graph has no positive-weight cycle; the
longest-path distances from the origin (all start times are nonnegative) give
the earliest feasible start times.

For a fixed move order every constraint is linear in (t, C), so the set of
feasible C is an interval. A positive cycle with total C-coefficient K tells
which side of that interval C lies on: K < 0 means C is too small (the cycle
disappears once C >= W / -K), K > 0 means C is too large, and K = 0 means no C
works.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

Edge = tuple[int, int, int, int]


@dataclass(frozen=True)
class PositiveCycle:
    nodes: tuple[int, ...]
    weight: int  # sum of w along the cycle
    k: int  # sum of k along the cycle

    def weight_at(self, C: int) -> int:
        return self.weight + self.k * C


def longest_paths(num_nodes: int, edges: Sequence[Edge], C: int) -> tuple[list[int] | None, PositiveCycle | None]:
    """Bellman-Ford longest paths; every node starts at 0 (times are nonnegative)."""
    dist = [0] * num_nodes
    parent: list[Edge | None] = [None] * num_nodes
    weighted = [(a, b, w + k * C, (a, b, w, k)) for a, b, w, k in edges]
    last = -1
    for _ in range(num_nodes + 1):
        last = -1
        for a, b, w, edge in weighted:
            cand = dist[a] + w
            if cand > dist[b]:
                dist[b] = cand
                parent[b] = edge
                last = b
        if last < 0:
            return dist, None
    # still relaxing: keep going until the parent pointers close a cycle
    while True:
        cycle_edges = _parent_cycle(parent)
        if cycle_edges:
            break
        for a, b, w, edge in weighted:
            cand = dist[a] + w
            if cand > dist[b]:
                dist[b] = cand
                parent[b] = edge
    return None, PositiveCycle(
        tuple(e[0] for e in cycle_edges),
        sum(e[2] for e in cycle_edges),
        sum(e[3] for e in cycle_edges),
    )


def _parent_cycle(parent: list[Edge | None]) -> list[Edge]:
    state = [0] * len(parent)  # 0 unseen, 1 on current walk, 2 done
    for start in range(len(parent)):
        walk = []
        x = start
        while x is not None and state[x] == 0:
            state[x] = 1
            walk.append(x)
            edge = parent[x]
            x = edge[0] if edge else None
        if x is not None and state[x] == 1:
            cycle = []
            y = x
            while True:
                edge = parent[y]
                cycle.append(edge)
                y = edge[0]
                if y == x:
                    break
            cycle.reverse()
            return cycle
        for v in walk:
            state[v] = 2
    return []


def min_feasible_cycle(num_nodes: int, edges: Sequence[Edge], lo: int, hi: int) -> tuple[int, list[int]] | None:
    """Smallest integer C in [lo, hi] admitting a solution, by jumping past positive cycles."""
    C = lo
    while C <= hi:
        dist, cycle = longest_paths(num_nodes, edges, C)
        if cycle is None:
            return C, dist
        if cycle.k >= 0:
            return None
        # weight + k*C <= 0  <=>  C >= weight / -k
        C = max(C + 1, -(-cycle.weight // -cycle.k))
    return None


def min_feasible_cycle_bisect(num_nodes: int, edges: Sequence[Edge], lo: int, hi: int) -> tuple[int, list[int]] | None:
    """Same answer as ``min_feasible_cycle`` by binary search over the feasible interval."""
    best = None
    while lo <= hi:
        mid = (lo + hi) // 2
        dist, cycle = longest_paths(num_nodes, edges, mid)
        if cycle is None:
            best = (mid, dist)
            hi = mid - 1
        elif cycle.k < 0:
            lo = mid + 1
        elif cycle.k > 0:
            hi = mid - 1
        else:
            return None
    return best
