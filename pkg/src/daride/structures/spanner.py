"""Greedy high-girth spanners of demand graphs with a two-per-vertex edge assignment."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence


@dataclass(frozen=True)
class Spanner:
    n: int
    alpha: int
    edges: tuple[tuple[int, int], ...]
    owner: tuple[int, ...]  # owner[i] is the endpoint that traverses edges[i]

    def assigned(self, v: int) -> list[tuple[int, int]]:
        return [e for e, o in zip(self.edges, self.owner) if o == v]

    def adjacency(self) -> list[list[int]]:
        return _adjacency(self.n, self.edges)


def _adjacency(n: int, edges: Iterable[tuple[int, int]]) -> list[list[int]]:
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    for a in adj:
        a.sort()
    return adj


def hop_distance(adj: Sequence[Sequence[int]], src: int, dst: int, limit: int | None = None,
                 skip: tuple[int, int] | None = None) -> int | None:
    """BFS hop count, optionally ignoring one edge and giving up past ``limit``."""
    if src == dst:
        return 0
    dist = {src: 0}
    queue = deque([src])
    while queue:
        u = queue.popleft()
        if limit is not None and dist[u] >= limit:
            continue
        for w in adj[u]:
            if skip and {u, w} == set(skip):
                continue
            if w not in dist:
                dist[w] = dist[u] + 1
                if w == dst:
                    return dist[w]
                queue.append(w)
    return None


def hop_path(adj: Sequence[Sequence[int]], src: int, dst: int) -> list[int]:
    prev = {src: None}
    queue = deque([src])
    while queue:
        u = queue.popleft()
        if u == dst:
            break
        for w in adj[u]:
            if w not in prev:
                prev[w] = u
                queue.append(w)
    if dst not in prev:
        raise ValueError(f"{dst} unreachable from {src}")
    path = [dst]
    while path[-1] != src:
        path.append(prev[path[-1]])
    return path[::-1]


def sparse_spanner(n: int, demand_edges: Iterable[tuple[int, int]], alpha: int) -> Spanner:
    """Keep an edge iff its endpoints are currently more than ``2 alpha`` hops apart."""
    if alpha < 1:
        raise ValueError("alpha must be at least 1")
    order = sorted({(min(u, v), max(u, v)) for u, v in demand_edges if u != v})
    kept: list[tuple[int, int]] = []
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in order:
        if hop_distance(adj, u, v, limit=2 * alpha) is None:
            kept.append((u, v))
            adj[u].append(v)
            adj[v].append(u)

    # peel vertices of residual degree <= 2, handing them their remaining edges
    remaining = {e: None for e in kept}
    degree = [0] * n
    for u, v in kept:
        degree[u] += 1
        degree[v] += 1
    owner: dict[tuple[int, int], int] = {}
    while remaining:
        v = next((x for x in range(n) if 0 < degree[x] <= 2), None)
        if v is None:
            raise AssertionError("spanner edge assignment stalled")
        for e in [e for e in remaining if v in e]:
            owner[e] = v
            del remaining[e]
            degree[e[0]] -= 1
            degree[e[1]] -= 1
    return Spanner(n, alpha, tuple(kept), tuple(owner[e] for e in kept))


def girth(n: int, edges: Sequence[tuple[int, int]]) -> int | None:
    """Shortest cycle length via per-edge BFS; None for forests."""
    adj = _adjacency(n, edges)
    best = None
    for u, v in edges:
        h = hop_distance(adj, u, v, skip=(u, v))
        if h is not None and (best is None or h + 1 < best):
            best = h + 1
    return best
