"""Finite metrics, edge-weighted graphs, and positions on metric edges."""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

Number = Union[int, Fraction]


class MetricError(ValueError):
    """Raised when a distance matrix or graph does not define a metric."""


@dataclass(frozen=True)
class Metric:
    """A symmetric distance function on vertices ``0..n-1``.

    Distances are exact (``int`` or ``Fraction``).  Use :meth:`from_matrix`
    to build a checked instance from arbitrary input.
    """

    n: int
    dist: tuple[tuple[Number, ...], ...]

    @classmethod
    def from_matrix(cls, rows: Sequence[Sequence[Number]], check: bool = True) -> "Metric":
        n = len(rows)
        dist = tuple(tuple(_exact(x) for x in row) for row in rows)
        metric = cls(n, dist)
        if check:
            metric.check()
        return metric

    def check(self) -> None:
        n, d = self.n, self.dist
        if any(len(row) != n for row in d):
            raise MetricError("distance matrix is not square")
        for u in range(n):
            if d[u][u] != 0:
                raise MetricError(f"d[{u}][{u}] must be 0")
            for v in range(u + 1, n):
                if d[u][v] < 0:
                    raise MetricError(f"negative distance d[{u}][{v}]")
                if d[u][v] != d[v][u]:
                    raise MetricError(f"asymmetric distance between {u} and {v}")
        for w in range(n):
            dw = d[w]
            for u in range(n):
                duw = d[u][w]
                du = d[u]
                for v in range(n):
                    if du[v] > duw + dw[v]:
                        raise MetricError(f"triangle inequality fails on ({u}, {w}, {v})")

    def __call__(self, u: int, v: int) -> Number:
        return self.dist[u][v]

    def to_set(self, v: int, targets: Iterable[int]) -> Number:
        """Distance from ``v`` to the nearest vertex of ``targets``."""
        return min(self.dist[v][t] for t in targets)

    def set_distance(self, a: Iterable[int], b: Iterable[int]) -> Number:
        b = list(b)
        return min(self.dist[u][v] for u in a for v in b)

    def diameter(self, vertices: Iterable[int] | None = None) -> Number:
        vs = list(range(self.n)) if vertices is None else list(vertices)
        return max((self.dist[u][v] for u in vs for v in vs), default=0)

    def min_positive(self) -> Number:
        vals = [x for row in self.dist for x in row if x > 0]
        return min(vals) if vals else 0

    def submetric(self, vertices: Sequence[int]) -> "Metric":
        return Metric(len(vertices), tuple(tuple(self.dist[u][v] for v in vertices) for u in vertices))


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected graph with positive integer edge lengths."""

    n: int
    edges: tuple[tuple[int, int, int], ...]

    def __post_init__(self) -> None:
        for u, v, w in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise MetricError(f"edge ({u}, {v}) references a missing vertex")
            if u == v:
                raise MetricError(f"self-loop at {u}")
            if not isinstance(w, int) or w <= 0:
                raise MetricError(f"edge ({u}, {v}) has non-positive or non-integer length {w!r}")

    def adjacency(self) -> list[list[tuple[int, int]]]:
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.n)]
        for u, v, w in self.edges:
            adj[u].append((v, w))
            adj[v].append((u, w))
        return adj

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        adj = self.adjacency()
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for v, _ in adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return len(seen) == self.n


def metric_from_graph(g: WeightedGraph) -> Metric:
    """All-pairs shortest-path metric of a connected graph (Dijkstra per source)."""
    if not g.is_connected():
        raise MetricError("graph is disconnected")
    adj = g.adjacency()
    rows = []
    for src in range(g.n):
        best = [None] * g.n
        heap = [(0, src)]
        while heap:
            du, u = heapq.heappop(heap)
            if best[u] is not None:
                continue
            best[u] = du
            for v, w in adj[u]:
                if best[v] is None:
                    heapq.heappush(heap, (du + w, v))
        rows.append(tuple(best))
    return Metric(g.n, tuple(rows))


def _exact(x) -> Number:
    if isinstance(x, (int, Fraction)):
        return x
    if isinstance(x, float):
        if not x.is_integer():
            raise MetricError(f"non-integral float distance {x!r}; pass a Fraction")
        return int(x)
    return Fraction(x)


# --- positions: a vertex, or a point in the interior of a metric edge -------------


@dataclass(frozen=True)
class MidPoint:
    """Point on edge ``(u, v)`` at distance ``offset`` from ``u``."""

    u: int
    v: int
    offset: Number


Position = Union[int, MidPoint]


def _anchors(metric: Metric, p: Position) -> list[tuple[int, Number]]:
    if isinstance(p, MidPoint):
        return [(p.u, p.offset), (p.v, metric.dist[p.u][p.v] - p.offset)]
    return [(p, 0)]


def position_distance(metric: Metric, p: Position, q: Position) -> Number:
    """Distance between two positions in the metric extended by edge interiors."""
    if not isinstance(p, MidPoint) and not isinstance(q, MidPoint):
        return metric.dist[p][q]
    best = None
    for a, ca in _anchors(metric, p):
        for b, cb in _anchors(metric, q):
            cand = ca + metric.dist[a][b] + cb
            if best is None or cand < best:
                best = cand
    if isinstance(p, MidPoint) and isinstance(q, MidPoint) and {p.u, p.v} == {q.u, q.v}:
        qo = q.offset if q.u == p.u else metric.dist[q.u][q.v] - q.offset
        best = min(best, abs(p.offset - qo))
    return best


def same_position(p: Position, q: Position, metric: Metric | None = None) -> bool:
    if isinstance(p, MidPoint) and isinstance(q, MidPoint):
        if (p.u, p.v) == (q.u, q.v):
            return p.offset == q.offset
        if metric is not None and (p.u, p.v) == (q.v, q.u):
            return p.offset == metric.dist[p.u][p.v] - q.offset
        return False
    return p == q


def mst_edges(metric: Metric, vertices: Sequence[int]) -> list[tuple[int, int]]:
    """Prim's MST on the induced submetric; ties go to the lowest vertex index."""
    vs = sorted(set(vertices))
    if len(vs) <= 1:
        return []
    d = metric.dist
    inside = {vs[0]}
    best = {v: (d[vs[0]][v], vs[0]) for v in vs[1:]}
    edges = []
    while best:
        v = min(best, key=lambda x: (best[x][0], x))
        _, u = best.pop(v)
        edges.append((u, v))
        inside.add(v)
        for w in best:
            if d[v][w] < best[w][0]:
                best[w] = (d[v][w], v)
    return edges


def edges_length(metric: Metric, edges: Iterable[tuple[int, int]]) -> Number:
    return sum((metric.dist[u][v] for u, v in edges), 0)
