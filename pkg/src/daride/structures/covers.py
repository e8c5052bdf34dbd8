"""Sparse and gamma-separated cluster covers by recursive BFS-layer carving.

The carving works on a unit-length graph (edges are subdivided first).  At
each depth the current subgraph is cut into BFS level windows; every window
component becomes a child call whose terminals are the current terminals in
the window's middle part.  After ``r`` levels the terminal sets are the
clusters, coloured by the sequence of window phases that produced them.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass
from typing import Sequence

from daride.metric import Metric, Number, WeightedGraph, metric_from_graph

SEPARATED = "separated"
SPARSE = "sparse"

# Loose diameter bound: clusters must satisfy diam <= DIAM_CONST * r^2 * scale.
DIAM_CONST = 50


@dataclass(frozen=True)
class ClusterCover:
    clusters: tuple[tuple[int, ...], ...]
    colors: tuple[tuple[int, ...], ...]
    gamma: int
    r: int
    mode: str
    max_diameter: Number

    def color_classes(self) -> dict[tuple[int, ...], list[int]]:
        out: dict[tuple[int, ...], list[int]] = defaultdict(list)
        for i, c in enumerate(self.colors):
            out[c].append(i)
        return dict(out)

    def containing(self, *vertices: int) -> list[int]:
        want = set(vertices)
        return [i for i, c in enumerate(self.clusters) if want <= set(c)]

    def multiplicity(self) -> int:
        count: dict[int, int] = defaultdict(int)
        for c in self.clusters:
            for v in c:
                count[v] += 1
        return max(count.values(), default=0)


def edge_subdivide(graph: WeightedGraph, unit: int = 1) -> WeightedGraph:
    """Replace every edge of length ``w`` by a path of ``w / unit`` edges of length ``unit``.

    Original vertices keep their ids; new vertices are appended.
    """
    n = graph.n
    edges = []
    for u, v, w in graph.edges:
        if w % unit:
            raise ValueError(f"edge ({u}, {v}) length {w} is not a multiple of {unit}")
        steps = w // unit
        prev = u
        for _ in range(steps - 1):
            edges.append((prev, n, unit))
            prev = n
            n += 1
        edges.append((prev, v, unit))
    return WeightedGraph(n, tuple(edges))


def split_cover(graph: WeightedGraph, gamma: int, r: int, mode: str = SEPARATED,
                metric: Metric | None = None) -> ClusterCover:
    if gamma < 1 or r < 1:
        raise ValueError("gamma and r must be positive")
    if mode not in (SEPARATED, SPARSE):
        raise ValueError(f"unknown cover mode {mode!r}")
    if metric is None:
        metric = metric_from_graph(graph)
    scale = gamma if mode == SEPARATED else 2 * gamma
    unit = edge_subdivide(graph)
    adj: list[list[int]] = [[] for _ in range(unit.n)]
    for u, v, _ in unit.edges:
        adj[u].append(v)
        adj[v].append(u)

    found: list[tuple[frozenset, tuple[int, ...]]] = []
    _split(adj, frozenset(range(unit.n)), frozenset(range(unit.n)), 0, (), scale, r, found)

    clusters, colors, seen = [], [], set()
    for terms, color in found:
        cl = tuple(sorted(v for v in terms if v < graph.n))
        if cl and (cl, color) not in seen:
            seen.add((cl, color))
            clusters.append(cl)
            colors.append(color)
    order = sorted(range(len(clusters)), key=lambda i: (colors[i], clusters[i]))
    clusters = [clusters[i] for i in order]
    colors = [colors[i] for i in order]
    diam = max((metric.diameter(c) for c in clusters), default=0)
    cover = ClusterCover(tuple(clusters), tuple(colors), gamma, r, mode, diam)
    problems = check_cover(cover, metric)
    if problems:
        raise AssertionError("cover invariants failed: " + "; ".join(problems[:5]))
    return cover


def _split(adj, verts: frozenset, terms: frozenset, depth: int, color: tuple, g: int, r: int, out: list) -> None:
    if depth == r:
        out.append((terms, color))
        return
    root = min(verts)
    level = {root: 0}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w in verts and w not in level:
                level[w] = level[u] + 1
                queue.append(w)
    top = max(level.values())
    for j in range(3):
        l = 0
        while (3 * l + j - 1) * g <= top:
            lo, hi = max(0, (3 * l + j - 1) * g), (3 * l + j + 3) * g
            t_lo, t_hi = (3 * l + j) * g, (3 * l + j + 2) * g - 1
            window = {v for v in verts if lo <= level[v] <= hi}
            for comp in _components(adj, window):
                sub_terms = frozenset(v for v in comp if v in terms and t_lo <= level[v] <= t_hi)
                if sub_terms:
                    _split(adj, frozenset(comp), sub_terms, depth + 1, color + (j,), g, r, out)
            l += 1


def _components(adj, verts: set) -> list[list[int]]:
    seen: set[int] = set()
    comps = []
    for s in sorted(verts):
        if s in seen:
            continue
        seen.add(s)
        comp, stack = [], [s]
        while stack:
            u = stack.pop()
            comp.append(u)
            for w in adj[u]:
                if w in verts and w not in seen:
                    seen.add(w)
                    stack.append(w)
        comps.append(comp)
    return comps


def check_cover(cover: ClusterCover, metric: Metric) -> list[str]:
    """Exhaustively check the cover properties for its mode; returns problem strings."""
    problems = []
    d, g, r = metric.dist, cover.gamma, cover.r
    member: list[set[int]] = [set() for _ in range(metric.n)]
    for i, c in enumerate(cover.clusters):
        for v in c:
            member[v].add(i)
    scale = g if cover.mode == SEPARATED else 2 * g
    if cover.max_diameter > DIAM_CONST * r * r * scale:
        problems.append(f"cluster diameter {cover.max_diameter} exceeds {DIAM_CONST}*r^2*{scale}")
    for u in range(metric.n):
        for v in range(u, metric.n):
            if d[u][v] <= g and not member[u] & member[v]:
                problems.append(f"{u} and {v} at distance {d[u][v]} share no cluster")
    if cover.mode == SEPARATED:
        classes = cover.color_classes()
        if len(classes) > 3**r:
            problems.append(f"{len(classes)} colour classes exceed 3^{r}")
        for idx in classes.values():
            for a in range(len(idx)):
                for b in range(a + 1, len(idx)):
                    A, B = cover.clusters[idx[a]], cover.clusters[idx[b]]
                    if metric.set_distance(A, B) < g:
                        problems.append(f"same-colour clusters {idx[a]} and {idx[b]} closer than {g}")
    else:
        if cover.multiplicity() > 2**r:
            problems.append(f"vertex multiplicity {cover.multiplicity()} exceeds 2^{r}")
        for v in range(metric.n):
            ball = {u for u in range(metric.n) if d[v][u] <= g}
            if not any(ball <= set(cover.clusters[i]) for i in member[v]):
                problems.append(f"no cluster contains the {g}-ball of {v}")
    return problems


def cluster_of_pairs(cover: ClusterCover, pairs: Sequence[tuple[int, int]]) -> list[int | None]:
    """First cluster containing both endpoints of each pair."""
    member: dict[int, set[int]] = defaultdict(set)
    for i, c in enumerate(cover.clusters):
        for v in c:
            member[v].add(i)
    out = []
    for u, v in pairs:
        both = member[u] & member[v]
        out.append(min(both) if both else None)
    return out
