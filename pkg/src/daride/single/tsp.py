"""Tree-doubling TSP tours."""

from __future__ import annotations

from typing import Sequence

from daride.metric import Metric, Number, mst_edges


def tsp_tour(metric: Metric, vertices: Sequence[int], start: int | None = None) -> list[int]:
    """Preorder walk of the MST: a closed tour (start vertex first, not repeated at the end).

    Its length is at most twice the MST weight of ``vertices``.
    """
    vs = sorted(set(vertices))
    if not vs:
        raise ValueError("tsp_tour needs at least one vertex")
    if start is None:
        start = vs[0]
    elif start not in vs:
        vs = sorted(vs + [start])
    adj: dict[int, list[int]] = {v: [] for v in vs}
    for u, v in mst_edges(metric, vs):
        adj[u].append(v)
        adj[v].append(u)
    order, seen, stack = [], {start}, [start]
    while stack:
        u = stack.pop()
        order.append(u)
        for w in sorted(adj[u], reverse=True):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return order


def tour_length(metric: Metric, order: Sequence[int]) -> Number:
    if len(order) <= 1:
        return 0
    d = metric.dist
    return sum((d[a][b] for a, b in zip(order, order[1:])), 0) + d[order[-1]][order[0]]
