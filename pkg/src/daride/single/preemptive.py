"""Single-vehicle tours that preempt every object at most once and keep ride times short.

The general-metric version embeds the metric into a random HST, groups each
demand by the level of its endpoints' nearest common ancestor, and serves
every group through the ancestor's representative vertex: a collection tour
into the representative followed by a delivery tour out of it.  The
minor-free version replaces the HST by separated covers at geometrically
growing scales.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from daride.metric import Metric, Number, WeightedGraph, metric_from_graph
from daride.model import Demand
from daride.single.cvrp import cvrp_bounded_delay, cvrp_collect
from daride.single.tour import SingleTour, concat
from daride.single.tsp import tour_length, tsp_tour
from daride.structures.covers import SEPARATED, cluster_of_pairs, split_cover
from daride.structures.frt import HstTree, frt_embed

BETA = 2


class RetriesExhausted(RuntimeError):
    def __init__(self, message: str, best: SingleTour | None):
        super().__init__(message)
        self.best = best


@dataclass(frozen=True)
class TourBounds:
    lb: Fraction
    length_limit: float
    delay_limit: float
    attempts: int


def tour_lower_bound(metric: Metric, demands: Sequence[Demand], k: int, root: int | None = None) -> Fraction:
    """Average of a Steiner proxy (half the doubling tour) and the single-vehicle flow bound."""
    ends = {v for dm in demands for v in (dm.source, dm.target)}
    if root is not None:
        ends.add(root)
    if not ends:
        return Fraction(0)
    steiner = Fraction(tour_length(metric, tsp_tour(metric, sorted(ends))), 2)
    flow = Fraction(sum((dm.weight * metric(dm.source, dm.target) for dm in demands), 0), k)
    return (steiner + flow) / 2


def _serve_through(metric: Metric, hub: int, objs: Sequence[tuple[int, Demand]], k: int) -> list[SingleTour]:
    """Collect into ``hub`` then deliver out of it (legs skipped where an endpoint is the hub)."""
    inbound = [(o, dm.source, dm.weight) for o, dm in objs if dm.source != hub]
    outbound = [(o, dm.target, dm.weight) for o, dm in objs if dm.target != hub]
    tours = []
    if inbound:
        tours.append(cvrp_collect(metric, hub, inbound, k, BETA).tour)
    if outbound:
        tours.append(cvrp_bounded_delay(metric, hub, outbound, k, BETA).tour)
    return tours


def _hst_dfs(tree: HstTree) -> list[int]:
    children = tree.children()
    out, stack = [], [tree.root]
    while stack:
        u = stack.pop()
        out.append(u)
        stack.extend(reversed(children[u]))
    return out


def _tour_on_hst(metric: Metric, tree: HstTree, demands: Sequence[Demand], ids: Sequence[int], k: int, root: int) -> SingleTour:
    by_node: dict[int, list[tuple[int, Demand]]] = defaultdict(list)
    for o in ids:
        dm = demands[o]
        by_node[tree.nca(dm.source, dm.target)].append((o, dm))
    dfs = _hst_dfs(tree)
    levels = sorted({tree.nodes[v].level for v in by_node}, reverse=True)
    parts: list[SingleTour] = []
    for lev in levels:
        for v in dfs:
            if tree.nodes[v].level == lev and v in by_node:
                parts.extend(_serve_through(metric, tree.nodes[v].center, by_node[v], k))
    return concat(metric, root, parts)


def preemptive_tour(metric: Metric, demands: Sequence[Demand], k: int, seed: int = 0, max_retries: int = 50,
                    c1: float = 64, c2: float = 32, root: int | None = None,
                    ids: Sequence[int] | None = None) -> tuple[SingleTour, TourBounds]:
    """1-preemptive tour serving ``demands`` (restricted to ``ids`` when given).

    FRT samples are redrawn until the tour length is at most
    ``c1 log2(n+2)^2 LB`` and the total ride time at most ``c2 log2(n+2)``
    times the sum of direct distances.
    """
    if ids is None:
        ids = range(len(demands))
    ids = [o for o in ids if demands[o].source != demands[o].target]
    if root is None:
        root = demands[ids[0]].source if ids else 0
    sub = [demands[o] for o in ids]
    lb = tour_lower_bound(metric, sub, k, root)
    lg = math.log2(metric.n + 2)
    length_limit = c1 * lg * lg * float(lb)
    direct = sum((metric(dm.source, dm.target) for dm in sub), 0)
    delay_limit = c2 * lg * float(direct)
    if not ids:
        return SingleTour.empty(root), TourBounds(lb, length_limit, delay_limit, 0)

    best, best_key = None, None
    for attempt in range(max_retries):
        tree = frt_embed(metric, seed, attempt)
        tour = _tour_on_hst(metric, tree, demands, ids, k, root)
        ride = sum(tour.delay.values(), 0)
        if tour.length <= length_limit and ride <= delay_limit:
            return tour, TourBounds(lb, length_limit, delay_limit, attempt + 1)
        key = (float(tour.length) / max(length_limit, 1e-300), float(ride) / max(delay_limit, 1e-300))
        if best_key is None or max(key) < max(best_key):
            best, best_key = tour, key
    raise RetriesExhausted(f"no tour met the bounds in {max_retries} attempts", best)


# --- minor-free metrics -------------------------------------------------------------

C3 = 16


@dataclass(frozen=True)
class MinorFreeTrace:
    scales: tuple[int, ...]
    hubs: dict[int, int]  # object -> preemption hub (absent when no preemption)


def preemptive_tour_minor_free(graph: WeightedGraph, demands: Sequence[Demand], k: int, r: int = 5,
                               root: int | None = None, ids: Sequence[int] | None = None,
                               metric: Metric | None = None, c3: int = C3) -> tuple[SingleTour, MinorFreeTrace]:
    """1-preemptive tour on a graph metric with every ride at most ``c3`` times the direct distance."""
    if metric is None:
        metric = metric_from_graph(graph)
    if ids is None:
        ids = range(len(demands))
    ids = [o for o in ids if demands[o].source != demands[o].target]
    if root is None:
        root = demands[ids[0]].source if ids else 0
    by_scale: dict[int, list[int]] = defaultdict(list)
    for o in ids:
        dist = metric(demands[o].source, demands[o].target)
        by_scale[_ceil_log2(dist)].append(o)

    parts: list[SingleTour] = []
    hubs: dict[int, int] = {}
    for j in sorted(by_scale):
        gamma = 2**j
        cover = split_cover(graph, gamma, r, SEPARATED, metric=metric)
        objs = by_scale[j]
        owner = cluster_of_pairs(cover, [(demands[o].source, demands[o].target) for o in objs])
        assigned: dict[int, list[int]] = defaultdict(list)
        for o, c in zip(objs, owner):
            if c is None:
                raise AssertionError(f"demand {o} is not co-clustered at scale {gamma}")
            assigned[c].append(o)
        for color, members in sorted(cover.color_classes().items()):
            live = [c for c in members if c in assigned]
            if not live:
                continue
            centers = {c: _center(metric, cover.clusters[c], [demands[o] for o in assigned[c]]) for c in live}
            visit = tsp_tour(metric, [centers[c] for c in live], start=centers[live[0]])
            rank = {v: i for i, v in enumerate(visit)}
            for c in sorted(live, key=lambda c: (rank[centers[c]], c)):
                hub = centers[c]
                objs_c = [(o, demands[o]) for o in assigned[c]]
                parts.extend(_serve_through(metric, hub, objs_c, k))
                for o, dm in objs_c:
                    if dm.source != hub and dm.target != hub:
                        hubs[o] = hub
    tour = concat(metric, root, parts)
    for o in ids:
        dist = metric(demands[o].source, demands[o].target)
        if tour.delay[o] > c3 * dist:
            raise AssertionError(f"object {o} rides {tour.delay[o]} > {c3} * {dist}")
    return tour, MinorFreeTrace(tuple(sorted(by_scale)), hubs)


def _center(metric: Metric, cluster: Sequence[int], dems: Sequence[Demand]) -> int:
    """Cluster vertex minimising the worst detour ratio of the assigned demands."""
    d = metric.dist

    def worst(c: int) -> Fraction:
        return max(Fraction(d[dm.source][c] + d[c][dm.target], d[dm.source][dm.target]) for dm in dems)

    return min(cluster, key=lambda c: (worst(c), c))


def _ceil_log2(x: Number) -> int:
    j = 0
    while 2**j < x:
        j += 1
    return j
