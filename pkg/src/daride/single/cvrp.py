"""Capacitated delivery (and collection) tours where no object rides much longer than its direct distance."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from daride.metric import Metric, Number
from daride.single.tour import SingleTour, Stop
from daride.single.tsp import tour_length, tsp_tour

# (object id, far endpoint, weight)
Item = tuple[int, int, int]


@dataclass(frozen=True)
class CheckpointSet:
    """Checkpoint indices into a tour ``order`` whose first vertex is the root."""

    order: tuple[int, ...]
    checkpoints: tuple[int, ...]
    beta: Fraction

    def segments(self) -> list[tuple[int, int]]:
        """Index ranges ``[start, end)`` of the tour assigned to each sub-tour."""
        bounds = [0, *self.checkpoints, len(self.order)]
        return [(a, b) for a, b in zip(bounds, bounds[1:])]


def _prefix(metric: Metric, order: Sequence[int]) -> list[Number]:
    pre = [0]
    for a, b in zip(order, order[1:]):
        pre.append(pre[-1] + metric.dist[a][b])
    return pre


def select_checkpoints(metric: Metric, order: Sequence[int], beta) -> CheckpointSet:
    """Walk the tour and open a new checkpoint whenever the stem-plus-path detour exceeds ``beta``."""
    beta = Fraction(beta)
    if beta <= 1:
        raise ValueError("beta must exceed 1")
    d, root = metric.dist, order[0]
    pre = _prefix(metric, order)
    last, cps = 0, []
    for i in range(1, len(order)):
        if d[root][order[last]] + pre[i] - pre[last] > beta * d[root][order[i]]:
            cps.append(i)
            last = i
    cs = CheckpointSet(tuple(order), tuple(cps), beta)
    problems = check_checkpoints(metric, cs)
    if problems:
        raise AssertionError("; ".join(problems))
    return cs


def check_checkpoints(metric: Metric, cs: CheckpointSet) -> list[str]:
    d, order, beta = metric.dist, cs.order, cs.beta
    root = order[0]
    pre = _prefix(metric, order)
    problems = []
    for a, b in cs.segments():
        for u in range(a, b):
            if d[root][order[a]] + pre[u] - pre[a] > beta * d[root][order[u]]:
                problems.append(f"checkpoint property 1 fails at tour index {u}")
    total = sum((d[root][order[v]] for v in cs.checkpoints), 0)
    if (beta - 1) * total > tour_length(metric, order):
        problems.append("checkpoint property 2 fails")
    return problems


@dataclass(frozen=True)
class CvrpResult:
    tour: SingleTour
    checkpoints: CheckpointSet
    tsp_length: Number
    bound: Number  # right-hand side of the asserted length chain

    @property
    def length(self) -> Number:
        return self.tour.length

    @property
    def delay(self):
        return self.tour.delay


def cvrp_bounded_delay(metric: Metric, depot: int, items: Sequence[Item], k: int, beta) -> CvrpResult:
    """Deliver every item from ``depot`` to its endpoint within ``beta`` times the direct distance."""
    beta = Fraction(beta)
    d = metric.dist
    for o, t, w in items:
        if not 0 < w <= k:
            raise ValueError(f"object {o} has weight {w} outside (0, {k}]")
    live = [it for it in items if it[1] != depot]
    order = tsp_tour(metric, [depot] + [t for _, t, _ in live], start=depot)
    cs = select_checkpoints(metric, order, beta)
    pos = {v: i for i, v in enumerate(order)}
    pre = _prefix(metric, order)

    stops: list[Stop] = []
    for a, b in cs.segments():
        group = sorted((it for it in live if a <= pos[it[1]] < b), key=lambda it: (pos[it[1]], it[0]))
        if group:
            stops.extend(_best_grouping(metric, depot, group, k, pos, pre))
    tour = SingleTour.build(metric, depot, stops)

    dC = tour_length(metric, order)
    unit = all(w == 1 for _, _, w in items)
    flow_term = Fraction(2 if unit else 4, k) * sum((w * d[depot][t] for _, t, w in items), 0)
    bound = (1 + Fraction(2) / (beta - 1)) * dC + flow_term
    for o, t, _ in live:
        if tour.delay[o] > beta * d[depot][t]:
            raise AssertionError(f"object {o} delay {tour.delay[o]} exceeds {beta}*{d[depot][t]}")
    if tour.length > bound:
        raise AssertionError(f"CVRP tour length {tour.length} exceeds chain bound {bound}")
    return CvrpResult(tour, cs, dC, bound)


def _best_grouping(metric, depot, group, k, pos, pre) -> list[Stop]:
    """Best of the ``k`` rotated slot groupings of one sub-tour's items."""
    starts, acc = [], 0
    for _, _, w in group:
        starts.append(acc)
        acc += w
    best, best_cost = None, None
    for off in range(k):
        trips: list[list[Item]] = []
        cur: list[Item] = []
        window = None
        for it, s in zip(group, starts):
            lo_win = (s - off) // k
            hi_win = (s + it[2] - 1 - off) // k
            if lo_win != hi_win:  # straddles a slot boundary: ship it alone
                if cur:
                    trips.append(cur)
                trips.append([it])
                cur, window = [], None
                continue
            if window is not None and lo_win != window and cur:
                trips.append(cur)
                cur = []
            window = lo_win
            cur.append(it)
        if cur:
            trips.append(cur)
        cost = sum(_trip_cost(metric, depot, t) for t in trips)
        if best_cost is None or cost < best_cost:
            best, best_cost = trips, cost
    stops: list[Stop] = []
    for trip in best:
        stops.append(Stop(depot, picks=tuple(o for o, _, _ in trip)))
        for v in dict.fromkeys(t for _, t, _ in trip):
            stops.append(Stop(v, drops=tuple(o for o, t, _ in trip if t == v)))
    return stops


def _trip_cost(metric, depot, trip) -> Number:
    d = metric.dist
    path = [depot] + list(dict.fromkeys(t for _, t, _ in trip))
    return sum((d[a][b] for a, b in zip(path, path[1:])), 0) + d[path[-1]][depot]


def cvrp_collect(metric: Metric, depot: int, items: Sequence[Item], k: int, beta) -> CvrpResult:
    """Bring every item from its endpoint to ``depot``: the time reversal of the delivery tour."""
    fwd = cvrp_bounded_delay(metric, depot, items, k, beta)
    return CvrpResult(fwd.tour.reversed(metric), fwd.checkpoints, fwd.tsp_length, fwd.bound)
