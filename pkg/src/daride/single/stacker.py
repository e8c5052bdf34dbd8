"""Unit-capacity single-vehicle service along a doubling tour."""

from __future__ import annotations

from typing import Sequence

from daride.metric import Metric
from daride.single.tour import SingleTour, Stop
from daride.single.tsp import tour_length, tsp_tour


def stacker_crane(metric: Metric, demands: Sequence[tuple[int, int, int]], depot: int) -> SingleTour:
    """Serve ``(obj, source, target)`` demands one at a time.

    The vehicle follows a tour over all endpoints; on reaching a vertex it
    ferries every pending object sourced there to its target and comes back
    before moving on.  Length is at most the tour plus twice the direct
    distances.
    """
    ends = [depot] + [v for _, s, t in demands for v in (s, t)]
    order = tsp_tour(metric, ends, start=depot)
    pending: dict[int, list[tuple[int, int]]] = {}
    for o, s, t in sorted(demands):
        if s != t:
            pending.setdefault(s, []).append((o, t))
    stops: list[Stop] = []
    for v in order:
        for o, t in pending.pop(v, []):
            stops.append(Stop(v, picks=(o,)))
            stops.append(Stop(t, drops=(o,)))
            stops.append(Stop(v))
    tour = SingleTour.build(metric, depot, stops)
    bound = tour_length(metric, order) + 2 * sum((metric(s, t) for _, s, t in demands), 0)
    if tour.length > bound:
        raise AssertionError(f"stacker-crane tour {tour.length} exceeds {bound}")
    return tour
