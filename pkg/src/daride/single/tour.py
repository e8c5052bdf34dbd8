"""Single-vehicle tours as sequences of vertex stops with drops and picks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from daride.metric import Metric, Number
from daride.model import Action, Drop, Move, Pick, Schedule


@dataclass(frozen=True)
class Stop:
    """At ``vertex`` the vehicle first drops ``drops`` and then picks ``picks``."""

    vertex: int
    drops: tuple[int, ...] = ()
    picks: tuple[int, ...] = ()


@dataclass(frozen=True)
class SingleTour:
    root: int
    stops: tuple[Stop, ...]
    length: Number
    delay: Mapping[int, Number]

    @classmethod
    def build(cls, metric: Metric, root: int, stops: Iterable[Stop]) -> "SingleTour":
        stops = tuple(stops)
        d = metric.dist
        t: Number = 0
        here = root
        picked: dict[int, Number] = {}
        delay: dict[int, Number] = {}
        onboard: set[int] = set()
        for st in stops:
            t += d[here][st.vertex]
            here = st.vertex
            for o in st.drops:
                if o not in onboard:
                    raise ValueError(f"tour drops object {o} it does not carry")
                onboard.discard(o)
                delay[o] = delay.get(o, 0) + t - picked.pop(o)
            for o in st.picks:
                if o in onboard:
                    raise ValueError(f"tour picks object {o} twice")
                onboard.add(o)
                picked[o] = t
        if onboard:
            raise ValueError(f"tour ends with objects on board: {sorted(onboard)}")
        t += d[here][root]
        return cls(root, stops, t, delay)

    @classmethod
    def empty(cls, root: int) -> "SingleTour":
        return cls(root, (), 0, {})

    def objects(self) -> set[int]:
        return {o for st in self.stops for o in st.picks}

    def path(self) -> list[int]:
        """Vertex sequence including the root at both ends."""
        return [self.root] + [st.vertex for st in self.stops] + [self.root]

    def actions(self) -> list[Action]:
        acts: list[Action] = []
        here = self.root
        for st in self.stops:
            if st.vertex != here:
                acts.append(Move(st.vertex))
                here = st.vertex
            acts.extend(Drop(o) for o in st.drops)
            acts.extend(Pick(o) for o in st.picks)
        if here != self.root:
            acts.append(Move(self.root))
        return acts

    def as_schedule(self) -> Schedule:
        return Schedule.single_round(1, {0: self.actions()})

    def max_load(self, weights: Sequence[int] | Mapping[int, int]) -> int:
        load = best = 0
        for st in self.stops:
            load -= sum(weights[o] for o in st.drops)
            load += sum(weights[o] for o in st.picks)
            best = max(best, load)
        return best

    def drop_vertices(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for st in self.stops:
            for o in st.drops:
                out.setdefault(o, []).append(st.vertex)
        return out

    def reversed(self, metric: Metric) -> "SingleTour":
        """Time reversal: the same walk backwards with picks and drops swapped."""
        return SingleTour.build(metric, self.root, (Stop(st.vertex, st.picks, st.drops) for st in reversed(self.stops)))


def concat(metric: Metric, root: int, tours: Iterable[SingleTour]) -> SingleTour:
    """Run the tours one after another, walking directly between their stops."""
    stops: list[Stop] = []
    for t in tours:
        if t.root != root:
            stops.append(Stop(t.root))
        stops.extend(t.stops)
        if t.root != root:
            stops.append(Stop(t.root))
    return SingleTour.build(metric, root, _trim(stops))


def _trim(stops: list[Stop]) -> list[Stop]:
    """Drop event-free stops that repeat the previous vertex."""
    out: list[Stop] = []
    for st in stops:
        if out and not st.drops and not st.picks and out[-1].vertex == st.vertex:
            continue
        out.append(st)
    return out
