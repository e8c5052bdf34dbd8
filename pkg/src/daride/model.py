"""Problem instances, vehicle actions and barrier-synchronised schedules."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

from daride.metric import Metric, MidPoint, Number, Position, WeightedGraph


@dataclass(frozen=True)
class Demand:
    source: int
    target: int
    weight: int = 1


@dataclass(frozen=True)
class Instance:
    """Metric, demands, one depot per vehicle and a common capacity.

    ``graph`` is kept when the metric was induced by a graph; the
    minor-free algorithms and the graph file mode need it.
    """

    metric: Metric
    demands: tuple[Demand, ...]
    depots: tuple[int, ...]
    capacity: int
    graph: WeightedGraph | None = None

    def __post_init__(self) -> None:
        n = self.metric.n
        if self.capacity < 1:
            raise ValueError("capacity must be at least 1")
        if not self.depots:
            raise ValueError("an instance needs at least one vehicle")
        for r in self.depots:
            if not 0 <= r < n:
                raise ValueError(f"depot {r} is not a vertex")
        for i, dm in enumerate(self.demands):
            if not (0 <= dm.source < n and 0 <= dm.target < n):
                raise ValueError(f"demand {i} references a missing vertex")
            if dm.weight <= 0:
                raise ValueError(f"demand {i} has non-positive weight")
            if dm.weight > self.capacity:
                raise ValueError(f"demand {i} is heavier than the vehicle capacity")

    @property
    def q(self) -> int:
        return len(self.depots)

    @property
    def m(self) -> int:
        return len(self.demands)

    @property
    def n(self) -> int:
        return self.metric.n

    def total_weight(self) -> int:
        return sum(d.weight for d in self.demands)

    def is_unweighted(self) -> bool:
        return all(d.weight == 1 for d in self.demands)

    def distinct_depots(self) -> list[int]:
        return sorted(set(self.depots))


# --- actions ---------------------------------------------------------------------


@dataclass(frozen=True)
class Move:
    to: int


@dataclass(frozen=True)
class MoveMid:
    """Move to the point at ``offset`` from ``u`` along metric edge ``(u, v)``."""

    u: int
    v: int
    offset: Number

    @property
    def point(self) -> MidPoint:
        return MidPoint(self.u, self.v, self.offset)


@dataclass(frozen=True)
class Pick:
    obj: int


@dataclass(frozen=True)
class Drop:
    obj: int


@dataclass(frozen=True)
class Wait:
    duration: Number = 0


Action = Union[Move, MoveMid, Pick, Drop, Wait]


def pos_action(pos: Position) -> Action:
    if isinstance(pos, MidPoint):
        return MoveMid(pos.u, pos.v, pos.offset)
    return Move(pos)


# --- schedules -------------------------------------------------------------------

Round = tuple[tuple[Action, ...], ...]


@dataclass(frozen=True)
class Schedule:
    """Per-vehicle action sequences grouped into barrier rounds.

    Every vehicle finishes round ``i`` before any vehicle starts round
    ``i + 1``.  ``rounds[i][j]`` is vehicle ``j``'s action list in round ``i``.
    """

    num_vehicles: int
    rounds: tuple[Round, ...] = ()

    def __post_init__(self) -> None:
        for i, rnd in enumerate(self.rounds):
            if len(rnd) != self.num_vehicles:
                raise ValueError(f"round {i} has {len(rnd)} vehicle entries, expected {self.num_vehicles}")

    @classmethod
    def empty(cls, q: int) -> "Schedule":
        return cls(q, ())

    @classmethod
    def from_lists(cls, q: int, rounds: Iterable[Sequence[Sequence[Action]]]) -> "Schedule":
        return cls(q, tuple(tuple(tuple(acts) for acts in rnd) for rnd in rounds))

    @classmethod
    def single_round(cls, q: int, plans: dict[int, Sequence[Action]]) -> "Schedule":
        rnd = tuple(tuple(plans.get(j, ())) for j in range(q))
        return cls(q, (rnd,))

    def __len__(self) -> int:
        return len(self.rounds)

    def is_idle(self) -> bool:
        return all(not acts for rnd in self.rounds for acts in rnd)

    def then(self, other: "Schedule") -> "Schedule":
        """Run ``other`` after this schedule (disjoint round blocks)."""
        _same_fleet(self, other)
        return Schedule(self.num_vehicles, self.rounds + other.rounds)

    def alongside(self, other: "Schedule") -> "Schedule":
        """Merge round ``i`` of both schedules; the vehicle sets must not overlap."""
        _same_fleet(self, other)
        q = self.num_vehicles
        out = []
        for i in range(max(len(self.rounds), len(other.rounds))):
            a = self.rounds[i] if i < len(self.rounds) else ((),) * q
            b = other.rounds[i] if i < len(other.rounds) else ((),) * q
            merged = []
            for j in range(q):
                if a[j] and b[j]:
                    raise ValueError(f"vehicle {j} is busy in both schedules in round {i}")
                merged.append(a[j] or b[j])
            out.append(tuple(merged))
        return Schedule(q, tuple(out))

    def map_objects(self, mapping: dict[int, Sequence[int]]) -> "Schedule":
        """Expand every Pick/Drop of an aggregate object into its members."""

        def expand(act: Action) -> list[Action]:
            if isinstance(act, Pick):
                return [Pick(o) for o in mapping[act.obj]]
            if isinstance(act, Drop):
                return [Drop(o) for o in mapping[act.obj]]
            return [act]

        rounds = tuple(
            tuple(tuple(x for act in acts for x in expand(act)) for acts in rnd) for rnd in self.rounds
        )
        return Schedule(self.num_vehicles, rounds)

    def padded(self, length: int) -> "Schedule":
        extra = ((((),) * self.num_vehicles),) * max(0, length - len(self.rounds))
        return Schedule(self.num_vehicles, self.rounds + extra)


def _same_fleet(a: Schedule, b: Schedule) -> None:
    if a.num_vehicles != b.num_vehicles:
        raise ValueError("schedules are for fleets of different size")


@dataclass
class RoundBuilder:
    """Mutable helper for assembling one round vehicle by vehicle."""

    q: int
    plans: dict[int, list[Action]] = field(default_factory=dict)

    def add(self, vehicle: int, *actions: Action) -> None:
        self.plans.setdefault(vehicle, []).extend(actions)

    def schedule(self) -> Schedule:
        return Schedule.single_round(self.q, self.plans)
