"""Feasibility checking and makespan accounting for schedules.

Time semantics are barrier rounds: round ``i + 1`` starts when the slowest
vehicle finishes round ``i``.  Within a round a vehicle's clock advances by
metric distance on moves and by the stated duration on waits; picks and
drops take no time.  An object dropped by one vehicle becomes available to
other vehicles only from the next round on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from daride.metric import Metric, MidPoint, Number, Position, position_distance
from daride.model import Action, Drop, Instance, Move, MoveMid, Pick, Schedule, Wait


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str
    round: int | None = None
    vehicle: int | None = None
    obj: int | None = None


@dataclass
class ObjectReport:
    preemptions: int = 0
    preemption_vertices: list[int] = field(default_factory=list)
    delivered: bool = False
    in_vehicle_time: Number = 0
    carriers: list[int] = field(default_factory=list)


@dataclass
class VehicleReport:
    completion_time: Number = 0
    max_load: int = 0
    distance: Number = 0


@dataclass
class ValidationReport:
    feasible: bool
    makespan: Number
    violations: list[Violation]
    objects: list[ObjectReport]
    vehicles: list[VehicleReport]
    round_durations: list[Number]

    def summary(self) -> str:
        status = "feasible" if self.feasible else f"INFEASIBLE ({len(self.violations)} violations)"
        return f"{status}; makespan {self.makespan}"

    def max_preemptions(self) -> int:
        return max((o.preemptions for o in self.objects), default=0)


def _action_cost(metric: Metric, pos: Position, act: Action) -> tuple[Position, Number]:
    if isinstance(act, Move):
        return act.to, position_distance(metric, pos, act.to)
    if isinstance(act, MoveMid):
        dest = _normalise(metric, act)
        return dest, position_distance(metric, pos, dest)
    if isinstance(act, Wait):
        return pos, act.duration
    return pos, 0


def _normalise(metric: Metric, act: MoveMid) -> Position:
    length = metric.dist[act.u][act.v]
    if act.offset == 0:
        return act.u
    if act.offset == length:
        return act.v
    return MidPoint(act.u, act.v, act.offset)


def round_durations(metric: Metric, depots: Sequence[int], sched: Schedule) -> list[list[Number]]:
    """Per-round, per-vehicle elapsed time."""
    pos: list[Position] = list(depots)
    out = []
    for rnd in sched.rounds:
        row = []
        for j, acts in enumerate(rnd):
            t: Number = 0
            for act in acts:
                pos[j], dt = _action_cost(metric, pos[j], act)
                t += dt
            row.append(t)
        out.append(row)
    return out


def makespan(inst: Instance, sched: Schedule) -> Number:
    """Sum over rounds of the slowest vehicle's round duration."""
    return sum((max(row, default=0) for row in round_durations(inst.metric, inst.depots, sched)), 0)


def validate(inst: Instance, sched: Schedule) -> ValidationReport:
    metric, q, m, k = inst.metric, inst.q, inst.m, inst.capacity
    violations: list[Violation] = []
    objects = [ObjectReport() for _ in range(m)]
    vehicles = [VehicleReport() for _ in range(q)]

    if sched.num_vehicles != q:
        violations.append(Violation("bad_reference", f"schedule has {sched.num_vehicles} vehicles, instance has {q}"))
        return ValidationReport(False, makespan_of_rows([]), violations, objects, vehicles, [])

    # object state: ("at", vertex, round, dropper) or ("in", vehicle)
    loc: list[tuple] = [("at", d.source, -1, None) for d in inst.demands]
    pick_time: list[Number | None] = [None] * m
    pos: list[Position] = list(inst.depots)
    carried: list[set[int]] = [set() for _ in range(q)]
    load = [0] * q
    start: Number = 0
    durations: list[Number] = []

    for r, rnd in enumerate(sched.rounds):
        claimed: dict[int, int] = {}
        row = []
        for j, acts in enumerate(rnd):
            t: Number = 0
            for act in acts:
                bad = _bad_reference(inst, act)
                if bad:
                    violations.append(Violation("bad_reference", bad, r, j))
                    continue
                if isinstance(act, (Move, MoveMid, Wait)):
                    if isinstance(act, Wait) and act.duration < 0:
                        violations.append(Violation("bad_reference", "negative wait", r, j))
                        continue
                    new_pos, dt = _action_cost(metric, pos[j], act)
                    pos[j] = new_pos
                    t += dt
                    vehicles[j].distance += dt if not isinstance(act, Wait) else 0
                    continue
                o = act.obj
                if claimed.setdefault(o, j) != j:
                    violations.append(
                        Violation("object_conflict", f"object {o} handled by two vehicles in one round", r, j, o)
                    )
                    continue
                here = pos[j]
                if isinstance(here, MidPoint):
                    violations.append(Violation("mid_edge_event", f"{type(act).__name__} off-vertex", r, j, o))
                    continue
                now = start + t
                if isinstance(act, Pick):
                    st = loc[o]
                    ok = st[0] == "at" and st[1] == here and (st[2] < r or st[3] == j)
                    if not ok:
                        violations.append(Violation("pick_unavailable", f"object {o} is not available at {here}", r, j, o))
                        continue
                    loc[o] = ("in", j)
                    carried[j].add(o)
                    load[j] += inst.demands[o].weight
                    pick_time[o] = now
                    objects[o].carriers.append(j)
                    vehicles[j].max_load = max(vehicles[j].max_load, load[j])
                    if load[j] > k:
                        violations.append(Violation("capacity", f"load {load[j]} exceeds {k}", r, j, o))
                else:
                    if o not in carried[j]:
                        violations.append(Violation("drop_not_carried", f"object {o} is not on vehicle {j}", r, j, o))
                        continue
                    carried[j].discard(o)
                    load[j] -= inst.demands[o].weight
                    loc[o] = ("at", here, r, j)
                    objects[o].in_vehicle_time += now - pick_time[o]
                    pick_time[o] = None
                    if here != inst.demands[o].target:
                        objects[o].preemptions += 1
                        objects[o].preemption_vertices.append(here)
            if acts:
                vehicles[j].completion_time = start + t
            row.append(t)
        dur = max(row, default=0)
        durations.append(dur)
        start += dur

    for j in range(q):
        if pos[j] != inst.depots[j]:
            violations.append(Violation("end_not_depot", f"vehicle {j} ends at {pos[j]}", vehicle=j))
    for o, dm in enumerate(inst.demands):
        st = loc[o]
        if st[0] == "in":
            violations.append(Violation("in_transit", f"object {o} is still on vehicle {st[1]}", obj=o))
        elif st[1] != dm.target:
            violations.append(Violation("undelivered", f"object {o} rests at {st[1]}", obj=o))
        else:
            objects[o].delivered = True

    return ValidationReport(not violations, start, violations, objects, vehicles, durations)


def makespan_of_rows(rows: list[list[Number]]) -> Number:
    return sum((max(r, default=0) for r in rows), 0)


def _bad_reference(inst: Instance, act: Action) -> str | None:
    n = inst.n
    if isinstance(act, Move):
        return None if 0 <= act.to < n else f"vertex {act.to} out of range"
    if isinstance(act, MoveMid):
        if not (0 <= act.u < n and 0 <= act.v < n):
            return "mid-edge point on a missing vertex"
        if not 0 <= act.offset <= inst.metric.dist[act.u][act.v]:
            return "mid-edge offset outside its edge"
        return None
    if isinstance(act, (Pick, Drop)):
        return None if 0 <= act.obj < inst.m else f"object {act.obj} out of range"
    return None
