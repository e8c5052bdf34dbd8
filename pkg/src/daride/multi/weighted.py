"""Weighted demands: heavy vertex pairs by unit-capacity ferrying, light pairs as aggregates."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from daride.lower_bounds import lb_max
from daride.metric import Number
from daride.model import Demand, Instance, Schedule
from daride.multi.partial import BoundTooSmall, SolverConfig, cap_solve, split_far_groups
from daride.multi.pieces import LinearTour
from daride.multi.rebalance import max_contracting_set
from daride.multi.trace import PartialRecord, SolveTrace
from daride.single.stacker import stacker_crane
from daride.validate import makespan

# stacker-crane tours are accepted up to TOUR_C * |Q| * B; pieces are then at
# most (TOUR_C + 1) B long and one round costs at most 2 (4B + 2 (TOUR_C + 1) B)
TOUR_C = 16
C_PRE = 2 * (4 + 2 * (TOUR_C + 1))


@dataclass(frozen=True)
class Part:
    u: int
    v: int
    members: tuple[int, ...]
    weight: int


def pair_demands(inst: Instance) -> dict[tuple[int, int], list[int]]:
    pairs: dict[tuple[int, int], list[int]] = defaultdict(list)
    for o, dm in enumerate(inst.demands):
        if dm.source != dm.target:
            pairs[(dm.source, dm.target)].append(o)
    return dict(pairs)


def partition_pair(inst: Instance, u: int, v: int, objs: Sequence[int]) -> list[Part]:
    """Greedy first-fit split into parts of weight in ``[k/2, k]``, except possibly the last."""
    k = inst.capacity
    w = {o: inst.demands[o].weight for o in objs}
    parts: list[Part] = []
    cur: list[int] = []
    load = 0
    for o in sorted(objs, key=lambda o: (-w[o], o)):
        if 2 * w[o] > k:
            parts.append(Part(u, v, (o,), w[o]))
            continue
        # a light object that does not fit leaves more than k/2 behind
        if load + w[o] > k:
            parts.append(Part(u, v, tuple(cur), load))
            cur, load = [], 0
        cur.append(o)
        load += w[o]
    if cur:
        parts.append(Part(u, v, tuple(cur), load))
    return parts


def preproc_heavy(inst: Instance, Q: Sequence[int], heavy_pairs: dict[tuple[int, int], list[int]], B: Number,
                  trace: SolveTrace | None = None) -> tuple[Schedule, SolveTrace]:
    """One round moving every heavy pair's objects, a part at a time, with makespan at most ``C_PRE * B``."""
    if trace is None:
        trace = SolveTrace()
    parts = [p for (u, v), objs in sorted(heavy_pairs.items()) for p in partition_pair(inst, u, v, objs)]
    sched = _preproc(inst, list(Q), parts, list(range(len(parts))), B, 0, trace)
    sched = sched.map_objects({i: p.members for i, p in enumerate(parts)})
    limit = C_PRE * B
    if makespan(inst, sched) > limit:
        raise AssertionError(f"PreProc makespan exceeds {C_PRE} B")
    trace.notes["parts"] = parts
    return sched, trace


def _preproc(inst: Instance, Q: list[int], parts: list[Part], ids: list[int], B: Number, depth: int,
             trace: SolveTrace) -> Schedule:
    q = inst.q
    if not ids:
        return Schedule.empty(q)
    if not Q:
        raise BoundTooSmall("parts left with no vehicles")
    if depth > math.ceil(math.log2(q)) + 2:
        raise BoundTooSmall(f"recursion depth {depth} exceeded")
    d = inst.metric.dist
    if max(d[parts[i].u][parts[i].v] for i in ids) > B:
        raise BoundTooSmall("a heavy pair is longer than B")

    sp = split_far_groups(inst, Q, B)
    if sp is not None:
        Q1, Q2, V1, V2 = sp
        I1 = [i for i in ids if parts[i].u in V1 and parts[i].v in V1]
        I2 = [i for i in ids if parts[i].u in V2 and parts[i].v in V2]
        if len(I1) + len(I2) < len(ids):
            raise BoundTooSmall("a heavy pair is far from both depot groups")
        return _preproc(inst, Q1, parts, I1, B, depth, trace).alongside(
            _preproc(inst, Q2, parts, I2, B, depth, trace))

    root = inst.depots[Q[0]]
    tour = stacker_crane(inst.metric, [(i, parts[i].u, parts[i].v) for i in ids], root)
    if tour.length > TOUR_C * len(Q) * B:
        raise BoundTooSmall(f"stacker-crane tour {tour.length} exceeds {TOUR_C}|Q|B")
    if len(Q) == 1:
        trace.calls.append(PartialRecord(B, depth, 1, len(ids), len(ids), 0, "base"))
        return Schedule.single_round(q, {Q[0]: tour.actions()})

    lin = LinearTour(inst.metric, tour)
    cuts = []
    for p in range(1, len(Q)):
        c = Fraction(p * tour.length, len(Q))
        # never cut while carrying: slide forward to the drop
        for iv in lin.intervals:
            if iv.a < c < iv.b:
                c = Fraction(iv.b)
        cuts.append(c if c.denominator != 1 else c.numerator)
    pieces = [p for p in lin.pieces(cuts, ids) if p.intervals]
    assert not lin.cut_objects(cuts)
    assert len(pieces) <= len(Q)
    assert all(p.length <= (TOUR_C + 1) * B for p in pieces)

    depots = [inst.depots[j] for j in Q]
    adj = [[i for i, r in enumerate(depots) if lin.piece_distance(r, p) <= 2 * B] for p in pieces]
    reb = max_contracting_set(adj, len(Q))
    in_S = {pieces[i].index for i in reb.S}
    C = sorted({iv.obj for p in pieces if p.index in in_S for iv in p.intervals})
    gamma = [Q[i] for i in sorted(reb.gamma_S)]
    sched = Schedule.empty(q)
    if C:
        if not gamma:
            raise BoundTooSmall("contracting pieces have no nearby vehicle")
        sched = _preproc(inst, gamma, parts, C, B, depth + 1, trace)
    plans: dict[int, list] = {}
    assigned: dict[int, list] = defaultdict(list)
    for i, f in reb.pi.items():
        assigned[Q[f]].append(pieces[i])
    for f, ps in sorted(assigned.items()):
        ps.sort(key=lambda p: p.index)
        plans[f] = lin.route(inst.depots[f], ps, None)
    mine = Schedule.single_round(q, plans)
    trace.calls.append(PartialRecord(B, depth, len(Q), len(ids), len(ids), 0, "preproc"))
    return mine.alongside(sched)


def weighted_solve(inst: Instance, config: SolverConfig = SolverConfig()) -> tuple[Schedule, SolveTrace]:
    """Heavy pairs (total weight at least k/2) first, then light pairs as one object each."""
    k = inst.capacity
    pairs = pair_demands(inst)
    dem = {p: sum(inst.demands[o].weight for o in objs) for p, objs in pairs.items()}
    heavy = {p: objs for p, objs in pairs.items() if 2 * dem[p] >= k}
    light = sorted(p for p in pairs if p not in heavy)

    trace = SolveTrace()
    trace.lower_bounds = lb_max(inst)
    B = trace.lower_bounds.combined or inst.metric.min_positive() or 1
    phase1 = Schedule.empty(inst.q)
    if heavy:
        for _ in range(config.max_doublings):
            trace.bounds.append(B)
            mark = len(trace.calls)
            try:
                phase1, _ = preproc_heavy(inst, range(inst.q), heavy, B, trace)
                break
            except BoundTooSmall as e:
                del trace.calls[mark:]
                trace.notes.setdefault("signals", []).append((B, str(e)))
                B *= 2
        else:
            raise AssertionError("PreProc never succeeded")
    trace.notes["heavy_pairs"] = sorted(heavy)
    trace.notes["light_pairs"] = light

    phase2 = Schedule.empty(inst.q)
    if light:
        agg = Instance(inst.metric, tuple(Demand(u, v, dem[(u, v)]) for u, v in light), inst.depots, k, inst.graph)
        sub, sub_trace = cap_solve(agg, config)
        phase2 = sub.map_objects({i: tuple(pairs[p]) for i, p in enumerate(light)})
        trace.calls.extend(sub_trace.calls)
        trace.bounds.extend(sub_trace.bounds)
        trace.notes["light_trace"] = sub_trace
    sched = phase1.then(phase2)
    sched = Schedule(inst.q, tuple(r for r in sched.rounds if any(r)))
    trace.makespan = makespan(inst, sched)
    return sched, trace

