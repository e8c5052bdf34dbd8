"""Capacitated preemptive mDaR: the Partial routine and its driver.

``partial`` gets a vehicle set ``Q``, demands ``D`` and a guess ``B`` of the
makespan, and returns a two-round schedule that delivers a constant
fraction of ``D``.  One 1-preemptive single-vehicle tour over ``D`` is cut
into pieces of length about ``rho * B``; pieces are handed to nearby
vehicles through a 2-matching, except for a contracting set of pieces whose
objects are re-solved recursively on that set's few neighbouring vehicles.
In the first round every vehicle moves its objects to their preemption
points, in the second from there to the targets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from daride.lower_bounds import lb_max
from daride.metric import Number, mst_edges
from daride.model import Instance, Schedule
from daride.multi.pieces import LinearTour, best_offset
from daride.multi.rebalance import max_contracting_set
from daride.multi.trace import PartialRecord, SolveTrace
from daride.single.preemptive import RetriesExhausted, preemptive_tour
from daride.validate import makespan, round_durations


class BoundTooSmall(Exception):
    """The makespan guess cannot be right for this call."""


@dataclass(frozen=True)
class SolverConfig:
    seed: int = 0
    rho_c: int = 4
    max_retries: int = 50
    max_doublings: int = 64
    r: int = 5

    def rho(self, inst: Instance, minor_free: bool = False) -> int:
        lg_m = math.ceil(math.log2(inst.m + 2))
        if minor_free:
            return self.rho_c * lg_m
        return self.rho_c * math.ceil(math.log2(inst.n + 2)) * lg_m


def split_far_groups(inst: Instance, Q: Sequence[int], B: Number):
    """Split ``Q`` at the longest depot-MST edge when it exceeds ``3B``.

    Returns ``(Q1, Q2, V1, V2)`` or None when no edge is that long.
    """
    verts = sorted({inst.depots[j] for j in Q})
    edges = mst_edges(inst.metric, verts)
    d = inst.metric.dist
    if not edges:
        return None
    u, v = max(edges, key=lambda e: (d[e[0]][e[1]], -min(e), -max(e)))
    if d[u][v] <= 3 * B:
        return None
    adj: dict[int, list[int]] = {x: [] for x in verts}
    for a, b in edges:
        if {a, b} != {u, v}:
            adj[a].append(b)
            adj[b].append(a)
    side = {u}
    stack = [u]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in side:
                side.add(y)
                stack.append(y)
    Q1 = [j for j in Q if inst.depots[j] in side]
    Q2 = [j for j in Q if inst.depots[j] not in side]
    V1 = {w for w in range(inst.n) if min(d[inst.depots[j]][w] for j in Q1) <= B}
    V2 = {w for w in range(inst.n) if min(d[inst.depots[j]][w] for j in Q2) <= B}
    return Q1, Q2, V1, V2


def _round_bound_ok(inst: Instance, sched: Schedule, limit: Number) -> bool:
    return all(max(row, default=0) <= limit for row in round_durations(inst.metric, inst.depots, sched))


def partial(inst: Instance, Q: Sequence[int], D: Sequence[int], B: Number, rho: Number, depth: int = 0,
            trace: SolveTrace | None = None, config: SolverConfig = SolverConfig()
            ) -> tuple[Schedule, set[int], SolveTrace]:
    """Serve part of ``D`` with vehicles ``Q`` in two rounds of length at most ``(8 + 8 rho) B`` each.

    Raises ``BoundTooSmall`` when the run shows that ``Q`` cannot serve ``D``
    within makespan ``B``.
    """
    if trace is None:
        trace = SolveTrace()
    q = inst.q
    Q = sorted(Q)
    dem = inst.demands
    trivial = {o for o in D if dem[o].source == dem[o].target}
    live = sorted(o for o in D if o not in trivial)
    if not live:
        trace.calls.append(PartialRecord(B, depth, len(Q), len(D), len(D), 0, "empty"))
        return Schedule.empty(q), set(D), trace
    if not Q:
        raise BoundTooSmall("demands left with no vehicles")
    if depth > math.ceil(math.log2(q)) + 2:
        raise BoundTooSmall(f"recursion depth {depth} exceeded")

    sp = split_far_groups(inst, Q, B)
    if sp is not None:
        Q1, Q2, V1, V2 = sp
        d = inst.metric.dist
        assert min(d[a][b] for a in V1 for b in V2) > B, "far groups are not separated"
        D1 = [o for o in live if dem[o].source in V1 and dem[o].target in V1]
        D2 = [o for o in live if dem[o].source in V2 and dem[o].target in V2]
        if len(D1) + len(D2) < len(live):
            raise BoundTooSmall("a demand is far from both depot groups")
        s1, c1, _ = partial(inst, Q1, D1, B, rho, depth, trace, config)
        s2, c2, _ = partial(inst, Q2, D2, B, rho, depth, trace, config)
        covered = c1 | c2 | trivial
        trace.calls.append(PartialRecord(B, depth, len(Q), len(D), len(covered), 0, "split"))
        return s1.alongside(s2), covered, trace

    limit = rho * B
    if len(Q) == 1:
        f = Q[0]
        tour = _tour(inst, live, config, root=inst.depots[f])
        if tour.length > limit:
            raise BoundTooSmall(f"single-vehicle tour {tour.length} exceeds rho*B = {limit}")
        _note_hubs(trace, LinearTour(inst.metric, tour))
        sched = Schedule.single_round(q, {f: tour.actions()})
        trace.calls.append(PartialRecord(B, depth, 1, len(D), len(D), 0, "base"))
        return sched, set(D), trace

    tour = _tour(inst, live, config)
    if tour.length > limit * len(Q):
        raise BoundTooSmall(f"tour {tour.length} exceeds rho*|Q|*B = {limit * len(Q)}")
    lin = LinearTour(inst.metric, tour)
    _, cuts = best_offset(lin, limit)
    cut = lin.cut_objects(cuts)
    kept = [o for o in live if o not in cut]
    pieces = [p for p in lin.pieces(cuts, kept) if p.intervals]
    if len(pieces) > len(Q):
        raise BoundTooSmall(f"{len(pieces)} non-trivial pieces for {len(Q)} vehicles")
    assert all(p.length <= 2 * limit for p in pieces)

    depots = [inst.depots[j] for j in Q]
    adj = [[i for i, r in enumerate(depots) if lin.piece_distance(r, p) <= 2 * B] for p in pieces]
    reb = max_contracting_set(adj, len(Q))
    in_S = {pieces[i].index for i in reb.S}
    C1 = sorted({iv.obj for p in pieces if p.index in in_S for iv in p.intervals})
    C1_set = set(C1)
    C2 = [o for o in kept if o not in C1_set]
    gamma = [Q[i] for i in sorted(reb.gamma_S)]

    sched = Schedule.empty(q)
    covered: set[int] = set(C2) | trivial
    if C1:
        if not gamma:
            raise BoundTooSmall("contracting pieces have no nearby vehicle")
        sub, c, _ = partial(inst, gamma, C1, B, rho, depth + 1, trace, config)
        sched = sub
        covered |= c

    assigned: dict[int, list] = {}
    for i, f in reb.pi.items():
        assigned.setdefault(Q[f], []).append(pieces[i])
    out_plans, in_plans = {}, {}
    for f, ps in sorted(assigned.items()):
        ps.sort(key=lambda p: p.index)
        out_plans[f] = lin.route(inst.depots[f], ps, {0})
        in_plans[f] = lin.route(inst.depots[f], ps, {1})
    mine = Schedule.single_round(q, out_plans).then(Schedule.single_round(q, in_plans))
    sched = mine.alongside(sched) if not mine.is_idle() else sched
    _note_hubs(trace, lin, set(C2))

    if not _round_bound_ok(inst, sched, (8 + 8 * rho) * B):
        raise AssertionError("Partial round exceeds (8 + 8 rho) B")
    trace.calls.append(PartialRecord(B, depth, len(Q), len(D), len(covered), len(cut), "tour"))
    return sched, covered, trace


def _tour(inst: Instance, ids: Sequence[int], config: SolverConfig, root: int | None = None):
    try:
        tour, _ = preemptive_tour(inst.metric, inst.demands, inst.capacity, seed=config.seed,
                                  max_retries=config.max_retries, root=root, ids=ids)
    except RetriesExhausted as e:
        tour = e.best
    return tour


def _note_hubs(trace: SolveTrace, lin: LinearTour, objs: set[int] | None = None) -> None:
    hubs = trace.notes.setdefault("preemption_vertex", {})
    for o, ivs in lin.by_obj.items():
        if objs is not None and o not in objs:
            continue
        if len(ivs) == 2:
            hubs[o] = lin.verts[ivs[0].j]


def cap_solve(inst: Instance, config: SolverConfig = SolverConfig(), rho: Number | None = None,
              start: Number | None = None) -> tuple[Schedule, SolveTrace]:
    """Repeat Partial on the uncovered demands, doubling the makespan guess on failure."""
    if rho is None:
        rho = config.rho(inst)
    trace = SolveTrace()
    trace.lower_bounds = lb_max(inst)
    remaining = {o for o, dm in enumerate(inst.demands) if dm.source != dm.target}
    sched = Schedule.empty(inst.q)
    B = start if start is not None else trace.lower_bounds.combined
    if not B:
        B = inst.metric.min_positive() or 1
    per_bound = math.ceil(math.log(max(len(remaining), 1)) / math.log(Fraction(4, 3))) + 1
    for _ in range(config.max_doublings):
        if not remaining:
            break
        trace.bounds.append(B)
        for _ in range(per_bound):
            if not remaining:
                break
            mark = len(trace.calls)
            hubs = dict(trace.notes.get("preemption_vertex", {}))
            try:
                part, cov, _ = partial(inst, range(inst.q), sorted(remaining), B, rho, 0, trace, config)
            except BoundTooSmall as e:
                del trace.calls[mark:]
                trace.notes["preemption_vertex"] = hubs
                trace.notes.setdefault("signals", []).append((B, str(e)))
                break
            cov &= remaining
            if not cov:
                break
            sched = sched.then(part)
            remaining -= cov
        if remaining:
            B = B * 2
    if remaining:
        raise AssertionError(f"cap_solve left {len(remaining)} demands after {config.max_doublings} doublings")
    sched = Schedule(inst.q, tuple(r for r in sched.rounds if any(r)))
    trace.makespan = makespan(inst, sched)
    return sched, trace
