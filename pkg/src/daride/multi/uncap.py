"""Uncapacitated multi-vehicle algorithms.

Every general instance is first reduced to a depot-to-depot instance: each
vehicle walks its tree of a rooted min-max forest, gathering the objects
whose source lies in the tree at its depot, and at the end walks the tree
again to deliver.  The middle part moves objects between depots, either
along a sparse spanner of the demand graph or through centers of a sparse
cover when the metric comes from a minor-free graph.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Sequence

from daride.lower_bounds import RootedForest, lb_max, nsl_solve
from daride.metric import Metric, WeightedGraph, metric_from_graph
from daride.model import Action, Drop, Instance, Move, Pick, Schedule
from daride.multi.trace import SolveTrace
from daride.structures.covers import SPARSE, cluster_of_pairs, split_cover
from daride.structures.spanner import hop_path, sparse_spanner
from daride.validate import makespan

# (object, from vertex, to vertex)
Transfer = tuple[int, int, int]


@dataclass(frozen=True)
class Reduction:
    forest: RootedForest
    src_slot: tuple[int, ...]  # vehicle whose tree gathers each object
    dst_slot: tuple[int, ...]  # vehicle whose tree delivers each object

    def transfers(self, inst: Instance) -> list[Transfer]:
        return [(o, inst.depots[a], inst.depots[b]) for o, (a, b) in enumerate(zip(self.src_slot, self.dst_slot))]


def _require_uncapacitated(inst: Instance) -> None:
    if inst.capacity < inst.total_weight():
        raise ValueError("uncapacitated algorithms need capacity >= total demand weight")


def reduce_to_depots(inst: Instance) -> Reduction:
    terminals = {v for dm in inst.demands for v in (dm.source, dm.target)}
    forest = nsl_solve(inst.metric, inst.depots, terminals)
    verts = [forest.vertices(j) for j in range(inst.q)]
    first_at: dict[int, int] = {}
    for j, r in enumerate(inst.depots):
        first_at.setdefault(r, j)

    def slot(v: int) -> int:
        if v in first_at:
            return first_at[v]
        return next(j for j in range(inst.q) if v in verts[j])

    src = tuple(slot(dm.source) for dm in inst.demands)
    dst = tuple(slot(dm.target) for dm in inst.demands)
    return Reduction(forest, src, dst)


def _tree_walk(edges: Sequence[tuple[int, int]], root: int, needed: set[int]) -> list[int]:
    """Closed DFS walk from ``root`` that enters only branches holding a needed vertex."""
    adj: dict[int, list[int]] = defaultdict(list)
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    keep: dict[int, bool] = {}

    def mark(u: int, parent: int | None) -> bool:
        hit = u in needed
        for w in sorted(adj[u]):
            if w != parent and mark(w, u):
                hit = True
        keep[u] = hit
        return hit

    mark(root, None)
    walk = [root]

    def go(u: int, parent: int | None) -> None:
        for w in sorted(adj[u]):
            if w != parent and keep[w]:
                walk.append(w)
                go(w, u)
                walk.append(u)

    go(root, None)
    return walk


def _gather_round(inst: Instance, red: Reduction, deliver: bool) -> Schedule:
    plans: dict[int, list[Action]] = {}
    for j, r in enumerate(inst.depots):
        slots = red.dst_slot if deliver else red.src_slot
        objs = [o for o in range(inst.m) if slots[o] == j and inst.demands[o].source != inst.demands[o].target]
        ends = {o: (inst.demands[o].target if deliver else inst.demands[o].source) for o in objs}
        objs = [o for o in objs if ends[o] != r]
        if not objs:
            continue
        walk = _tree_walk(red.forest.trees[j], r, set(ends.values()))
        acts: list[Action] = []
        if deliver:
            acts.extend(Pick(o) for o in objs)
        done: set[int] = set()
        for i, v in enumerate(walk):
            if i:
                acts.append(Move(v))
            if v in done:
                continue
            done.add(v)
            here = [o for o in objs if ends[o] == v]
            acts.extend((Drop(o) if deliver else Pick(o)) for o in here)
        if not deliver:
            acts.extend(Drop(o) for o in objs)
        plans[j] = acts
    return Schedule.single_round(inst.q, plans)


def depot_demand_schedule(metric: Metric, depots: Sequence[int], transfers: Sequence[Transfer],
                          info: dict | None = None) -> Schedule:
    """Move objects between depot vertices along a sparse spanner of the demand graph.

    One vehicle per depot vertex takes part.  There are exactly ``2 alpha``
    rounds with ``alpha = ceil(lg t) + 1``; in every round each vehicle walks
    out and back along the spanner edges assigned to it that carry objects,
    and every object advances one spanner hop.
    """
    q = len(depots)
    moving = [(o, a, b) for o, a, b in transfers if a != b]
    verts = sorted(set(depots))
    t = len(verts)
    if not moving or t <= 1:
        return Schedule.empty(q)
    idx = {v: i for i, v in enumerate(verts)}
    alpha = math.ceil(math.log2(t)) + 1
    sp = sparse_spanner(t, [(idx[a], idx[b]) for _, a, b in moving], alpha)
    adj = sp.adjacency()
    paths = {o: hop_path(adj, idx[a], idx[b]) for o, a, b in moving}
    if info is not None:
        info.update(spanner=sp, alpha=alpha, t=t, paths=paths)
    driver = {}
    for j, r in enumerate(depots):
        driver.setdefault(idx[r], j)

    rounds = []
    for step in range(2 * alpha):
        hops: dict[frozenset, list[tuple[int, int, int]]] = defaultdict(list)
        for o, p in paths.items():
            if step + 1 < len(p):
                hops[frozenset((p[step], p[step + 1]))].append((o, p[step], p[step + 1]))
        plans: dict[int, list[Action]] = defaultdict(list)
        for e, o_v in zip(sp.edges, sp.owner):
            key = frozenset(e)
            if key not in hops:
                continue
            w = e[0] if e[1] == o_v else e[1]
            out = [o for o, x, _ in hops[key] if x == o_v]
            back = [o for o, x, _ in hops[key] if x == w]
            acts = plans[driver[o_v]]
            acts.extend(Pick(o) for o in out)
            acts.append(Move(verts[w]))
            acts.extend(Drop(o) for o in out)
            acts.extend(Pick(o) for o in back)
            acts.append(Move(verts[o_v]))
            acts.extend(Drop(o) for o in back)
        rounds.append(tuple(tuple(plans.get(j, ())) for j in range(q)))
    return Schedule(q, tuple(rounds))


def uncap_solve(inst: Instance, info: dict | None = None) -> tuple[Schedule, SolveTrace]:
    _require_uncapacitated(inst)
    red = reduce_to_depots(inst)
    sched = (
        _gather_round(inst, red, deliver=False)
        .then(depot_demand_schedule(inst.metric, inst.depots, red.transfers(inst), info))
        .then(_gather_round(inst, red, deliver=True))
    )
    sched = _strip_idle(sched)
    trace = SolveTrace(makespan=makespan(inst, sched), lower_bounds=lb_max(inst))
    trace.notes["forest_cost"] = red.forest.cost
    return sched, trace


def _strip_idle(sched: Schedule) -> Schedule:
    return Schedule(sched.num_vehicles, tuple(r for r in sched.rounds if any(r)))


# --- minor-free graphs ------------------------------------------------------------


def minor_free_core(graph: WeightedGraph, metric: Metric, depots: Sequence[int], transfers: Sequence[Transfer],
                    r: int, info: dict | None = None) -> Schedule:
    """Two rounds through sparse-cover centers: drop at the center, then fetch from it."""
    q = len(depots)
    moving = [(o, a, b) for o, a, b in transfers if a != b]
    if not moving:
        return Schedule.empty(q)
    gamma = max(metric(a, b) for _, a, b in moving)
    cover = split_cover(graph, int(gamma), r, SPARSE, metric=metric)
    depot_set = set(depots)
    centers = []
    for cl in cover.clusters:
        ds = [v for v in cl if v in depot_set]
        centers.append(min(ds) if ds else min(cl))
    owner = cluster_of_pairs(cover, [(a, b) for _, a, b in moving])
    driver: dict[int, int] = {}
    for j, v in enumerate(depots):
        driver.setdefault(v, j)
    hub = {o: centers[c] for (o, _, _), c in zip(moving, owner)}
    if info is not None:
        info.update(cover=cover, hubs=hub, gamma=gamma)

    out_plans: dict[int, list[Action]] = {}
    in_plans: dict[int, list[Action]] = {}
    for v, j in driver.items():
        send = [(o, hub[o]) for o, a, _ in moving if a == v and hub[o] != v]
        fetch = [(o, hub[o]) for o, _, b in moving if b == v and hub[o] != v]
        if send:
            acts: list[Action] = [Pick(o) for o, _ in send]
            for c in sorted({c for _, c in send}):
                acts.append(Move(c))
                acts.extend(Drop(o) for o, h in send if h == c)
            acts.append(Move(v))
            out_plans[j] = acts
        if fetch:
            acts = []
            for c in sorted({c for _, c in fetch}):
                acts.append(Move(c))
                acts.extend(Pick(o) for o, h in fetch if h == c)
            acts.append(Move(v))
            acts.extend(Drop(o) for o, _ in fetch)
            in_plans[j] = acts
    return Schedule.single_round(q, out_plans).then(Schedule.single_round(q, in_plans))


def uncap_solve_minor_free(graph: WeightedGraph, inst: Instance, r: int = 5,
                           info: dict | None = None) -> tuple[Schedule, SolveTrace]:
    _require_uncapacitated(inst)
    metric = inst.metric if inst.graph is graph else metric_from_graph(graph)
    red = reduce_to_depots(inst)
    sched = (
        _gather_round(inst, red, deliver=False)
        .then(minor_free_core(graph, metric, inst.depots, red.transfers(inst), r, info))
        .then(_gather_round(inst, red, deliver=True))
    )
    sched = _strip_idle(sched)
    trace = SolveTrace(makespan=makespan(inst, sched), lower_bounds=lb_max(inst))
    return sched, trace
