"""Exact solvers for desk-sized instances, used as baselines in tests and benchmarks."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from daride.lower_bounds import OracleSizeError
from daride.metric import Metric, Number
from daride.model import Action, Drop, Instance, Move, MoveMid, Pick, Schedule, Wait

ORACLE_LIMITS = {"n": 6, "m": 3, "q": 2, "k": 2}
CVRP_LIMIT = 10


# --- Held-Karp and CVRP ---------------------------------------------------------------


def held_karp(metric: Metric, start: int, vertices: Sequence[int]) -> Number:
    """Shortest closed walk from ``start`` through ``vertices``."""
    vs = sorted(set(vertices) - {start})
    if not vs:
        return 0
    d = metric.dist
    n = len(vs)
    best: dict[tuple[int, int], Number] = {(1 << i, i): d[start][vs[i]] for i in range(n)}
    for mask in range(1, 1 << n):
        for last in range(n):
            if (mask, last) not in best:
                continue
            here = best[(mask, last)]
            for nxt in range(n):
                if mask & (1 << nxt):
                    continue
                key = (mask | (1 << nxt), nxt)
                cand = here + d[vs[last]][vs[nxt]]
                if key not in best or cand < best[key]:
                    best[key] = cand
    full = (1 << n) - 1
    return min(best[(full, i)] + d[vs[i]][start] for i in range(n))


def oracle_cvrp(metric: Metric, depot: int, dests: Sequence, k: int) -> Number:
    """Optimal total length of capacity-``k`` trips from ``depot`` delivering to ``dests``.

    ``dests`` holds vertices (unit weight) or ``(vertex, weight)`` pairs.
    """
    items = [(x, 1) if isinstance(x, int) else (int(x[0]), int(x[1])) for x in dests]
    if len(items) > CVRP_LIMIT:
        raise OracleSizeError(f"oracle_cvrp handles at most {CVRP_LIMIT} destinations")
    n = len(items)
    if n == 0:
        return 0
    trip: dict[int, Number] = {}
    for mask in range(1, 1 << n):
        members = [items[i] for i in range(n) if mask >> i & 1]
        if sum(w for _, w in members) <= k:
            trip[mask] = held_karp(metric, depot, [v for v, _ in members])
    best = {0: 0}
    for mask in range(1, 1 << n):
        low = mask & -mask
        rest = mask ^ low
        cand = None
        sub = rest
        while True:
            part = sub | low
            if part in trip:
                c = trip[part] + best[mask ^ part]
                if cand is None or c < cand:
                    cand = c
            if sub == 0:
                break
            sub = (sub - 1) & rest
        best[mask] = cand
    return best[(1 << n) - 1]


# --- minimum makespan ---------------------------------------------------------------


@dataclass(frozen=True)
class OracleResult:
    makespan: Number
    schedule: Schedule
    timeline: tuple[tuple[tuple[Number, str, int], ...], ...]  # per vehicle (time, kind, arg)
    nodes: int


def check_oracle_size(inst: Instance) -> None:
    dims = {"n": inst.n, "m": inst.m, "q": inst.q, "k": inst.capacity}
    over = [f"{key}={dims[key]} > {lim}" for key, lim in ORACLE_LIMITS.items() if dims[key] > lim]
    if over:
        raise OracleSizeError("oracle_makespan size limit: " + ", ".join(over))


class _Search:
    """Depth-first branch and bound over time-ordered vehicle decisions.

    The vehicle with the smallest clock acts next.  It may perform one batch
    of drops and picks at its vertex, move to another vertex, wait until the
    next clock of another vehicle, or go home for good.  A move is never
    followed by another move or preceded by a wait: arriving earlier and
    waiting on site dominates both.
    """

    def __init__(self, inst: Instance, max_actions: int):
        self.inst = inst
        self.d = inst.metric.dist
        self.best: Number | None = None
        self.best_log = None
        self.seen: dict = {}
        self.nodes = 0
        self.max_actions = max_actions

    def run(self):
        inst = self.inst
        q = inst.q
        # vehicle: (pos, clock, carried, done, last, behind); last in {"", "move", "event", "wait"}
        vehs = tuple((inst.depots[j], 0, frozenset(), False, "", False) for j in range(q))
        objs = tuple(
            ("at", dm.source, 0, None) if dm.source != dm.target else ("done", dm.target, 0, None)
            for dm in inst.demands
        )
        self._seed_incumbent()
        self._dfs(vehs, objs, tuple(() for _ in range(q)), 0)
        return self.best, self.best_log

    def _seed_incumbent(self) -> None:
        """One vehicle serving the demands one by one, best order and vehicle."""
        inst, d = self.inst, self.d
        live = [o for o, dm in enumerate(inst.demands) if dm.source != dm.target]
        for j, r in enumerate(inst.depots):
            for order in itertools.permutations(live):
                t, here, entries = 0, r, []
                for o in order:
                    dm = inst.demands[o]
                    if here != dm.source:
                        entries.append((t, "move", dm.source))
                        t += d[here][dm.source]
                    entries += [(t, "pick", o), (t, "move", dm.target)]
                    t += d[dm.source][dm.target]
                    entries.append((t, "drop", o))
                    here = dm.target
                entries.append((t, "home", r))
                t += d[here][r]
                if self.best is None or t < self.best:
                    self.best = t
                    self.best_log = tuple(tuple(entries) if x == j else () for x in range(inst.q))

    def _bound(self, vehs, objs) -> Number:
        d, inst = self.d, self.inst
        live = [j for j, v in enumerate(vehs) if not v[3]]
        lb = 0
        for j, v in enumerate(vehs):
            lb = max(lb, v[1] if v[3] else v[1] + d[v[0]][inst.depots[j]])
        for o, st in enumerate(objs):
            if st[0] == "done":
                continue
            t = inst.demands[o].target
            home = min(d[t][inst.depots[j]] for j in live) if live else None
            if home is None:
                return None
            if st[0] == "at":
                x = st[1]
                reach = min(max(vehs[j][1] + d[vehs[j][0]][x], st[2]) for j in live)
                lb = max(lb, reach + d[x][t] + home)
            else:
                j = st[1]
                lb = max(lb, vehs[j][1] + d[vehs[j][0]][t] + home)
        return lb

    def _dfs(self, vehs, objs, log, depth):
        self.nodes += 1
        lb = self._bound(vehs, objs)
        if lb is None or (self.best is not None and lb >= self.best):
            return
        if all(v[3] for v in vehs):
            if all(st[0] == "done" for st in objs):
                self.best = max(v[1] for v in vehs)
                self.best_log = log
            return
        if depth >= self.max_actions:
            return
        # a state explored before with at least as many actions left cannot improve
        key = (vehs, objs)
        if self.seen.get(key, self.max_actions + 1) <= depth:
            return
        self.seen[key] = depth

        inst, d = self.inst, self.d
        live = [j for j, v in enumerate(vehs) if not v[3]]
        j = min(live, key=lambda x: (vehs[x][1], vehs[x][5], x))
        pos, clock, carried, _, last, behind = vehs[j]

        def with_vehicle(new):
            return vehs[:j] + (new,) + vehs[j + 1:]

        def add_log(*entries):
            return log[:j] + (log[j] + entries,) + log[j + 1:]

        # finish; going home straight after a move or a wait is dominated
        if not carried and last not in ("move", "wait"):
            t_home = clock + d[pos][inst.depots[j]]
            self._dfs(with_vehicle((inst.depots[j], t_home, carried, True, "", False)), objs,
                      add_log((clock, "home", inst.depots[j])), depth + 1)

        # drops and picks
        if last != "event":
            droppable = sorted(o for o in carried if not self._picked_now(log[j], o, clock))
            here = [o for o, st in enumerate(objs) if st[0] == "at" and st[1] == pos and st[2] <= clock
                    and not (st[3] == j and st[2] == clock)]
            weight = {o: inst.demands[o].weight for o in range(inst.m)}
            base_load = sum(weight[o] for o in carried)
            for nd in range(len(droppable) + 1):
                for drops in itertools.combinations(droppable, nd):
                    load = base_load - sum(weight[o] for o in drops)
                    for npk in range(len(here) + 1):
                        for picks in itertools.combinations(here, npk):
                            if not drops and not picks:
                                continue
                            if load + sum(weight[o] for o in picks) > inst.capacity:
                                continue
                            new_objs = list(objs)
                            for o in drops:
                                done = pos == inst.demands[o].target
                                new_objs[o] = ("done" if done else "at", pos, clock, j)
                            for o in picks:
                                new_objs[o] = ("in", j, clock, None)
                            new_carried = (carried - set(drops)) | set(picks)
                            entries = tuple((clock, "drop", o) for o in drops) + tuple((clock, "pick", o) for o in picks)
                            self._dfs(with_vehicle((pos, clock, frozenset(new_carried), False, "event", False)),
                                      tuple(new_objs), add_log(*entries), depth + 1)

        # move
        if last not in ("move", "wait"):
            for v in sorted(range(inst.n), key=lambda v: (d[pos][v], v)):
                if v == pos:
                    continue
                self._dfs(with_vehicle((v, clock + d[pos][v], carried, False, "move", False)), objs,
                          add_log((clock, "move", v)), depth + 1)

        # wait for the next clock of another active vehicle
        others = [vehs[x][1] for x in live if x != j]
        later = [c for c in others if c > clock]
        if later:
            t = min(later)
            self._dfs(with_vehicle((pos, t, carried, False, "wait", False)), objs,
                      add_log((clock, "wait", 0)), depth + 1)
        elif not behind and any(c == clock and not vehs[x][5] for x, c in zip([x for x in live if x != j], others)):
            self._dfs(with_vehicle((pos, clock, carried, False, "wait", True)), objs, log, depth + 1)

    @staticmethod
    def _picked_now(entries, o, clock) -> bool:
        return any(t == clock and kind == "pick" and arg == o for t, kind, arg in entries)


def oracle_makespan(inst: Instance, max_actions: int = 40) -> OracleResult:
    """Exact minimum makespan over timestamped preemptive schedules, with a validating witness."""
    check_oracle_size(inst)
    search = _Search(inst, max_actions)
    best, log = search.run()
    if best is None:
        raise AssertionError("oracle found no schedule")
    return OracleResult(best, to_barrier_schedule(inst, log), log, search.nodes)


def to_barrier_schedule(inst: Instance, log) -> Schedule:
    """Turn per-vehicle timelines into barrier rounds split at every cross-vehicle handoff."""
    d = inst.metric.dist
    q = inst.q
    drops = {}
    for j, entries in enumerate(log):
        for t, kind, arg in entries:
            if kind == "drop":
                drops.setdefault(arg, []).append((t, j))
    cuts = set()
    for j, entries in enumerate(log):
        for t, kind, arg in entries:
            if kind == "pick":
                prev = [(td, jd) for td, jd in drops.get(arg, []) if td <= t]
                if prev:
                    td, jd = max(prev)
                    if jd != j and td > 0:
                        cuts.add(td)
    bounds = sorted(cuts)

    # per vehicle: list of segments (t0, t1, kind, payload)
    rounds = [[[] for _ in range(q)] for _ in range(len(bounds) + 1)]
    for j, entries in enumerate(log):
        pos = inst.depots[j]
        for t, kind, arg in entries:
            if kind in ("move", "home"):
                if arg != pos:
                    _place_move(rounds, bounds, j, t, pos, arg, d[pos][arg])
                pos = arg
            elif kind in ("drop", "pick"):
                r = _round_of(bounds, t, before=(kind == "drop"))
                rounds[r][j].append((t, Drop(arg) if kind == "drop" else Pick(arg)))
    out = []
    starts = [0] + bounds
    for r, rnd in enumerate(rounds):
        row = []
        for j in range(q):
            acts: list[Action] = []
            clock = starts[r]
            for t, act in rnd[j]:
                if isinstance(act, (Pick, Drop)):
                    if t > clock:
                        acts.append(Wait(t - clock))
                        clock = t
                    acts.append(act)
                else:
                    t0, t1, a = act
                    if t0 > clock:
                        acts.append(Wait(t0 - clock))
                    acts.append(a)
                    clock = t1
            if r < len(bounds) and acts and clock < bounds[r]:
                acts.append(Wait(bounds[r] - clock))
            row.append(tuple(acts))
        out.append(tuple(row))
    return Schedule(q, tuple(out))


def _round_of(bounds, t, before: bool) -> int:
    r = 0
    while r < len(bounds) and (t > bounds[r] or (t == bounds[r] and not before)):
        r += 1
    return r


def _place_move(rounds, bounds, j, t0, u, v, length) -> None:
    """Split the move ``u -> v`` starting at ``t0`` at round boundaries."""
    t1 = t0 + length
    seg_start = t0
    for b in bounds:
        if seg_start < b < t1:
            r = _round_of(bounds, seg_start, before=False)
            off = b - t0
            rounds[r][j].append((seg_start, (seg_start, b, MoveMid(u, v, off))))
            seg_start = b
    r = _round_of(bounds, seg_start, before=False)
    rounds[r][j].append((seg_start, (seg_start, t1, Move(v))))

