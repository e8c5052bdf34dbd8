"""Lower bounds on the optimal makespan and a rooted min-max tree cover heuristic."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence

from daride.bmatching import b_matching, matching_size
from daride.metric import Metric, Number, edges_length, mst_edges
from daride.model import Instance

# Approximation factor assumed for nsl_solve when turning it into a bound.
C_NSL = 16


@dataclass(frozen=True)
class RootedForest:
    """One tree per depot slot; ``trees[j]`` is an edge list containing ``roots[j]``."""

    roots: tuple[int, ...]
    trees: tuple[tuple[tuple[int, int], ...], ...]
    cost: Number

    def vertices(self, j: int) -> set[int]:
        vs = {self.roots[j]}
        for u, v in self.trees[j]:
            vs.update((u, v))
        return vs

    def covers(self, terminals: Iterable[int]) -> bool:
        allv = set()
        for j in range(len(self.roots)):
            allv |= self.vertices(j)
        return set(terminals) <= allv


@dataclass(frozen=True)
class LowerBoundSet:
    flow: Number
    nsl: Number
    max_pair: Number
    max_src: Number
    max_dst: Number

    @property
    def combined(self) -> Number:
        return max(self.flow, self.nsl, self.max_pair, self.max_src, self.max_dst)

    def as_dict(self) -> dict[str, Number]:
        return {
            "flow": self.flow,
            "nsl": self.nsl,
            "max_pair": self.max_pair,
            "max_src": self.max_src,
            "max_dst": self.max_dst,
            "combined": self.combined,
        }


def flow_lb(inst: Instance) -> Number:
    total = sum((dm.weight * inst.metric(dm.source, dm.target) for dm in inst.demands), 0)
    return _reduce(Fraction(total, inst.q * inst.capacity))


def trivial_lbs(inst: Instance) -> tuple[Number, Number, Number]:
    d = inst.metric
    live = _live(inst)
    if not live:
        return 0, 0, 0
    max_pair = max(d(dm.source, dm.target) for dm in live)
    max_src = max(d.to_set(dm.source, inst.depots) for dm in live)
    max_dst = max(d.to_set(dm.target, inst.depots) for dm in live)
    return max_pair, max_src, max_dst


def lb_max(inst: Instance) -> LowerBoundSet:
    live = _live(inst)
    terminals = {dm.source for dm in live} | {dm.target for dm in live}
    forest = nsl_solve(inst.metric, inst.depots, terminals)
    mp, ms, mt = trivial_lbs(inst)
    return LowerBoundSet(flow_lb(inst), _reduce(Fraction(forest.cost, C_NSL)), mp, ms, mt)


def _live(inst: Instance) -> list:
    # a demand whose source is its target needs no service
    return [dm for dm in inst.demands if dm.source != dm.target]


def _reduce(x: Fraction) -> Number:
    return x.numerator if x.denominator == 1 else x


# --- nurse-station-location heuristic ---------------------------------------------


def nsl_solve(metric: Metric, depots: Sequence[int], terminals: Iterable[int]) -> RootedForest:
    """Rooted forest covering ``terminals`` with small maximum tree length.

    Binary search over a threshold ``lam``: cut the terminal MST at edges
    longer than ``lam``, chop each component into pieces of span below
    ``2 lam``, and assign pieces to depots within ``lam`` so that no depot
    gets more than four pieces.
    """
    roots = tuple(depots)
    rootset = set(roots)
    need = sorted(set(terminals) - rootset)
    empty = tuple(() for _ in roots)
    if not need:
        return RootedForest(roots, empty, 0)

    d = metric.dist
    pool = sorted(set(need) | rootset)
    cands = sorted({d[u][v] for u in pool for v in pool if d[u][v] > 0})
    mst = mst_edges(metric, need)
    top = edges_length(metric, mst) + max(metric.to_set(v, roots) for v in need)
    cands = sorted(set(cands) | {top})

    lo, hi = 0, len(cands) - 1
    best = _nsl_try(metric, roots, need, mst, cands[hi])
    if best is None:
        raise AssertionError("nsl_solve: no feasible threshold at the largest candidate")
    while lo < hi:
        mid = (lo + hi) // 2
        res = _nsl_try(metric, roots, need, mst, cands[mid])
        if res is None:
            lo = mid + 1
        else:
            hi = mid
            if res.cost <= best.cost:
                best = res
    return best


def _nsl_try(metric, roots, need, mst, lam) -> RootedForest | None:
    d = metric.dist
    adj = defaultdict(list)
    for u, v in mst:
        if d[u][v] <= lam:
            adj[u].append(v)
            adj[v].append(u)
    seen: set[int] = set()
    pieces: list[list[int]] = []
    for s in need:
        if s in seen:
            continue
        order = []
        stack = [s]
        seen.add(s)
        while stack:
            u = stack.pop()
            order.append(u)
            for w in sorted(adj[u], reverse=True):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        cur = [order[0]]
        span = 0
        for a, b in zip(order, order[1:]):
            if span + d[a][b] < 2 * lam:
                span += d[a][b]
                cur.append(b)
            else:
                pieces.append(cur)
                cur, span = [b], 0
        pieces.append(cur)

    piece_adj = [[j for j, r in enumerate(roots) if min(d[r][v] for v in p) <= lam] for p in pieces]
    if any(not a for a in piece_adj):
        return None
    for c in range(1, 5):
        match = b_matching(piece_adj, [c] * len(roots))
        if matching_size(match) == len(pieces):
            break
    else:
        return None

    members: list[list[int]] = [[] for _ in roots]
    for p, j in zip(pieces, match):
        members[j].extend(p)
    trees = []
    for j, r in enumerate(roots):
        trees.append(tuple(mst_edges(metric, [r] + members[j])) if members[j] else ())
    cost = max(edges_length(metric, t) for t in trees)
    return RootedForest(roots, tuple(trees), cost)


# --- exact rooted min-max Steiner forest (desk scale) -----------------------------


class OracleSizeError(ValueError):
    """Raised when an exact oracle is asked to solve an instance above its size limit."""


def nsl_oracle(metric: Metric, depots: Sequence[int], terminals: Iterable[int]) -> RootedForest:
    roots = tuple(depots)
    need = sorted(set(terminals) - set(roots))
    if len(need) > 8 or len(roots) > 3:
        raise OracleSizeError("nsl_oracle handles at most 8 terminals and 3 depots")
    if not need:
        return RootedForest(roots, tuple(() for _ in roots), 0)

    distinct = sorted(set(roots))
    keys = need + [r for r in distinct if r not in need]
    steiner = _DreyfusWagner(metric, keys)
    index = {v: i for i, v in enumerate(keys)}

    best_cost, best_assign = None, None
    for assign in product(range(len(roots)), repeat=len(need)):
        cost = 0
        for di, r in enumerate(roots):
            mask = 1 << index[r]
            for t, a in zip(need, assign):
                if a == di:
                    mask |= 1 << index[t]
            cost = max(cost, steiner.cost(mask))
            if best_cost is not None and cost >= best_cost:
                break
        if best_cost is None or cost < best_cost:
            best_cost, best_assign = cost, assign

    trees: list[tuple] = []
    for di, r in enumerate(roots):
        mask = 1 << index[r]
        for t, a in zip(need, best_assign):
            if a == di:
                mask |= 1 << index[t]
        trees.append(tuple(sorted(steiner.edges(mask))))
    return RootedForest(roots, tuple(trees), best_cost)


class _DreyfusWagner:
    """Exact Steiner trees for every subset of ``keys`` in a complete metric."""

    def __init__(self, metric: Metric, keys: Sequence[int]):
        self.metric = metric
        self.keys = list(keys)
        n, k, d = metric.n, len(keys), metric.dist
        full = 1 << k
        inf = None
        dp: list[list] = [[inf] * n for _ in range(full)]
        back: list[list] = [[None] * n for _ in range(full)]
        for i, x in enumerate(keys):
            for v in range(n):
                dp[1 << i][v] = d[x][v]
                back[1 << i][v] = ("leaf", x)
        for mask in range(1, full):
            if mask & (mask - 1) == 0:
                continue
            g = [None] * n
            gb = [None] * n
            for v in range(n):
                sub = (mask - 1) & mask
                while sub:
                    if sub < mask ^ sub:
                        val = dp[sub][v] + dp[mask ^ sub][v]
                        if g[v] is None or val < g[v]:
                            g[v], gb[v] = val, sub
                    sub = (sub - 1) & mask
            for v in range(n):
                bu = min(range(n), key=lambda u: (g[u] + d[u][v], u))
                dp[mask][v] = g[bu] + d[bu][v]
                back[mask][v] = ("hop", bu, gb[bu])
        self.dp, self.back = dp, back

    def cost(self, mask: int) -> Number:
        if mask & (mask - 1) == 0:
            return 0
        low = (mask & -mask).bit_length() - 1
        return self.dp[mask ^ (1 << low)][self.keys[low]]

    def edges(self, mask: int) -> set[tuple[int, int]]:
        if mask & (mask - 1) == 0:
            return set()
        low = (mask & -mask).bit_length() - 1
        out: set[tuple[int, int]] = set()
        self._collect(mask ^ (1 << low), self.keys[low], out)
        return out

    def _collect(self, mask: int, v: int, out: set) -> None:
        b = self.back[mask][v]
        if b[0] == "leaf":
            _add(out, b[1], v)
            return
        _, u, sub = b
        _add(out, u, v)
        self._collect(sub, u, out)
        self._collect(mask ^ sub, u, out)


def _add(out: set, u: int, v: int) -> None:
    if u != v:
        out.add((min(u, v), max(u, v)))
