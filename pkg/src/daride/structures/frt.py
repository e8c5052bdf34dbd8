"""Randomised hierarchical ball carving into a dominating 2-HST."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from daride import rng
from daride.metric import Metric, Number


@dataclass(frozen=True)
class HstNode:
    level: int
    parent: int | None
    center: int
    members: tuple[int, ...]
    up_length: Number  # length of the edge to the parent (0 at the root)


@dataclass(frozen=True)
class HstTree:
    nodes: tuple[HstNode, ...]
    leaf_of: tuple[int, ...]
    delta: Number
    root: int = 0

    @property
    def depth(self) -> int:
        return self.nodes[self.root].level + 1

    def ancestors(self, node: int) -> list[int]:
        out = [node]
        while self.nodes[out[-1]].parent is not None:
            out.append(self.nodes[out[-1]].parent)
        return out

    def nca(self, u: int, v: int) -> int:
        a, b = self.leaf_of[u], self.leaf_of[v]
        while a != b:
            if self.nodes[a].level <= self.nodes[b].level:
                a = self.nodes[a].parent
            else:
                b = self.nodes[b].parent
        return a

    def distance(self, u: int, v: int) -> Number:
        top = self.nca(u, v)
        total: Number = 0
        for leaf in (self.leaf_of[u], self.leaf_of[v]):
            x = leaf
            while x != top:
                total += self.nodes[x].up_length
                x = self.nodes[x].parent
        return total

    def children(self) -> list[list[int]]:
        ch: list[list[int]] = [[] for _ in self.nodes]
        for i, nd in enumerate(self.nodes):
            if nd.parent is not None:
                ch[nd.parent].append(i)
        return ch


def frt_embed(metric: Metric, seed: int = 0, attempt: int = 0) -> HstTree:
    n = metric.n
    if n < 1:
        raise ValueError("frt_embed needs at least one vertex")
    if n == 1:
        return HstTree((HstNode(0, None, 0, (0,), 0),), (0,), 0)
    gen = rng.stream(seed, rng.FRT, attempt)
    perm = [int(x) for x in gen.permutation(n)]
    beta = 1 + Fraction(int(gen.integers(0, 2**20)), 2**20)
    delta = metric.min_positive()
    if delta == 0:
        top = 0
    else:
        top = _ceil_log2(Fraction(metric.diameter()) / delta) + 1
    d = metric.dist

    nodes: list[HstNode] = [HstNode(top, None, perm[0], tuple(range(n)), 0)]
    frontier = [0]
    for level in range(top - 1, -1, -1):
        radius = beta * delta * Fraction(2) ** (level - 1)
        up = delta * 2 ** (level + 1)
        nxt = []
        for p in frontier:
            groups: dict[int, list[int]] = {}
            for v in nodes[p].members:
                c = next(w for w in perm if d[w][v] <= radius)
                groups.setdefault(c, []).append(v)
            for c in sorted(groups, key=perm.index):
                nodes.append(HstNode(level, p, c, tuple(groups[c]), up))
                nxt.append(len(nodes) - 1)
        frontier = nxt
    leaf_of = [0] * n
    for i in frontier:
        members = nodes[i].members
        if len(members) == 1:
            leaf_of[members[0]] = i
            continue
        # co-located vertices hang below one node with zero-length edges
        for v in members:
            nodes.append(HstNode(-1, i, v, (v,), 0))
            leaf_of[v] = len(nodes) - 1
    return HstTree(tuple(nodes), tuple(leaf_of), delta)


def _ceil_log2(x: Fraction) -> int:
    """Smallest integer ``L >= 0`` with ``2**L >= x``."""
    k = 0
    while Fraction(2) ** k < x:
        k += 1
    return k
