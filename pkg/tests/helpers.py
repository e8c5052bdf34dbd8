"""Shared instance builders and independent checkers for the test suite."""

import random
from collections import deque
from functools import lru_cache

from daride.harness.generators import GenSpec, gen
from daride.metric import Metric
from daride.model import Demand, Instance


def l1_metric(points):
    return Metric.from_matrix([[abs(a[0] - b[0]) + abs(a[1] - b[1]) for b in points] for a in points])


def random_instance(rnd: random.Random, n=(3, 8), m=(1, 6), q=(1, 3), k=(1, 3), span=10, weighted=True,
                    distinct=False):
    nn = rnd.randint(*n)
    pts = [(rnd.randint(0, span), rnd.randint(0, span)) for _ in range(nn)]
    kk = rnd.randint(*k)
    dems = []
    for _ in range(rnd.randint(*m)):
        s = rnd.randrange(nn)
        t = rnd.randrange(nn)
        if distinct:
            while t == s and nn > 1:
                t = rnd.randrange(nn)
        dems.append(Demand(s, t, rnd.randint(1, kk) if weighted else 1))
    depots = tuple(rnd.randrange(nn) for _ in range(rnd.randint(*q)))
    return Instance(l1_metric(pts), tuple(dems), depots, kk)


def tiny_instance(seed: int) -> Instance:
    """Oracle-sized random metric instance (n <= 6, m <= 3, q <= 2, k <= 2)."""
    rnd = random.Random(seed)
    k = rnd.randint(1, 2)
    params = {"n": rnd.randint(3, 6), "m": rnd.randint(1, 3), "q": rnd.randint(1, 2), "k": k, "w": k,
              "dmax": 8}
    return gen(GenSpec("random-metric", params, seed))


@lru_cache(maxsize=None)
def tiny_suite(count: int = 30):
    """Tiny instances paired with their exact optimum."""
    from daride.harness.oracles import oracle_makespan

    out = []
    for seed in range(count):
        inst = tiny_instance(seed)
        out.append((inst, oracle_makespan(inst).makespan))
    return tuple(out)


def bfs_hops(adj, src):
    dist = {src: 0}
    queue = deque([src])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def brute_girth(n, edges):
    """Shortest cycle length by removing each edge and measuring the detour between its ends."""
    best = None
    for i, (u, v) in enumerate(edges):
        adj = [[] for _ in range(n)]
        for j, (a, b) in enumerate(edges):
            if j != i:
                adj[a].append(b)
                adj[b].append(a)
        d = bfs_hops(adj, u).get(v)
        if d is not None and (best is None or d + 1 < best):
            best = d + 1
    return best
