"""Instance generators, including the star and high-girth gap families."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from daride.metric import Metric, WeightedGraph, metric_from_graph
from daride.model import Demand, Instance
from daride.rng import GENERATOR, stream

KINDS = ("random-metric", "random-graph", "planar-grid", "star-gap", "girth-gap", "file")

# defaults and inclusive ranges per kind
PARAMS: dict[str, dict[str, tuple[Any, Any, Any]]] = {
    "random-metric": {"n": (8, 1, 200), "m": (6, 0, 400), "q": (2, 1, 64), "k": (2, 1, 1000),
                      "w": (1, 1, 1000), "dmax": (10, 1, 10**6)},
    "random-graph": {"n": (10, 1, 400), "m": (6, 0, 400), "q": (2, 1, 64), "k": (2, 1, 1000),
                     "w": (1, 1, 1000), "extra": (5, 0, 2000), "dmax": (5, 1, 10**6)},
    "planar-grid": {"rows": (4, 1, 40), "cols": (4, 1, 40), "m": (12, 0, 400), "q": (2, 1, 64),
                    "k": (2, 1, 1000)},
    "star-gap": {"q": (3, 2, 64)},
    "girth-gap": {},
}
CAGES = ("petersen", "heawood")


@dataclass(frozen=True)
class GenSpec:
    kind: str
    params: dict = field(default_factory=dict)
    seed: int = 0


class GenError(ValueError):
    pass


def _resolve(spec: GenSpec) -> dict:
    if spec.kind not in KINDS:
        raise GenError(f"unknown generator kind {spec.kind!r}; expected one of {', '.join(KINDS)}")
    if spec.kind == "girth-gap":
        graph = spec.params.get("graph", "petersen")
        if graph not in CAGES:
            raise GenError(f"girth-gap graph must be one of {CAGES}")
        return {"graph": graph}
    if spec.kind == "file":
        if "path" not in spec.params:
            raise GenError("file generator needs a path")
        return dict(spec.params)
    table = PARAMS[spec.kind]
    unknown = set(spec.params) - set(table)
    if unknown:
        raise GenError(f"unknown parameters for {spec.kind}: {sorted(unknown)}")
    out = {}
    for key, (default, lo, hi) in table.items():
        val = int(spec.params.get(key, default))
        if not lo <= val <= hi:
            raise GenError(f"{spec.kind}: {key}={val} outside [{lo}, {hi}]")
        out[key] = val
    return out


def gen(spec: GenSpec) -> Instance:
    p = _resolve(spec)
    rng = stream(spec.seed, GENERATOR)
    if spec.kind == "random-metric":
        return random_metric(rng, **p)
    if spec.kind == "random-graph":
        return random_graph(rng, **p)
    if spec.kind == "planar-grid":
        return planar_grid(rng, **p)
    if spec.kind == "star-gap":
        return star_gap(p["q"])
    if spec.kind == "girth-gap":
        return girth_gap(p["graph"])
    from daride.harness.formats import read_instance

    with open(p["path"], encoding="utf-8") as fh:
        return read_instance(fh.read())


def _demands(rng, n: int, m: int, k: int, w: int) -> tuple[Demand, ...]:
    out = []
    for _ in range(m):
        s = int(rng.integers(n))
        t = int(rng.integers(n - 1)) if n > 1 else 0
        if n > 1 and t >= s:
            t += 1
        out.append(Demand(s, t, int(rng.integers(1, min(w, k) + 1))))
    return tuple(out)


def _depots(rng, n: int, q: int) -> tuple[int, ...]:
    return tuple(int(x) for x in rng.integers(n, size=q))


def random_metric(rng, n: int, m: int, q: int, k: int, w: int = 1, dmax: int = 10) -> Instance:
    """Shortest-path closure of a complete graph with random integer lengths in ``[1, dmax]``."""
    d = [[0 if i == j else int(rng.integers(1, dmax + 1)) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(i):
            d[i][j] = d[j][i]
    for via in range(n):
        for i in range(n):
            for j in range(n):
                if d[i][via] + d[via][j] < d[i][j]:
                    d[i][j] = d[i][via] + d[via][j]
    return Instance(Metric.from_matrix(d), _demands(rng, n, m, k, w), _depots(rng, n, q), k)


def random_graph(rng, n: int, m: int, q: int, k: int, w: int = 1, extra: int = 5, dmax: int = 5) -> Instance:
    """Random spanning tree plus ``extra`` random edges, lengths in ``[1, dmax]``."""
    edges: dict[tuple[int, int], int] = {}
    for v in range(1, n):
        u = int(rng.integers(v))
        edges[(u, v)] = int(rng.integers(1, dmax + 1))
    for _ in range(extra if n > 1 else 0):
        u, v = sorted(int(x) for x in rng.choice(n, size=2, replace=False))
        edges.setdefault((u, v), int(rng.integers(1, dmax + 1)))
    g = WeightedGraph(n, tuple((u, v, wt) for (u, v), wt in sorted(edges.items())))
    return Instance(metric_from_graph(g), _demands(rng, n, m, k, w), _depots(rng, n, q), k, g)


def grid_graph(rows: int, cols: int) -> WeightedGraph:
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1, 1))
            if r + 1 < rows:
                edges.append((v, v + cols, 1))
    return WeightedGraph(rows * cols, tuple(edges))


def planar_grid(rng, rows: int, cols: int, m: int, q: int, k: int) -> Instance:
    g = grid_graph(rows, cols)
    n = rows * cols
    return Instance(metric_from_graph(g), _demands(rng, n, m, k, 1), _depots(rng, n, q), k, g)


def star_gap(q: int) -> Instance:
    """Star with ``q`` unit leaves, every vehicle at the center, one object per ordered leaf pair."""
    g = WeightedGraph(q + 1, tuple((0, leaf, 1) for leaf in range(1, q + 1)))
    dems = tuple(Demand(a, b) for a in range(1, q + 1) for b in range(1, q + 1) if a != b)
    return Instance(metric_from_graph(g), dems, (0,) * q, max(1, len(dems)), g)


def petersen() -> WeightedGraph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return WeightedGraph(10, tuple((min(u, v), max(u, v), 1) for u, v in outer + spokes + inner))


def heawood() -> WeightedGraph:
    cycle = [(i, (i + 1) % 14) for i in range(14)]
    chords = [(i, (i + 5) % 14) for i in range(0, 14, 2)]
    return WeightedGraph(14, tuple((min(u, v), max(u, v), 1) for u, v in cycle + chords))


CAGE_GIRTH = {"petersen": 5, "heawood": 6}


def girth_gap(name: str = "petersen") -> Instance:
    """A vehicle on every vertex of a cage and an object along every edge.

    Any schedule needs makespan at least girth - 1 while both lower bounds
    stay constant.
    """
    g = petersen() if name == "petersen" else heawood()
    dems = tuple(Demand(u, v) for u, v, _ in g.edges)
    return Instance(metric_from_graph(g), dems, tuple(range(g.n)), len(dems), g)
