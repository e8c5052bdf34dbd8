"""Line-oriented text formats for instances and schedules."""

from __future__ import annotations

from fractions import Fraction

from daride.metric import Metric, Number, WeightedGraph, metric_from_graph
from daride.model import Action, Demand, Drop, Instance, Move, MoveMid, Pick, Schedule, Wait


class FormatError(ValueError):
    pass


def _num(x: Number) -> str:
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return str(x)


def _parse_num(tok: str) -> Number:
    try:
        val = Fraction(tok)
    except (ValueError, ZeroDivisionError) as e:
        raise FormatError(f"bad number {tok!r}") from e
    return val.numerator if val.denominator == 1 else val


def write_instance(inst: Instance) -> str:
    lines = ["DARIDE 1", f"n {inst.n}"]
    if inst.graph is not None:
        lines.append("mode graph")
        lines.append(f"edges {len(inst.graph.edges)}")
        lines += [f"{u} {v} {w}" for u, v, w in inst.graph.edges]
    else:
        lines.append("mode metric")
        for row in inst.metric.dist:
            if any(isinstance(x, Fraction) and x.denominator != 1 for x in row):
                raise FormatError("instance files hold integer distances only")
            lines.append(" ".join(str(int(x)) for x in row))
    lines.append(f"capacity {inst.capacity}")
    lines.append(f"depots {inst.q}")
    lines.append(" ".join(str(r) for r in inst.depots))
    lines.append(f"demands {inst.m}")
    lines += [f"{d.source} {d.target} {d.weight}" for d in inst.demands]
    return "\n".join(lines) + "\n"


class _Lines:
    def __init__(self, text: str):
        self.lines = text.split("\n")
        if self.lines and self.lines[-1] == "":
            self.lines.pop()
        self.i = 0

    def next(self) -> str:
        if self.i >= len(self.lines):
            raise FormatError("unexpected end of file")
        line = self.lines[self.i]
        self.i += 1
        return line

    def keyed(self, key: str) -> str:
        line = self.next()
        head, _, rest = line.partition(" ")
        if head != key:
            raise FormatError(f"line {self.i}: expected {key!r}, got {line!r}")
        return rest

    def ints(self, count: int | None = None) -> list[int]:
        line = self.next()
        try:
            vals = [int(x) for x in line.split()]
        except ValueError as e:
            raise FormatError(f"line {self.i}: expected integers") from e
        if count is not None and len(vals) != count:
            raise FormatError(f"line {self.i}: expected {count} values, got {len(vals)}")
        return vals

    def done(self) -> None:
        if self.i != len(self.lines):
            raise FormatError(f"trailing content at line {self.i + 1}")


def read_instance(text: str) -> Instance:
    src = _Lines(text)
    if src.next() != "DARIDE 1":
        raise FormatError("missing 'DARIDE 1' header")
    n = int(src.keyed("n"))
    mode = src.keyed("mode")
    graph = None
    if mode == "metric":
        metric = Metric.from_matrix([src.ints(n) for _ in range(n)])
    elif mode == "graph":
        e = int(src.keyed("edges"))
        graph = WeightedGraph(n, tuple(tuple(src.ints(3)) for _ in range(e)))
        metric = metric_from_graph(graph)
    else:
        raise FormatError(f"unknown mode {mode!r}")
    k = int(src.keyed("capacity"))
    q = int(src.keyed("depots"))
    depots = tuple(src.ints(q))
    m = int(src.keyed("demands"))
    demands = tuple(Demand(*src.ints(3)) for _ in range(m))
    src.done()
    return Instance(metric, demands, depots, k, graph)


def _action_text(act: Action) -> str:
    if isinstance(act, Move):
        return f"move {act.to}"
    if isinstance(act, MoveMid):
        return f"movemid {act.u} {act.v} {_num(act.offset)}"
    if isinstance(act, Pick):
        return f"pick {act.obj}"
    if isinstance(act, Drop):
        return f"drop {act.obj}"
    return f"wait {_num(act.duration)}"


def write_schedule(sched: Schedule) -> str:
    lines = ["SCHED 1", f"rounds {len(sched.rounds)}"]
    for rnd in sched.rounds:
        for j, acts in enumerate(rnd):
            body = " ; ".join(_action_text(a) for a in acts)
            lines.append(f"v{j}: {body}" if body else f"v{j}:")
    return "\n".join(lines) + "\n"


def _parse_action(tok: str) -> Action:
    parts = tok.split()
    try:
        if parts[0] == "move" and len(parts) == 2:
            return Move(int(parts[1]))
        if parts[0] == "movemid" and len(parts) == 4:
            return MoveMid(int(parts[1]), int(parts[2]), _parse_num(parts[3]))
        if parts[0] == "pick" and len(parts) == 2:
            return Pick(int(parts[1]))
        if parts[0] == "drop" and len(parts) == 2:
            return Drop(int(parts[1]))
        if parts[0] == "wait" and len(parts) == 2:
            return Wait(_parse_num(parts[1]))
    except (ValueError, IndexError) as e:
        raise FormatError(f"bad action {tok!r}") from e
    raise FormatError(f"bad action {tok!r}")


def read_schedule(text: str, q: int) -> Schedule:
    src = _Lines(text)
    if src.next() != "SCHED 1":
        raise FormatError("missing 'SCHED 1' header")
    R = int(src.keyed("rounds"))
    rounds = []
    for _ in range(R):
        row = []
        for j in range(q):
            line = src.next()
            head, sep, body = line.partition(":")
            if head != f"v{j}" or not sep:
                raise FormatError(f"line {src.i}: expected vehicle v{j}")
            toks = [t.strip() for t in body.split(";") if t.strip()]
            row.append(tuple(_parse_action(t) for t in toks))
        rounds.append(tuple(row))
    src.done()
    return Schedule(q, tuple(rounds))
