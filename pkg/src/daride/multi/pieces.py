"""Cutting a single-vehicle tour into pieces and routing depot vehicles over them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from daride.metric import Metric, MidPoint, Number, Position, position_distance
from daride.model import Action, Drop, Move, Pick
from daride.single.tour import SingleTour


@dataclass(frozen=True)
class Interval:
    """One carried stretch of an object: picked at stop ``i`` and dropped at stop ``j``."""

    obj: int
    leg: int  # 0 for the first leg, 1 after a preemption
    i: int
    j: int
    a: Number
    b: Number


@dataclass
class Piece:
    index: int
    start: Position
    end: Position
    lo: Number
    hi: Number
    stops: list[int]  # stop indices visited, in tour order
    intervals: list[Interval] = field(default_factory=list)

    @property
    def length(self) -> Number:
        return self.hi - self.lo

    def objects(self) -> set[int]:
        return {iv.obj for iv in self.intervals}


class LinearTour:
    """A closed tour laid out on ``[0, length]`` with carried intervals per object."""

    def __init__(self, metric: Metric, tour: SingleTour):
        self.metric = metric
        self.tour = tour
        d = metric.dist
        self.verts = [st.vertex for st in tour.stops]
        self.x: list[Number] = []
        t: Number = 0
        here = tour.root
        for v in self.verts:
            t += d[here][v]
            here = v
            self.x.append(t)
        self.length: Number = tour.length
        # points of the polyline, root at both ends
        self.pts = [(0, tour.root)] + list(zip(self.x, self.verts)) + [(self.length, tour.root)]

        open_at: dict[int, int] = {}
        legs: dict[int, int] = {}
        self.intervals: list[Interval] = []
        for k, st in enumerate(tour.stops):
            for o in st.drops:
                i = open_at.pop(o)
                leg = legs.get(o, 0)
                legs[o] = leg + 1
                self.intervals.append(Interval(o, leg, i, k, self.x[i], self.x[k]))
            for o in st.picks:
                open_at[o] = k
        self.by_obj: dict[int, list[Interval]] = {}
        for iv in self.intervals:
            self.by_obj.setdefault(iv.obj, []).append(iv)
        if any(len(ivs) > 2 for ivs in self.by_obj.values()):
            raise AssertionError("tour preempts an object more than once")

    def position(self, c: Number) -> Position:
        for (xa, va), (xb, vb) in zip(self.pts, self.pts[1:]):
            if xa <= c <= xb:
                if c == xa:
                    return va
                if c == xb:
                    return vb
                return MidPoint(va, vb, c - xa)
        raise ValueError(f"position {c} is outside the tour")

    def cut_objects(self, cuts: Sequence[Number]) -> set[int]:
        return {iv.obj for iv in self.intervals if any(iv.a < c < iv.b for c in cuts)}

    def pieces(self, cuts: Sequence[Number], objs: Iterable[int]) -> list[Piece]:
        """Pieces between consecutive cuts; intervals of ``objs`` go to the piece holding them."""
        bounds = [0] + sorted(c for c in set(cuts) if 0 < c < self.length) + [self.length]
        out = []
        for p, (lo, hi) in enumerate(zip(bounds, bounds[1:])):
            stops = [k for k, xk in enumerate(self.x) if lo <= xk <= hi]
            out.append(Piece(p, self.position(lo), self.position(hi), lo, hi, stops))
        keep = set(objs)
        for iv in self.intervals:
            if iv.obj not in keep:
                continue
            p = next(p for p, (lo, hi) in enumerate(zip(bounds, bounds[1:])) if lo <= iv.a and iv.b <= hi)
            out[p].intervals.append(iv)
        return out

    def piece_distance(self, v: int, piece: Piece) -> Number:
        cands = [position_distance(self.metric, v, piece.start), position_distance(self.metric, v, piece.end)]
        cands += [self.metric.dist[v][self.verts[k]] for k in piece.stops]
        return min(cands)

    def route(self, depot: int, pieces: Sequence[Piece], legs: set[int] | None) -> list[Action]:
        """Walk the pieces forward from ``depot`` doing their events (only ``legs`` when given)."""
        acts: list[Action] = []
        here = depot
        for piece in pieces:
            drops: dict[int, list[int]] = {}
            picks: dict[int, list[int]] = {}
            for iv in piece.intervals:
                if legs is not None and iv.leg not in legs:
                    continue
                picks.setdefault(iv.i, []).append(iv.obj)
                drops.setdefault(iv.j, []).append(iv.obj)
            for k in piece.stops:
                if k not in drops and k not in picks:
                    continue
                v = self.verts[k]
                if v != here:
                    acts.append(Move(v))
                    here = v
                acts.extend(Drop(o) for o in self.tour.stops[k].drops if o in drops.get(k, ()))
                acts.extend(Pick(o) for o in self.tour.stops[k].picks if o in picks.get(k, ()))
        if here != depot:
            acts.append(Move(depot))
        return acts


def best_offset(lin: LinearTour, step: Number, objs: Iterable[int] | None = None) -> tuple[Number, list[Number]]:
    """Offset ``eta`` in ``[0, step)`` minimising the number of cut objects for cuts ``p*step + eta``, p >= 1.

    Cut counts are piecewise constant in ``eta`` with breakpoints at the
    interval endpoints modulo ``step``; every breakpoint and every arc
    midpoint is evaluated.
    """
    keep = None if objs is None else set(objs)
    ivs = [iv for iv in lin.intervals if keep is None or iv.obj in keep]
    marks = sorted({_mod(iv.a, step) for iv in ivs} | {_mod(iv.b, step) for iv in ivs} | {0})
    arcs = marks + [marks[0] + step]
    cands = sorted(set(marks) | {Fraction(a + b) / 2 for a, b in zip(arcs, arcs[1:])})
    cands = [_reduce(_mod(c, step)) for c in cands]
    best = None
    for eta in sorted(set(cands)):
        cuts = offset_cuts(lin.length, step, eta)
        n_cut = len({iv.obj for iv in ivs if any(iv.a < c < iv.b for c in cuts)})
        if best is None or n_cut < best[0]:
            best = (n_cut, eta, cuts)
    return best[1], best[2]


def offset_cuts(length: Number, step: Number, eta: Number) -> list[Number]:
    cuts = []
    p = 1
    while p * step + eta < length:
        cuts.append(p * step + eta)
        p += 1
    return cuts


def _mod(x: Number, step: Number) -> Number:
    return x - step * math.floor(Fraction(x) / Fraction(step))


def _reduce(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x
