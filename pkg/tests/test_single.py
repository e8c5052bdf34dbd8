import itertools
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from daride.harness.generators import grid_graph
from daride.harness.oracles import held_karp, oracle_cvrp
from daride.lower_bounds import OracleSizeError
from daride.metric import Metric, edges_length, metric_from_graph, mst_edges
from daride.model import Demand, Instance
from daride.single.cvrp import check_checkpoints, cvrp_bounded_delay, cvrp_collect, select_checkpoints
from daride.single.preemptive import RetriesExhausted, preemptive_tour, preemptive_tour_minor_free
from daride.single.stacker import stacker_crane
from daride.single.tour import SingleTour, Stop
from daride.single.tsp import tour_length, tsp_tour
from daride.validate import validate

from helpers import l1_metric


def line(n):
    return Metric.from_matrix([[abs(i - j) for j in range(n)] for i in range(n)])


def brute_tsp(metric, start, vertices):
    vs = sorted(set(vertices) - {start})
    best = 0 if not vs else None
    for perm in itertools.permutations(vs):
        path = [start, *perm, start]
        cost = sum(metric(a, b) for a, b in zip(path, path[1:]))
        best = cost if best is None else min(best, cost)
    return best


def set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def brute_cvrp(metric, depot, dests, k):
    best = None
    for part in set_partitions(list(range(len(dests)))):
        if any(sum(dests[i][1] for i in block) > k for block in part):
            continue
        cost = sum(brute_tsp(metric, depot, [dests[i][0] for i in block]) for block in part)
        best = cost if best is None else min(best, cost)
    return best


def single_instance(metric, demands, root, k):
    return Instance(metric, tuple(demands), (root,), k)


class TestTsp:
    def test_one_vertex(self):
        assert tour_length(line(3), tsp_tour(line(3), [1])) == 0

    def test_two_vertices(self):
        m = Metric.from_matrix([[0, 7], [7, 0]])
        assert tour_length(m, tsp_tour(m, [0, 1])) == 14

    def test_random_points_against_exact(self):
        rnd = random.Random(8)
        for _ in range(10):
            m = l1_metric([(rnd.randint(0, 20), rnd.randint(0, 20)) for _ in range(8)])
            order = tsp_tour(m, range(8), start=0)
            assert sorted(order) == list(range(8))
            length = tour_length(m, order)
            exact = held_karp(m, 0, range(8))
            assert exact == brute_tsp(m, 0, range(8))
            assert exact <= length <= 2 * edges_length(m, mst_edges(m, list(range(8))))


class TestCheckpoints:
    def test_no_checkpoints_on_short_tour(self):
        m = Metric.from_matrix([[0, 5, 5], [5, 0, 1], [5, 1, 0]])
        cs = select_checkpoints(m, [0, 1, 2], 2)
        assert cs.checkpoints == ()

    def test_collinear(self):
        m = line(5)
        cs = select_checkpoints(m, [0, 1, 2, 3, 4], 2)
        assert check_checkpoints(m, cs) == []
        d = m.dist
        for a, b in cs.segments():
            for u in range(a, b):
                assert d[0][cs.order[a]] + (u - a) <= 2 * d[0][cs.order[u]]

    def test_beta_must_exceed_one(self):
        with pytest.raises(ValueError):
            select_checkpoints(line(3), [0, 1, 2], 1)

    @given(st.lists(st.tuples(st.integers(0, 15), st.integers(0, 15)), min_size=2, max_size=10),
           st.sampled_from([Fraction(3, 2), 2, 4]))
    @settings(max_examples=50, deadline=None)
    def test_properties_hold(self, pts, beta):
        m = l1_metric(pts)
        order = tsp_tour(m, range(len(pts)), start=0)
        cs = select_checkpoints(m, order, beta)
        total = sum(m(0, cs.order[v]) for v in cs.checkpoints)
        assert (Fraction(beta) - 1) * total <= tour_length(m, order)


class TestCvrp:
    def test_single_object(self):
        m = line(10)
        res = cvrp_bounded_delay(m, 0, [(0, 9, 1)], 1, 2)
        assert res.length == 18
        assert res.delay[0] == 9

    def test_one_trip_when_capacity_is_loose(self):
        m = line(6)
        res = cvrp_bounded_delay(m, 0, [(o, o + 1, 1) for o in range(5)], 5, 100)
        assert res.length == res.tsp_length == 10

    def test_six_objects_against_oracle(self):
        m = l1_metric([(0, 0), (3, 1), (5, 4), (1, 6), (6, 0), (2, 2)])
        dests = [(o, o % 5 + 1, 1) for o in range(6)]
        res = cvrp_bounded_delay(m, 0, dests, 2, 2)
        opt = oracle_cvrp(m, 0, [t for _, t, _ in dests], 2)
        assert opt == brute_cvrp(m, 0, [(t, 1) for _, t, _ in dests], 2)
        flow = Fraction(2, 2) * sum(m(0, t) for _, t, _ in dests)
        mst = edges_length(m, mst_edges(m, [0] + [t for _, t, _ in dests]))
        assert opt <= res.length <= (3 + 4) * max(mst, flow)

    def test_oracle_cvrp_trivia(self):
        m = line(8)
        assert oracle_cvrp(m, 0, [5], 1) == 10
        assert oracle_cvrp(m, 0, [2, 5, 7], 3) == held_karp(m, 0, [2, 5, 7])
        with pytest.raises(OracleSizeError):
            oracle_cvrp(m, 0, list(range(11)), 2)

    def test_oracle_cvrp_weighted_matches_enumeration(self):
        rnd = random.Random(30)
        for _ in range(8):
            m = l1_metric([(rnd.randint(0, 9), rnd.randint(0, 9)) for _ in range(6)])
            dests = [(rnd.randrange(6), rnd.randint(1, 2)) for _ in range(6)]
            assert oracle_cvrp(m, 0, dests, 2) == brute_cvrp(m, 0, dests, 2)

    def test_collect_is_reversal(self):
        m = l1_metric([(0, 0), (4, 0), (4, 4), (0, 4), (2, 7), (7, 2)])
        items = [(o, o + 1, 1) for o in range(5)]
        fwd = cvrp_bounded_delay(m, 0, items, 2, 2)
        back = cvrp_collect(m, 0, items, 2, 2)
        assert back.length == fwd.length
        dems = [Demand(o + 1, 0) for o in range(5)]
        rep = validate(single_instance(m, dems, 0, 2), back.tour.as_schedule())
        assert rep.feasible
        for o in range(5):
            assert back.delay[o] <= 2 * m(o + 1, 0)

    def test_rejects_overweight(self):
        with pytest.raises(ValueError):
            cvrp_bounded_delay(line(3), 0, [(0, 2, 3)], 2, 2)


class TestStackerCrane:
    def test_one_demand(self):
        m = line(6)
        tour = stacker_crane(m, [(0, 2, 5)], 0)
        assert tour.length == 10
        assert [st.vertex for st in tour.stops if st.picks or st.drops] == [2, 5]

    def test_trivial_demands(self):
        m = line(6)
        tour = stacker_crane(m, [(0, 3, 3), (1, 5, 5)], 0)
        assert tour.objects() == set()

    def test_against_enumeration(self):
        rnd = random.Random(40)
        for _ in range(6):
            m = l1_metric([(rnd.randint(0, 10), rnd.randint(0, 10)) for _ in range(6)])
            dems = []
            for o in range(4):
                s = rnd.randrange(6)
                t = rnd.choice([v for v in range(6) if v != s])
                dems.append((o, s, t))
            tour = stacker_crane(m, dems, 0)
            best = None
            for perm in itertools.permutations(dems):
                path = [0] + [v for _, s, t in perm for v in (s, t)] + [0]
                cost = sum(m(a, b) for a, b in zip(path, path[1:]))
                best = cost if best is None else min(best, cost)
            assert tour.length >= best
            inst = single_instance(m, [Demand(s, t) for _, s, t in dems], 0, 1)
            rep = validate(inst, tour.as_schedule())
            assert rep.feasible
            assert rep.max_preemptions() == 0
            assert tour.max_load({o: 1 for o in range(4)}) <= 1


class TestPreemptiveTour:
    def test_single_demand(self):
        m = line(8)
        tour, _ = preemptive_tour(m, [Demand(2, 6)], 1)
        rep = validate(single_instance(m, [Demand(2, 6)], tour.root, 1), tour.as_schedule())
        assert rep.feasible and rep.max_preemptions() <= 1

    def test_colocated_demands(self):
        m = line(5)
        tour, _ = preemptive_tour(m, [Demand(3, 3), Demand(3, 3)], 1)
        assert tour.length == 0

    def test_twelve_points(self):
        rnd = random.Random(50)
        m = l1_metric([(rnd.randint(0, 20), rnd.randint(0, 20)) for _ in range(12)])
        dems = []
        for _ in range(10):
            s = rnd.randrange(12)
            dems.append(Demand(s, rnd.choice([v for v in range(12) if v != s])))
        tour, tb = preemptive_tour(m, dems, 2, seed=3)
        rep = validate(single_instance(m, dems, tour.root, 2), tour.as_schedule())
        assert rep.feasible and rep.max_preemptions() <= 1
        lg = math.log2(14)
        assert tour.length <= 64 * lg * lg * tb.lb
        assert sum(tour.delay.values()) <= 32 * lg * sum(m(d.source, d.target) for d in dems)
        assert tour.max_load({o: 1 for o in range(10)}) <= 2

    def test_retries_exhausted_carries_best(self):
        rnd = random.Random(51)
        m = l1_metric([(rnd.randint(0, 20), rnd.randint(0, 20)) for _ in range(8)])
        dems = [Demand(0, 5), Demand(3, 7), Demand(6, 1)]
        with pytest.raises(RetriesExhausted) as info:
            preemptive_tour(m, dems, 1, c1=0.001, max_retries=3)
        assert info.value.best is not None

    def test_root_and_ids(self):
        m = line(9)
        dems = [Demand(1, 8), Demand(2, 3), Demand(7, 0)]
        tour, _ = preemptive_tour(m, dems, 1, root=4, ids=[0, 2])
        assert tour.root == 4
        assert tour.objects() == {0, 2}


class TestMinorFree:
    def test_grid_delays(self):
        g = grid_graph(8, 8)
        m = metric_from_graph(g)
        rnd = random.Random(60)
        dems = []
        for _ in range(12):
            s = rnd.randrange(64)
            dems.append(Demand(s, rnd.choice([v for v in range(64) if v != s])))
        tour, trace = preemptive_tour_minor_free(g, dems, 2)
        total = sum(tour.delay.values())
        assert total <= 16 * sum(m(d.source, d.target) for d in dems)
        rep = validate(single_instance(m, dems, tour.root, 2), tour.as_schedule())
        assert rep.feasible and rep.max_preemptions() <= 1
        for o, r in enumerate(rep.objects):
            if r.preemption_vertices:
                assert r.preemption_vertices == [trace.hubs[o]]

    def test_two_scales(self):
        g = grid_graph(1, 12)
        dems = [Demand(0, 1), Demand(2, 11)]
        _, trace = preemptive_tour_minor_free(g, dems, 1)
        assert trace.scales == (0, 4)


class TestSingleTour:
    def test_build_rejects_bad_drop(self):
        with pytest.raises(ValueError):
            SingleTour.build(line(3), 0, [Stop(1, drops=(0,))])

    def test_build_rejects_leftover(self):
        with pytest.raises(ValueError):
            SingleTour.build(line(3), 0, [Stop(1, picks=(0,))])

    def test_reverse_keeps_length(self):
        t = SingleTour.build(line(5), 0, [Stop(1, picks=(0,)), Stop(4, drops=(0,))])
        r = t.reversed(line(5))
        assert r.length == t.length == 8
        assert r.delay[0] == 3
