"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

The lines are also collected into the ``acceptance criteria`` section of the
pytest terminal summary.
"""

import math
import random
import statistics
import time
from fractions import Fraction

from conftest import record
from helpers import bfs_hops, brute_girth, random_instance, tiny_suite

from daride.harness.generators import GenSpec, gen, girth_gap, grid_graph, star_gap
from daride.harness.oracles import oracle_cvrp
from daride.lower_bounds import lb_max, nsl_oracle, nsl_solve
from daride.metric import Metric, metric_from_graph
from daride.model import Demand, Instance
from daride.multi.partial import BoundTooSmall, SolverConfig, cap_solve, partial
from daride.multi.uncap import depot_demand_schedule, uncap_solve, uncap_solve_minor_free
from daride.multi.weighted import pair_demands, partition_pair, weighted_solve
from daride.single.cvrp import check_checkpoints, cvrp_bounded_delay
from daride.single.preemptive import RetriesExhausted, preemptive_tour, preemptive_tour_minor_free
from daride.single.tsp import tour_length
from daride.structures.covers import SEPARATED, SPARSE, split_cover
from daride.validate import makespan, validate


def _single_vehicle_instance(metric, demands, root, k):
    return Instance(metric, tuple(demands), (root,), k)


def test_c01_star_gap_makespan_four():
    results = []
    for q in (3, 8, 16):
        inst = star_gap(q)
        t0 = time.perf_counter()
        sched, _ = uncap_solve(inst)
        elapsed = time.perf_counter() - t0
        rep = validate(inst, sched)
        results.append((q, rep.feasible, rep.makespan, elapsed))
    ok = all(f and ms == 4 and el < 1 for _, f, ms, el in results)
    record(1, ok, "star-gap uncap makespans " + ", ".join(f"q={q}:{ms} ({el:.2f}s)" for q, _, ms, el in results))
    assert ok, results


def _random_depot_demand(seed):
    rnd = random.Random(seed)
    t = rnd.randint(2, 64)
    pts = [(rnd.randint(0, 50), rnd.randint(0, 50)) for _ in range(t)]
    metric = Metric.from_matrix([[abs(a[0] - b[0]) + abs(a[1] - b[1]) for b in pts] for a in pts])
    m = rnd.randint(1, 3 * t)
    transfers = []
    for o in range(m):
        a = rnd.randrange(t)
        b = rnd.randrange(t - 1)
        transfers.append((o, a, b + (b >= a)))
    return metric, tuple(range(t)), transfers


def _check_depot_demand(metric, depots, transfers):
    info = {}
    sched = depot_demand_schedule(metric, depots, transfers, info)
    dems = tuple(Demand(a, b) for _, a, b in transfers)
    inst = Instance(metric, dems, tuple(depots), len(dems))
    rep = validate(inst, sched)
    alpha = info["alpha"]
    assert alpha == math.ceil(math.log2(info["t"])) + 1
    sp = info["spanner"]
    problems = []
    if not rep.feasible:
        problems.append("infeasible")
    if len(sched.rounds) != 2 * alpha:
        problems.append(f"{len(sched.rounds)} rounds != 2*alpha = {2 * alpha}")
    if any(len(sp.assigned(v)) > 2 for v in range(sp.n)):
        problems.append("a vehicle owns more than two spanner edges")
    adj = [[] for _ in range(sp.n)]
    for u, v in sp.edges:
        adj[u].append(v)
        adj[v].append(u)
    idx = {v: i for i, v in enumerate(sorted(set(depots)))}
    for _, a, b in transfers:
        hops = bfs_hops(adj, idx[a]).get(idx[b])
        if hops is None or hops > 2 * alpha:
            problems.append(f"stretch {hops} for demand edge ({a}, {b})")
            break
    g = brute_girth(sp.n, list(sp.edges))
    if g is not None and g <= 2 * alpha:
        problems.append(f"girth {g} <= 2*alpha")
    return problems


def test_c02_depot_demand_spanner():
    t0 = time.perf_counter()
    cases = []
    pet = girth_gap("petersen")
    cases.append(("petersen", [(o, d.source, d.target) for o, d in enumerate(pet.demands)], pet.metric, pet.depots))
    for seed in range(20):
        metric, depots, transfers = _random_depot_demand(seed)
        cases.append((f"random-{seed}", transfers, metric, depots))
    failures = []
    for name, transfers, metric, depots in cases:
        problems = _check_depot_demand(metric, depots, transfers)
        if problems:
            failures.append((name, problems))
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < 5
    record(2, ok, f"{len(cases)} depot-demand instances, {len(failures)} failing, {elapsed:.2f}s")
    assert ok, failures


def _cvrp_case(rnd):
    n = rnd.randint(2, 12)
    pts = [(rnd.randint(0, 20), rnd.randint(0, 20)) for _ in range(n)]
    metric = Metric.from_matrix([[abs(a[0] - b[0]) + abs(a[1] - b[1]) for b in pts] for a in pts])
    k = rnd.choice((1, 2, 3))
    beta = rnd.choice((Fraction(3, 2), Fraction(2), Fraction(4)))
    depot = rnd.randrange(n)
    items = [(o, rnd.randrange(n), rnd.randint(1, k)) for o in range(rnd.randint(1, 10))]
    return metric, depot, items, k, beta


def test_c03_cvrp_bounded_delay():
    rnd = random.Random(3)
    t0 = time.perf_counter()
    failures, worst_ratio, with_oracle = [], 0.0, 0
    for case in range(100):
        metric, depot, items, k, beta = _cvrp_case(rnd)
        res = cvrp_bounded_delay(metric, depot, items, k, beta)
        d = metric.dist
        for o, t, _ in items:
            if t != depot and res.delay[o] > beta * d[depot][t]:
                failures.append((case, f"object {o} delay"))
        dC = tour_length(metric, res.checkpoints.order)
        chain = (1 + 2 / (beta - 1)) * dC + Fraction(2, k) * sum(w * d[depot][t] for _, t, w in items)
        if res.length > chain:
            failures.append((case, f"length {res.length} > chain {chain}"))
        if check_checkpoints(metric, res.checkpoints):
            failures.append((case, "checkpoint properties"))
        if len(items) <= 10:
            opt = oracle_cvrp(metric, depot, [(t, w) for _, t, w in items], k)
            if opt > 0:
                with_oracle += 1
                ratio = Fraction(res.length) / opt
                worst_ratio = max(worst_ratio, float(ratio))
                if ratio > 3 + 4 / (beta - 1):
                    failures.append((case, f"ratio {ratio} vs oracle"))
            elif res.length != 0:
                failures.append((case, "oracle is 0 but tour is not"))
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < 30
    record(3, ok, f"100 CVRP instances, {len(failures)} violations, worst oracle ratio {worst_ratio:.3f} "
                  f"over {with_oracle}, {elapsed:.2f}s")
    assert ok, failures[:5]


def test_c04_preemptive_tour_bounds():
    rnd = random.Random(4)
    t0 = time.perf_counter()
    failures, len_ratios, delay_ratios = [], [], []
    for case in range(50):
        inst = random_instance(rnd, n=(2, 16), m=(1, 12), q=(1, 1), k=(1, 3), span=30, distinct=True)
        try:
            tour, tb = preemptive_tour(inst.metric, inst.demands, inst.capacity, seed=case)
        except RetriesExhausted:
            failures.append((case, "retries exhausted"))
            continue
        lg = math.log2(inst.n + 2)
        direct = sum(inst.metric(d.source, d.target) for d in inst.demands)
        ride = sum(tour.delay.values(), 0)
        if tour.length > 64 * lg * lg * tb.lb:
            failures.append((case, "length"))
        if ride > 32 * lg * direct:
            failures.append((case, "ride time"))
        single = _single_vehicle_instance(inst.metric, inst.demands, tour.root, inst.capacity)
        rep = validate(single, tour.as_schedule())
        if not rep.feasible or rep.max_preemptions() > 1:
            failures.append((case, "validation or preemptions"))
        if tb.lb:
            len_ratios.append(float(tour.length / tb.lb) / (lg * lg))
        if direct:
            delay_ratios.append(float(Fraction(ride) / direct) / lg)
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < 60
    record(4, ok, f"50 tours, {len(failures)} violations; median length/(LB log^2) "
                  f"{statistics.median(len_ratios):.3f}, median ride/(direct log) "
                  f"{statistics.median(delay_ratios):.3f}, {elapsed:.2f}s")
    assert ok, failures[:5]


def test_c05_partial_coverage():
    t0 = time.perf_counter()
    config = SolverConfig()
    failures, calls = [], 0
    for i, (inst, opt) in enumerate(tiny_suite()):
        rho = config.rho(inst)
        try:
            sched, covered, trace = partial(inst, range(inst.q), range(inst.m), opt, rho, config=config)
        except BoundTooSmall as e:
            failures.append((i, f"signalled at the optimum: {e}"))
            continue
        for rec in trace.calls:
            calls += 1
            if rec.covered < math.ceil(rec.demands / 4):
                failures.append((i, f"call covers {rec.covered} of {rec.demands}"))
        rep = validate(inst, sched)
        if rep.violations and any(v.kind not in ("undelivered", "in_transit") for v in rep.violations):
            failures.append((i, f"schedule invalid: {rep.violations[:2]}"))
        delivered = {o for o, r in enumerate(rep.objects) if r.delivered}
        if not covered <= delivered:
            failures.append((i, "claimed coverage not delivered"))
        if makespan(inst, sched) > (16 + 16 * rho) * opt:
            failures.append((i, "makespan above (16+16 rho) B"))
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < 60
    record(5, ok, f"30 tiny instances, {calls} Partial calls, {len(failures)} violations, {elapsed:.2f}s")
    assert ok, failures[:5]


def test_c06_cap_solve_end_to_end():
    failures, ratios = [], []
    for i, (inst, opt) in enumerate(tiny_suite()):
        sched, _ = cap_solve(inst)
        rep = validate(inst, sched)
        if not rep.feasible or rep.max_preemptions() > 1:
            failures.append((i, "infeasible or too many preemptions"))
        if rep.makespan < lb_max(inst).combined or rep.makespan < opt:
            failures.append((i, f"makespan {rep.makespan} below a lower bound (opt {opt})"))
        if opt:
            ratios.append(float(Fraction(rep.makespan) / opt))
    ok = not failures
    record(6, ok, f"30 tiny cap_solve runs, {len(failures)} violations; ratio to optimum median "
                  f"{statistics.median(ratios):.2f}, max {max(ratios):.2f}")
    assert ok, failures[:5]


def _path(n):
    from daride.metric import WeightedGraph

    return WeightedGraph(n, tuple((i, i + 1, 1) for i in range(n - 1)))


def _cycle(n):
    from daride.metric import WeightedGraph

    return WeightedGraph(n, tuple((min(i, (i + 1) % n), max(i, (i + 1) % n), 1) for i in range(n)))


def _cover_problems(graph, gamma, r):
    metric = metric_from_graph(graph)
    d = metric.dist
    problems = []
    sep = split_cover(graph, gamma, r, SEPARATED, metric=metric)
    member = [set() for _ in range(graph.n)]
    for i, c in enumerate(sep.clusters):
        for v in c:
            member[v].add(i)
    for u in range(graph.n):
        for v in range(u, graph.n):
            if d[u][v] <= gamma and not member[u] & member[v]:
                problems.append(f"close pair {u},{v} split")
    classes = {}
    for i, col in enumerate(sep.colors):
        classes.setdefault(col, []).append(i)
    if len(classes) > 3**r:
        problems.append("too many colours")
    for idx in classes.values():
        for a in idx:
            for b in idx:
                if a < b and min(d[x][y] for x in sep.clusters[a] for y in sep.clusters[b]) < gamma:
                    problems.append(f"same-colour clusters {a},{b} closer than gamma")
    sparse = split_cover(graph, gamma, r, SPARSE, metric=metric)
    count = [0] * graph.n
    for c in sparse.clusters:
        for v in c:
            count[v] += 1
    if max(count) > 2**r:
        problems.append(f"multiplicity {max(count)}")
    return problems


def test_c07_separated_covers():
    t0 = time.perf_counter()
    graphs = [("path", _path(n)) for n in (10, 40, 100)]
    graphs += [("cycle", _cycle(n)) for n in (10, 40, 100)]
    graphs += [("grid", grid_graph(r, c)) for r, c in ((3, 3), (5, 8), (10, 10))]
    failures = []
    for name, g in graphs:
        for gamma in (1, 2, 4):
            problems = _cover_problems(g, gamma, 5)
            if problems:
                failures.append((name, g.n, gamma, problems[:3]))
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < 30
    record(7, ok, f"{len(graphs) * 3} covers on paths/cycles/grids, {len(failures)} failing, {elapsed:.2f}s")
    assert ok, failures[:3]


def test_c08_minor_free_tours():
    failures = []
    max_pre = 0
    for seed in range(5):
        inst = gen(GenSpec("planar-grid", {"rows": 4, "cols": 5, "m": 12, "q": 3, "k": 2}, seed))
        live = [o for o, d in enumerate(inst.demands) if d.source != d.target]
        tour, _ = preemptive_tour_minor_free(inst.graph, inst.demands, inst.capacity)
        for o in live:
            d = inst.demands[o]
            if tour.delay[o] > 16 * inst.metric(d.source, d.target):
                failures.append((seed, f"object {o} ride"))
        single = _single_vehicle_instance(inst.metric, inst.demands, tour.root, inst.capacity)
        rep = validate(single, tour.as_schedule())
        if not rep.feasible or rep.max_preemptions() > 1:
            failures.append((seed, "tour infeasible or > 1 preemption"))
        big = Instance(inst.metric, inst.demands, inst.depots, inst.total_weight(), inst.graph)
        sched, _ = uncap_solve_minor_free(inst.graph, big)
        rep = validate(big, sched)
        depots = set(inst.depots)
        if not rep.feasible or rep.max_preemptions() > 3:
            failures.append((seed, "uncap_solve_minor_free infeasible or > 3 preemptions"))
        for o, r in enumerate(rep.objects):
            max_pre = max(max_pre, r.preemptions)
            if not set(r.preemption_vertices) <= depots:
                failures.append((seed, f"object {o} preempted off a depot"))
    ok = not failures
    record(8, ok, f"5 grids x 12 demands, {len(failures)} violations, max preemptions {max_pre}")
    assert ok, failures[:5]


def test_c09_weighted_pipeline():
    rnd = random.Random(9)
    failures, heavy = [], 0
    for case in range(20):
        inst = random_instance(rnd, n=(3, 8), m=(2, 10), q=(1, 3), k=(1, 6), distinct=True)
        k = inst.capacity
        for (u, v), objs in pair_demands(inst).items():
            dem = sum(inst.demands[o].weight for o in objs)
            if 2 * dem < k:
                continue
            parts = partition_pair(inst, u, v, objs)
            heavy += 1
            if 4 * dem < k * len(parts):
                failures.append((case, f"g={len(parts)} > 4 dem / k for pair ({u}, {v})"))
            for p in parts[:-1]:
                if not (2 * p.weight >= k and p.weight <= k):
                    failures.append((case, f"part weight {p.weight} outside [k/2, k]"))
            if parts[-1].weight > k:
                failures.append((case, "last part over capacity"))
            if sorted(o for p in parts for o in p.members) != sorted(objs):
                failures.append((case, "partition lost objects"))
        sched, _ = weighted_solve(inst)
        rep = validate(inst, sched)
        if not rep.feasible or rep.max_preemptions() > 1:
            failures.append((case, f"weighted_solve: {rep.summary()}"))
    ok = not failures
    record(9, ok, f"20 weighted instances, {heavy} heavy pairs partitioned, {len(failures)} violations")
    assert heavy > 0
    assert ok, failures[:5]


def test_c10_lower_bound_soundness():
    failures = []
    for i, (inst, opt) in enumerate(tiny_suite()):
        for key, val in lb_max(inst).as_dict().items():
            if val > opt:
                failures.append((i, f"{key}={val} > optimum {opt}"))
    rnd = random.Random(10)
    worst = Fraction(0)
    for case in range(40):
        n = rnd.randint(3, 9)
        pts = [(rnd.randint(0, 12), rnd.randint(0, 12)) for _ in range(n)]
        metric = Metric.from_matrix([[abs(a[0] - b[0]) + abs(a[1] - b[1]) for b in pts] for a in pts])
        depots = [rnd.randrange(n) for _ in range(rnd.randint(1, 3))]
        terms = rnd.sample(range(n), rnd.randint(1, min(n, 8)))
        got = nsl_solve(metric, depots, terms).cost
        best = nsl_oracle(metric, depots, terms).cost
        if best:
            worst = max(worst, Fraction(got) / best)
        elif got:
            failures.append((case, "nsl cost positive where optimum is zero"))
    if worst > 16:
        failures.append(("nsl", f"ratio {worst}"))
    ok = not failures
    record(10, ok, f"{len(tiny_suite())} oracle-solved instances checked; nsl/oracle max ratio {float(worst):.3f}")
    assert ok, failures[:5]
