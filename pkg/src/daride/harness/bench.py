"""Benchmark runner producing approximation-ratio tables."""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Callable, Sequence

from daride.lower_bounds import OracleSizeError, lb_max
from daride.metric import Number
from daride.model import Instance, Schedule
from daride.multi.partial import SolverConfig, cap_solve
from daride.multi.uncap import uncap_solve, uncap_solve_minor_free
from daride.multi.weighted import weighted_solve
from daride.validate import validate

ALGOS = ("uncap", "uncap-mf", "cap", "weighted")


class InfeasibleOutput(RuntimeError):
    pass


@dataclass(frozen=True)
class BenchRow:
    instance: str
    algo: str
    makespan: Number
    lb_max: Number
    ratio: float | None
    oracle: Number | None
    runtime: float

    def cells(self) -> list[str]:
        def fmt(x):
            if x is None:
                return "-"
            if isinstance(x, float):
                return f"{x:.3f}"
            return str(x)

        return [self.instance, self.algo, fmt(self.makespan), fmt(self.lb_max), fmt(self.ratio),
                fmt(self.oracle), f"{self.runtime:.3f}"]


HEADER = ["instance", "algo", "makespan", "lb_max", "ratio", "oracle", "runtime_s"]


def solver(algo: str, config: SolverConfig) -> Callable[[Instance], Schedule]:
    if algo == "uncap":
        return lambda inst: uncap_solve(_uncapped(inst))[0]
    if algo == "uncap-mf":
        def run(inst: Instance) -> Schedule:
            if inst.graph is None:
                raise ValueError("uncap-mf needs a graph instance")
            return uncap_solve_minor_free(inst.graph, _uncapped(inst), config.r)[0]
        return run
    if algo == "cap":
        return lambda inst: cap_solve(inst, config)[0]
    if algo == "weighted":
        return lambda inst: weighted_solve(inst, config)[0]
    raise ValueError(f"unknown algorithm {algo!r}; expected one of {', '.join(ALGOS)}")


def _uncapped(inst: Instance) -> Instance:
    total = inst.total_weight()
    if inst.capacity >= total:
        return inst
    return Instance(inst.metric, inst.demands, inst.depots, max(total, 1), inst.graph)


def run_one(name: str, inst: Instance, algo: str, config: SolverConfig, oracle: bool) -> BenchRow:
    t0 = time.perf_counter()
    sched = solver(algo, config)(inst)
    runtime = time.perf_counter() - t0
    target = _uncapped(inst) if algo.startswith("uncap") else inst
    rep = validate(target, sched)
    if not rep.feasible:
        raise InfeasibleOutput(f"{algo} on {name}: {rep.summary()}: {rep.violations[:3]}")
    lb = lb_max(target).combined
    opt = None
    if oracle:
        from daride.harness.oracles import oracle_makespan

        try:
            opt = oracle_makespan(target).makespan
        except OracleSizeError:
            opt = None
    ratio = float(Fraction(rep.makespan) / Fraction(lb)) if lb else None
    return BenchRow(name, algo, rep.makespan, lb, ratio, opt, runtime)


def bench(instances: Sequence[tuple[str, Instance]], algorithms: Sequence[str],
          config: SolverConfig = SolverConfig(), oracle: bool = False, workers: int = 1) -> list[BenchRow]:
    """Run every algorithm on every instance; rows come back sorted by instance id then algorithm order."""
    jobs = [(name, inst, algo) for name, inst in instances for algo in algorithms]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            rows = list(pool.map(lambda j: run_one(j[0], j[1], j[2], config, oracle), jobs))
    else:
        rows = [run_one(name, inst, algo, config, oracle) for name, inst, algo in jobs]
    order = {a: i for i, a in enumerate(algorithms)}
    return sorted(rows, key=lambda r: (r.instance, order[r.algo]))


def to_tsv(rows: Sequence[BenchRow]) -> str:
    lines = ["\t".join(HEADER)] + ["\t".join(r.cells()) for r in rows]
    return "\n".join(lines) + "\n"


def to_json(rows: Sequence[BenchRow]) -> str:
    def plain(x):
        return str(x) if isinstance(x, Fraction) else x

    return json.dumps([{k: plain(v) for k, v in asdict(r).items()} for r in rows], indent=1)
