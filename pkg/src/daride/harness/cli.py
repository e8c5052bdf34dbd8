"""Command-line entry point: ``daride gen|lb|solve|validate|oracle|bench``."""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from daride.harness.bench import ALGOS, InfeasibleOutput, bench, solver, to_json, to_tsv
from daride.harness.formats import FormatError, read_instance, read_schedule, write_instance, write_schedule
from daride.harness.generators import KINDS, GenError, GenSpec, gen, girth_gap, star_gap
from daride.lower_bounds import OracleSizeError, lb_max
from daride.metric import MetricError
from daride.multi.partial import SolverConfig, cap_solve
from daride.validate import validate

EXIT_OK, EXIT_ERROR, EXIT_INFEASIBLE, EXIT_SIZE = 0, 1, 2, 3


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _params(items: list[str]) -> dict:
    out = {}
    for item in items:
        key, sep, val = item.partition("=")
        if not sep:
            raise GenError(f"parameter {item!r} is not key=value")
        out[key] = val
    return out


def cmd_gen(args) -> int:
    inst = gen(GenSpec(args.kind, _params(args.param), args.seed))
    _write(args.out, write_instance(inst))
    return EXIT_OK


def cmd_lb(args) -> int:
    inst = read_instance(_read(args.inp))
    for key, val in lb_max(inst).as_dict().items():
        print(f"{key}\t{val}")
    return EXIT_OK


def _config(args) -> SolverConfig:
    return SolverConfig(seed=args.seed, rho_c=args.rho_c, r=args.r)


def cmd_solve(args) -> int:
    inst = read_instance(_read(args.inp))
    config = _config(args)
    if args.algo == "cap" and args.bound is not None:
        sched, _ = cap_solve(inst, config, start=Fraction(args.bound))
    else:
        sched = solver(args.algo, config)(inst)
    _write(args.out, write_schedule(sched))
    if args.algo.startswith("uncap") and inst.capacity < inst.total_weight():
        inst = type(inst)(inst.metric, inst.demands, inst.depots, inst.total_weight(), inst.graph)
    rep = validate(inst, sched)
    print(rep.summary(), file=sys.stderr)
    return EXIT_OK if rep.feasible else EXIT_INFEASIBLE


def cmd_validate(args) -> int:
    inst = read_instance(_read(args.inp))
    sched = read_schedule(_read(args.sched), inst.q)
    rep = validate(inst, sched)
    print(rep.summary())
    for v in rep.violations:
        print(f"  {v.kind}: {v.detail}")
    print(f"max_preemptions\t{rep.max_preemptions()}")
    return EXIT_OK if rep.feasible else EXIT_INFEASIBLE


def cmd_oracle(args) -> int:
    from daride.harness.oracles import oracle_makespan

    inst = read_instance(_read(args.inp))
    res = oracle_makespan(inst)
    print(f"optimum\t{res.makespan}")
    if args.out:
        _write(args.out, write_schedule(res.schedule))
    return EXIT_OK


def _suite(name: str, seed: int) -> list[tuple[str, object]]:
    if name == "gap":
        return [(f"star-{q:02d}", star_gap(q)) for q in (3, 8, 16)] + [
            (f"girth-{g}", girth_gap(g)) for g in ("petersen", "heawood")]
    if name == "tiny":
        return [(f"tiny-{i:02d}", gen(GenSpec("random-metric", {"n": 5, "m": 3, "q": 2, "k": 2, "dmax": 6},
                                              seed + i))) for i in range(10)]
    if name == "small":
        return [(f"small-{i:02d}", gen(GenSpec("random-metric", {"n": 12, "m": 10, "q": 3, "k": 3},
                                               seed + i))) for i in range(10)]
    if name == "grid":
        return [(f"grid-{i:02d}", gen(GenSpec("planar-grid", {"rows": 4, "cols": 4, "m": 12, "q": 3, "k": 2},
                                              seed + i))) for i in range(5)]
    raise ValueError(f"unknown suite {name!r}")


def cmd_bench(args) -> int:
    instances = []
    for path in args.inp or []:
        instances.append((path, read_instance(_read(path))))
    if args.suite:
        instances += _suite(args.suite, args.seed)
    algos = args.algo or ["uncap", "cap"]
    rows = bench(instances, algos, _config(args), oracle=args.oracle, workers=args.workers)
    sys.stdout.write(to_tsv(rows))
    if args.json:
        _write(args.json, to_json(rows))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="daride", description="Preemptive multi-vehicle Dial-a-Ride toolkit")
    sub = p.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gen", help="generate an instance")
    g.add_argument("kind", choices=KINDS)
    g.add_argument("param", nargs="*", help="key=value generator parameters")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    lb = sub.add_parser("lb", help="print the lower bounds of an instance")
    lb.add_argument("--in", dest="inp", required=True)
    lb.set_defaults(func=cmd_lb)

    s = sub.add_parser("solve", help="solve an instance")
    s.add_argument("--algo", choices=ALGOS, default="cap")
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--out")
    s.add_argument("--bound", help="initial makespan guess for the capacitated driver")
    _solver_flags(s)
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("validate", help="check a schedule against an instance")
    v.add_argument("--in", dest="inp", required=True)
    v.add_argument("--sched", required=True)
    v.set_defaults(func=cmd_validate)

    o = sub.add_parser("oracle", help="exact optimum of a tiny instance")
    o.add_argument("--in", dest="inp", required=True)
    o.add_argument("--out", help="write the witness schedule here")
    o.set_defaults(func=cmd_oracle)

    b = sub.add_parser("bench", help="run algorithms over instances and print a ratio table")
    b.add_argument("--in", dest="inp", nargs="*")
    b.add_argument("--suite", choices=("gap", "tiny", "small", "grid"))
    b.add_argument("--algo", nargs="*", choices=ALGOS)
    b.add_argument("--oracle", action="store_true")
    b.add_argument("--json")
    b.add_argument("--workers", type=int, default=1)
    _solver_flags(b)
    b.set_defaults(func=cmd_bench)
    return p


def _solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rho-c", dest="rho_c", type=int, default=4)
    p.add_argument("--r", type=int, default=5)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OracleSizeError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_SIZE
    except InfeasibleOutput as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (FormatError, GenError, MetricError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
