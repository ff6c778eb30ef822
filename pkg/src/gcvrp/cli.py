"""Command line interface: ``gcvrp solve|verify|bound|gen|bench``.

Exit codes: 0 success, 1 I/O/parse/usage error, 2 exact solver refused
because of its size limit, 3 ``verify`` found an infeasible solution.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import instgen
from .bounds import bound_report, tour_certificate
from .graph import Instance, InstanceError, load_instance, save_instance, serialize_instance
from .itp import itp_with_report
from .oracle import ORACLE_LIMIT, exact_cvrp_cost
from .tour import (
    SolutionFormatError,
    solution_from_json,
    solution_to_json,
    validate_solution,
    walk_violations,
)
from .tsp import EXACT_LIMIT, TSP_METHODS, TooLargeError, christofides, double_tree, exact_tsp

EXIT_OK, EXIT_IO, EXIT_LIMIT, EXIT_INFEASIBLE = 0, 1, 2, 3

BENCH_COLUMNS = [
    "instance_id", "n", "k", "rad", "structure_bound", "itp_christofides",
    "itp_doubletree", "oracle_opt", "ratio_vs_oracle", "ratio_vs_bound",
    "ag_bound_ok", "runtime_ms",
]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; 2 is reserved for size limits.
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_IO, f"{self.prog}: error: {message}\n")


def fmt(x: Fraction | int) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x} ({float(x):.6f})"


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_solve(args: argparse.Namespace) -> int:
    inst = load_instance(args.instance)
    if inst.clamped:
        print(f"note: capacity {inst.requested_capacity} clamped to n = {inst.n}")
    if args.tsp == "exact":
        tour = exact_tsp(inst, limit=args.limit_exact)
    else:
        tour = TSP_METHODS[args.tsp](inst)
    rep = itp_with_report(inst, tour)
    bounds = bound_report(inst)
    if args.output:
        _write(args.output, solution_to_json(rep.solution, inst.capacity))

    print(f"instance: n = {inst.n}, k = {inst.capacity}, tsp = {args.tsp} (cost {tour.cost})")
    print(f"total cost:       {rep.cost} ({len(rep.solution.tours)} tours, offset {rep.best_offset})")
    print(f"rad:              {fmt(bounds.rad)}")
    print(f"structure bound:  {fmt(bounds.structure_bound)}")
    print(f"AG bound:         {fmt(rep.ag_bound)} -> {'ok' if rep.ag_bound_ok else 'VIOLATED'}")
    print(f"cost / structure: {fmt(rep.cost / bounds.structure_bound)}")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    inst = load_instance(args.instance)
    sol = solution_from_json(Path(args.solution).read_text())
    report = validate_solution(inst, sol)
    bounds = bound_report(inst)

    certs = []
    for idx, t in enumerate(sol.tours):
        usable = (
            t.covered
            and not walk_violations(inst, t.walk)
            and inst.depot not in t.covered
            and t.covered <= set(t.walk)
        )
        certs.append((idx, tour_certificate(inst, t) if usable else None))

    bound_ok = report.total_cost >= bounds.structure_bound
    if args.json:
        out = {
            "feasible": report.feasible,
            "total_cost": report.total_cost,
            "violations": [str(v) for v in report.violations],
            "bounds": bounds.to_dict(),
            "cost_ge_structure_bound": bound_ok,
            "tours": [
                {"index": i, **c.to_dict()} if c else {"index": i, "certificate": None}
                for i, c in certs
            ],
        }
        print(json.dumps(out, indent=2))
    else:
        print(f"feasible: {'yes' if report.feasible else 'no'}")
        for v in report.violations:
            print(f"  violation {v}")
        print(f"total cost: {report.total_cost}")
        print(f"structure bound: {fmt(bounds.structure_bound)}  "
              f"(cost >= bound: {'yes' if bound_ok else 'NO'})")
        print("tour  |U|  cost  D  R  delta  |U_A|  lemma_bound  ok")
        for i, c in certs:
            if c is None:
                print(f"{i:4d}  no certificate (empty or invalid tour)")
                continue
            ok = all(c.checks().values())
            print(f"{i:4d}  {len(c.covered):3d}  {c.cost:4d}  {c.depth_sum}  {c.max_depth}  "
                  f"{c.delta}  {c.ua_size}  {c.lemma_bound}  {'yes' if ok else 'NO'}")
    return EXIT_OK if report.feasible else EXIT_INFEASIBLE


def cmd_bound(args: argparse.Namespace) -> int:
    inst = load_instance(args.instance)
    out = bound_report(inst).to_dict()
    if args.oracle:
        opt = exact_cvrp_cost(inst, limit=args.limit_oracle)
        out["oracle_opt"] = opt
        out["opt_ge_structure_bound"] = opt >= bound_report(inst).structure_bound
    print(json.dumps(out, indent=2))
    return EXIT_OK


def cmd_gen(args: argparse.Namespace) -> int:
    sidecar = None
    if args.family == "tight":
        inst = instgen.tight_instance(args.k, args.n)
        sidecar = instgen.tight_sidecar(args.k, args.n)
        comments = [f"tight cycle family k={args.k} n={args.n}"]
    elif args.family == "random":
        inst = instgen.random_connected(args.vertices, args.edge_prob, args.seed, args.capacity)
        comments = [f"random vertices={args.vertices} edge_prob={args.edge_prob} seed={args.seed}"]
    else:
        size = (args.rows, args.cols) if args.family == "grid" else (args.size,)
        inst = instgen.structured(args.family, *size, capacity=args.capacity)
        comments = [f"{args.family} {' '.join(map(str, size))}"]

    if args.output:
        save_instance(inst, args.output, comments)
        if sidecar is not None:
            meta_path = Path(args.output).with_suffix(".meta.json")
            meta_path.write_text(json.dumps(sidecar, indent=2) + "\n")
    else:
        sys.stdout.write(serialize_instance(inst, comments))
    if args.solution:
        if args.family != "tight":
            raise UsageError("--solution is only available for the tight family")
        _write(args.solution, solution_to_json(instgen.tight_solution(args.k, args.n)))
    return EXIT_OK


@dataclass(frozen=True)
class BenchJob:
    instance_id: str
    inst: Instance


def _parse_range(text: str) -> range:
    lo, sep, hi = text.partition("..")
    try:
        if not sep:
            return range(int(lo), int(lo) + 1)
        return range(int(lo), int(hi) + 1)
    except ValueError:
        raise UsageError(f"bad size range {text!r}, expected A..B") from None


def bench_jobs(family: str, sizes: range, ks: Sequence[int] | None, seed: int,
               seeds: int, edge_prob: float) -> list[BenchJob]:
    jobs = []
    if family == "tight":
        for k in ks or (3,):
            for n in sizes:
                if n >= k and n % k == 0:
                    jobs.append(BenchJob(f"tight-k{k}-n{n}", instgen.tight_instance(k, n)))
    elif family == "random":
        rng = instgen.SplitMix64(seed)
        for n in sizes:
            if n < 1:
                continue
            for i in range(seeds):
                inst_seed = rng.next_u64()
                base = instgen.random_connected(n + 1, edge_prob, inst_seed)
                for k in ks or (1 + rng.below(n),):
                    if k <= n:
                        jobs.append(BenchJob(f"random-n{n}-s{i}-k{k}", base.with_capacity(k)))
    elif family in ("path", "star", "cycle"):
        for n in sizes:
            if n < (2 if family == "cycle" else 1):
                continue
            base = instgen.structured(family, n)
            for k in ks or range(1, n + 1):
                if k <= n:
                    jobs.append(BenchJob(f"{family}-n{n}-k{k}", base.with_capacity(k)))
    else:
        raise UsageError(f"unknown family {family!r}")
    return jobs


def bench_row(job: BenchJob, limit_oracle: int, timing: bool) -> dict[str, str]:
    start = time.perf_counter()
    inst = job.inst
    bounds = bound_report(inst)
    chris = itp_with_report(inst, christofides(inst))
    dtree = itp_with_report(inst, double_tree(inst))
    opt = exact_cvrp_cost(inst) if inst.n <= limit_oracle else None
    elapsed = (time.perf_counter() - start) * 1000
    return {
        "instance_id": job.instance_id,
        "n": str(inst.n),
        "k": str(inst.capacity),
        "rad": str(bounds.rad),
        "structure_bound": str(bounds.structure_bound),
        "itp_christofides": str(chris.cost),
        "itp_doubletree": str(dtree.cost),
        "oracle_opt": "" if opt is None else str(opt),
        "ratio_vs_oracle": "" if opt is None else str(Fraction(chris.cost, opt)),
        "ratio_vs_bound": str(chris.cost / bounds.structure_bound),
        "ag_bound_ok": str(chris.ag_bound_ok and dtree.ag_bound_ok).lower(),
        "runtime_ms": f"{elapsed:.1f}" if timing else "",
    }


def _bench_row_star(payload: tuple[BenchJob, int, bool]) -> dict[str, str]:
    return bench_row(*payload)


def run_bench(jobs: Sequence[BenchJob], limit_oracle: int, timing: bool, threads: int) -> str:
    payloads = [(j, limit_oracle, timing) for j in jobs]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(_bench_row_star, payloads))
    else:
        rows = [_bench_row_star(p) for p in payloads]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=BENCH_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def cmd_bench(args: argparse.Namespace) -> int:
    sizes = _parse_range(args.sizes)
    jobs = bench_jobs(args.family, sizes, args.k, args.seed, args.seeds, args.edge_prob)
    threads = int(os.environ.get("GCVRP_THREADS", "1") or 1)
    _write(args.output, run_bench(jobs, args.limit_oracle, args.timing, max(1, threads)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gcvrp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="TSP tour + iterated tour partitioning")
    p.add_argument("instance")
    p.add_argument("--tsp", choices=sorted(TSP_METHODS), default="christofides")
    p.add_argument("-o", "--output", help="write the solution JSON here")
    p.add_argument("--limit-exact", type=int, default=EXACT_LIMIT)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check a solution and print tour certificates")
    p.add_argument("instance")
    p.add_argument("solution")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bound", help="radius cost and structure bound")
    p.add_argument("instance")
    p.add_argument("--oracle", action="store_true", help="also compute the exact optimum")
    p.add_argument("--limit-oracle", type=int, default=ORACLE_LIMIT)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("gen", help="generate an instance file")
    p.add_argument("family", choices=["tight", "random", "path", "star", "cycle", "grid"])
    p.add_argument("-k", type=int, help="tight: odd cycle length")
    p.add_argument("-n", type=int, help="tight: number of terminals")
    p.add_argument("--vertices", type=int, help="random: vertex count")
    p.add_argument("--edge-prob", type=float, default=0.3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--size", type=int, help="path/star/cycle: number of terminals")
    p.add_argument("--rows", type=int)
    p.add_argument("--cols", type=int)
    p.add_argument("--capacity", type=int)
    p.add_argument("-o", "--output")
    p.add_argument("--solution", help="tight: also write the cycle solution JSON")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="CSV benchmark over an instance family")
    p.add_argument("family", choices=["tight", "random", "path", "star", "cycle"])
    p.add_argument("--sizes", required=True, help="terminal counts, A..B")
    p.add_argument("-k", type=int, nargs="+", help="capacities (tight: cycle lengths)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--seeds", type=int, default=10, help="random: instances per size")
    p.add_argument("--edge-prob", type=float, default=0.3)
    p.add_argument("--limit-oracle", type=int, default=ORACLE_LIMIT)
    p.add_argument("--timing", action="store_true", help="fill runtime_ms (not deterministic)")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_bench)
    return parser


def _require(args: argparse.Namespace) -> None:
    if args.command != "gen":
        return
    need = {"tight": ("k", "n"), "random": ("vertices",), "grid": ("rows", "cols")}
    for name in need.get(args.family, ("size",)):
        if getattr(args, name) is None:
            raise UsageError(f"gen {args.family} needs --{name}" if len(name) > 1
                             else f"gen {args.family} needs -{name}")


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _require(args)
        return args.func(args)
    except TooLargeError as exc:
        print(f"gcvrp: refused: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except (OSError, InstanceError, SolutionFormatError, UsageError, ValueError) as exc:
        print(f"gcvrp: error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
