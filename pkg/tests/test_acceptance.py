"""Acceptance suite: one test per criterion, each recorded for the terminal
summary printed by conftest."""

import itertools
import json
import random
import time
from fractions import Fraction

import pytest

from gcvrp.bounds import (
    check_delta_inequality,
    itp_approximation_ratio,
    radius_cost,
    structure_bound,
    structure_term,
    tour_certificate,
    tour_lower_bound,
)
from gcvrp.cli import main
from gcvrp.graph import Instance
from gcvrp.instgen import random_connected, structured, tight_instance, tight_solution
from gcvrp.itp import itp_with_report
from gcvrp.matching import MatchingProblem, matching_dp, matching_weight, min_weight_perfect_matching
from gcvrp.oracle import exact_cvrp, exact_cvrp_cost, exact_cvrp_costs, naive_cvrp
from gcvrp.tour import validate_solution
from gcvrp.tsp import TSP_METHODS, christofides, exact_tsp

from .conftest import ACCEPTANCE_RESULTS, random_tour


def record(num, ok, detail):
    ACCEPTANCE_RESULTS[num] = (bool(ok), detail)
    assert ok, f"criterion {num}: {detail}"


def connected_graphs(nv):
    """Every connected labeled graph on ``nv`` vertices, as edge tuples."""
    pairs = list(itertools.combinations(range(nv), 2))
    for mask in range(1 << len(pairs)):
        edges = tuple(p for i, p in enumerate(pairs) if mask >> i & 1)
        adj = {v: [] for v in range(nv)}
        for u, v in edges:
            adj[u].append(v)
            adj[v].append(u)
        seen, stack = {0}, [0]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) == nv:
            yield edges


def corpus(max_vertices, count, seed):
    """Seeded random instances plus a few structured and tight ones."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        nv = rng.randint(2, max_vertices)
        p = rng.choice([0.0, 0.1, 0.25, 0.5, 1.0])
        out.append(random_connected(nv, p, rng.getrandbits(64), rng.randint(1, nv - 1)))
    for kind in ("path", "star", "cycle"):
        for size in range(2, max_vertices):
            for k in (1, 2, 3):
                out.append(structured(kind, size, capacity=min(k, size)))
    out.append(structured("grid", 3, 3, capacity=3))
    out += [tight_instance(3, 6), tight_instance(3, 9), tight_instance(5, 10)]
    return [i for i in out if i.num_vertices <= max_vertices]


def test_criterion_1_tight_13_52(tmp_path, capsys):
    start = time.perf_counter()
    inst = tight_instance(13, 52)
    sol = tight_solution(13, 52)
    rep = validate_solution(inst, sol)
    ok = (
        structure_bound(inst) == 56
        and radius_cost(inst) == Fraction(392, 13)
        and rep.feasible
        and rep.total_cost == 56
    )
    gen_ok = main(["gen", "tight", "-k", "13", "-n", "52", "-o", str(tmp_path / "f.gcvrp"),
                   "--solution", str(tmp_path / "f.json")]) == 0
    capsys.readouterr()
    verify_ok = main(["verify", str(tmp_path / "f.gcvrp"), str(tmp_path / "f.json"), "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    lemma_ok = len(out["tours"]) == 4 and all(
        t["lemma_bound"] == {"num": 14, "den": 1} and t["cost"] == 14 for t in out["tours"]
    )
    elapsed = time.perf_counter() - start
    record(1, ok and gen_ok and verify_ok and lemma_ok and elapsed < 1.0,
           f"bound={structure_bound(inst)} rad={radius_cost(inst)} cost={rep.total_cost} "
           f"lemma_bounds=14 {lemma_ok} time={elapsed:.2f}s")


def test_criterion_2_tight_family_vs_oracle():
    start = time.perf_counter()
    results = []
    for k, n in ((3, 6), (3, 9), (3, 12), (5, 10)):
        inst = tight_instance(k, n)
        opt = exact_cvrp(inst).total_cost
        results.append((k, n, opt, opt == n + Fraction(n, k) == structure_bound(inst)))
    elapsed = time.perf_counter() - start
    record(2, all(r[3] for r in results) and elapsed < 120,
           " ".join(f"({k},{n})->{opt}" for k, n, opt, _ in results) + f" time={elapsed:.1f}s")


@pytest.mark.slow
def test_criterion_3_structure_bound_never_violated():
    start = time.perf_counter()
    runs = 0
    bad = []
    for nv in range(2, 7):
        for edges in connected_graphs(nv):
            for depot in range(nv):
                inst = Instance(nv, depot, edges, nv - 1)
                depth = 2 * sum(inst.distances.dist[v] for v in inst.terminals)
                for k, opt in exact_cvrp_costs(inst).items():
                    runs += 1
                    if opt < Fraction(depth, k) + structure_term(inst.n, k):
                        bad.append((nv, depot, edges, k))
    rng = random.Random(20240601)
    for _ in range(1000):
        nv = rng.randint(2, 11)
        inst = random_connected(nv, rng.choice([0.0, 0.1, 0.2, 0.4, 0.7, 1.0]),
                                rng.getrandbits(64), rng.randint(1, nv - 1))
        runs += 1
        if exact_cvrp_cost(inst) < structure_bound(inst):
            bad.append(inst)
    elapsed = time.perf_counter() - start
    record(3, not bad and elapsed < 600, f"{runs} (instance, k) checks, {len(bad)} violations, "
           f"time={elapsed:.0f}s")


def test_criterion_4_tour_lemma_on_fuzzed_tours():
    start = time.perf_counter()
    rng = random.Random(4)
    pool = [random_connected(nv, p, s) for nv in range(2, 16) for p in (0.0, 0.15, 0.4, 1.0)
            for s in range(3)]
    bad = 0
    for _ in range(10_000):
        inst = rng.choice(pool)
        t = random_tour(inst, rng, max_steps=30)
        cert = tour_certificate(inst, t)
        u = len(t.covered)
        lemma = t.cost >= tour_lower_bound(u, cert.depth_sum)
        ua = cert.ua_size ** 2 <= 4 * u * cert.delta + 1
        if not (lemma and ua and check_delta_inequality(u, cert.delta).holds):
            bad += 1
    elapsed = time.perf_counter() - start
    record(4, bad == 0 and elapsed < 120, f"10000 tours, {bad} failures, time={elapsed:.1f}s")


def test_criterion_5_ag_bound_every_run():
    # itp_with_report raises BoundViolation on any run that breaks the bound,
    # so every ITP call elsewhere in the suite is checked as well.
    runs = 0
    ag_ok = True
    k1_ok = True
    for inst in corpus(12, 150, 5):
        for method in ("christofides", "double-tree"):
            for k in sorted({1, min(2, inst.n), inst.capacity, inst.n}):
                sub = inst.with_capacity(k)
                rep = itp_with_report(sub, TSP_METHODS[method](sub))
                runs += 1
                ag_ok &= rep.cost <= rep.ag_bound
                if k == 1:
                    k1_ok &= rep.cost == sum(2 * sub.distances.dist[v] for v in sub.terminals)
    record(5, ag_ok and k1_ok, f"{runs} ITP runs, AG bound ok={ag_ok}, k=1 equals 2*sum dist={k1_ok}")


def test_criterion_6_christofides_and_matching():
    checked = 0
    bad = []
    for inst in corpus(14, 150, 6):
        c = christofides(inst).cost
        opt = exact_tsp(inst).cost
        checked += 1
        if 2 * c > 2 * inst.n + opt:
            bad.append(inst)

    rng = random.Random(66)
    match_bad = 0
    for _ in range(500):
        size = rng.choice(range(2, 17, 2))
        if rng.random() < 0.5:
            inst = random_connected(rng.randint(size, 20), rng.random(), rng.getrandbits(64))
            nodes = tuple(rng.sample(range(inst.num_vertices), size))
            weight = inst.distances.pairwise
        else:
            table = {(a, b): rng.randint(0, 50) for a in range(size) for b in range(a + 1, size)}
            nodes = tuple(range(size))
            weight = lambda a, b, t=table: t[min(a, b), max(a, b)]
        prob = MatchingProblem(nodes, weight)
        if matching_weight(prob, min_weight_perfect_matching(prob)) != matching_dp(prob):
            match_bad += 1
    record(6, not bad and match_bad == 0,
           f"{checked} Christofides checks, {len(bad)} violations; 500 matchings, {match_bad} mismatches")


def test_criterion_7_itp_ratio_and_calculator():
    worst = Fraction(0)
    runs = 0
    for inst in corpus(13, 200, 7):
        if inst.n > 12:
            continue
        for k, opt in exact_cvrp_costs(inst).items():
            sub = inst.with_capacity(k)
            ratio = Fraction(itp_with_report(sub, christofides(sub)).cost, opt)
            worst = max(worst, ratio)
            runs += 1
    calc = [itp_approximation_ratio(b, g) for b, g in
            ((1, Fraction(1, 2)), (Fraction(1, 2), Fraction(23, 24)), (Fraction(1, 2), Fraction(19, 20)))]
    calc_ok = calc == [2, 2 - Fraction(1, 24), Fraction(39, 20)]
    record(7, worst <= 2 and calc_ok,
           f"{runs} oracle runs, worst ratio {worst}; calculator {[str(c) for c in calc]}")


def test_criterion_8_oracle_self_consistency():
    rng = random.Random(8)
    eq_runs = 0
    eq_bad = 0
    for nv in range(2, 7):
        for _ in range(40):
            inst = random_connected(nv, rng.random(), rng.getrandbits(64))
            for k, opt in exact_cvrp_costs(inst).items():
                eq_runs += 1
                eq_bad += opt != naive_cvrp(inst.with_capacity(k))
    mono_bad = 0
    for _ in range(200):
        nv = rng.randint(2, 11)
        costs = exact_cvrp_costs(random_connected(nv, rng.random(), rng.getrandbits(64)))
        seq = [costs[k] for k in sorted(costs)]
        mono_bad += any(a < b for a, b in zip(seq, seq[1:]))
    record(8, eq_bad == 0 and mono_bad == 0,
           f"{eq_runs} exact-vs-naive ({eq_bad} mismatches); 200 monotonicity ({mono_bad} failures)")


def test_criterion_9_bench_determinism(tmp_path):
    outputs = []
    for run in range(2):
        for family, extra in (("random", ["--sizes", "2..10", "--seeds", "4", "--seed", "99"]),
                              ("tight", ["-k", "3", "--sizes", "6..12"])):
            path = tmp_path / f"{family}{run}.csv"
            assert main(["bench", family, *extra, "-o", str(path)]) == 0
            outputs.append(path.read_bytes())
    same = outputs[0] == outputs[2] and outputs[1] == outputs[3]
    record(9, same, f"two bench runs byte-identical: {same}")
