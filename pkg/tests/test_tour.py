import json
import random
from itertools import product

import pytest
from hypothesis import given, strategies as st

from gcvrp.instgen import structured, tight_solution
from gcvrp.oracle import naive_tour_cost, set_partitions
from gcvrp.tour import (
    CvrpSolution,
    SolutionFormatError,
    Tour,
    TspTour,
    expand_metric_path,
    solution_from_json,
    solution_to_json,
    validate_solution,
)

from .conftest import instances


def test_tight_cycles_feasible(tight36):
    report = validate_solution(tight36, tight_solution(3, 6))
    assert report.feasible
    assert report.total_cost == 8


def test_double_coverage(tight36):
    sol = tight_solution(3, 6)
    first, second = sol.tours
    tampered = CvrpSolution((first, Tour(second.walk, second.covered | {1})), 3)
    report = validate_solution(tight36, tampered)
    assert not report.feasible
    assert "double-coverage" in report.kinds()
    # 1 is not on the second cycle's walk either
    assert "not-visited" in report.kinds()


def test_adjacency_violation(tight36):
    sol = CvrpSolution((Tour((0, 1, 3, 0), {1, 2, 3}), Tour((0, 4, 5, 6, 0), {4, 5, 6})))
    report = validate_solution(tight36, sol)
    assert "adjacency" in report.kinds()
    assert "not-visited" in report.kinds()


def test_capacity_and_uncovered(star4):
    sol = CvrpSolution((Tour((0, 1, 0, 2, 0, 3, 0), {1, 2, 3}),))
    report = validate_solution(star4, sol)
    assert report.kinds() == {"capacity", "uncovered"}


def test_walk_must_close_at_depot(path3):
    sol = CvrpSolution((Tour((0, 1, 2), {1, 2}),))
    assert "walk" in validate_solution(path3, sol).kinds()


def test_depot_and_capacity_mismatch(path3):
    sol = CvrpSolution((Tour((0, 1, 2, 1, 0), {0, 1, 2}),), capacity=1)
    kinds = validate_solution(path3, sol).kinds()
    assert {"depot-covered", "capacity-mismatch", "capacity"} <= kinds


def test_expand_examples(path3):
    assert expand_metric_path(path3, [0, 2]) == (0, 1, 2)
    assert expand_metric_path(path3, [1]) == (1,)
    assert expand_metric_path(path3, [0, 2, 0]) == (0, 1, 2, 1, 0)
    with pytest.raises(ValueError):
        expand_metric_path(path3, [])
    with pytest.raises(ValueError):
        expand_metric_path(path3, [0, 9])


@given(instances(max_vertices=15), st.lists(st.integers(0, 10**6), min_size=1, max_size=12))
def test_expand_cost_is_sum_of_distances(inst, raw):
    hops = [r % inst.num_vertices for r in raw]
    walk = expand_metric_path(inst, hops)
    d = inst.distances.pairwise
    assert len(walk) - 1 == sum(d(a, b) for a, b in zip(hops, hops[1:]))
    assert all(inst.has_edge(a, b) for a, b in zip(walk, walk[1:]))


def test_terminal_order_uses_first_occurrences():
    s = TspTour((0, 1, 2, 1, 3, 1, 0))
    assert s.terminal_order(0) == (1, 2, 3)
    assert s.cost == 6


def test_json_roundtrip(tight36):
    sol = tight_solution(3, 6)
    text = solution_to_json(sol)
    data = json.loads(text)
    assert data["tours"][0] == {"walk": [1, 2, 3, 4, 1], "covered": [2, 3, 4], "cost": 4}
    assert data["total_cost"] == 8
    assert solution_from_json(text) == sol


@pytest.mark.parametrize(
    "payload, match",
    [
        ("[1, 2]", "JSON object"),
        ('{"capacity": 1, "tours": []}', "total_cost"),
        ('{"capacity": 1, "tours": [{"walk": [1]}], "total_cost": 0}', "walk, covered and cost"),
        ('{"capacity": 1, "tours": [{"walk": [1, 2, 1], "covered": [2], "cost": 3}], "total_cost": 3}',
         "declares cost 3"),
        ('{"capacity": 1, "tours": [{"walk": [1, 2, 1], "covered": [2], "cost": 2}], "total_cost": 5}',
         "total_cost 5"),
        ('{"capacity": 1, "tours": [{"walk": [1, "x"], "covered": [], "cost": 1}], "total_cost": 1}',
         "list of integers"),
        ("{not json", "invalid JSON"),
    ],
)
def test_json_schema_errors(payload, match):
    with pytest.raises(SolutionFormatError, match=match):
        solution_from_json(payload)


def _tour_for_block(inst, block):
    # Visit the block in its cheapest order (brute force), expanded to a walk.
    from itertools import permutations

    d = inst.distances.pairwise
    best = min(
        permutations(block),
        key=lambda p: d(inst.depot, p[0]) + sum(d(a, b) for a, b in zip(p, p[1:])) + d(p[-1], inst.depot),
    )
    walk = expand_metric_path(inst, [inst.depot, *best, inst.depot])
    assert len(walk) - 1 == naive_tour_cost(inst, block)
    return Tour(walk, frozenset(block))


@pytest.mark.parametrize("kind, size", [("path", 4), ("star", 4), ("cycle", 5), ("grid", (2, 3))])
def test_validate_agrees_with_partition_enumeration(kind, size):
    size = size if isinstance(size, tuple) else (size,)
    base = structured(kind, *size)
    for k in range(1, base.n + 1):
        inst = base.with_capacity(k)
        allowed = {
            tuple(sorted(tuple(sorted(b)) for b in p))
            for p in set_partitions(list(inst.terminals), k)
        }
        for p in set_partitions(list(inst.terminals), inst.n):
            sol = CvrpSolution(tuple(_tour_for_block(inst, b) for b in p))
            key = tuple(sorted(tuple(sorted(b)) for b in p))
            assert validate_solution(inst, sol).feasible == (key in allowed)


def test_validate_random_coverings():
    rng = random.Random(5)
    inst = structured("grid", 2, 3, capacity=2)
    for _ in range(200):
        owners = [rng.randrange(3) for _ in inst.terminals]
        extra = rng.random() < 0.3
        tours = []
        for t in range(3):
            block = [v for v, o in zip(inst.terminals, owners) if o == t]
            if block:
                tours.append(_tour_for_block(inst, block))
        if extra:
            tours.append(tours[0])
        sol = CvrpSolution(tuple(tours))
        expect = not extra and all(len(t.covered) <= 2 for t in tours)
        assert validate_solution(inst, sol).feasible == expect


def test_product_of_small_walks_cost(path3):
    for a, b in product(range(3), repeat=2):
        assert len(expand_metric_path(path3, [a, b])) - 1 == abs(a - b)
