"""Tours, CVRP solutions, feasibility checking and the JSON solution format."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterable, Sequence

from .graph import Instance, InstanceError


class SolutionFormatError(ValueError):
    """The solution JSON does not match the expected schema."""


class InvalidTourError(ValueError):
    pass


@dataclass(frozen=True)
class Tour:
    """A closed walk from the depot together with the terminals it serves.

    ``covered`` is explicit: a walk may pass through terminals that other
    tours serve.
    """

    walk: tuple[int, ...]
    covered: frozenset[int]

    def __post_init__(self) -> None:
        object.__setattr__(self, "walk", tuple(self.walk))
        object.__setattr__(self, "covered", frozenset(self.covered))

    @property
    def cost(self) -> int:
        return len(self.walk) - 1


@dataclass(frozen=True)
class CvrpSolution:
    tours: tuple[Tour, ...]
    capacity: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "tours", tuple(self.tours))

    @property
    def total_cost(self) -> int:
        return sum(t.cost for t in self.tours)


@dataclass(frozen=True)
class TspTour:
    """A closed walk from the depot that visits every terminal."""

    walk: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "walk", tuple(self.walk))

    @property
    def cost(self) -> int:
        return len(self.walk) - 1

    @cached_property
    def first_index(self) -> dict[int, int]:
        """Walk index of the first occurrence of every vertex."""
        first: dict[int, int] = {}
        for i, v in enumerate(self.walk):
            first.setdefault(v, i)
        return first

    def terminal_order(self, depot: int) -> tuple[int, ...]:
        return tuple(v for v in self.first_index if v != depot)

    def reversed(self) -> TspTour:
        return TspTour(self.walk[::-1])


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str
    tour: int | None = None

    def __str__(self) -> str:
        where = f"tour {self.tour}: " if self.tour is not None else ""
        return f"{self.kind}: {where}{self.detail}"


@dataclass
class ValidationReport:
    total_cost: int
    violations: list[Violation] = field(default_factory=list)

    @property
    def feasible(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}


def walk_violations(inst: Instance, walk: Sequence[int]) -> list[str]:
    """Problems with ``walk`` as a closed walk from the depot."""
    problems = []
    if not walk:
        return ["empty walk"]
    bad = [v for v in walk if not (isinstance(v, int) and 0 <= v < inst.num_vertices)]
    if bad:
        return [f"unknown vertex ids {sorted(set(bad))}"]
    if walk[0] != inst.depot or walk[-1] != inst.depot:
        problems.append("walk must start and end at the depot")
    for i, (a, b) in enumerate(zip(walk, walk[1:])):
        if not inst.has_edge(a, b):
            problems.append(f"step {i}: vertices {a} and {b} are not adjacent")
    return problems


def validate_solution(inst: Instance, sol: CvrpSolution) -> ValidationReport:
    """Check every feasibility condition; violations are collected, not raised."""
    report = ValidationReport(total_cost=sol.total_cost)
    add = report.violations.append

    if sol.capacity is not None and sol.capacity != inst.capacity:
        add(Violation("capacity-mismatch",
                      f"solution declares capacity {sol.capacity}, instance has {inst.capacity}"))

    coverage: Counter[int] = Counter()
    for idx, tour in enumerate(sol.tours):
        for problem in walk_violations(inst, tour.walk):
            kind = "adjacency" if "adjacent" in problem else "walk"
            add(Violation(kind, problem, idx))
        if inst.depot in tour.covered:
            add(Violation("depot-covered", "the depot has no demand", idx))
        unknown = sorted(v for v in tour.covered if not 0 <= v < inst.num_vertices)
        if unknown:
            add(Violation("walk", f"covers unknown vertices {unknown}", idx))
        missing = sorted(tour.covered - set(tour.walk))
        if missing:
            add(Violation("not-visited", f"covers {missing} without visiting them", idx))
        if len(tour.covered) > inst.capacity:
            add(Violation("capacity",
                          f"covers {len(tour.covered)} terminals, capacity is {inst.capacity}", idx))
        coverage.update(tour.covered)

    for v in inst.terminals:
        if coverage[v] == 0:
            add(Violation("uncovered", f"terminal {v} is not covered"))
        elif coverage[v] > 1:
            add(Violation("double-coverage", f"terminal {v} is covered by {coverage[v]} tours"))
    return report


def check_tsp_tour(inst: Instance, s: TspTour) -> None:
    problems = walk_violations(inst, s.walk)
    if problems:
        raise InvalidTourError("; ".join(problems))
    missing = set(inst.terminals) - set(s.walk)
    if missing:
        raise InvalidTourError(f"terminals never visited: {sorted(missing)}")


def expand_metric_path(inst: Instance, hops: Sequence[int]) -> tuple[int, ...]:
    """Replace every consecutive hop pair by a BFS shortest path in the graph."""
    if not hops:
        raise ValueError("hops must be nonempty")
    oracle = inst.distances
    for v in hops:
        oracle._check(v)
    walk = [hops[0]]
    for a, b in zip(hops, hops[1:]):
        walk.extend(oracle.shortest_path(a, b)[1:])
    return tuple(walk)


def concat_walks(walks: Iterable[Sequence[int]]) -> tuple[int, ...]:
    """Join walks that share endpoints (end of one == start of the next)."""
    out: list[int] = []
    for w in walks:
        if out:
            if out[-1] != w[0]:
                raise InvalidTourError("walks do not share an endpoint")
            out.extend(w[1:])
        else:
            out.extend(w)
    return tuple(out)


# JSON: 1-based vertex ids throughout.

def solution_to_dict(sol: CvrpSolution, capacity: int | None = None) -> dict[str, Any]:
    cap = capacity if capacity is not None else sol.capacity
    return {
        "capacity": cap,
        "tours": [
            {
                "walk": [v + 1 for v in t.walk],
                "covered": sorted(v + 1 for v in t.covered),
                "cost": t.cost,
            }
            for t in sol.tours
        ],
        "total_cost": sol.total_cost,
    }


def solution_to_json(sol: CvrpSolution, capacity: int | None = None) -> str:
    return json.dumps(solution_to_dict(sol, capacity), indent=2) + "\n"


def _int_list(obj: Any, what: str) -> list[int]:
    if not isinstance(obj, list) or not all(
        isinstance(x, int) and not isinstance(x, bool) for x in obj
    ):
        raise SolutionFormatError(f"{what} must be a list of integers")
    return obj


def solution_from_dict(data: Any) -> CvrpSolution:
    if not isinstance(data, dict):
        raise SolutionFormatError("solution must be a JSON object")
    for key in ("capacity", "tours", "total_cost"):
        if key not in data:
            raise SolutionFormatError(f"missing key {key!r}")
    if not isinstance(data["capacity"], int):
        raise SolutionFormatError("capacity must be an integer")
    if not isinstance(data["tours"], list):
        raise SolutionFormatError("tours must be a list")

    tours = []
    for i, t in enumerate(data["tours"]):
        if not isinstance(t, dict) or not {"walk", "covered", "cost"} <= t.keys():
            raise SolutionFormatError(f"tour {i} needs walk, covered and cost")
        walk = [v - 1 for v in _int_list(t["walk"], f"tour {i} walk")]
        covered = [v - 1 for v in _int_list(t["covered"], f"tour {i} covered")]
        if len(set(covered)) != len(covered):
            raise SolutionFormatError(f"tour {i} lists a covered terminal twice")
        tour = Tour(tuple(walk), frozenset(covered))
        if t["cost"] != tour.cost:
            raise SolutionFormatError(
                f"tour {i} declares cost {t['cost']} but its walk has {tour.cost} edges"
            )
        tours.append(tour)
    sol = CvrpSolution(tuple(tours), data["capacity"])
    if data["total_cost"] != sol.total_cost:
        raise SolutionFormatError(
            f"total_cost {data['total_cost']} differs from the sum of tour costs {sol.total_cost}"
        )
    return sol


def solution_from_json(text: str) -> CvrpSolution:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SolutionFormatError(f"invalid JSON: {exc}") from None
    return solution_from_dict(data)


__all__ = [
    "CvrpSolution",
    "InstanceError",
    "InvalidTourError",
    "SolutionFormatError",
    "Tour",
    "TspTour",
    "ValidationReport",
    "Violation",
    "check_tsp_tour",
    "concat_walks",
    "expand_metric_path",
    "solution_from_json",
    "solution_to_json",
    "validate_solution",
]
