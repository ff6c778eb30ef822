"""Iterated tour partitioning.

The terminals are ordered by their first visit along the TSP tour.  For
every offset ``r`` in ``0..k-1`` the order is cut into a first run of ``r``
terminals followed by runs of ``k``; each run becomes a tour that goes from
the depot to its first terminal by a shortest path, follows the TSP walk to
its last terminal and returns by a shortest path.  The cheapest offset wins,
ties going to the smaller offset.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .bounds import BoundViolation, ag_bound
from .graph import Instance
from .tour import CvrpSolution, Tour, TspTour, check_tsp_tour


@dataclass(frozen=True)
class Partition:
    offset: int
    segments: tuple[tuple[int, ...], ...]


def partition(order: Sequence[int], k: int, offset: int) -> Partition:
    if not 0 <= offset < k:
        raise ValueError(f"offset must lie in [0, {k - 1}]")
    order = tuple(order)
    cuts = [0] + list(range(offset or k, len(order), k)) + [len(order)]
    segments = tuple(order[a:b] for a, b in zip(cuts, cuts[1:]) if b > a)
    return Partition(offset, segments)


@dataclass(frozen=True)
class ItpReport:
    solution: CvrpSolution
    offset_costs: tuple[int, ...]
    best_offset: int
    tsp_cost: int
    ag_bound: Fraction

    @property
    def cost(self) -> int:
        return self.solution.total_cost

    @property
    def ag_bound_ok(self) -> bool:
        return self.cost <= self.ag_bound

    @property
    def mean_offset_cost(self) -> Fraction:
        return Fraction(sum(self.offset_costs), len(self.offset_costs))


def _segment_cost(inst: Instance, s: TspTour, seg: Sequence[int]) -> int:
    dist = inst.distances.dist
    first = s.first_index
    return dist[seg[0]] + first[seg[-1]] - first[seg[0]] + dist[seg[-1]]


def _segment_tour(inst: Instance, s: TspTour, seg: Sequence[int]) -> Tour:
    oracle = inst.distances
    first = s.first_index
    walk = (
        oracle.shortest_path(inst.depot, seg[0])[:-1]
        + list(s.walk[first[seg[0]]:first[seg[-1]] + 1])
        + oracle.shortest_path(seg[-1], inst.depot)[1:]
    )
    return Tour(tuple(walk), frozenset(seg))


def itp_with_report(inst: Instance, s: TspTour) -> ItpReport:
    """Run every offset and return the best solution with the per-offset
    costs and the check against ``rad + (1 - 1/k) * cost(s)``."""
    check_tsp_tour(inst, s)
    k = inst.capacity
    order = s.terminal_order(inst.depot)
    parts = [partition(order, k, r) for r in range(k)]
    costs = tuple(sum(_segment_cost(inst, s, seg) for seg in p.segments) for p in parts)
    best = min(range(k), key=lambda r: (costs[r], r))
    tours = tuple(_segment_tour(inst, s, seg) for seg in parts[best].segments)
    sol = CvrpSolution(tours, k)
    report = ItpReport(sol, costs, best, s.cost, ag_bound(inst, s.cost))
    if report.cost != costs[best]:
        raise AssertionError("segment tour cost disagrees with its accounting")
    if not report.ag_bound_ok:
        raise BoundViolation(
            f"partitioning cost {report.cost} exceeds rad + (1-1/k)*cost(S) = {report.ag_bound}"
        )
    return report


def itp(inst: Instance, s: TspTour) -> CvrpSolution:
    return itp_with_report(inst, s).solution
