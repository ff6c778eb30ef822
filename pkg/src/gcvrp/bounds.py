"""Exact lower bounds and approximation-ratio arithmetic for graphic CVRP.

Everything here is computed with :class:`fractions.Fraction`; floats only
show up when values are formatted for people.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable

from .graph import Instance
from .tour import CvrpSolution, Tour, walk_violations


class BoundViolation(AssertionError):
    """A proven inequality failed on concrete data, which means a bug."""


def frac_json(x: Fraction | int) -> dict[str, int]:
    x = Fraction(x)
    return {"num": x.numerator, "den": x.denominator}


def frac_from_json(obj: dict[str, int]) -> Fraction:
    return Fraction(obj["num"], obj["den"])


def radius_cost(inst: Instance) -> Fraction:
    """``(2/k) * sum of depot distances over all terminals``."""
    dist = inst.distances.dist
    return Fraction(2 * sum(dist[v] for v in inst.terminals), inst.capacity)


def structure_term(n: int, k: int) -> Fraction:
    """The additive gain ``n/2 - n/(2k^2)`` of the structure bound over rad."""
    return Fraction(n, 2) - Fraction(n, 2 * k * k)


def structure_bound(inst: Instance) -> Fraction:
    """Lower bound ``rad + n/2 - n/(2k^2)`` on the optimal CVRP cost."""
    return radius_cost(inst) + structure_term(inst.n, inst.capacity)


@dataclass(frozen=True)
class BoundReport:
    n: int
    k: int
    rad: Fraction
    structure_bound: Fraction

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "k": self.k,
            "rad": frac_json(self.rad),
            "structure_bound": frac_json(self.structure_bound),
        }


def bound_report(inst: Instance) -> BoundReport:
    rad = radius_cost(inst)
    return BoundReport(inst.n, inst.capacity, rad, rad + structure_term(inst.n, inst.capacity))


def tour_lower_bound(size: int, depth_sum: int) -> Fraction:
    """``2D/|U| + |U|/2 - 1/(2|U|)`` for a tour serving ``size`` terminals whose
    depot distances sum to ``depth_sum``."""
    return Fraction(2 * depth_sum, size) + Fraction(size, 2) - Fraction(1, 2 * size)


@dataclass(frozen=True)
class TourCertificate:
    """Decomposition of one tour witnessing its lower bound.

    ``walk_size`` counts non-depot walk positions (the multiset W), ``split``
    is the walk index of the deepest vertex, ``xs``/``ys`` hold walk indices of
    the chosen vertex at every depth ``1..R-1`` before/after the split, and
    ``ua``/``ub`` split the served terminals by whether they occur at one of
    those chosen positions.
    """

    covered: frozenset[int]
    cost: int
    depth_sum: int
    max_depth: int
    delta: Fraction
    split: int
    xs: tuple[int, ...]
    ys: tuple[int, ...]
    walk_size: int
    ua: frozenset[int]
    ub: frozenset[int]
    lemma_bound: Fraction

    @property
    def ua_size(self) -> int:
        return len(self.ua)

    @property
    def b_size(self) -> int:
        return self.walk_size - (1 + len(self.xs) + len(self.ys))

    @property
    def deep_case(self) -> bool:
        """Whether ``delta >= |U|/4``, where ``2R`` alone gives the bound."""
        return self.delta >= Fraction(len(self.covered), 4)

    @property
    def ua_bound_ok(self) -> bool:
        return self.ua_size ** 2 <= 4 * len(self.covered) * self.delta + 1

    @property
    def lemma_ok(self) -> bool:
        return self.cost >= self.lemma_bound

    def checks(self) -> dict[str, bool]:
        return {
            "delta_nonnegative": self.delta >= 0,
            "b_covers_ub": self.b_size >= len(self.ub),
            "cost_ge_walk": self.cost >= 2 * self.max_depth + self.b_size,
            "ua_bound": self.ua_bound_ok,
            "lemma": self.lemma_ok,
        }

    def to_dict(self) -> dict[str, Any]:
        return {
            "covered": sorted(v + 1 for v in self.covered),
            "cost": self.cost,
            "D": self.depth_sum,
            "R": self.max_depth,
            "delta": frac_json(self.delta),
            "ua_size": self.ua_size,
            "b_size": self.b_size,
            "lemma_bound": frac_json(self.lemma_bound),
            "checks": self.checks(),
        }


def tour_certificate(inst: Instance, t: Tour) -> TourCertificate:
    """Build the deepest-vertex split certificate for a valid tour.

    Ties (deepest vertex, vertex per depth) go to the earliest walk position.
    """
    problems = walk_violations(inst, t.walk)
    if problems:
        raise ValueError("invalid tour: " + "; ".join(problems))
    if not t.covered:
        raise ValueError("tour covers no terminals")
    if inst.depot in t.covered or not t.covered <= set(t.walk):
        raise ValueError("covered terminals must be visited non-depot vertices")

    dist = inst.distances.dist
    walk = t.walk
    covered = t.covered
    depth_sum = sum(dist[v] for v in covered)
    positions = [i for i, v in enumerate(walk) if v != inst.depot]
    max_depth = max(dist[walk[i]] for i in positions)
    split = next(i for i in positions if dist[walk[i]] == max_depth)

    def first_at_each_depth(indices: Iterable[int]) -> tuple[int, ...]:
        found: dict[int, int] = {}
        for i in indices:
            d = dist[walk[i]]
            if 1 <= d < max_depth:
                found.setdefault(d, i)
        return tuple(found[d] for d in range(1, max_depth))

    xs = first_at_each_depth(range(0, split + 1))
    ys = first_at_each_depth(range(split, len(walk)))
    chosen = {walk[i] for i in (split, *xs, *ys)}
    ua = frozenset(covered & chosen)
    return TourCertificate(
        covered=covered,
        cost=t.cost,
        depth_sum=depth_sum,
        max_depth=max_depth,
        delta=max_depth - Fraction(depth_sum, len(covered)),
        split=split,
        xs=xs,
        ys=ys,
        walk_size=len(positions),
        ua=ua,
        ub=covered - ua,
        lemma_bound=tour_lower_bound(len(covered), depth_sum),
    )


@dataclass(frozen=True)
class DeltaCheck:
    holds: bool
    slack: Fraction
    """``(2*delta + u/2 + 1/(2u))**2 - (4*u*delta + 1)``, nonnegative iff the
    inequality holds."""


def check_delta_inequality(u_size: int, delta: Fraction | int) -> DeltaCheck:
    """Check ``2*delta - sqrt(4*u*delta + 1) >= -u/2 - 1/(2u)`` exactly.

    Both sides of ``2*delta + u/2 + 1/(2u) >= sqrt(4*u*delta + 1)`` are
    nonnegative, so squaring keeps the comparison exact and rational.
    """
    if isinstance(u_size, bool) or not isinstance(u_size, int) or u_size < 1:
        raise ValueError(f"u_size must be a positive integer, got {u_size!r}")
    delta = Fraction(delta)
    if delta < 0:
        raise ValueError(f"delta must be nonnegative, got {delta}")
    lhs = 2 * delta + Fraction(u_size, 2) + Fraction(1, 2 * u_size)
    slack = lhs * lhs - (4 * u_size * delta + 1)
    return DeltaCheck(slack >= 0, slack)


def structure_slack(inst: Instance, sol: CvrpSolution) -> Fraction:
    """``sum_i (2 D_i/|U_i| - 1/(2|U_i|)) - rad + n/(2k^2)`` over the tours of
    ``sol`` that serve at least one terminal; nonnegative whenever every tour
    respects the capacity."""
    dist = inst.distances.dist
    k = inst.capacity
    total = Fraction(0)
    for t in sol.tours:
        if t.covered:
            size = len(t.covered)
            d = sum(dist[v] for v in t.covered)
            total += Fraction(2 * d, size) - Fraction(1, 2 * size)
    return total - radius_cost(inst) + Fraction(inst.n, 2 * k * k)


def ag_bound(inst: Instance, tsp_cost: int) -> Fraction:
    """Upper bound ``rad + (1 - 1/k) * cost(S)`` on iterated tour partitioning."""
    k = inst.capacity
    return radius_cost(inst) + (1 - Fraction(1, k)) * tsp_cost


def itp_approximation_ratio(beta: Fraction | int, gamma: Fraction | int) -> Fraction:
    """Ratio ``beta + gamma + 1/2`` guaranteed for partitioning a TSP tour of
    cost at most ``beta * n + gamma * opt_tsp``; requires ``beta >= 1/2`` and
    ``gamma >= 0``."""
    beta, gamma = Fraction(beta), Fraction(gamma)
    if beta < Fraction(1, 2):
        raise ValueError(f"beta must be at least 1/2 (tour cost beta*n + gamma*opt_tsp), got {beta}")
    if gamma < 0:
        raise ValueError(f"gamma must be nonnegative, got {gamma}")
    return beta + gamma + Fraction(1, 2)


def tsp_cost_guarantees(n: int, opt_tsp: int) -> dict[str, Fraction]:
    """Analytical tour-cost ceilings of graphic TSP algorithms and of taking
    the better of two of them (convex combinations 1/4-3/4 and 1/2-1/2)."""
    if n < 1 or opt_tsp < 0:
        raise ValueError("need n >= 1 and opt_tsp >= 0")
    return {
        "christofides": n + Fraction(opt_tsp, 2),
        "momke_svensson": Fraction(n, 3) + Fraction(10, 9) * opt_tsp,
        "sebo_vygen": Fraction(7, 5) * opt_tsp,
        "s2_combo": Fraction(n, 2) + Fraction(23, 24) * opt_tsp,
        "s3_combo": Fraction(n, 2) + Fraction(19, 20) * opt_tsp,
    }


#: (beta, gamma) of the tour guarantees above that satisfy beta >= 1/2.
RATIO_PARAMETERS = {
    "christofides": (Fraction(1), Fraction(1, 2)),
    "s2_combo": (Fraction(1, 2), Fraction(23, 24)),
    "s3_combo": (Fraction(1, 2), Fraction(19, 20)),
}
