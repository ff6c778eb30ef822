"""Exact CVRP for small instances.

``exact_cvrp`` combines one Held-Karp table (closed-walk cost of every
terminal subset) with a set-partition DP.  ``naive_cvrp`` enumerates set
partitions and visiting orders directly and shares no code with it beyond
BFS distances.
"""

from __future__ import annotations

from itertools import permutations
from typing import Collection, Iterator, Sequence

import numpy as np

from .graph import Instance
from .tour import CvrpSolution, Tour, expand_metric_path
from .tsp import (
    EXACT_LIMIT,
    TooLargeError,
    closed_costs,
    distance_matrix,
    held_karp_order,
    held_karp_table,
    popcounts,
)

#: Default terminal limit for ``exact_cvrp``.
ORACLE_LIMIT = 12


def subset_tour_costs(inst: Instance, limit: int = ORACLE_LIMIT) -> np.ndarray:
    """Cheapest closed walk from the depot serving each terminal subset.

    Bit ``i`` of the index stands for ``inst.terminals[i]``.
    """
    if inst.n > limit:
        raise TooLargeError(f"exact CVRP limited to {limit} terminals, instance has {inst.n}")
    dist = distance_matrix(inst, [inst.depot, *inst.terminals])
    return closed_costs(held_karp_table(dist), dist)


def _partition_dp(tour_cost: Sequence[int], n: int, k: int) -> tuple[list[int], list[int]]:
    """best[S] over all subsets; choice[S] is the part containing S's lowest
    terminal in an optimal partition."""
    size = 1 << n
    popcount = popcounts(n)
    best = [0] * size
    choice = [0] * size
    for s in range(1, size):
        low = s & -s
        rest = s ^ low
        top = None
        pick = 0
        sub = rest
        while True:
            part = sub | low
            if popcount[part] <= k:
                c = tour_cost[part] + best[s ^ part]
                if top is None or c < top:
                    top, pick = c, part
            if sub == 0:
                break
            sub = (sub - 1) & rest
        best[s] = top
        choice[s] = pick
    return best, choice


def exact_cvrp_cost(inst: Instance, limit: int = ORACLE_LIMIT) -> int:
    costs = subset_tour_costs(inst, limit).tolist()
    best, _ = _partition_dp(costs, inst.n, inst.capacity)
    return best[-1]


def exact_cvrp_costs(inst: Instance, capacities: Collection[int] | None = None,
                     limit: int = ORACLE_LIMIT) -> dict[int, int]:
    """Optimal cost for several capacities, sharing one Held-Karp table."""
    costs = subset_tour_costs(inst, limit).tolist()
    ks = range(1, inst.n + 1) if capacities is None else capacities
    return {k: _partition_dp(costs, inst.n, k)[0][-1] for k in ks}


def exact_cvrp(inst: Instance, limit: int = ORACLE_LIMIT) -> CvrpSolution:
    """An optimal solution (with reconstructed walks)."""
    if inst.n > limit:
        raise TooLargeError(f"exact CVRP limited to {limit} terminals, instance has {inst.n}")
    vertices = [inst.depot, *inst.terminals]
    dist = distance_matrix(inst, vertices)
    dp = held_karp_table(dist)
    costs = closed_costs(dp, dist).tolist()
    _, choice = _partition_dp(costs, inst.n, inst.capacity)

    tours = []
    s = (1 << inst.n) - 1
    while s:
        part = choice[s]
        order = held_karp_order(dp, dist, part)
        hops = [inst.depot] + [vertices[i] for i in order] + [inst.depot]
        covered = frozenset(vertices[i + 1] for i in range(inst.n) if part >> i & 1)
        tour = Tour(expand_metric_path(inst, hops), covered)
        if tour.cost != costs[part]:
            raise AssertionError("reconstructed tour cost disagrees with the DP")
        tours.append(tour)
        s ^= part
    return CvrpSolution(tuple(tours), inst.capacity)


def exact_tour_cost(inst: Instance, terminals: Collection[int], limit: int = EXACT_LIMIT) -> int:
    """Cheapest closed walk from the depot visiting every vertex in ``terminals``."""
    terms = sorted(set(terminals) - {inst.depot})
    for v in terms:
        inst.distances._check(v)
    if len(terms) + 1 > limit:
        raise TooLargeError(f"Held-Karp limited to {limit} vertices")
    if not terms:
        return 0
    dist = distance_matrix(inst, [inst.depot, *terms])
    return int(closed_costs(held_karp_table(dist), dist)[-1])


def set_partitions(items: Sequence[int], max_part: int) -> Iterator[list[tuple[int, ...]]]:
    """All partitions of ``items`` into blocks of at most ``max_part``."""
    if not items:
        yield []
        return
    head, rest = items[0], items[1:]
    for partial in set_partitions(rest, max_part):
        yield [(head,)] + partial
        for i, block in enumerate(partial):
            if len(block) < max_part:
                yield partial[:i] + [(head,) + block] + partial[i + 1:]


def naive_tour_cost(inst: Instance, block: Sequence[int]) -> int:
    d = inst.distances.pairwise
    o = inst.depot
    best = None
    for perm in permutations(block):
        c = d(o, perm[0]) + sum(d(a, b) for a, b in zip(perm, perm[1:])) + d(perm[-1], o)
        if best is None or c < best:
            best = c
    return best


def naive_cvrp(inst: Instance, limit: int = 7) -> int:
    """Optimal cost by brute force over set partitions and visiting orders."""
    if inst.n > limit:
        raise TooLargeError(f"naive enumeration limited to {limit} terminals")
    memo: dict[tuple[int, ...], int] = {}

    def block_cost(block: tuple[int, ...]) -> int:
        key = tuple(sorted(block))
        if key not in memo:
            memo[key] = naive_tour_cost(inst, key)
        return memo[key]

    return min(
        sum(block_cost(b) for b in p) for p in set_partitions(list(inst.terminals), inst.capacity)
    )
