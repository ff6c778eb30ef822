"""TSP tours in graphic metrics: Held-Karp, tree doubling and Christofides.

All three work on the metric closure (pairwise BFS distances) and expand the
resulting vertex order back into a walk of unit edges.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .graph import Instance
from .matching import MatchingProblem, min_weight_perfect_matching
from .tour import TspTour, expand_metric_path

#: Default vertex limit for the Held-Karp solver.
EXACT_LIMIT = 16

_INF = np.int64(1) << 40


class TooLargeError(ValueError):
    """Instance exceeds the limit of an exact solver."""


@dataclass(frozen=True)
class SpanningTree:
    edges: tuple[tuple[int, int], ...]

    @property
    def cost(self) -> int:
        return len(self.edges)


def distance_matrix(inst: Instance, vertices: Sequence[int]) -> np.ndarray:
    rows = [inst.distances.row(u) for u in vertices]
    return np.array([[r[v] for v in vertices] for r in rows], dtype=np.int64)


@lru_cache(maxsize=None)
def popcounts(m: int) -> tuple[int, ...]:
    return tuple(bin(x).count("1") for x in range(1 << m))


@lru_cache(maxsize=None)
def _layers(m: int) -> tuple[np.ndarray, ...]:
    """Masks over ``m`` bits grouped by popcount."""
    masks = np.arange(1 << m, dtype=np.int64)
    sizes = np.array(popcounts(m))
    return tuple(masks[sizes == size] for size in range(m + 1))


def held_karp_table(dist: np.ndarray) -> np.ndarray:
    """Shortest-path DP over subsets.

    ``dist`` is a square matrix whose row/column 0 is the start.  Returns
    ``dp`` of shape ``(2**m, m)`` with ``m = len(dist) - 1``: ``dp[mask, j]``
    is the cheapest path from the start through exactly the nodes of ``mask``
    (bit ``i`` stands for node ``i + 1``) ending at node ``j + 1``.  Entries
    with ``j`` outside ``mask`` are ``_INF``.
    """
    m = dist.shape[0] - 1
    dp = np.full((1 << m, max(m, 1)), _INF, dtype=np.int64)
    if m == 0:
        return dp
    inner = dist[1:, 1:]
    for j in range(m):
        dp[1 << j, j] = dist[0, j + 1]
    layers = _layers(m)
    for size in range(2, m + 1):
        layer = layers[size]
        for j in range(m):
            tgt = layer[(layer >> j) & 1 == 1]
            prev = tgt ^ (1 << j)
            dp[tgt, j] = (dp[prev] + inner[:, j][None, :]).min(axis=1)
    return dp


def closed_costs(dp: np.ndarray, dist: np.ndarray) -> np.ndarray:
    """Cheapest closed walk from the start through exactly each subset."""
    m = dist.shape[0] - 1
    if m == 0:
        return np.zeros(1, dtype=np.int64)
    back = dist[1:, 0]
    costs = (dp + back[None, :]).min(axis=1)
    costs[0] = 0
    return costs


def held_karp_order(dp: np.ndarray, dist: np.ndarray, mask: int) -> list[int]:
    """Node order (indices into ``dist``, start excluded) of an optimal closed
    walk through ``mask``.  Ties go to the lowest index."""
    if mask == 0:
        return []
    m = dist.shape[0] - 1
    members = [j for j in range(m) if mask >> j & 1]
    j = min(members, key=lambda j: (dp[mask, j] + dist[j + 1, 0], j))
    order = [j]
    while mask != 1 << j:
        prev = mask ^ (1 << j)
        target = dp[mask, j]
        i = next(i for i in range(m) if prev >> i & 1 and dp[prev, i] + dist[i + 1, j + 1] == target)
        order.append(i)
        mask, j = prev, i
    order.reverse()
    return [j + 1 for j in order]


def exact_tsp(inst: Instance, limit: int = EXACT_LIMIT) -> TspTour:
    """Optimal closed walk from the depot through every terminal."""
    if inst.num_vertices > limit:
        raise TooLargeError(
            f"exact TSP limited to {limit} vertices, instance has {inst.num_vertices}"
        )
    vertices = [inst.depot, *inst.terminals]
    dist = distance_matrix(inst, vertices)
    dp = held_karp_table(dist)
    order = held_karp_order(dp, dist, (1 << inst.n) - 1)
    hops = [inst.depot] + [vertices[i] for i in order] + [inst.depot]
    return TspTour(expand_metric_path(inst, hops))


def spanning_tree(inst: Instance) -> SpanningTree:
    """BFS tree rooted at the depot, neighbours scanned in increasing id."""
    seen = [False] * inst.num_vertices
    seen[inst.depot] = True
    frontier = [inst.depot]
    edges = []
    while frontier:
        nxt = []
        for u in frontier:
            for w in inst.neighbors[u]:
                if not seen[w]:
                    seen[w] = True
                    edges.append((min(u, w), max(u, w)))
                    nxt.append(w)
        frontier = nxt
    return SpanningTree(tuple(edges))


def _children(inst: Instance, tree: SpanningTree) -> list[list[int]]:
    adj: list[list[int]] = [[] for _ in range(inst.num_vertices)]
    for u, v in tree.edges:
        adj[u].append(v)
        adj[v].append(u)
    for a in adj:
        a.sort()
    return adj


def double_tree(inst: Instance) -> TspTour:
    """Preorder of the BFS tree, shortcut and expanded; cost at most 2n."""
    adj = _children(inst, spanning_tree(inst))
    order = []
    seen = {inst.depot}
    stack = [inst.depot]
    while stack:
        u = stack.pop()
        order.append(u)
        for w in reversed(adj[u]):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return TspTour(expand_metric_path(inst, order + [inst.depot]))


def euler_circuit(num_vertices: int, edges: Sequence[tuple[int, int]], start: int) -> list[int]:
    """Hierholzer's algorithm on a connected multigraph with all degrees even.

    From each vertex the unused edge to the lowest-numbered neighbour is
    taken first.
    """
    adj: list[list[tuple[int, int]]] = [[] for _ in range(num_vertices)]
    for k, (u, v) in enumerate(edges):
        adj[u].append((v, k))
        adj[v].append((u, k))
    for a in adj:
        a.sort(reverse=True)  # pop() yields the smallest
    used = [False] * len(edges)
    stack = [start]
    circuit = []
    while stack:
        u = stack[-1]
        while adj[u] and used[adj[u][-1][1]]:
            adj[u].pop()
        if adj[u]:
            w, k = adj[u].pop()
            used[k] = True
            stack.append(w)
        else:
            circuit.append(stack.pop())
    circuit.reverse()
    return circuit


def christofides(inst: Instance) -> TspTour:
    """Spanning tree plus a minimum-weight perfect matching on its odd-degree
    vertices, Euler circuit, shortcut to first visits, expanded to a walk."""
    tree = spanning_tree(inst)
    degree = [0] * inst.num_vertices
    for u, v in tree.edges:
        degree[u] += 1
        degree[v] += 1
    odd = tuple(v for v in range(inst.num_vertices) if degree[v] % 2)
    pairs = min_weight_perfect_matching(MatchingProblem(odd, inst.distances.pairwise))
    multigraph = list(tree.edges) + [(a, b) for a, b in pairs]
    circuit = euler_circuit(inst.num_vertices, multigraph, inst.depot)
    seen: set[int] = set()
    hops = []
    for v in circuit:
        if v not in seen:
            seen.add(v)
            hops.append(v)
    hops.append(inst.depot)
    return TspTour(expand_metric_path(inst, hops))


TSP_METHODS = {
    "exact": exact_tsp,
    "christofides": christofides,
    "double-tree": double_tree,
}
