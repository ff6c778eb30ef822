"""Instance generators: the tight cycle family, seeded random graphs and
small structured graphs."""

from __future__ import annotations

from fractions import Fraction
from typing import Any

from .bounds import frac_json
from .graph import Instance
from .tour import CvrpSolution, Tour

MASK64 = (1 << 64) - 1


class SplitMix64:
    """SplitMix64 (Steele, Lea, Flood 2014).

    Spelled out here rather than taken from ``random`` so a seed yields the
    same stream on every platform and in every language.
    """

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def random(self) -> float:
        """Uniform double in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def below(self, bound: int) -> int:
        """Uniform integer in [0, bound) by rejection sampling."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = (1 << 64) - (1 << 64) % bound
        while True:
            x = self.next_u64()
            if x < limit:
                return x % bound


def _prufer_tree(n_vertices: int, rng: SplitMix64) -> list[tuple[int, int]]:
    """Uniformly random labeled tree via a random Prufer sequence."""
    if n_vertices == 2:
        return [(0, 1)]
    seq = [rng.below(n_vertices) for _ in range(n_vertices - 2)]
    degree = [1] * n_vertices
    for v in seq:
        degree[v] += 1
    edges = []
    for v in seq:
        leaf = min(u for u in range(n_vertices) if degree[u] == 1)
        edges.append((min(leaf, v), max(leaf, v)))
        degree[leaf] -= 1
        degree[v] -= 1
    u, w = (x for x in range(n_vertices) if degree[x] == 1)
    edges.append((u, w))
    return edges


def random_connected(n_vertices: int, edge_prob: float, seed: int,
                     capacity: int | None = None) -> Instance:
    """Random spanning tree plus every other edge with probability ``edge_prob``.

    The depot is vertex 0 (id 1 in files); ``capacity`` defaults to the
    number of terminals.
    """
    if n_vertices < 2:
        raise ValueError("need at least 2 vertices")
    if not 0.0 <= edge_prob <= 1.0:
        raise ValueError(f"edge_prob must lie in [0, 1], got {edge_prob}")
    rng = SplitMix64(seed)
    edges = set(_prufer_tree(n_vertices, rng))
    for u in range(n_vertices):
        for v in range(u + 1, n_vertices):
            if (u, v) not in edges and rng.random() < edge_prob:
                edges.add((u, v))
    cap = n_vertices - 1 if capacity is None else capacity
    return Instance(n_vertices, 0, tuple(sorted(edges)), cap)


def structured(kind: str, *size: int, capacity: int | None = None) -> Instance:
    """Small canonical graphs; the depot is always vertex 0.

    - ``path(m)``: depot at one end of a path through m terminals
    - ``star(m)``: depot at the centre of m leaves
    - ``cycle(m)``: depot on a cycle with m terminals (m >= 2)
    - ``grid(r, c)``: r x c grid, depot in a corner
    """
    if not size or any(not isinstance(s, int) or s < 1 for s in size):
        raise ValueError(f"sizes must be positive integers, got {size}")
    if kind in ("path", "star", "cycle"):
        if len(size) != 1:
            raise ValueError(f"{kind} takes one size")
        m = size[0]
        if kind == "path":
            edges = [(i, i + 1) for i in range(m)]
        elif kind == "star":
            edges = [(0, i) for i in range(1, m + 1)]
        else:
            if m < 2:
                raise ValueError("a cycle needs at least 2 terminals")
            edges = [(i, i + 1) for i in range(m)] + [(0, m)]
        nv = m + 1
    elif kind == "grid":
        if len(size) != 2:
            raise ValueError("grid takes rows and columns")
        rows, cols = size
        nv = rows * cols
        if nv < 2:
            raise ValueError("grid needs at least 2 cells")
        edges = [(r * cols + c, r * cols + c + 1) for r in range(rows) for c in range(cols - 1)]
        edges += [(r * cols + c, (r + 1) * cols + c) for r in range(rows - 1) for c in range(cols)]
    else:
        raise ValueError(f"unknown structured kind {kind!r}")
    cap = nv - 1 if capacity is None else capacity
    return Instance(nv, 0, tuple(edges), cap)


def _check_tight(k: int, n: int) -> None:
    if k < 3 or k % 2 == 0:
        raise ValueError(f"k must be odd and at least 3, got {k}")
    if n < k or n % k:
        raise ValueError(f"n must be a positive multiple of k={k}, got {n}")


def tight_instance(k: int, n: int) -> Instance:
    """n/k cycles sharing only the depot, each through k terminals.

    Cycle c visits terminals ``c*k + 1 .. c*k + k`` in order.
    """
    _check_tight(k, n)
    edges = []
    for c in range(n // k):
        first, last = c * k + 1, c * k + k
        edges.append((0, first))
        edges.extend((v, v + 1) for v in range(first, last))
        edges.append((0, last))
    return Instance(n + 1, 0, tuple(edges), k)


def tight_solution(k: int, n: int) -> CvrpSolution:
    """One tour per cycle of :func:`tight_instance`."""
    _check_tight(k, n)
    tours = []
    for c in range(n // k):
        terms = tuple(range(c * k + 1, c * k + k + 1))
        tours.append(Tour((0, *terms, 0), frozenset(terms)))
    return CvrpSolution(tuple(tours), k)


def tight_metadata(k: int, n: int) -> dict[str, Fraction]:
    """Closed-form optimum ``n + n/k`` and radius cost ``n/2 + n/k + n/(2k^2)``."""
    _check_tight(k, n)
    return {
        "opt": Fraction(n) + Fraction(n, k),
        "rad": Fraction(n, 2) + Fraction(n, k) + Fraction(n, 2 * k * k),
    }


def tight_sidecar(k: int, n: int) -> dict[str, Any]:
    meta = tight_metadata(k, n)
    return {"family": "tight", "k": k, "n": n,
            "opt": frac_json(meta["opt"]), "rad": frac_json(meta["rad"])}
