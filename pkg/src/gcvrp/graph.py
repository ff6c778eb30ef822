"""Graphic CVRP instances, hop-count metrics and the ``.gcvrp`` file format.

Vertex ids are 0-based in memory and 1-based in files.
"""

from __future__ import annotations

import threading
import warnings
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable

#: All-pairs distances are precomputed eagerly up to this many vertices.
PRECOMPUTE_THRESHOLD = 2048


class InstanceError(ValueError):
    """Raised for malformed or invalid instances."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Instance:
    """Connected simple graph with a depot and a tour capacity.

    Every vertex except the depot is a terminal with unit demand.  A capacity
    above the number of terminals is clamped (any ``k >= n`` behaves the same);
    the original value is kept in ``requested_capacity``.
    """

    num_vertices: int
    depot: int
    edges: tuple[tuple[int, int], ...]
    capacity: int
    requested_capacity: int = field(default=0, compare=False)

    def __post_init__(self) -> None:
        if self.num_vertices < 2:
            raise InstanceError("an instance needs a depot and at least one terminal")
        if not 0 <= self.depot < self.num_vertices:
            raise InstanceError(f"depot {self.depot} out of range")
        if self.capacity < 1:
            raise InstanceError(f"capacity must be >= 1, got {self.capacity}")

        normalized = []
        for u, v in self.edges:
            u, v = int(u), int(v)
            if not (0 <= u < self.num_vertices and 0 <= v < self.num_vertices):
                raise InstanceError(f"edge ({u}, {v}) references an unknown vertex")
            if u == v:
                raise InstanceError(f"self-loop at vertex {u}")
            normalized.append((min(u, v), max(u, v)))
        normalized.sort()
        for a, b in zip(normalized, normalized[1:]):
            if a == b:
                raise InstanceError(f"duplicate edge {a}")
        object.__setattr__(self, "edges", tuple(normalized))

        if not self.requested_capacity:
            object.__setattr__(self, "requested_capacity", self.capacity)
        if self.capacity > self.n:
            warnings.warn(
                f"capacity {self.capacity} exceeds the {self.n} terminals; clamped to {self.n}",
                stacklevel=3,
            )
            object.__setattr__(self, "capacity", self.n)

        if not self._connected():
            raise InstanceError("graph is not connected")

    def _connected(self) -> bool:
        seen = {self.depot}
        stack = [self.depot]
        while stack:
            u = stack.pop()
            for w in self.neighbors[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.num_vertices

    @property
    def n(self) -> int:
        """Number of terminals."""
        return self.num_vertices - 1

    @property
    def clamped(self) -> bool:
        return self.requested_capacity != self.capacity

    @cached_property
    def terminals(self) -> tuple[int, ...]:
        return tuple(v for v in range(self.num_vertices) if v != self.depot)

    @cached_property
    def neighbors(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in range(self.num_vertices)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return tuple(tuple(sorted(a)) for a in adj)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._edge_set[u] if 0 <= u < self.num_vertices else False

    @cached_property
    def _edge_set(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(a) for a in self.neighbors)

    @cached_property
    def distances(self) -> DistanceOracle:
        return DistanceOracle(self)

    def with_capacity(self, capacity: int) -> Instance:
        return Instance(self.num_vertices, self.depot, self.edges, capacity)


def _bfs(neighbors: tuple[tuple[int, ...], ...], source: int) -> tuple[int, ...]:
    dist = [-1] * len(neighbors)
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for w in neighbors[u]:
            if dist[w] < 0:
                dist[w] = dist[u] + 1
                queue.append(w)
    return tuple(dist)


class DistanceOracle:
    """Hop distances to the depot and between arbitrary vertex pairs.

    Rows are BFS runs memoized per source; for graphs up to
    ``precompute_threshold`` vertices the full table is built eagerly, so the
    object is read-only afterwards.  The lazy path is guarded by a lock.
    """

    def __init__(self, inst: Instance, precompute_threshold: int = PRECOMPUTE_THRESHOLD):
        self._inst = inst
        self._rows: dict[int, tuple[int, ...]] = {}
        self._lock = threading.Lock()
        self.dist = _bfs(inst.neighbors, inst.depot)
        self._rows[inst.depot] = self.dist
        if inst.num_vertices <= precompute_threshold:
            for v in range(inst.num_vertices):
                self.row(v)

    def _check(self, v: int) -> None:
        if not (isinstance(v, int) and 0 <= v < self._inst.num_vertices):
            raise InstanceError(f"invalid vertex id {v!r}")

    def row(self, source: int) -> tuple[int, ...]:
        """Distances from ``source`` to every vertex."""
        self._check(source)
        row = self._rows.get(source)
        if row is None:
            with self._lock:
                row = self._rows.get(source)
                if row is None:
                    row = _bfs(self._inst.neighbors, source)
                    self._rows[source] = row
        return row

    def pairwise(self, u: int, v: int) -> int:
        self._check(v)
        return self.row(u)[v]

    def shortest_path(self, u: int, v: int) -> list[int]:
        """A shortest ``u``-``v`` path; at each step the lowest-numbered
        neighbour that makes progress is taken."""
        to_v = self.row(v)
        self._check(u)
        path = [u]
        while u != v:
            u = next(w for w in self._inst.neighbors[u] if to_v[w] == to_v[u] - 1)
            path.append(u)
        return path


def bfs_depot_distances(inst: Instance) -> DistanceOracle:
    return inst.distances


def pairwise_distance(inst: Instance, u: int, v: int) -> int:
    return inst.distances.pairwise(u, v)


def parse_instance(text: str) -> Instance:
    """Parse ``.gcvrp`` text.

    Format: ``c`` comment lines, one ``p gcvrp <vertices> <edges> <capacity>
    <depot>`` line, then exactly ``<edges>`` lines ``e <u> <v>`` (1-based).
    """
    header: tuple[int, int, int, int] | None = None
    edges: list[tuple[int, int]] = []
    seen: dict[tuple[int, int], int] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        parts = raw.split()
        if not parts or parts[0] == "c":
            continue
        tag = parts[0]
        if tag == "p":
            if header is not None:
                raise InstanceError("duplicate problem line", lineno)
            if len(parts) != 6 or parts[1] != "gcvrp":
                raise InstanceError(
                    "expected 'p gcvrp <vertices> <edges> <capacity> <depot>'", lineno
                )
            try:
                nv, ne, cap, depot = (int(x) for x in parts[2:])
            except ValueError:
                raise InstanceError("non-integer field in problem line", lineno) from None
            if nv < 2:
                raise InstanceError("need at least 2 vertices", lineno)
            if ne < 0:
                raise InstanceError("negative edge count", lineno)
            if cap < 1:
                raise InstanceError(f"capacity must be >= 1, got {cap}", lineno)
            if not 1 <= depot <= nv:
                raise InstanceError(f"depot {depot} out of range 1..{nv}", lineno)
            header = (nv, ne, cap, depot)
        elif tag == "e":
            if header is None:
                raise InstanceError("edge line before problem line", lineno)
            if len(parts) != 3:
                raise InstanceError("expected 'e <u> <v>'", lineno)
            try:
                u, v = int(parts[1]), int(parts[2])
            except ValueError:
                raise InstanceError("non-integer vertex id", lineno) from None
            nv = header[0]
            if not (1 <= u <= nv and 1 <= v <= nv):
                raise InstanceError(f"vertex id out of range 1..{nv}", lineno)
            if u == v:
                raise InstanceError(f"self-loop at vertex {u}", lineno)
            key = (min(u, v), max(u, v))
            if key in seen:
                raise InstanceError(f"duplicate edge {u} {v} (first on line {seen[key]})", lineno)
            seen[key] = lineno
            edges.append((u - 1, v - 1))
        else:
            raise InstanceError(f"unknown line type {tag!r}", lineno)

    if header is None:
        raise InstanceError("missing problem line")
    nv, ne, cap, depot = header
    if len(edges) != ne:
        raise InstanceError(f"problem line declares {ne} edges, found {len(edges)}")
    return Instance(nv, depot - 1, tuple(edges), cap)


def serialize_instance(inst: Instance, comments: Iterable[str] = ()) -> str:
    """Canonical ``.gcvrp`` text: edges sorted, 1-based ids."""
    lines = [f"c {c}" for c in comments]
    lines.append(
        f"p gcvrp {inst.num_vertices} {len(inst.edges)} {inst.capacity} {inst.depot + 1}"
    )
    lines.extend(f"e {u + 1} {v + 1}" for u, v in inst.edges)
    return "\n".join(lines) + "\n"


def load_instance(path: str | Path) -> Instance:
    return parse_instance(Path(path).read_text())


def save_instance(inst: Instance, path: str | Path, comments: Iterable[str] = ()) -> None:
    Path(path).write_text(serialize_instance(inst, comments))
