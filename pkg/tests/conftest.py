import random

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from gcvrp.graph import Instance
from gcvrp.instgen import random_connected, structured, tight_instance
from gcvrp.tour import Tour

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@st.composite
def instances(draw, min_vertices=2, max_vertices=9, capacity=None):
    nv = draw(st.integers(min_vertices, max_vertices))
    p = draw(st.sampled_from([0.0, 0.15, 0.3, 0.6, 1.0]))
    seed = draw(st.integers(0, 2**32))
    k = capacity if capacity is not None else draw(st.integers(1, nv - 1))
    return random_connected(nv, p, seed, min(k, nv - 1))


def random_tour(inst: Instance, rng: random.Random, max_steps: int = 25) -> Tour:
    """Random walk from the depot, closed by a shortest path back, serving a
    random nonempty subset of the terminals it visits."""
    walk = [inst.depot]
    for _ in range(rng.randint(1, max_steps)):
        walk.append(rng.choice(inst.neighbors[walk[-1]]))
    walk += inst.distances.shortest_path(walk[-1], inst.depot)[1:]
    visited = sorted(set(walk) - {inst.depot})
    covered = rng.sample(visited, rng.randint(1, len(visited)))
    return Tour(tuple(walk), frozenset(covered))


@pytest.fixture
def path3():
    """O - a - b with k = 2."""
    return Instance(3, 0, ((0, 1), (1, 2)), 2)


@pytest.fixture
def star4():
    return structured("star", 4, capacity=2)


@pytest.fixture
def tight36():
    return tight_instance(3, 6)


@pytest.fixture
def tight1352():
    return tight_instance(13, 52)


ACCEPTANCE_RESULTS: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[num]
        terminalreporter.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}")
