import itertools

import numpy as np
import pytest

from convexcr.geometry import build_polytope, make_ball

TRIANGLE = [(0.0, 0.0), (4.0, 0.0), (1.0, 3.0)]

_acceptance_lines = []


def record_acceptance(line):
    _acceptance_lines.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def square():
    return build_polytope([(0, 0), (1, 0), (1, 1), (0, 1)])


@pytest.fixture(scope="session")
def triangle():
    return build_polytope(TRIANGLE)


@pytest.fixture(scope="session")
def disk():
    return make_ball((0.0, 0.0), 1.0)


@pytest.fixture(scope="session")
def ball3():
    return make_ball((0.0, 0.0, 0.0), 1.0)


@pytest.fixture(scope="session")
def cube():
    return build_polytope(list(itertools.product([0.0, 1.0], repeat=3)))


@pytest.fixture(scope="session")
def prism():
    return build_polytope([(x, y, z) for x, y in TRIANGLE for z in (0.0, 0.2)])


def polygon_boundary_samples(K, n, rng):
    """Uniform samples on the boundary of a polygon, by edge length."""
    ring = K.ring
    V = K.vertices
    edges = [(V[ring[i]], V[ring[(i + 1) % len(ring)]]) for i in range(len(ring))]
    lengths = np.array([np.linalg.norm(b - a) for a, b in edges])
    idx = rng.choice(len(edges), size=n, p=lengths / lengths.sum())
    t = rng.uniform(size=n)
    return np.array([edges[i][0] + s * (edges[i][1] - edges[i][0]) for i, s in zip(idx, t)])


def brute_slack(K, O, P):
    """min over vertices X of <O - P, X - P>, straight from the definition."""
    return min(float(np.dot(O - P, X - P)) for X in K.vertices)
