import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import brute_slack, polygon_boundary_samples
from convexcr.criticality import (angle_ratio_max, enumerate_critical_points,
                                  is_critical, lcd)
from convexcr.errors import NotOnBoundary, ONotOnBoundary, PointCoincidesWithO
from convexcr.harness import random_boundary_point, random_polytope

SQRT2 = math.sqrt(2)


def locs(points):
    return [p.location.tolist() for p in points]


def test_square_corner_is_critical(square):
    O, P = np.zeros(2), np.array([1.0, 0.0])
    assert sorted(float(np.dot(O - P, X - P)) for X in square.vertices) == [0, 0, 1, 1]
    assert is_critical(square, O, P)


def test_square_edge_midpoint_not_critical(square):
    O, P = np.zeros(2), np.array([1.0, 0.5])
    assert brute_slack(square, O, P) == pytest.approx(-0.25)
    assert not is_critical(square, O, P)


def test_disk_antipode(disk):
    assert is_critical(disk, (-1, 0), (1, 0))
    assert not is_critical(disk, (-1, 0), (0, 1))


def test_is_critical_errors(square):
    with pytest.raises(PointCoincidesWithO):
        is_critical(square, (0, 0), (0, 0))
    with pytest.raises(NotOnBoundary):
        is_critical(square, (0, 0), (0.5, 0.5))
    with pytest.raises(NotOnBoundary):
        is_critical(square, (0.5, 0.5), (1, 0))


def test_enumerate_square(square):
    pts = enumerate_critical_points(square, (0, 0))
    assert sorted(map(tuple, locs(pts))) == [(0, 1), (1, 0), (1, 1)]
    assert [p.distance for p in pts] == pytest.approx([1, 1, SQRT2])


def test_enumerate_triangle_vertex(triangle):
    pts = enumerate_critical_points(triangle, (0, 0))
    assert np.allclose(locs(pts), [[2, 2], [1, 3], [4, 0]])
    assert [p.distance for p in pts] == pytest.approx([2 * SQRT2, math.sqrt(10), 4])
    assert pts[0].carrier_dim == 1


def test_enumerate_disk(disk):
    pts = enumerate_critical_points(disk, (-1, 0))
    assert len(pts) == 1
    assert pts[0].location == pytest.approx([1, 0], abs=1e-12)
    assert pts[0].distance == pytest.approx(2)


def test_enumerate_rejects_interior_O(square):
    with pytest.raises(ONotOnBoundary):
        enumerate_critical_points(square, (0.5, 0.5))


def test_lcd_values(square, triangle, disk):
    assert lcd(square, (0, 0)).value == pytest.approx(1.0)
    assert lcd(triangle, (0, 0)).value == pytest.approx(2 * SQRT2, abs=1e-12)
    assert lcd(disk, (-1, 0)).value == pytest.approx(2.0, abs=1e-12)


def test_lcd_triangle_against_dense_boundary_scan(triangle):
    rng = np.random.default_rng(3)
    O = np.zeros(2)
    P = polygon_boundary_samples(triangle, 20000, rng)
    # add the exact foot neighbourhood so the scan can resolve it
    t = np.linspace(-1e-3, 1e-3, 201)
    P = np.vstack([P, np.column_stack([2 + t, 2 - t])])
    d = np.linalg.norm(P - O, axis=1)
    crit = [dist for p, dist in zip(P, d)
            if dist > 1e-9 and brute_slack(triangle, O, p) >= -1e-9 * triangle.diameter]
    assert min(crit) == pytest.approx(2 * SQRT2, abs=1e-9)


def test_cube_corner(cube):
    pts = enumerate_critical_points(cube, (0, 0, 0))
    # every vertex except O; facet and edge feet coincide with vertices
    assert len(pts) == 7
    assert lcd(cube, (0, 0, 0)).value == pytest.approx(1.0)


seeds = st.integers(min_value=0, max_value=2**32 - 1)


@settings(max_examples=30, deadline=None)
@given(seed=seeds, dim=st.sampled_from([2, 3, 4]))
def test_soundness_and_uniqueness(seed, dim):
    K = random_polytope(dim, 15, seed)
    O = random_boundary_point(K, seed)
    pts = enumerate_critical_points(K, O)
    assert pts
    carriers = [p.carrier.vertex_ids for p in pts]
    assert len(set(carriers)) == len(carriers)
    for p in pts:
        assert brute_slack(K, O, p.location) >= -1e-9 * K.diameter * max(p.distance, 1)
        assert p.distance > 0


@settings(max_examples=30, deadline=None)
@given(seed=seeds, dim=st.sampled_from([2, 3, 4]))
def test_farthest_point_is_critical(seed, dim):
    K = random_polytope(dim, 15, seed)
    O = random_boundary_point(K, seed)
    far = K.vertices[np.argmax(np.linalg.norm(K.vertices - O, axis=1))]
    assert is_critical(K, O, far)
    found = [p.location for p in enumerate_critical_points(K, O)]
    assert min(np.linalg.norm(f - far) for f in found) < 1e-9


@settings(max_examples=30, deadline=None)
@given(seed=seeds, dim=st.sampled_from([2, 3, 4]))
def test_angle_ratio_and_positivity(seed, dim):
    K = random_polytope(dim, 20, seed)
    O = random_boundary_point(K, seed)
    L = lcd(K, O)
    assert L.value > 0
    assert angle_ratio_max(L.all_points, O) <= 2 + 1e-9


@pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
def test_completeness_oracle_2d(seed):
    K = random_polytope(2, 20, seed)
    O = random_boundary_point(K, seed)
    found = np.array(locs(enumerate_critical_points(K, O)))
    rng = np.random.default_rng(seed)
    samples = polygon_boundary_samples(K, 10_000, rng)
    eps = 1e-9 * K.diameter
    for P in samples:
        if np.linalg.norm(P - O) <= eps:
            continue
        if brute_slack(K, O, P) >= -eps * max(np.linalg.norm(P - O), 1):
            assert np.min(np.linalg.norm(found - P, axis=1)) < 10 * eps
    # the samples rarely land on critical points; check the vertex ones explicitly
    for X in K.vertices:
        if np.linalg.norm(X - O) > eps and brute_slack(K, O, X) >= -eps * np.linalg.norm(X - O):
            assert np.min(np.linalg.norm(found - X, axis=1)) < 10 * eps
