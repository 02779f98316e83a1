import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from convexcr import kernels
from convexcr.connectivity import SamplingParams, level_arcs_2d, sample_arcs, sampled_level_points
from convexcr.criticality import lcd
from convexcr.errors import (BadRadius, NonuniformRadius, NoWitness, PointIsO,
                             StalledAtCritical)
from convexcr.flow import push_level, radial_witness, write_trajectories_csv
from convexcr.geometry import contains, contains_many
from convexcr.harness import random_boundary_point, random_polytope


def test_witness_square_edge(square):
    w = radial_witness(square, (0, 0), (0.5, 0))
    assert w.direction == pytest.approx([1, 0])
    assert w.radial_component == pytest.approx(1)
    assert w.t_max == pytest.approx(0.5)


def test_witness_square_critical(square):
    with pytest.raises(NoWitness):
        radial_witness(square, (0, 0), (1, 0))
    with pytest.raises(PointIsO):
        radial_witness(square, (0, 0), (0, 0))


def test_witness_disk(disk):
    O = np.array([-1.0, 0.0])
    p = np.array([0.0, 1.0])
    w = radial_witness(disk, O, p)
    assert w.direction[0] > 0 and w.radial_component > 0
    for t in np.linspace(0, w.t_max, 11):
        assert contains(disk, p + t * w.direction)


def test_push_square(square):
    pts = [(0.5, 0), (0, 0.5), (0.353553, 0.353553)]
    pts[2] = tuple(0.5 * np.array([1, 1]) / math.sqrt(2))
    out = push_level(square, (0, 0), pts, 0.6)
    for p in out:
        assert np.linalg.norm(p) == pytest.approx(0.6, abs=1e-12)
        assert contains(square, p)


def test_push_identity(triangle):
    pts = sample_arcs(np.zeros(2), level_arcs_2d(triangle, (0, 0), 2.0), 16)
    out = push_level(triangle, (0, 0), pts, 2.0)
    assert all(np.array_equal(a, b) for a, b in zip(out, pts))


def test_push_stalls_across_foot(triangle):
    pts = sample_arcs(np.zeros(2), level_arcs_2d(triangle, (0, 0), 2.8), 64)
    with pytest.raises(StalledAtCritical) as info:
        push_level(triangle, (0, 0), pts, 3.0)
    assert info.value.critical_point == pytest.approx([2, 2])
    # blamed points aim at the foot
    for i in info.value.indices:
        d = pts[i] / np.linalg.norm(pts[i])
        assert d @ np.array([1, 1]) / math.sqrt(2) > 0.99


def test_push_stalls_at_critical_point_reached(square):
    # a point sliding along the edge y = 0 runs into the critical vertex (1, 0)
    with pytest.raises(StalledAtCritical) as info:
        push_level(square, (0, 0), [(0.5, 0.0)], 1.2)
    assert info.value.radius == pytest.approx(1.0)


def test_push_errors(triangle):
    with pytest.raises(NonuniformRadius):
        push_level(triangle, (0, 0), [(1, 0), (2, 0)], 2.5)
    with pytest.raises(BadRadius):
        push_level(triangle, (0, 0), [(2, 0)], 1.0)
    with pytest.raises(BadRadius):
        push_level(triangle, (0, 0), [(2, 0)], 4.5)


def test_trajectories_monotone_and_csv(tmp_path, triangle):
    pts = sample_arcs(np.zeros(2), level_arcs_2d(triangle, (0, 0), 1.0), 32)
    traj = []
    push_level(triangle, (0, 0), pts, 2.7, trajectories=traj)
    for t in traj:
        radii = [np.linalg.norm(p) for p in t]
        assert all(b > a for a, b in zip(radii, radii[1:]))
        assert all(contains(triangle, p) for p in t)
    path = tmp_path / "traj.csv"
    write_trajectories_csv(path, np.zeros(2), traj)
    assert open(path).readline().strip() == "point,step,x1,x2,radius"


seeds = st.integers(min_value=0, max_value=2**32 - 1)


@settings(max_examples=40, deadline=None)
@given(seed=seeds, dim=st.sampled_from([2, 3]))
def test_push_properties_below_lcd(seed, dim):
    K = random_polytope(dim, 20, seed)
    O = random_boundary_point(K, seed)
    L = lcd(K, O).value
    r0, r1 = 0.3 * L, 0.9 * L
    if dim == 2:
        arcs = level_arcs_2d(K, O, r0)
        pts = sample_arcs(O, arcs, 128)
        factor = 2.5 * r0 * sum(b - a for a, b in arcs.arcs) / 127
    else:
        params = SamplingParams()
        pts = sampled_level_points(K, O, r0, params)
        factor = 2.5 * params.spacing(3, r0)
    if kernels.label_components(pts, factor)[1] != 1:
        return
    traj = []
    out = np.array(push_level(K, O, pts, r1, trajectories=traj))
    assert np.allclose(np.linalg.norm(out - O, axis=1), r1, atol=1e-9)
    assert contains_many(K, out).all()
    for t in traj:
        assert all(contains(K, p) for p in t)
        radii = [np.linalg.norm(p - O) for p in t]
        assert all(b > a for a, b in zip(radii, radii[1:]))
        w = radial_witness(K, O, t[0])
        assert (t[0] - O) @ w.direction > 0
    assert kernels.label_components(out, factor * r1 / r0)[1] == 1
