"""Discrete outward push of level sets through non-critical radii.

At a non-critical point ``p`` there is a direction with positive radial
component along which ``K`` can be entered. For polytopes we take the
projection of the radial unit vector onto the tangent cone at ``p``: moving
radially in the interior, sliding along faces on the boundary. For balls we
take the chord towards the support point in direction ``p - O``. Both choices
depend continuously on ``p`` away from critical points, so neighbouring
samples stay neighbours.
"""
from dataclasses import dataclass
import csv
import math

import numpy as np
from scipy.optimize import lsq_linear

from .criticality import criticality_slack, enumerate_critical_points
from .errors import BadRadius, NonuniformRadius, NoWitness, PointIsO, StalledAtCritical
from .geometry import DEFAULT_TOL, Ball, _check_dim, search_cap, support

MAX_STEPS = 64


@dataclass(frozen=True, eq=False)
class WitnessDirection:
    base: np.ndarray
    direction: np.ndarray
    radial_component: float
    t_max: float


def _polytope_direction(K, p, u, eps):
    slack = K.offsets - K.normals @ p
    active = slack <= eps
    if np.any(active):
        N = K.normals[active]
        # project u onto the tangent cone {v : N v <= 0} via its polar cone
        lam = lsq_linear(N.T, u, bounds=(0.0, np.inf), method="bvls", tol=1e-14).x
        v = u - N.T @ lam
    else:
        v = u
    nv = float(np.linalg.norm(v))
    if nv <= 1e-12:
        return None, 0.0
    d = v / nv
    rate = K.normals @ d
    moving = rate > 1e-12
    if not np.any(moving):
        return d, math.inf
    return d, float(np.min(np.maximum(slack[moving], 0.0) / rate[moving]))


def radial_witness(K, O, p, tol=DEFAULT_TOL):
    """Direction at `p` with positive radial component that keeps a segment in `K`.

    Raises
    ------
    PointIsO
        `p` coincides with `O`.
    NoWitness
        `p` is critical, so no such direction exists.
    """
    O = _check_dim(K, O)
    p = _check_dim(K, p)
    w = p - O
    dist = float(np.linalg.norm(w))
    if dist <= tol * K.diameter:
        raise PointIsO("base point coincides with O")
    if criticality_slack(K, O, p) >= -tol * K.diameter * max(dist, 1.0):
        raise NoWitness(f"{p.tolist()} is critical")
    u = w / dist
    if isinstance(K, Ball):
        _, X = support(K, w)
        chord = X - p
        t_max = float(np.linalg.norm(chord))
        d = chord / t_max
    else:
        d, t_max = _polytope_direction(K, p, u, tol * K.diameter)
        if d is None:
            raise NoWitness(f"{p.tolist()} admits no outward direction")
    radial = float(d @ u)
    if radial <= 0.0:
        raise NoWitness(f"{p.tolist()} admits no outward direction")
    return WitnessDirection(p.copy(), d, radial, t_max)


def _time_to_radius(w, d, r):
    """Smallest t >= 0 with |w + t d| = r, for |w| <= r and unit d."""
    b = float(w @ d)
    c = float(w @ w) - r * r
    return -b + math.sqrt(max(b * b - c, 0.0))


def _push_point(K, O, p, r_target, tol, index, trajectory):
    for _ in range(MAX_STEPS):
        try:
            wit = radial_witness(K, O, p, tol)
        except NoWitness:
            raise StalledAtCritical(
                f"point {index} stalled at critical point {p.tolist()}",
                radius=float(np.linalg.norm(p - O)), critical_point=p.copy(),
                indices=[index]) from None
        t = _time_to_radius(p - O, wit.direction, r_target)
        if t <= wit.t_max:
            p = p + t * wit.direction
            if trajectory is not None:
                trajectory.append(p.copy())
            return p
        p = p + wit.t_max * wit.direction
        if trajectory is not None:
            trajectory.append(p.copy())
    raise StalledAtCritical(
        f"point {index} did not reach radius {r_target} in {MAX_STEPS} steps",
        radius=float(np.linalg.norm(p - O)), critical_point=None, indices=[index])


def push_level(K, O, points, r_target, tol=DEFAULT_TOL, trajectories=None):
    """Move points of a common level outward to radius `r_target`, staying in `K`.

    A push is only defined while no level set between the start radius and
    `r_target` contains a critical point; crossing one raises
    :class:`StalledAtCritical` naming the blocking point and the inputs
    aimed nearest to it.

    Parameters
    ----------
    trajectories : list, optional
        If given, receives one list of visited positions per input point.
    """
    O = _check_dim(K, O)
    pts = [_check_dim(K, x).copy() for x in points]
    if not pts:
        return []
    eps = tol * K.diameter
    radii = np.array([np.linalg.norm(x - O) for x in pts])
    if np.ptp(radii) > max(eps, 1e-9):
        raise NonuniformRadius(f"input radii span [{radii.min()}, {radii.max()}]")
    r0 = float(radii.mean())
    if trajectories is not None:
        trajectories.extend([x.copy()] for x in pts)
    if abs(r_target - r0) <= eps:
        return pts
    if r_target < r0:
        raise BadRadius(f"target radius {r_target} is below the level radius {r0}")
    if r_target > search_cap(K, O) + eps:
        raise BadRadius(f"target radius {r_target} exceeds the maximum distance from O")

    for c in enumerate_critical_points(K, O, tol):
        if r0 - eps <= c.distance < r_target - eps:
            dirs = np.array([(x - O) / np.linalg.norm(x - O) for x in pts])
            aim = dirs @ ((c.location - O) / c.distance)
            nearest = np.flatnonzero(aim >= aim.max() - 1e-9).tolist()
            raise StalledAtCritical(
                f"critical point {c.location.tolist()} at radius {c.distance} "
                f"lies between {r0} and {r_target}",
                radius=c.distance, critical_point=c.location.copy(), indices=nearest)

    out = []
    for i, x in enumerate(pts):
        traj = trajectories[i] if trajectories is not None else None
        out.append(_push_point(K, O, x, float(r_target), tol, i, traj))
    return out


def write_trajectories_csv(path, O, trajectories):
    """Rows ``point, step, x1..xn, radius``."""
    O = np.asarray(O, dtype=float)
    n = O.shape[0]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["point", "step"] + [f"x{k + 1}" for k in range(n)] + ["radius"])
        for i, traj in enumerate(trajectories):
            for s, p in enumerate(traj):
                w.writerow([i, s] + [repr(float(c)) for c in p]
                           + [repr(float(np.linalg.norm(p - O)))])
