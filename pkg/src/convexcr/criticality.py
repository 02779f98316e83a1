"""Critical points of the distance from a boundary point, and the least critical distance.

A point ``P`` of ``K`` other than ``O`` is critical when ``<O - P, X - P> >= 0``
for every ``X`` in ``K``. Because the inequality is linear in ``X`` its
minimum over ``K`` is ``<P - O, P> - h_K(P - O)`` with ``h_K`` the support
function, which is what :func:`criticality_slack` evaluates.
"""
from dataclasses import dataclass
import math

import numpy as np

from .errors import (NoCriticalPoints, NotOnBoundary, ONotOnBoundary,
                     PointCoincidesWithO)
from .geometry import (DEFAULT_TOL, Ball, Face, _check_dim, all_faces, contains,
                       on_boundary, project_affine, support)

ANTIPODE = "ball-antipode"


@dataclass(frozen=True, eq=False)
class CriticalPoint:
    location: np.ndarray
    distance: float
    carrier: object      # Face, or ANTIPODE for balls
    slack: float

    @property
    def carrier_dim(self):
        return self.carrier.dim if isinstance(self.carrier, Face) else None

    def to_json(self):
        return {
            "location": self.location.tolist(),
            "distance": self.distance,
            "carrier": (list(self.carrier.vertex_ids) if isinstance(self.carrier, Face)
                        else self.carrier),
            "carrier_dim": self.carrier_dim,
            "slack": self.slack,
        }


@dataclass(frozen=True, eq=False)
class LcdResult:
    value: float
    attaining_point: CriticalPoint
    all_points: list

    def to_json(self):
        return {"value": self.value,
                "attaining_point": self.attaining_point.location.tolist()}


def criticality_slack(K, O, P):
    """``min over X in K of <O - P, X - P>``."""
    u = P - O
    h, _ = support(K, u)
    return float(u @ P - h)


def _slack_threshold(K, O, P, tol):
    return -tol * K.diameter * max(float(np.linalg.norm(P - O)), 1.0)


def is_critical(K, O, P, tol=DEFAULT_TOL):
    """Whether `P` is an `O`-critical point of `K`.

    Raises
    ------
    PointCoincidesWithO
        ``|P - O|`` is within tolerance of zero.
    NotOnBoundary
        `O` or `P` is not a boundary point of `K`.
    """
    O = _check_dim(K, O)
    P = _check_dim(K, P)
    if np.linalg.norm(P - O) <= tol * K.diameter:
        raise PointCoincidesWithO("P must differ from O")
    if not on_boundary(K, O, tol):
        raise NotOnBoundary(f"O={O.tolist()} is not on the boundary")
    if not on_boundary(K, P, tol):
        raise NotOnBoundary(f"P={P.tolist()} is not on the boundary")
    return criticality_slack(K, O, P) >= _slack_threshold(K, O, P, tol)


def face_feet(K, O, tol=DEFAULT_TOL):
    """Feet of perpendiculars from `O` to every face whose affine hull misses `O`.

    Only feet lying inside their face are returned, as ``(face, foot)`` pairs
    ordered by face dimension. Every critical point of a polytope is one of
    these feet, namely the foot on the smallest face containing it.
    """
    out = []
    for F in all_faces(K):
        foot, through_O = project_affine(F, O, tol)
        if through_O or not contains(K, foot, tol):
            continue
        out.append((F, foot))
    return out


def _require_boundary(K, O, tol):
    O = _check_dim(K, O)
    if not on_boundary(K, O, tol):
        raise ONotOnBoundary(f"O={O.tolist()} is not on the boundary of K")
    return O


def enumerate_critical_points(K, O, tol=DEFAULT_TOL):
    """All `O`-critical points of `K`, nearest first.

    Balls have exactly one, the antipode of `O`. For polytopes each face
    contributes at most its foot point; coincident candidates keep the
    lowest-dimensional carrier.
    """
    O = _require_boundary(K, O, tol)
    if isinstance(K, Ball):
        d = O - K.center
        P = K.center - d * (K.radius / np.linalg.norm(d))
        return [CriticalPoint(P, float(np.linalg.norm(P - O)), ANTIPODE,
                              criticality_slack(K, O, P))]

    merge = 10 * tol * K.diameter
    found = []
    for F, foot in face_feet(K, O, tol):
        slack = criticality_slack(K, O, foot)
        if slack < _slack_threshold(K, O, foot, tol):
            continue
        if any(np.linalg.norm(c.location - foot) <= merge for c in found):
            continue
        found.append(CriticalPoint(foot, float(np.linalg.norm(foot - O)), F, slack))
    found.sort(key=lambda c: (c.distance, tuple(c.location)))
    return found


def lcd(K, O, tol=DEFAULT_TOL):
    """Least critical distance from `O`; always positive for a compact body."""
    pts = enumerate_critical_points(K, O, tol)
    if not pts:
        raise NoCriticalPoints("compact body without critical points; tolerance too tight?")
    return LcdResult(pts[0].distance, pts[0], pts)


def angle_ratio_max(points, O, max_angle=math.pi / 3 - 1e-9):
    """Largest distance ratio over pairs of critical points seen from `O` at angle <= `max_angle`.

    Returns 1.0 when no such pair exists.
    """
    if len(points) < 2:
        return 1.0
    locs = np.array([p.location for p in points]) - O
    d = np.linalg.norm(locs, axis=1)
    unit = locs / d[:, None]
    cos = np.clip(unit @ unit.T, -1.0, 1.0)
    i, j = np.triu_indices(len(points), k=1)
    close = np.arccos(cos[i, j]) <= max_angle
    if not np.any(close):
        return 1.0
    a, b = d[i[close]], d[j[close]]
    return float(np.max(np.maximum(a, b) / np.minimum(a, b)))
