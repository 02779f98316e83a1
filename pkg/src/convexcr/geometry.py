"""Convex polytopes and balls: hull construction, face lattice, support function.

All predicates use a relative tolerance ``tol`` scaled by the body diameter.
"""
from dataclasses import dataclass, field
from functools import cached_property
import math

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .errors import (BadDimension, DegenerateInput, DimensionMismatch,
                     InvalidInput, ZeroDirection)
from . import kernels

DEFAULT_TOL = 1e-9
MAX_POLYTOPE_DIM = 4


def as_vector(x, dim=None):
    """Coerce `x` to a finite 1-d float array, optionally checking its length."""
    v = np.asarray(x, dtype=np.float64).reshape(-1)
    if not np.all(np.isfinite(v)):
        raise InvalidInput(f"non-finite coordinates: {x!r}")
    if dim is not None and v.shape[0] != dim:
        raise DimensionMismatch(f"expected dimension {dim}, got {v.shape[0]}")
    return v


def _lexsort_rows(a):
    return np.lexsort(a.T[::-1])


def _affine_basis(points, tol):
    """Orthonormal basis (columns) of the direction space of aff(points)."""
    if len(points) == 1:
        return np.zeros((points.shape[1], 0))
    diffs = points[1:] - points[0]
    _, s, vt = np.linalg.svd(diffs, full_matrices=False)
    scale = max(s[0], 1.0) if len(s) else 1.0
    rank = int(np.sum(s > tol * scale))
    return vt[:rank].T.copy()


@dataclass(frozen=True, eq=False)
class Face:
    """A face of a polytope, given by its vertex ids and an affine frame."""
    body: "ConvexPolytope" = field(repr=False)
    dim: int
    vertex_ids: tuple
    affine_basis: np.ndarray = field(repr=False)

    @property
    def points(self):
        return self.body.vertices[list(self.vertex_ids)]

    @property
    def origin(self):
        return self.body.vertices[self.vertex_ids[0]]


@dataclass(frozen=True, eq=False)
class ConvexPolytope:
    """Full-dimensional compact polytope in V- and H-representation.

    Attributes
    ----------
    vertices : ndarray, shape (m, n)
        Extreme points in lexicographic order.
    normals, offsets : ndarray
        Outward unit facet normals and offsets, ``normals @ x <= offsets``.
    facet_vertex_ids : tuple of tuple of int
        Vertices tight at each facet.
    simplices : ndarray of int
        Boundary triangulation (qhull), used to sample facets by measure.
    """
    vertices: np.ndarray
    normals: np.ndarray
    offsets: np.ndarray
    facet_vertex_ids: tuple
    simplices: np.ndarray = field(repr=False)
    diameter: float
    tol: float = DEFAULT_TOL

    kind = "polytope"

    @property
    def dim(self):
        return self.vertices.shape[1]

    @cached_property
    def ring(self):
        """Vertex ids in counter-clockwise order (2-d only)."""
        if self.dim != 2:
            raise BadDimension("ring is defined for polygons only")
        c = self.vertices.mean(axis=0)
        ang = np.arctan2(self.vertices[:, 1] - c[1], self.vertices[:, 0] - c[0])
        return tuple(int(i) for i in np.argsort(ang, kind="stable"))

    @cached_property
    def _lattice(self):
        facets = [frozenset(f) for f in self.facet_vertex_ids]
        seen = set(facets)
        frontier = set(facets)
        while frontier:
            new = set()
            for a in frontier:
                for b in facets:
                    c = a & b
                    if c and c != a and c not in seen:
                        new.add(c)
            seen |= new
            frontier = new
        eps = self.tol * self.diameter
        by_dim = {d: [] for d in range(self.dim)}
        for ids in seen:
            ids = tuple(sorted(ids))
            basis = _affine_basis(self.vertices[list(ids)], eps)
            d = basis.shape[1]
            if d < self.dim:
                by_dim[d].append(Face(self, d, ids, basis))
        for d in by_dim:
            by_dim[d].sort(key=lambda f: f.vertex_ids)
        return by_dim

    def to_json(self):
        return {"dimension": self.dim, "vertices": self.vertices.tolist()}


@dataclass(frozen=True, eq=False)
class Ball:
    center: np.ndarray
    radius: float
    tol: float = DEFAULT_TOL

    kind = "ball"

    def __post_init__(self):
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise InvalidInput(f"ball radius must be positive and finite, got {self.radius}")

    @property
    def dim(self):
        return self.center.shape[0]

    @property
    def diameter(self):
        return 2.0 * self.radius

    def to_json(self):
        return {"dimension": self.dim, "center": self.center.tolist(),
                "radius": self.radius}


def make_ball(center, radius, tol=DEFAULT_TOL):
    c = as_vector(center)
    if c.shape[0] < 2:
        raise BadDimension("bodies must have dimension at least 2")
    c.setflags(write=False)
    return Ball(c, float(radius), tol)


def _hull(points):
    try:
        return ConvexHull(points)
    except QhullError as exc:
        raise DegenerateInput(f"qhull failed: {exc}".splitlines()[0]) from None


def build_polytope(points, tol=DEFAULT_TOL):
    """Convex hull of `points` with irredundant vertices and merged facets.

    Raises
    ------
    DimensionMismatch
        Points of differing lengths.
    BadDimension
        Ambient dimension outside ``[2, 4]``.
    DegenerateInput
        Fewer than n+1 distinct points, or the points are not full-dimensional.
    """
    try:
        pts = np.array([as_vector(p) for p in points], dtype=np.float64)
    except ValueError:
        raise DimensionMismatch("points have differing dimensions") from None
    if pts.ndim != 2 or len(pts) == 0:
        raise DegenerateInput("no points")
    n = pts.shape[1]
    if n < 2 or n > MAX_POLYTOPE_DIM:
        raise BadDimension(f"polytope dimension must be in [2, {MAX_POLYTOPE_DIM}], got {n}")
    pts = np.unique(pts, axis=0)
    if len(pts) < n + 1:
        raise DegenerateInput(f"need at least {n + 1} distinct points, got {len(pts)}")
    spread = np.ptp(pts, axis=0).max()
    centered = pts - pts.mean(axis=0)
    s = np.linalg.svd(centered, compute_uv=False)
    rank = int(np.sum(s > tol * max(spread, 1e-300) * math.sqrt(len(pts))))
    if rank < n:
        raise DegenerateInput(f"affine hull has dimension {rank} < {n}")

    cand = pts[_hull(pts).vertices]
    # qhull may keep points lying inside a facet; drop them and rebuild
    for _ in range(5):
        normals, offsets, tight = _merged_facets(_hull(cand), cand, tol)
        keep = [i for i in range(len(cand))
                if np.linalg.matrix_rank(normals[tight[:, i]], tol=1e-7) == n]
        if len(keep) == len(cand):
            break
        cand = cand[keep]
        if len(cand) < n + 1:
            raise DegenerateInput("too few extreme points")

    order = _lexsort_rows(cand)
    verts = cand[order]
    hull = _hull(verts)
    normals, offsets, tight = _merged_facets(hull, verts, tol)
    diam = float(np.max(np.linalg.norm(verts[:, None, :] - verts[None, :, :], axis=2)))
    forder = np.lexsort((offsets,) + tuple(normals.T[::-1]))
    normals, offsets, tight = normals[forder], offsets[forder], tight[forder]
    facet_ids = tuple(tuple(int(i) for i in np.flatnonzero(row)) for row in tight)
    for a in (verts, normals, offsets):
        a.setflags(write=False)
    simplices = np.sort(hull.simplices, axis=1)
    simplices = simplices[_lexsort_rows(simplices)]
    simplices.setflags(write=False)
    return ConvexPolytope(verts, normals, offsets, facet_ids, simplices, diam, tol)


def _merged_facets(hull, verts, tol):
    """Unique facet planes of a triangulated qhull output, with incidences."""
    eq = hull.equations
    spread = float(np.ptp(verts, axis=0).max())
    eps = tol * max(spread, 1e-300)
    normals, offsets = [], []
    for row in eq:
        nrm, off = row[:-1], -row[-1]
        k = np.linalg.norm(nrm)
        nrm, off = nrm / k, off / k
        for a, b in zip(normals, offsets):
            if np.linalg.norm(a - nrm) < 1e-9 and abs(b - off) < 10 * eps:
                break
        else:
            normals.append(nrm)
            offsets.append(off)
    normals = np.array(normals) + 0.0
    offsets = np.array(offsets) + 0.0
    tight = np.abs(verts @ normals.T - offsets).T <= 10 * eps
    return normals, offsets, tight


def faces(K, d):
    """All `d`-dimensional faces of polytope `K` in lexicographic order."""
    if not isinstance(K, ConvexPolytope):
        raise InvalidInput("faces are defined for polytopes only")
    if not 0 <= d <= K.dim - 1:
        raise BadDimension(f"face dimension must be in [0, {K.dim - 1}], got {d}")
    return list(K._lattice[d])


def all_faces(K):
    """Every proper face of `K`, ordered by dimension then vertex ids."""
    return [f for d in range(K.dim) for f in faces(K, d)]


def _check_dim(K, x):
    return as_vector(x, K.dim)


def contains(K, x, tol=DEFAULT_TOL):
    """Membership of `x` in `K` up to ``tol * diameter``."""
    x = _check_dim(K, x)
    eps = tol * K.diameter
    if isinstance(K, Ball):
        return bool(np.linalg.norm(x - K.center) <= K.radius + eps)
    return bool(np.all(K.normals @ x <= K.offsets + eps))


def contains_many(K, points, tol=DEFAULT_TOL):
    """Vectorized :func:`contains` over the rows of `points`."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, K.dim)
    eps = tol * K.diameter
    if isinstance(K, Ball):
        return np.linalg.norm(pts - K.center, axis=1) <= K.radius + eps
    return kernels.halfspace_mask(pts, K.normals, K.offsets, eps)


def on_boundary(K, x, tol=DEFAULT_TOL):
    """True iff `x` lies in `K` and on its boundary, within ``tol * diameter``."""
    x = _check_dim(K, x)
    eps = tol * K.diameter
    if isinstance(K, Ball):
        return bool(abs(np.linalg.norm(x - K.center) - K.radius) <= eps)
    s = K.normals @ x - K.offsets
    return bool(np.all(s <= eps) and np.max(s) >= -eps)


def support(K, u):
    """Support value ``max <u, X>`` over `K` and a maximizer.

    For polytopes the maximizer is a vertex; near-ties (within the body
    tolerance) resolve to the lexicographically smallest vertex.
    """
    u = _check_dim(K, u)
    nu = np.linalg.norm(u)
    if nu == 0.0:
        raise ZeroDirection("support direction must be nonzero")
    if isinstance(K, Ball):
        return float(u @ K.center + K.radius * nu), K.center + K.radius * u / nu
    vals = K.vertices @ u
    best = vals.max()
    i = int(np.flatnonzero(vals >= best - K.tol * K.diameter * nu)[0])
    return float(best), K.vertices[i].copy()


def project_affine(F, O, tol=DEFAULT_TOL):
    """Orthogonal projection of `O` onto the affine hull of face `F`.

    Returns
    -------
    foot : ndarray
    contains_O : bool
        Whether the affine hull passes through `O` (within ``tol * diameter``).
    """
    O = _check_dim(F.body, O)
    o = F.origin
    B = F.affine_basis
    foot = o + B @ (B.T @ (O - o))
    return foot, bool(np.linalg.norm(foot - O) <= tol * F.body.diameter)


def search_cap(K, O):
    """Maximum distance from `O` to a point of `K`."""
    O = _check_dim(K, O)
    if isinstance(K, Ball):
        return float(np.linalg.norm(K.center - O) + K.radius)
    return float(np.max(np.linalg.norm(K.vertices - O, axis=1)))


def body_from_json(doc, tol=DEFAULT_TOL):
    """Polytope from ``{"dimension", "vertices"}`` or ball from ``{"dimension", "center", "radius"}``."""
    if not isinstance(doc, dict) or "dimension" not in doc:
        raise InvalidInput("body JSON must be an object with a 'dimension' field")
    n = int(doc["dimension"])
    if "vertices" in doc:
        pts = [as_vector(p, n) for p in doc["vertices"]]
        return build_polytope(pts, tol)
    if "center" in doc and "radius" in doc:
        return make_ball(as_vector(doc["center"], n), float(doc["radius"]), tol)
    raise InvalidInput("body JSON needs 'vertices' or 'center' and 'radius'")


def body_summary(K):
    if isinstance(K, Ball):
        return {"type": "ball", "dim": K.dim, "center": K.center.tolist(),
                "radius": K.radius}
    return {"type": "polytope", "dim": K.dim, "n_vertices": int(len(K.vertices)),
            "n_facets": int(len(K.offsets)), "diameter": K.diameter}
