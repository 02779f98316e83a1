"""Connected components of level sets ``S_r(O) ∩ K`` and the connectivity radius.

Two independent routes count components: :func:`level_arcs_2d` clips the
circle against a polygon or disk exactly, and :func:`level_components_sampled`
samples the sphere and joins nearby samples with union-find. The
connectivity radius search probes both between the radii where the level
set can change combinatorially.
"""
from dataclasses import dataclass, field
import csv
import math

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from . import kernels
from .criticality import enumerate_critical_points, face_feet
from .errors import BadDimension, BadRadius, DimensionMismatch, ResolutionTooCoarse
from .geometry import DEFAULT_TOL, Ball, _check_dim, contains, contains_many, search_cap

TWO_PI = 2.0 * math.pi

# nearest-neighbour spacing constants: spacing ~ r * c_n * N^(-1/(n-1))
SPACING_CONSTANTS = {2: TWO_PI, 3: 2.0, 4: 1.6}
DEFAULT_SAMPLES = {2: 16384, 3: 4096, 4: 16384}


@dataclass(frozen=True)
class ArcSet:
    """Angular intervals of the circle of `radius` about ``O`` that lie in ``K``.

    Each arc is ``(start, end)`` with ``start`` in ``[0, 2π)`` and
    ``end >= start``; ``end`` may exceed ``2π`` when the arc wraps.
    """
    radius: float
    arcs: tuple

    @property
    def component_count(self):
        return len(self.arcs)

    @property
    def full_circle(self):
        return len(self.arcs) == 1 and self.arcs[0][1] - self.arcs[0][0] >= TWO_PI - 1e-12


@dataclass(frozen=True)
class SamplingParams:
    """Sphere sampling for the sampled oracle.

    ``samples_per_sphere=None`` picks :data:`DEFAULT_SAMPLES` for the
    ambient dimension.
    """
    samples_per_sphere: int = None
    adjacency_factor: float = 2.5
    seed: int = 0

    def __post_init__(self):
        if self.samples_per_sphere is not None and self.samples_per_sphere < 64:
            raise ValueError("samples_per_sphere must be at least 64")
        if not self.adjacency_factor > 1:
            raise ValueError("adjacency_factor must exceed 1")

    def samples_for(self, dim):
        if self.samples_per_sphere is not None:
            return int(self.samples_per_sphere)
        return DEFAULT_SAMPLES.get(dim, 16384)

    def spacing(self, dim, r):
        """Expected nearest-neighbour spacing of samples on a sphere of radius `r`."""
        if dim not in SPACING_CONSTANTS:
            raise BadDimension(f"sampled oracle supports dimensions 2-4, got {dim}")
        return r * SPACING_CONSTANTS[dim] * self.samples_for(dim) ** (-1.0 / (dim - 1))

    def to_json(self):
        return {"samples_per_sphere": self.samples_per_sphere,
                "adjacency_factor": self.adjacency_factor, "seed": self.seed}


@dataclass(frozen=True)
class ComponentReport:
    radius: float
    method: str
    component_count: int
    representative_points: list = field(repr=False)
    sample_count_in_K: int = None

    def to_json(self):
        doc = {"radius": self.radius, "method": self.method,
               "component_count": self.component_count,
               "representative_points": [np.asarray(p).tolist()
                                         for p in self.representative_points]}
        if self.sample_count_in_K is not None:
            doc["sample_count_in_K"] = self.sample_count_in_K
        return doc


@dataclass(frozen=True)
class CrEstimate:
    """Connectivity radius verdict.

    ``probes`` lists every ``(radius, component_count)`` evaluated during
    the search, in evaluation order.
    """
    value: float
    status: str                 # "disconnects_at" | "never_disconnects_within_cap"
    first_disconnection_radius: float
    search_cap: float
    resolution: float
    method: str
    probes: tuple = field(repr=False, default=())

    def to_json(self):
        return {"value": self.value, "status": self.status,
                "first_disconnection_radius": self.first_disconnection_radius,
                "search_cap": self.search_cap, "resolution": self.resolution,
                "method": self.method}


def _check_radius(r):
    if not (math.isfinite(r) and r > 0):
        raise BadRadius(f"radius must be positive, got {r}")
    return float(r)


# ---------------------------------------------------------------- exact 2-d

def _circle_segment_angles(O, r, a, b):
    """Angles (about `O`) where the circle of radius `r` meets segment [a, b]."""
    d = b - a
    w = a - O
    A = d @ d
    B = 2.0 * (w @ d)
    C = w @ w - r * r
    disc = B * B - 4.0 * A * C
    if disc < -1e-12 * max(A * r * r, 1e-300):
        return []
    sq = math.sqrt(max(disc, 0.0))
    out = []
    eps = 1e-12
    for t in ((-B - sq) / (2 * A), (-B + sq) / (2 * A)):
        if -eps <= t <= 1 + eps:
            p = a + min(max(t, 0.0), 1.0) * d - O
            out.append(math.atan2(p[1], p[0]) % TWO_PI)
    return out


def _point_at(O, r, theta):
    return O + r * np.array([math.cos(theta), math.sin(theta)])


def _arcs_from_angles(K, O, r, angles, tol):
    """Classify the circle between consecutive crossing angles and merge runs."""
    uniq = []
    for a in sorted(angles):
        if not uniq or a - uniq[-1] > 1e-12:
            uniq.append(a)
    if len(uniq) > 1 and uniq[0] + TWO_PI - uniq[-1] <= 1e-12:
        uniq.pop()
    if not uniq:
        if contains(K, _point_at(O, r, 0.0), tol):
            return [(0.0, TWO_PI)]
        return []
    m = len(uniq)
    gap = [((uniq[(k + 1) % m] - uniq[k]) % TWO_PI) or TWO_PI for k in range(m)]
    inside = [contains(K, _point_at(O, r, uniq[k] + 0.5 * gap[k]), tol) for k in range(m)]
    if all(inside):
        return [(0.0, TWO_PI)]
    s = next(k for k in range(m) if not inside[k - 1])
    arcs = []
    for j in range(m):
        k = (s + j) % m
        if inside[k]:
            if not inside[k - 1]:
                start, length = uniq[k], 0.0
            length += gap[k]
            if not inside[(k + 1) % m]:
                arcs.append((start, start + length))
        elif not inside[k - 1] and contains(K, _point_at(O, r, uniq[k]), tol):
            # boundary contact with empty gaps on both sides
            arcs.append((uniq[k], uniq[k]))
    arcs.sort()
    return arcs


def level_arcs_2d(K, O, r, tol=DEFAULT_TOL):
    """Exact decomposition of ``S_r(O) ∩ K`` into circular arcs for a 2-d body."""
    if K.dim != 2:
        raise DimensionMismatch("level_arcs_2d needs a 2-d body")
    O = _check_dim(K, O)
    r = _check_radius(r)
    if isinstance(K, Ball):
        return ArcSet(r, tuple(_disk_arcs(K, O, r, tol)))
    angles = []
    ring = K.ring
    V = K.vertices
    for i in range(len(ring)):
        a, b = V[ring[i]], V[ring[(i + 1) % len(ring)]]
        angles.extend(_circle_segment_angles(O, r, a, b))
    return ArcSet(r, tuple(_arcs_from_angles(K, O, r, angles, tol)))


def _disk_arcs(K, O, r, tol):
    w = K.center - O
    d = float(np.linalg.norm(w))
    R = K.radius
    eps = tol * K.diameter
    if d + r <= R + eps:
        return [(0.0, TWO_PI)]
    if r > d + R + eps or d > r + R + eps:
        return []
    cos_a = (d * d + r * r - R * R) / (2.0 * d * r)
    alpha = math.acos(min(1.0, max(-1.0, cos_a)))
    phi = math.atan2(w[1], w[0])
    s = (phi - alpha) % TWO_PI
    return [(s, s + 2.0 * alpha)]


def arc_midpoints(K, O, arcset):
    O = _check_dim(K, O)
    return [_point_at(O, arcset.radius, 0.5 * (a0 + a1)) for a0, a1 in arcset.arcs]


def sample_arcs(O, arcset, n):
    """`n` points spread over the arcs in proportion to their lengths, endpoints included."""
    lengths = np.array([a1 - a0 for a0, a1 in arcset.arcs])
    if not len(lengths):
        return np.empty((0, 2))
    total = lengths.sum()
    counts = np.maximum(1, np.round(n * lengths / total).astype(int)) if total > 0 \
        else np.ones(len(lengths), dtype=int)
    counts[np.argmax(counts)] += n - counts.sum()
    pts = []
    for (a0, a1), c in zip(arcset.arcs, counts):
        th = np.linspace(a0, a1, max(int(c), 1))
        pts.append(O + arcset.radius * np.column_stack([np.cos(th), np.sin(th)]))
    return np.vstack(pts)


# ---------------------------------------------------------------- sampled n-d

def _random_rotation(dim, rng):
    q, rmat = np.linalg.qr(rng.standard_normal((dim, dim)))
    return q * np.sign(np.diag(rmat))


def sphere_directions(dim, n, seed):
    """Deterministic near-uniform unit vectors.

    2-d: equally spaced angles with a seeded phase. 3-d: Fibonacci spiral
    under a seeded rotation. Otherwise seeded normalized Gaussians.
    """
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), dim, n]))
    if dim == 2:
        th = rng.uniform(0.0, TWO_PI / n) + TWO_PI * np.arange(n) / n
        return np.column_stack([np.cos(th), np.sin(th)])
    if dim == 3:
        golden = (1.0 + math.sqrt(5.0)) / 2.0
        i = np.arange(n) + 0.5
        z = 1.0 - 2.0 * i / n
        rho = np.sqrt(1.0 - z * z)
        phi = TWO_PI * i / golden
        dirs = np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])
        return dirs @ _random_rotation(3, rng).T
    g = rng.standard_normal((n, dim))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def sampled_level_points(K, O, r, params=None):
    """Sphere samples of radius `r` about `O` that fall in `K`."""
    params = params or SamplingParams()
    O = _check_dim(K, O)
    dirs = sphere_directions(K.dim, params.samples_for(K.dim), params.seed)
    pts = O + r * dirs
    return pts[contains_many(K, pts, K.tol)]


CERTIFY_FACTOR = 2.0
CERTIFY_CHECKS = 8


def _certified_merge(K, O, r, kept, labels, reach):
    """Join components through sample pairs whose connecting great-circle arc lies in `K`.

    Such an arc is a path inside the level set, so a merge is never wrong; it
    repairs samples cut off in thin corners of the level region.
    """
    pairs = cKDTree(kept).query_pairs(reach, output_type="ndarray")
    pairs = pairs[labels[pairs[:, 0]] != labels[pairs[:, 1]]]
    if not len(pairs):
        return labels, int(labels.max()) + 1
    a = (kept[pairs[:, 0]] - O) / r
    b = (kept[pairs[:, 1]] - O) / r
    t = np.arange(1, CERTIFY_CHECKS + 1) / (CERTIFY_CHECKS + 1)
    mid = a[:, None, :] * (1.0 - t)[None, :, None] + b[:, None, :] * t[None, :, None]
    mid /= np.linalg.norm(mid, axis=2, keepdims=True)
    ok = contains_many(K, (O + r * mid).reshape(-1, K.dim), K.tol).reshape(len(pairs), -1)
    good = pairs[ok.all(axis=1)]
    if not len(good):
        return labels, int(labels.max()) + 1
    m = int(labels.max()) + 1
    graph = coo_matrix((np.ones(len(good)), (labels[good[:, 0]], labels[good[:, 1]])),
                       shape=(m, m))
    _, merged = connected_components(graph, directed=False)
    _, first = np.unique(merged[labels], return_index=True)
    order = np.argsort(first, kind="stable")
    rank = np.empty(len(order), dtype=np.int64)
    rank[order] = np.arange(len(order))
    new = rank[np.unique(merged[labels], return_inverse=True)[1]]
    return new, int(len(order))


def level_components_sampled(K, O, r, params=None):
    """Component count of ``S_r(O) ∩ K`` from a union-find over sphere samples."""
    params = params or SamplingParams()
    r = _check_radius(r)
    if K.dim < 2:
        raise BadDimension("bodies must have dimension at least 2")
    kept = sampled_level_points(K, O, r, params)
    threshold = params.adjacency_factor * params.spacing(K.dim, r)
    labels, count = kernels.label_components(kept, threshold)
    if count >= 2:
        labels, count = _certified_merge(K, O, r, kept, labels, CERTIFY_FACTOR * threshold)
    reps = []
    if count:
        _, first = np.unique(labels, return_index=True)
        reps = [kept[i] for i in first]
    return ComponentReport(r, "sampled", count, reps, int(len(kept)))


def level_components_exact(K, O, r, tol=DEFAULT_TOL):
    arcs = level_arcs_2d(K, O, r, tol)
    return ComponentReport(arcs.radius, "exact2d", arcs.component_count,
                           arc_midpoints(K, O, arcs))


def level_components(K, O, r, method=None, params=None, tol=DEFAULT_TOL):
    """Dispatch to the exact 2-d route or the sampled route."""
    method = method or ("exact2d" if K.dim == 2 else "sampled")
    if method == "exact2d":
        return level_components_exact(K, O, r, tol)
    if method == "sampled":
        return level_components_sampled(K, O, r, params)
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------- CR search

def event_radii(K, O, tol=DEFAULT_TOL):
    """Radii where the combinatorics of the level set can change, ascending.

    Vertex distances, distances to feet on faces (critical ones included),
    and the search cap.
    """
    O = _check_dim(K, O)
    cap = search_cap(K, O)
    radii = [cap]
    if isinstance(K, Ball):
        radii.extend(c.distance for c in enumerate_critical_points(K, O, tol))
    else:
        radii.extend(np.linalg.norm(K.vertices - O, axis=1).tolist())
        radii.extend(float(np.linalg.norm(foot - O)) for _, foot in face_feet(K, O, tol))
    eps = tol * K.diameter
    out = []
    for x in sorted(radii):
        if x <= eps or x > cap + eps:
            continue
        if out and x - out[-1] <= eps:
            continue
        out.append(min(x, cap))
    return out


def sampling_slack(K, r, params=None):
    """Allowance on CR - LCD margins for the sampled oracle: three sample spacings at `r`."""
    params = params or SamplingParams()
    return 3.0 * params.spacing(K.dim, r)


def connectivity_radius(K, O, resolution=None, params=None, method=None, tol=DEFAULT_TOL):
    """Estimate the supremum of radii below which every level set is connected.

    Component counts are constant between consecutive event radii, so the
    search probes each gap (and, for the exact method, each event ±
    `resolution`), brackets the first disconnected probe, bisects the
    bracket to `resolution` and snaps to the event radius inside it.

    Parameters
    ----------
    resolution : float, optional
        Absolute radius resolution; defaults to ``1e-4 * diameter``.
    method : {"exact2d", "sampled"}, optional
        Defaults to exact in 2-d and sampled otherwise.
    """
    O = _check_dim(K, O)
    method = method or ("exact2d" if K.dim == 2 else "sampled")
    if method == "exact2d" and K.dim != 2:
        raise DimensionMismatch("exact2d needs a 2-d body")
    cap = search_cap(K, O)
    if resolution is None:
        resolution = 1e-4 * K.diameter
    resolution = float(resolution)
    if not resolution > 0:
        raise BadRadius("resolution must be positive")
    if resolution > cap / 100.0:
        raise ResolutionTooCoarse(f"resolution {resolution} exceeds cap/100 = {cap / 100}")
    params = params or SamplingParams()

    probes = []
    cache = {}

    def count(r):
        if r not in cache:
            cache[r] = level_components(K, O, r, method, params, tol).component_count
            probes.append((r, cache[r]))
        return cache[r]

    events = event_radii(K, O, tol)
    bounds = [0.0] + events
    candidates = []
    for k in range(len(bounds) - 1):
        lo, hi = bounds[k], bounds[k + 1]
        if k > 0 and method == "exact2d":
            candidates.append(lo + resolution)
        candidates.append(0.5 * (lo + hi))
        if method == "exact2d":
            candidates.append(hi - resolution)
    candidates = sorted(c for c in set(candidates) if 0.0 < c < cap)

    prev = None
    for c in candidates:
        if count(c) >= 2:
            lo, hi = (prev if prev is not None else 0.0), c
            while hi - lo > resolution:
                mid = 0.5 * (lo + hi)
                if count(mid) >= 2:
                    hi = mid
                else:
                    lo = mid
            inside = [e for e in events if lo - resolution <= e <= hi]
            value = inside[-1] if inside else lo
            return CrEstimate(float(value), "disconnects_at", float(value), cap,
                              resolution, method, tuple(probes))
        prev = c
    return CrEstimate(cap, "never_disconnects_within_cap", None, cap, resolution,
                      method, tuple(probes))


# ---------------------------------------------------------------- CSV

def write_levels_csv(path, reports):
    """Rows ``radius, method, component_count`` for plotting."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["radius", "method", "component_count"])
        for rep in reports:
            w.writerow([repr(float(rep.radius)), rep.method, rep.component_count])
