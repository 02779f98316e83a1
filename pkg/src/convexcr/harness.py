"""Random instances and verification campaigns for ``CR(O) >= LCD(O)``."""
from dataclasses import asdict, dataclass, field
import csv
import json
import math
import os

import numpy as np

from . import __version__
from .connectivity import (SamplingParams, connectivity_radius, event_radii,
                           level_components_exact, level_components_sampled,
                           sampling_slack)
from .criticality import angle_ratio_max, lcd
from .errors import BadDimension, ConvexCRError, DegenerateInput, InvalidInput
from .geometry import (DEFAULT_TOL, ConvexPolytope, as_vector, body_summary,
                       build_polytope, make_ball)

SEED_ENV = "CONVEXCR_SEED"
EXACT_MARGIN = 1e-6
MIN_FACET_ANGLE = 1e-6


def _rng(*key):
    return np.random.default_rng(np.random.SeedSequence([int(k) for k in key]))


def _adjacent_facet_angle_ok(K):
    n = K.dim
    sets = [set(f) for f in K.facet_vertex_ids]
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            if len(sets[i] & sets[j]) >= n - 1:
                c = float(np.clip(K.normals[i] @ K.normals[j], -1.0, 1.0))
                if math.acos(c) < MIN_FACET_ANGLE:
                    return False
    return True


def random_polytope(dim, npoints, seed, max_attempts=1000):
    """Hull of `npoints` seeded uniform points in the unit ball, redrawn until non-degenerate."""
    if dim not in (2, 3, 4):
        raise BadDimension(f"random polytopes support dimensions 2-4, got {dim}")
    if npoints < dim + 1:
        raise DegenerateInput(f"need at least {dim + 1} points")
    for attempt in range(max_attempts):
        rng = _rng(seed, dim, npoints, attempt)
        g = rng.standard_normal((npoints, dim))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        pts = g * rng.uniform(size=(npoints, 1)) ** (1.0 / dim)
        try:
            K = build_polytope(pts)
        except DegenerateInput:
            continue
        if len(K.vertices) >= dim + 1 and _adjacent_facet_angle_ok(K):
            return K
    raise DegenerateInput("could not draw a non-degenerate polytope")


def _simplex_measure(S):
    E = S[1:] - S[0]
    k = len(E)
    g = np.linalg.det(E @ E.T)
    return math.sqrt(max(g, 0.0)) / math.factorial(k)


def random_boundary_point(K, seed):
    """Uniform point on the boundary of `K` (facets weighted by measure)."""
    rng = _rng(seed, K.dim, 1)
    if not isinstance(K, ConvexPolytope):
        g = rng.standard_normal(K.dim)
        return K.center + K.radius * g / np.linalg.norm(g)
    simp = K.simplices
    w = np.array([_simplex_measure(K.vertices[s]) for s in simp])
    i = int(rng.choice(len(simp), p=w / w.sum()))
    bary = rng.dirichlet(np.ones(simp.shape[1]))
    return bary @ K.vertices[simp[i]]


# ---------------------------------------------------------------- pinned

TRIANGLE = [(0.0, 0.0), (4.0, 0.0), (1.0, 3.0)]


def pinned_instances():
    """Fixed regression instances:
    ``(instance_id, body, O)``."""
    square = build_polytope([(0, 0), (1, 0), (1, 1), (0, 1)])
    tri = build_polytope(TRIANGLE)
    prism = build_polytope([(x, y, z) for x, y in TRIANGLE for z in (0.0, 0.2)])
    return [
        ("pinned:square-corner", square, np.array([0.0, 0.0])),
        ("pinned:triangle-vertex", tri, np.array([0.0, 0.0])),
        ("pinned:triangle-side", tri, np.array([2.0, 0.0])),
        ("pinned:unit-disk", make_ball((0.0, 0.0), 1.0), np.array([-1.0, 0.0])),
        ("pinned:thin-prism", prism, np.array([0.0, 0.0, 0.0])),
    ]


# ---------------------------------------------------------------- campaign

@dataclass
class CampaignConfig:
    trials_2d: int = 100
    trials_3d: int = 0
    points_per_hull: int = 20
    seed: int = 0
    tol: float = DEFAULT_TOL
    resolution: float = 1e-4          # relative to body diameter
    sampling: SamplingParams = field(default_factory=SamplingParams)
    pinned: bool = True
    oracle_radii: int = 10            # dual-method comparisons per 2-d instance

    def __post_init__(self):
        if self.trials_2d < 0 or self.trials_3d < 0 or self.points_per_hull < 3:
            raise ValueError("trial counts must be non-negative and points_per_hull >= 3")
        if not self.resolution > 0:
            raise ValueError("resolution must be positive")

    @classmethod
    def from_env(cls, **kwargs):
        """Build a config, letting ``CONVEXCR_SEED`` override the seed."""
        env = os.environ.get(SEED_ENV)
        if env not in (None, ""):
            kwargs["seed"] = int(env)
        return cls(**kwargs)

    def to_json(self):
        doc = asdict(self)
        doc["sampling"] = self.sampling.to_json()
        return doc


def _separation_ok(crit_distances, r):
    return any(d <= r + EXACT_MARGIN for d in crit_distances)


def oracle_comparison(K, O, radii, params, tol=DEFAULT_TOL):
    """Exact vs sampled component counts at `radii` for a 2-d body.

    Returns a list of ``(radius, exact, sampled, near_event)`` where
    ``near_event`` tells whether the radius is within the resolution
    ``1e-4 * diameter`` of an event radius.
    """
    events = np.array(event_radii(K, O, tol))
    res = 1e-4 * K.diameter
    out = []
    for r in radii:
        e = level_components_exact(K, O, r, tol).component_count
        s = level_components_sampled(K, O, r, params).component_count
        near = bool(np.min(np.abs(events - r)) <= res) if len(events) else False
        out.append((float(r), e, s, near))
    return out


def analyze_instance(instance_id, K, O, cfg, rng=None):
    """Full record for one body and boundary point."""
    res = cfg.resolution * K.diameter
    method = "exact2d" if K.dim == 2 else "sampled"
    rec = {"instance_id": instance_id, "body": body_summary(K),
           "O": [float(c) for c in O], "method": method}
    L = lcd(K, O, cfg.tol)
    cr = connectivity_radius(K, O, res, cfg.sampling, method, cfg.tol)
    slack = 0.0 if method == "exact2d" else sampling_slack(K, L.value, cfg.sampling)
    allowance = EXACT_MARGIN if method == "exact2d" else res + slack
    margin = cr.value - L.value
    crit = [c.distance for c in L.all_points]
    rec.update({
        "lcd_value": L.value,
        "lcd_point": L.attaining_point.location.tolist(),
        "n_critical": len(L.all_points),
        "cr_value": cr.value,
        "cr_status": cr.status,
        "search_cap": cr.search_cap,
        "margin": margin,
        "allowance": allowance,
        "violation": bool(margin < -allowance),
        "angle_ratio": angle_ratio_max(L.all_points, O),
    })
    # the separation property is a statement about exact planar counts
    separation = []
    if method == "exact2d":
        separation = [r for r, c in cr.probes if c >= 2 and not _separation_ok(crit, r)]
    oracle = []
    if K.dim == 2 and cfg.oracle_radii and rng is not None:
        radii = rng.uniform(0.0, cr.search_cap, size=cfg.oracle_radii)
        radii = radii[radii > 1e-9 * K.diameter]
        oracle = oracle_comparison(K, O, radii, cfg.sampling, cfg.tol)
        separation += [r for r, e, _, _ in oracle if e >= 2 and not _separation_ok(crit, r)]
    rec["separation_failures"] = separation
    rec["oracle"] = {"evaluations": len(oracle),
                     "mismatches": sum(1 for _, e, s, _ in oracle if e != s),
                     "mismatches_off_event": sum(1 for _, e, s, near in oracle
                                                 if e != s and not near)}
    return rec


def _trial_bodies(cfg):
    if cfg.pinned:
        for k, (iid, K, O) in enumerate(pinned_instances()):
            yield iid, (lambda K=K, O=O: (K, O)), _rng(cfg.seed, 0, k)
    for dim, trials in ((2, cfg.trials_2d), (3, cfg.trials_3d)):
        for i in range(trials):
            body_seed, point_seed, extra = np.random.SeedSequence(
                [int(cfg.seed), dim, i]).generate_state(3)

            def make(dim=dim, body_seed=body_seed, point_seed=point_seed):
                K = random_polytope(dim, cfg.points_per_hull, int(body_seed))
                return K, random_boundary_point(K, int(point_seed))

            yield f"{dim}d:{i:04d}", make, _rng(extra)


def run_trial(item, cfg):
    iid, make, rng = item
    try:
        K, O = make()
        return analyze_instance(iid, K, O, cfg, rng)
    except ConvexCRError as exc:
        return {"instance_id": iid, "error": f"{type(exc).__name__}: {exc}"}


def verify_campaign(cfg):
    """Run every trial of `cfg` and aggregate the results into a report dict."""
    records = [run_trial(item, cfg) for item in _trial_bodies(cfg)]
    ok = [r for r in records if "error" not in r]
    evals = sum(r["oracle"]["evaluations"] for r in ok)
    mism = sum(r["oracle"]["mismatches"] for r in ok)
    aggregate = {
        "instances": len(records),
        "errors": len(records) - len(ok),
        "violations": sum(r["violation"] for r in ok),
        "min_margin": min((r["margin"] for r in ok), default=None),
        "min_lcd": min((r["lcd_value"] for r in ok), default=None),
        "angle_ratio_max": max((r["angle_ratio"] for r in ok), default=1.0),
        "separation_failures": sum(len(r["separation_failures"]) for r in ok),
        "oracle_evaluations": evals,
        "oracle_agreement_rate": (1.0 - mism / evals) if evals else None,
        "oracle_mismatches_off_event": sum(r["oracle"]["mismatches_off_event"] for r in ok),
    }
    return {"version": f"convexcr {__version__}", "config": cfg.to_json(),
            "aggregate": aggregate, "records": records}


def report_is_clean(report):
    a = report["aggregate"]
    return (a["violations"] == 0 and a["separation_failures"] == 0
            and a["angle_ratio_max"] <= 2.0 + 1e-9)


def dumps_report(report):
    return json.dumps(report, sort_keys=True, indent=1)


def write_report(report, path, csv_path=None):
    with open(path, "w") as fh:
        fh.write(dumps_report(report))
        fh.write("\n")
    if csv_path:
        write_report_csv(report, csv_path)


def write_report_csv(report, path):
    """Rows ``instance_id, lcd, cr, margin``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["instance_id", "lcd", "cr", "margin"])
        for r in report["records"]:
            if "error" in r:
                continue
            w.writerow([r["instance_id"], repr(r["lcd_value"]), repr(r["cr_value"]),
                        repr(r["margin"])])


def parse_point(text, dim=None):
    """``"x,y[,z]"`` to a vector."""
    try:
        coords = [float(c) for c in text.split(",")]
    except ValueError:
        raise InvalidInput(f"cannot parse point {text!r}") from None
    return as_vector(coords, dim)
