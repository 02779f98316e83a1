"""convexcr: critical distances and level-set connectivity of convex bodies.

Exit codes: 0 success, 1 invariant violation in a campaign, 2 invalid input.
"""
import argparse
import json
import sys

import numpy as np

from .connectivity import (SamplingParams, connectivity_radius, level_components,
                           sample_arcs, level_arcs_2d, sampled_level_points,
                           write_levels_csv)
from .criticality import lcd
from .errors import InvalidInput, StalledAtCritical
from .flow import push_level, write_trajectories_csv
from .geometry import DEFAULT_TOL, body_from_json, on_boundary
from .harness import (CampaignConfig, dumps_report, parse_point, report_is_clean,
                      verify_campaign, write_report)


def _load(args):
    try:
        with open(args.body) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInput(f"cannot read body file: {exc}") from None
    K = body_from_json(doc, args.tol)
    O = parse_point(args.point, K.dim)
    if not on_boundary(K, O, args.tol):
        raise InvalidInput(f"point {O.tolist()} is not on the boundary of the body")
    return K, O


def _emit(doc):
    print(json.dumps(doc, indent=1, sort_keys=True))


def cmd_analyze(args):
    K, O = _load(args)
    L = lcd(K, O, args.tol)
    cr = connectivity_radius(K, O, args.resolution, SamplingParams(seed=args.seed),
                             tol=args.tol)
    _emit({"critical_points": [c.to_json() for c in L.all_points],
           "lcd": L.to_json(), "cr": cr.to_json()})
    return 0


def cmd_levels(args):
    K, O = _load(args)
    params = SamplingParams(samples_per_sphere=args.samples, seed=args.seed)
    rep = level_components(K, O, args.radius, args.method, params, args.tol)
    if args.csv:
        write_levels_csv(args.csv, [rep])
    _emit(rep.to_json())
    return 0


def level_samples(K, O, r, n, seed=0):
    """About `n` points of the level set ``S_r(O) ∩ K``."""
    if K.dim == 2:
        return sample_arcs(O, level_arcs_2d(K, O, r, K.tol), n)
    kept = sampled_level_points(K, O, r, SamplingParams(seed=seed))
    step = max(1, len(kept) // max(n, 1))
    return kept[::step][:n]


def cmd_flow(args):
    K, O = _load(args)
    pts = level_samples(K, O, args.from_radius, args.samples, args.seed)
    trajectories = []
    try:
        out = push_level(K, O, pts, args.to_radius, args.tol, trajectories)
    except StalledAtCritical as exc:
        _emit({"status": "stalled_at_critical", "message": str(exc),
               "radius": exc.radius,
               "critical_point": None if exc.critical_point is None
               else exc.critical_point.tolist(),
               "indices": exc.indices})
        return 0
    if args.csv:
        write_trajectories_csv(args.csv, O, trajectories)
    _emit({"status": "ok", "from": args.from_radius, "to": args.to_radius,
           "points": [np.asarray(p).tolist() for p in out],
           "steps": [len(t) - 1 for t in trajectories]})
    return 0


def cmd_verify(args):
    kwargs = dict(trials_2d=args.trials_2d, trials_3d=args.trials_3d, seed=args.seed,
                  points_per_hull=args.points)
    if args.resolution is not None:
        kwargs["resolution"] = args.resolution
    cfg = CampaignConfig.from_env(**kwargs)
    report = verify_campaign(cfg)
    if args.out:
        write_report(report, args.out, args.csv)
        print(json.dumps(report["aggregate"], indent=1, sort_keys=True))
    else:
        print(dumps_report(report))
    return 0 if report_is_clean(report) else 1


def build_parser():
    p = argparse.ArgumentParser(prog="convexcr", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def body_args(sp):
        sp.add_argument("--body", required=True, help="polytope or ball JSON file")
        sp.add_argument("--point", required=True, help='boundary point "x,y[,z]"')
        sp.add_argument("--tol", type=float, default=DEFAULT_TOL,
                        help="relative geometric tolerance")
        sp.add_argument("--seed", type=int, default=0, help="sampling seed")

    sp = sub.add_parser("analyze", help="critical points, LCD and CR of one instance")
    body_args(sp)
    sp.add_argument("--resolution", type=float, default=None)
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("levels", help="components of one level set")
    body_args(sp)
    sp.add_argument("--radius", type=float, required=True)
    sp.add_argument("--method", choices=["exact2d", "sampled"], default=None)
    sp.add_argument("--samples", type=int, default=None)
    sp.add_argument("--csv", default=None)
    sp.set_defaults(func=cmd_levels)

    sp = sub.add_parser("flow", help="push a sampled level outward")
    body_args(sp)
    sp.add_argument("--from", dest="from_radius", type=float, required=True)
    sp.add_argument("--to", dest="to_radius", type=float, required=True)
    sp.add_argument("--samples", type=int, default=256)
    sp.add_argument("--csv", default=None, help="write per-step trajectories")
    sp.set_defaults(func=cmd_flow)

    sp = sub.add_parser("verify", help="randomized verification campaign")
    sp.add_argument("--trials-2d", type=int, default=100)
    sp.add_argument("--trials-3d", type=int, default=0)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--points", type=int, default=20, help="points per random hull")
    sp.add_argument("--resolution", type=float, default=None,
                    help="radius resolution relative to diameter")
    sp.add_argument("--out", default=None)
    sp.add_argument("--csv", default=None, help="per-instance CSV sidecar")
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return args.func(args)
    except (InvalidInput, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
