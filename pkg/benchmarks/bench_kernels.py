"""Compare the numba kernels with the numpy fallback.

    python3 benchmarks/bench_kernels.py [--sizes 4096 16384 65536] [--repeat 5]

Both backends are imported directly, so the environment flag does not
matter here. Results are checked for equality before timing.
"""
import argparse
import time

import numpy as np

from convexcr import _jit, kernels
from convexcr.connectivity import SamplingParams, sphere_directions
from convexcr.harness import random_polytope


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[4096, 16384, 65536])
    ap.add_argument("--dim", type=int, default=3)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if not _jit.HAVE_NUMBA:
        raise SystemExit("numba is not installed; only the numpy backend is available")

    K = random_polytope(args.dim, 20, 0)
    O = K.vertices[0]
    r = 0.5 * K.diameter
    params = SamplingParams()
    print(f"{'kernel':<18}{'n':>8}{'numba [ms]':>12}{'numpy [ms]':>12}{'speedup':>9}")
    for n in args.sizes:
        pts = O + r * sphere_directions(args.dim, n, 0)
        thr = params.adjacency_factor * SamplingParams(samples_per_sphere=n).spacing(args.dim, r)
        mask_nb = kernels._halfspace_mask_nb(pts, K.normals, K.offsets, 1e-9)
        mask_np = kernels._halfspace_mask_np(pts, K.normals, K.offsets, 1e-9)
        assert np.array_equal(mask_nb, mask_np)
        kept = pts[mask_np]
        lab_nb = kernels._label_components_nb(kept, thr)
        lab_np = kernels._label_components_np(kept, thr)
        assert lab_nb[1] == lab_np[1] and np.array_equal(lab_nb[0], lab_np[0])

        rows = [
            ("halfspace_mask", lambda: kernels._halfspace_mask_nb(pts, K.normals, K.offsets, 1e-9),
             lambda: kernels._halfspace_mask_np(pts, K.normals, K.offsets, 1e-9)),
            ("label_components", lambda: kernels._label_components_nb(kept, thr),
             lambda: kernels._label_components_np(kept, thr)),
        ]
        for name, f_nb, f_np in rows:
            t_nb = best_of(f_nb, args.repeat)
            t_np = best_of(f_np, args.repeat)
            print(f"{name:<18}{n:>8}{1e3 * t_nb:>12.3f}{1e3 * t_np:>12.3f}{t_np / t_nb:>8.1f}x")


if __name__ == "__main__":
    main()
