"""Compare the compiled and numpy pair-sum kernels on Mondrian skeletons.

    python3 benchmarks/bench_kernels.py --t 2 --p 0.5 --repeat 5
"""

import argparse
import time

import numpy as np

from mondrian_stit import kernels
from mondrian_stit.estimation import default_delta, rect_extents
from mondrian_stit.functionals import skeleton_arrays
from mondrian_stit.geometry import Rect
from mondrian_stit.sampler import SimParams, sample


def bench(fn, args, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=float, default=0.5)
    ap.add_argument("--t", type=float, default=2.0)
    ap.add_argument("--sides", default="5,10,20", help="comma list of square window sides")
    ap.add_argument("--r-max", type=float, default=2.0)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args(argv)

    r_grid = np.linspace(args.r_max / 20, args.r_max, 20)
    ux, uy = rect_extents(args.p, r_grid)
    delta = default_delta(args.p, r_grid)
    try:
        compiled = kernels.get_backend("cython")
    except ImportError:
        compiled = None
        print("compiled backend not built; timing the numpy kernel only")
    python = kernels.get_backend("python")

    print(f"{'side':>6} {'points':>8} {'cython [s]':>11} {'numpy [s]':>10} {'speedup':>8} {'max rel diff':>13}")
    for side in (float(s) for s in args.sides.split(",")):
        w = Rect(0.0, side, 0.0, side)
        tess = sample(w, SimParams(args.p, args.t, args.seed))
        x, y, m = skeleton_arrays(tess, delta).points
        call = (x, y, m, x, y, m, ux, uy, w.x_min, w.y_min, w.width, w.height, True)
        tp, hp = bench(python, call, args.repeat)
        if compiled is None:
            print(f"{side:6g} {len(x):8d} {'-':>11} {tp:10.4f}")
            continue
        tc, hc = bench(compiled, call, args.repeat)
        diff = np.max(np.abs(hc - hp) / np.maximum(np.abs(hp), 1e-300))
        print(f"{side:6g} {len(x):8d} {tc:11.4f} {tp:10.4f} {tp / tc:8.2f} {diff:13.2e}")


if __name__ == "__main__":
    main()
