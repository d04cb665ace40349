"""``skelfac`` command line: run one experiment and write its CSV."""

import argparse
import os
import sys

from . import bench
from .chebyshev import DELTA_EXPONENT
from .errors import SkelfacError
from .kernels import KERNEL_NAMES

EXPERIMENTS = ("squares2d", "plates3d", "distance", "arcs", "weights", "timing", "toy")

DEFAULT_KERNEL = {
    "squares2d": "inv_r", "plates3d": "inv_r", "distance": "inv_r", "arcs": "inv_r3",
    "weights": "inv_r", "timing": "inv_r", "toy": "toy_1d",
}


def build_parser():
    p = argparse.ArgumentParser(
        prog="skelfac",
        description="Run a skeletonized-interpolation experiment and write its results as CSV.",
    )
    p.add_argument("experiment", choices=EXPERIMENTS)
    p.add_argument("--tol", type=float, action="append", metavar="T",
                   help="tolerance; repeat for a sweep (default: experiment specific)")
    p.add_argument("--kernel", choices=KERNEL_NAMES,
                   help="kernel (default: inv_r3 for arcs, toy_1d for toy, inv_r otherwise)")
    p.add_argument("--seed", type=int, default=0, help="base seed of the distance trials (default 0)")
    p.add_argument("--out", metavar="PATH.csv", help="output file (default: <experiment>.csv)")
    p.add_argument("--strong-rrqr", action="store_true", help="refine pivots with strong RRQR swaps")
    p.add_argument("--delta-exp", type=float, default=DELTA_EXPONENT, metavar="E",
                   help=f"grid accuracy is tol**E (default {DELTA_EXPONENT})")
    p.add_argument("--trials", type=int, default=25, help="trials per distance (default 25)")
    p.add_argument("--distance", type=float, action="append",
                   help="distance between squares; repeat for a sweep (default 0.25 0.5 1 2 4)")
    return p


def _side_path(path, suffix):
    root, ext = os.path.splitext(path)
    return f"{root}_{suffix}{ext or '.csv'}"


def run(args):
    """Run the experiment described by parsed ``args``; returns the written paths."""
    kernel = args.kernel or DEFAULT_KERNEL[args.experiment]
    out = args.out or f"{args.experiment}.csv"
    common = {"strong": args.strong_rrqr}
    tols = args.tol
    written = [out]
    exp = args.experiment
    if exp == "toy" and kernel != "toy_1d":
        raise SkelfacError("the toy diagnostics are defined for toy_1d only")

    if exp in ("squares2d", "plates3d"):
        fn = bench.run_squares2d if exp == "squares2d" else bench.run_plates3d
        records = fn(tols or bench.DEFAULT_TOLS, kernel=kernel, delta_exponent=args.delta_exp, **common)
        bench.write_csv(records, out)
    elif exp == "distance":
        eps = tols[0] if tols else bench.DISTANCE_EPS
        records = bench.run_distance_comparison(
            args.distance or bench.DEFAULT_DISTANCES, trials=args.trials, seed=args.seed, eps=eps,
            kernel=kernel, delta_exponent=args.delta_exp, **common)
        bench.write_csv(records, out)
        summary = _side_path(out, "summary")
        bench.write_csv(bench.quantile_summary(records), summary)
        written.append(summary)
    elif exp == "arcs":
        bench.write_csv(bench.run_arc_aca_failure(kernel=kernel, **common), out)
    elif exp == "weights":
        bench.write_csv(bench.run_weights_demo(kernel=kernel, **common), out)
    elif exp == "timing":
        kw = {"tols": tols} if tols else {}
        records = bench.run_timing(kernel=kernel, delta_exponent=args.delta_exp, **kw, **common)
        bench.write_csv(records, out)
    else:
        eps = tols[0] if tols else bench.TOY_EPS
        records, curves, info = bench.run_toy_diagnostics(eps, delta_exponent=args.delta_exp, **common)
        bench.write_csv(records, out)
        curves_path = _side_path(out, "curves")
        bench.write_csv(curves, curves_path, bench.SCHEMAS["toy_curves"])
        written.append(curves_path)
        print(f"toy: r0={info['r0']} r1={info['r1']} sup_err={info['sup_err']:.3e}")
    return written


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        paths = run(args)
    except (SkelfacError, ValueError) as exc:
        print(f"skelfac: error: {exc}", file=sys.stderr)
        return 1
    for path in paths:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
