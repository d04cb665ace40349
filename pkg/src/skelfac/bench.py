"""Numerical experiments: rank and accuracy sweeps, the comparison against
ACA and random CUR, the ACA failure case, the weights ablation, timing and
the 1D toy-kernel diagnostics.

Every ``run_*`` function returns a list of dict records whose keys are
listed in :data:`SCHEMAS`. :func:`write_csv` turns them into a CSV file
with ``NA`` for failed or skipped entries.
"""

import csv
import math
import time

import numpy as np

from .baselines import KernelEvaluator, aca, random_cur, rrqr_rank
from .chebyshev import DELTA_EXPONENT, grid_size_heuristic, lagrange_row
from .errors import SingularMatrixError
from .geometry import (
    Box, plates3d, random_points, segment_probe_points, segments_with_spheres,
    side_by_side_squares, squares2d, two_arcs_geometry, uniform_grid,
)
from .kernels import builtin_kernel
from .linalg import condition_number, cpqr, eps_rank_frobenius, singular_values
from .skeleton import (
    relative_errors, s_hat_row, si_error, si_factors, skeleton_path, skeletonize,
)

NA = "NA"

DEFAULT_TOLS = (1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9, 1e-10, 1e-11, 1e-12)
DEFAULT_DISTANCES = (0.25, 0.5, 1.0, 2.0, 4.0)
DISTANCE_EPS = 1e-8
DISTANCE_SUBSAMPLE = 500
CALIBRATION_STEPS = 30
ARC_RANKS = tuple(range(1, 101))
WEIGHTS_N = 200
WEIGHTS_RANKS = (25, 50, 100, 150, 200)
WEIGHTS_PROBES = 10000
TIMING_NS = (256, 1024, 4096, 16384)
TIMING_TOLS = (1e-2, 1e-4, 1e-6, 1e-8, 1e-10, 1e-12)
TIMING_SEPARATIONS = (0.25, 0.5, 1.0, 2.0, 4.0)
NAIVE_MAX_ENTRIES = 2 * 10**7
TOY_EPS = 1e-10
TOY_QUAD_NODES = 200
TOY_PROBES = 1001
TOY_SUP_PROBES = 1000

SCHEMAS = {
    "squares2d": ["experiment", "tol", "r0", "r1", "rRRQR", "rSVD", "err", "cond", "time_s", "kernel_evals"],
    "distance": ["experiment", "distance", "trial", "r0", "r1", "err_si", "err_aca", "err_cur", "cur_status"],
    "distance_summary": ["experiment", "distance", "method", "r1", "q25", "q50", "q75", "iqr", "failures"],
    "arcs": ["experiment", "rank", "err_rrqr", "err_aca", "aca_breakdown"],
    "weights": ["experiment", "rank", "err_with_weights", "err_without_weights",
                "segment_pivots_with", "segment_pivots_without"],
    "timing": ["experiment", "sweep", "n", "tol", "separation", "r0", "r1", "si_evals", "si_time_s",
               "naive_evals", "naive_time_s"],
    "toy": ["experiment", "index", "sigma", "err_interp", "eps_over_sigma"],
    "toy_curves": ["x", "s_hat_col4", "poly_lagrange_col4", "u_last", "u_last_si", "u_last_poly"],
}
SCHEMAS["plates3d"] = SCHEMAS["squares2d"]

# X and Y meshes of the rank sweeps
SQUARE_MESH = (50, 50)
PLATE_MESH_X = (1, 40, 60)
PLATE_MESH_Y = (60, 40, 1)
VALIDATION_MESH = (50, 50)


def _fmt(v):
    if v is None:
        return NA
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return NA if math.isnan(v) else repr(float(v))
    return str(v)


def write_csv(records, path, columns=None):
    """Write ``records`` to ``path``; ``None`` and NaN become ``NA``."""
    if columns is None:
        columns = SCHEMAS[records[0]["experiment"]] if records else []
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(columns)
        for rec in records:
            w.writerow([_fmt(rec.get(c)) for c in columns])


def read_csv(path):
    """Rows of a CSV written by :func:`write_csv` as dicts of strings."""
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def _check_tols(tols):
    tols = sorted((float(t) for t in tols), reverse=True)
    if not tols or any(not 0 < t < 1 for t in tols):
        raise ValueError("tolerances must lie in (0, 1)")
    return tols


def _rank_sweep(tag, kernel, boxX, boxY, X, Y, tols, strong, delta_exponent):
    tols = _check_tols(tols)
    K = kernel.block(X, Y, count=False)
    sigma = singular_values(K)
    records = []
    for tol in tols:
        kernel.reset_count()
        t0 = time.perf_counter()
        fac = skeletonize(kernel, boxX, boxY, tol, strong=strong, delta_exponent=delta_exponent)
        U, V = si_factors(fac, X, Y)
        elapsed = time.perf_counter() - t0
        evals = kernel.evals
        err = float(np.linalg.norm(K - U @ V.T) / np.linalg.norm(K))
        records.append({
            "experiment": tag, "tol": tol, "r0": fac.r0, "r1": fac.r1,
            "rRRQR": rrqr_rank(K, tol), "rSVD": eps_rank_frobenius(sigma, tol), "err": err,
            "cond": condition_number(kernel.block(fac.Xhat, fac.Yhat, count=False)),
            "time_s": elapsed, "kernel_evals": evals,
        })
    return records


def run_squares2d(tols=DEFAULT_TOLS, kernel="inv_r", strong=False, delta_exponent=DELTA_EXPONENT):
    """Ranks and error on two unit squares with 50 x 50 meshes, one record per tol.

    Records are sorted by decreasing tol.
    """
    k = builtin_kernel(kernel)
    bx, by = squares2d()
    X, Y = uniform_grid(bx, SQUARE_MESH), uniform_grid(by, SQUARE_MESH)
    return _rank_sweep("squares2d", k, bx, by, X, Y, tols, strong, delta_exponent)


def run_plates3d(tols=DEFAULT_TOLS, kernel="inv_r", strong=False, delta_exponent=DELTA_EXPONENT):
    """Ranks and error on two perpendicular plates with 2400-point meshes."""
    k = builtin_kernel(kernel)
    bx, by = plates3d()
    X, Y = uniform_grid(bx, PLATE_MESH_X), uniform_grid(by, PLATE_MESH_Y)
    return _rank_sweep("plates3d", k, bx, by, X, Y, tols, strong, delta_exponent)


def calibrate_grid(kernel, boxX, boxY, eps, strong=False, delta_exponent=DELTA_EXPONENT,
                   steps=CALIBRATION_STEPS):
    """Smallest uniformly grown grids whose factorization meets ``eps``.

    Starts from :func:`grid_size_heuristic` and adds one node per
    dimension until the error on 50 x 50 validation meshes is at most
    ``eps``. If ``steps`` growths do not get there, the most accurate
    factorization seen is returned.

    Returns
    -------
    fac : SkelFactorization
    val_err : float
        Its validation error.
    reached : bool
        Whether ``val_err <= eps``.
    """
    Xv, Yv = uniform_grid(boxX, VALIDATION_MESH), uniform_grid(boxY, VALIDATION_MESH)
    cx, cy = grid_size_heuristic(kernel, boxX, boxY, eps, delta_exponent)
    best = None
    for _ in range(steps + 1):
        fac = skeletonize(kernel, boxX, boxY, eps, strong=strong, counts=(cx, cy))
        err = si_error(fac, Xv, Yv)
        if best is None or err < best[1]:
            best = (fac, err)
        if err <= eps:
            return fac, err, True
        cx = tuple(c if lo == hi else c + 1 for c, lo, hi in zip(cx, boxX.lo, boxX.hi))
        cy = tuple(c if lo == hi else c + 1 for c, lo, hi in zip(cy, boxY.lo, boxY.hi))
    return best[0], best[1], False


def _trial_seeds(seed, index, trial):
    rng = np.random.default_rng([seed, index, trial])
    return [int(s) for s in rng.integers(0, 2**31, size=3)]


def run_distance_comparison(distances=DEFAULT_DISTANCES, trials=25, seed=0, eps=DISTANCE_EPS,
                            kernel="inv_r", strong=False, delta_exponent=DELTA_EXPONENT):
    """SI against ACA and random CUR at equal rank on side-by-side squares.

    For each distance the grids are calibrated once (:func:`calibrate_grid`);
    each trial then draws 500 points per square from 100 x 100 grids and
    measures the three factorizations of rank ``r1``. A singular random
    CUR sample is kept as a record with ``err_cur = NA`` and
    ``cur_status = singular``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    k = builtin_kernel(kernel)
    records = []
    for di, d in enumerate(distances):
        bx, by = side_by_side_squares(d)
        fac, _, _ = calibrate_grid(k, bx, by, eps, strong, delta_exponent)
        r = fac.r1
        for t in range(trials):
            sx, sy, sc = _trial_seeds(seed, di, t)
            X = random_points(bx, DISTANCE_SUBSAMPLE, sx)
            Y = random_points(by, DISTANCE_SUBSAMPLE, sy)
            pairs = [si_factors(fac, X, Y)]
            a = aca(KernelEvaluator(k, X, Y), rank_budget=r)
            pairs.append((a.U, a.V))
            status = "ok"
            try:
                c = random_cur(k, X, Y, r, sc)
                pairs.append((c.U, c.V))
            except SingularMatrixError:
                status = "singular"
            errs = relative_errors(k, X, Y, pairs)
            records.append({
                "experiment": "distance", "distance": float(d), "trial": t, "r0": fac.r0, "r1": r,
                "err_si": errs[0], "err_aca": errs[1],
                "err_cur": errs[2] if status == "ok" else None, "cur_status": status,
            })
    return records


def _quantile(vals, q):
    # linear interpolation between order statistics; inf stays inf
    v = np.sort(np.asarray(vals, dtype=float))
    pos = q * (len(v) - 1)
    lo, hi = int(math.floor(pos)), int(math.ceil(pos))
    if v[lo] == v[hi]:
        return float(v[lo])
    return float(v[lo] + (pos - lo) * (v[hi] - v[lo]))


def quantile_summary(records):
    """25/50/75% quantiles of each method's error per distance.

    Failed trials count as infinite error so they move the quantiles
    instead of vanishing. The inter-quartile range is infinite once the
    upper quartile is.
    """
    out = []
    for d in sorted({rec["distance"] for rec in records}):
        rows = [rec for rec in records if rec["distance"] == d]
        for method in ("si", "aca", "cur"):
            vals = np.array([np.inf if rec[f"err_{method}"] is None else rec[f"err_{method}"]
                             for rec in rows])
            q25, q50, q75 = (_quantile(vals, q) for q in (0.25, 0.5, 0.75))
            iqr = np.inf if np.isinf(q75) else q75 - q25
            out.append({
                "experiment": "distance_summary", "distance": d, "method": method,
                "r1": rows[0]["r1"], "q25": q25, "q50": q50, "q75": q75, "iqr": iqr,
                "failures": int(np.isinf(vals).sum()),
            })
    return out


def run_arc_aca_failure(ranks=ARC_RANKS, kernel="inv_r3", n=50, strong=False):
    """Pivots from RRQR and from ACA on the two-arc geometry, error per rank.

    The node sets are the meshes themselves with uniform weights. The ACA
    column is the error of ACA's own rank-``r`` approximation, which in
    exact arithmetic equals the cross approximation through its pivots.
    """
    k = builtin_kernel(kernel)
    X, Y = two_arcs_geometry(n)
    ranks = sorted(int(r) for r in ranks)
    if ranks[0] < 1 or ranks[-1] > len(X):
        raise ValueError(f"ranks must lie in [1, {len(X)}]")
    facs = skeleton_path(k, X, Y, ranks, strong=strong)
    K = k.block(X, Y)
    normK = np.linalg.norm(K)
    records = []
    for r, fac in zip(ranks, facs):
        U, V = si_factors(fac, X, Y)
        a = aca(K, rank_budget=r)
        records.append({
            "experiment": "arcs", "rank": r,
            "err_rrqr": float(np.linalg.norm(K - U @ V.T) / normK),
            "err_aca": float(np.linalg.norm(K - a.full()) / normK),
            "aca_breakdown": a.breakdown,
        })
    return records


def sphere_weights(N):
    """Node weights of :func:`~skelfac.geometry.segments_with_spheres`.

    Unit weight on segment points and ``1/N`` on ball points, so the row
    and column scaling ``sqrt(w)`` of the node matrix is ``N^{-1/2}`` in the
    balls.
    """
    return np.concatenate([np.ones(N), np.full(25 * N, 1.0 / N)])


def run_weights_demo(N=WEIGHTS_N, ranks=WEIGHTS_RANKS, probes=WEIGHTS_PROBES, kernel="inv_r",
                     strong=False):
    """Pivot selection with and without weights on the segments-with-spheres sets.

    Errors are measured on ``probes`` equispaced points per segment.
    """
    k = builtin_kernel(kernel)
    Xb, Yb = segments_with_spheres(N)
    w = sphere_weights(N)
    ranks = sorted(int(r) for r in ranks)
    with_w = skeleton_path(k, Xb, Yb, ranks, w, w, strong=strong)
    without = skeleton_path(k, Xb, Yb, ranks, strong=strong)
    Xp, Yp = segment_probe_points(N, probes)
    records = []
    for r, fw, fu in zip(ranks, with_w, without):
        ew, eu = relative_errors(k, Xp, Yp, [si_factors(fw, Xp, Yp), si_factors(fu, Xp, Yp)])
        records.append({
            "experiment": "weights", "rank": r, "err_with_weights": ew, "err_without_weights": eu,
            "segment_pivots_with": int(np.sum(fw.xhat_index < N) + np.sum(fw.yhat_index < N)),
            "segment_pivots_without": int(np.sum(fu.xhat_index < N) + np.sum(fu.yhat_index < N)),
        })
    return records


def _square_mesh(box, n):
    side = int(round(math.sqrt(n)))
    if side * side != n:
        raise ValueError(f"n = {n} is not a perfect square")
    return uniform_grid(box, (side, side))


def _si_timed(k, bx, by, X, Y, tol, strong, delta_exponent):
    k.reset_count()
    t0 = time.perf_counter()
    fac = skeletonize(k, bx, by, tol, strong=strong, delta_exponent=delta_exponent)
    si_factors(fac, X, Y)
    return fac, k.evals, time.perf_counter() - t0


def _naive_timed(k, X, Y, tol, max_entries):
    if len(X) * len(Y) > max_entries:
        return None, None
    k.reset_count()
    t0 = time.perf_counter()
    cpqr(k.block(X, Y), tol)
    return k.evals, time.perf_counter() - t0


def run_timing(ns=TIMING_NS, tols=TIMING_TOLS, separations=TIMING_SEPARATIONS, tol=1e-8,
               n_fixed=4096, kernel="inv_r", strong=False, delta_exponent=DELTA_EXPONENT,
               naive_max_entries=NAIVE_MAX_ENTRIES):
    """Kernel evaluations and wall-clock time of SI against dense assembly plus RRQR.

    Three sweeps: ``n`` at fixed ``tol`` on the squares (SI and naive),
    ``tol`` at fixed ``n``, and the distance between side-by-side squares
    at fixed ``n`` and ``tol`` (larger distance, smaller rank). ``n``
    values must be perfect squares. The naive path is skipped (``NA``) once
    the dense matrix would exceed ``naive_max_entries``.
    """
    k = builtin_kernel(kernel)
    records = []
    bx, by = squares2d()
    for n in ns:
        X, Y = _square_mesh(bx, n), _square_mesh(by, n)
        fac, evals, elapsed = _si_timed(k, bx, by, X, Y, tol, strong, delta_exponent)
        naive_evals, naive_time = _naive_timed(k, X, Y, tol, naive_max_entries)
        records.append({
            "experiment": "timing", "sweep": "n", "n": n, "tol": tol, "separation": 1.0,
            "r0": fac.r0, "r1": fac.r1, "si_evals": evals, "si_time_s": elapsed,
            "naive_evals": naive_evals, "naive_time_s": naive_time,
        })
    X, Y = _square_mesh(bx, n_fixed), _square_mesh(by, n_fixed)
    for t in _check_tols(tols):
        fac, evals, elapsed = _si_timed(k, bx, by, X, Y, t, strong, delta_exponent)
        records.append({
            "experiment": "timing", "sweep": "tol", "n": n_fixed, "tol": t, "separation": 1.0,
            "r0": fac.r0, "r1": fac.r1, "si_evals": evals, "si_time_s": elapsed,
        })
    for d in separations:
        sx, sy = side_by_side_squares(d)
        X, Y = _square_mesh(sx, n_fixed), _square_mesh(sy, n_fixed)
        fac, evals, elapsed = _si_timed(k, sx, sy, X, Y, tol, strong, delta_exponent)
        records.append({
            "experiment": "timing", "sweep": "separation", "n": n_fixed, "tol": tol,
            "separation": float(d), "r0": fac.r0, "r1": fac.r1, "si_evals": evals,
            "si_time_s": elapsed,
        })
    return records


def toy_singular_functions(kernel, nodes=TOY_QUAD_NODES):
    """Singular values and a callable for the left singular functions of ``kernel`` on [-1, 1].

    Discretizes with Gauss-Legendre quadrature, ``A = W^{1/2} K W^{1/2}``,
    and extends the right singular vectors to any point by the Nystrom
    formula ``u_i(x) = K(x, nodes) W^{1/2} v_i / sigma_i``, which makes the
    ``u_i`` orthonormal in L2.
    """
    g, w = np.polynomial.legendre.leggauss(nodes)
    sw = np.sqrt(w)
    A = sw[:, None] * kernel.block(g, g, count=False) * sw[None, :]
    _, s, vt = np.linalg.svd(A)

    def u(i, x):
        return kernel.block(x, g, count=False) @ (sw * vt[i]) / s[i]

    return s, u


def run_toy_diagnostics(eps=TOY_EPS, strong=False, delta_exponent=DELTA_EXPONENT):
    """Diagnostics of ``1/(4 + x - y)`` on [-1, 1] x [-1, 1].

    Returns
    -------
    records : list of dict
        One per singular function ``u_i``, ``i <= r1``: sup-norm error of
        interpolating ``u_i`` from its values at ``Xhat`` with
        ``s_hat_row``, next to ``eps / sigma_i``.
    curves : list of dict
        On a 1001-point probe: column 4 of ``s_hat_row`` and the polynomial
        Lagrange basis through the same ``Xhat``, and ``u_{r1}`` with both
        interpolants.
    info : dict
        ``r0``, ``r1`` and the sup-error of the factorization on a
        1000 x 1000 equispaced probe.
    """
    k = builtin_kernel("toy_1d")
    box = Box((-1.0,), (1.0,))
    fac = skeletonize(k, box, box, eps, strong=strong, delta_exponent=delta_exponent)
    p = np.linspace(-1.0, 1.0, TOY_SUP_PROBES)
    U, V = si_factors(fac, p, p)
    sup_err = float(np.max(np.abs(k.block(p, p) - U @ V.T)))

    s, u = toy_singular_functions(k)
    x = np.linspace(-1.0, 1.0, TOY_PROBES)
    S = s_hat_row(fac, x)
    L = lagrange_row(x, fac.Xhat[:, 0])
    records = []
    for i in range(fac.r1):
        ui = u(i, x)
        err = float(np.max(np.abs(ui - S @ u(i, fac.Xhat))))
        records.append({"experiment": "toy", "index": i + 1, "sigma": s[i], "err_interp": err,
                        "eps_over_sigma": eps / s[i]})
    last = fac.r1 - 1
    u_last = u(last, x)
    u_hat = u(last, fac.Xhat)
    col = min(3, fac.r1 - 1)
    curves = [
        {"x": xi, "s_hat_col4": a, "poly_lagrange_col4": b, "u_last": c, "u_last_si": e, "u_last_poly": f}
        for xi, a, b, c, e, f in zip(x, S[:, col], L[:, col], u_last, S @ u_hat, L @ u_hat)
    ]
    info = {"r0": fac.r0, "r1": fac.r1, "sup_err": sup_err}
    return records, curves, info
