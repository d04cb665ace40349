"""Skeletonized interpolation.

Pivot points are picked out of Chebyshev tensor grids by rank-revealing QR
on the weighted node matrix ``diag(w_X)^{1/2} K(Xbar, Ybar) diag(w_Y)^{1/2}``.
The kernel matrix on arbitrary meshes is then approximated as

    K(X, Y) ~= K(X, Yhat) K(Xhat, Yhat)^{-1} K(Xhat, Y),

with the middle inverse applied only through an LU factorization.
"""

from dataclasses import dataclass, field

import numpy as np

from .chebyshev import DELTA_EXPONENT, grid_size_heuristic, tensor_grid
from .errors import DenseGuardError, EmptySelectionError
from .geometry import as_points
from .linalg import cpqr, lu_factor, lu_solve, strong_rrqr

MAX_DENSE_ENTRIES = 10**8
CHUNK_ENTRIES = 4 * 10**6


@dataclass(frozen=True)
class SkelFactorization:
    """Result of :func:`skeletonize`.

    ``Xhat``/``Yhat`` are the selected pivot points (subsets of the grid
    points, in RRQR selection order) and ``lu_mid`` factors ``K(Xhat, Yhat)``.
    ``gridX``/``gridY`` are ``None`` when the node sets were given
    explicitly (see :func:`skeleton_from_nodes`).
    """

    kernel: object
    Xhat: np.ndarray
    Yhat: np.ndarray
    xhat_index: np.ndarray
    yhat_index: np.ndarray
    lu_mid: object = field(repr=False)
    r0: int
    r1: int
    epsilon: float
    gridX: object = field(default=None, repr=False)
    gridY: object = field(default=None, repr=False)


def weighted_matrix(kernel, Xbar, Ybar, wx=None, wy=None):
    """``diag(wx)^{1/2} K(Xbar, Ybar) diag(wy)^{1/2}`` (unit weights when omitted)."""
    K = kernel.block(Xbar, Ybar)
    if not np.all(np.isfinite(K)):
        raise ValueError("kernel is not finite on the node grids; domains overlap")
    if wx is not None:
        K *= np.sqrt(np.asarray(wx, dtype=float))[:, None]
    if wy is not None:
        K *= np.sqrt(np.asarray(wy, dtype=float))[None, :]
    return K


def weighted_node_matrix(kernel, gridX, gridY):
    """Weighted node matrix ``K_w`` of two :class:`~skelfac.chebyshev.TensorGrid`."""
    return weighted_matrix(kernel, gridX.points, gridY.points, gridX.weights, gridY.weights)


def _rrqr(A, eps, strong, rank):
    if strong:
        return strong_rrqr(A, eps, rank=rank)
    return cpqr(A, 0.0 if rank is not None else eps, max_rank=rank)


def select_pivots(K_w, eps, strong=False, rank=None):
    """Row and column pivots of ``K_w``.

    Columns come from an RRQR of ``K_w`` and rows from an RRQR of ``K_w^T``,
    both at relative tolerance ``eps`` (or at fixed ``rank``). If the two
    ranks differ the smaller selection is extended with its own RRQR's
    next pivots.

    Returns
    -------
    rows, cols : ndarray
        Equal-length index arrays into the rows and columns of ``K_w``.
    """
    K_w = np.asarray(K_w, dtype=float)
    if rank is None and not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    col_qr = _rrqr(K_w, eps, strong, rank)
    row_qr = _rrqr(K_w.T, eps, strong, rank)
    k = max(col_qr.rank, row_qr.rank)
    if k == 0:
        raise EmptySelectionError("weighted node matrix is numerically zero")
    if col_qr.rank < k:
        col_qr = _rrqr(K_w, 0.0, strong, k)
    if row_qr.rank < k:
        row_qr = _rrqr(K_w.T, 0.0, strong, k)
    if min(col_qr.rank, row_qr.rank) < k:
        raise EmptySelectionError("could not equalize pivot sets: matrix rank is too low")
    return row_qr.pivots.copy(), col_qr.pivots.copy()


def skeleton_from_nodes(kernel, Xbar, Ybar, eps, wx=None, wy=None, strong=False, rank=None,
                        gridX=None, gridY=None):
    """Skeletonized interpolation from explicit node sets and weights.

    Costs ``|Xbar| |Ybar| + r1^2`` kernel evaluations.
    """
    Xbar = as_points(Xbar, kernel.dim)
    Ybar = as_points(Ybar, kernel.dim)
    K_w = weighted_matrix(kernel, Xbar, Ybar, wx, wy)
    rows, cols = select_pivots(K_w, eps, strong=strong, rank=rank)
    del K_w
    Xhat, Yhat = Xbar[rows], Ybar[cols]
    lu = lu_factor(kernel.block(Xhat, Yhat))
    return SkelFactorization(
        kernel=kernel, Xhat=Xhat, Yhat=Yhat, xhat_index=rows, yhat_index=cols, lu_mid=lu,
        r0=min(len(Xbar), len(Ybar)), r1=len(rows), epsilon=eps, gridX=gridX, gridY=gridY,
    )


def skeleton_path(kernel, Xbar, Ybar, ranks, wx=None, wy=None, strong=False):
    """Fixed-rank factorizations for several ``ranks`` from one node matrix.

    Column-pivoted QR is greedy, so the pivots at rank ``r`` are the first
    ``r`` pivots of a run to ``max(ranks)``; one pair of factorizations
    serves the whole sweep. Strong RRQR has no such nesting and is rerun
    per rank.
    """
    Xbar = as_points(Xbar, kernel.dim)
    Ybar = as_points(Ybar, kernel.dim)
    ranks = [int(r) for r in ranks]
    K_w = weighted_matrix(kernel, Xbar, Ybar, wx, wy)
    if strong:
        picks = [select_pivots(K_w, 0.0, strong=True, rank=r) for r in ranks]
    else:
        top = max(ranks)
        rows, cols = select_pivots(K_w, 0.0, rank=top)
        picks = [(rows[:r], cols[:r]) for r in ranks]
    del K_w
    out = []
    r0 = min(len(Xbar), len(Ybar))
    for rows, cols in picks:
        Xhat, Yhat = Xbar[rows], Ybar[cols]
        out.append(SkelFactorization(
            kernel=kernel, Xhat=Xhat, Yhat=Yhat, xhat_index=rows, yhat_index=cols,
            lu_mid=lu_factor(kernel.block(Xhat, Yhat)), r0=r0, r1=len(rows), epsilon=0.0,
        ))
    return out


def skeletonize(kernel, boxX, boxY, eps, strong=False, delta_exponent=DELTA_EXPONENT, counts=None):
    """Low-rank factorization of ``K`` over ``boxX x boxY`` to relative accuracy ``eps``.

    Chebyshev grids are sized by :func:`~skelfac.chebyshev.grid_size_heuristic`
    (grid accuracy ``eps ** delta_exponent``) unless ``counts = (countsX,
    countsY)`` is given. ``strong`` switches the pivot selection from plain
    column-pivoted QR to strong RRQR.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if counts is None:
        counts = grid_size_heuristic(kernel, boxX, boxY, eps, delta_exponent)
    gridX = tensor_grid(boxX, counts[0])
    gridY = tensor_grid(boxY, counts[1])
    return skeleton_from_nodes(kernel, gridX.points, gridY.points, eps, gridX.weights,
                               gridY.weights, strong=strong, gridX=gridX, gridY=gridY)


def si_factors(fac, X, Y):
    """``U (m, r1)`` and ``V (n, r1)`` with ``U V^T = K(X, Yhat) K(Xhat, Yhat)^{-1} K(Xhat, Y)``.

    Exactly ``(m + n) r1`` kernel evaluations.
    """
    U = fac.kernel.block(X, fac.Yhat)
    V = lu_solve(fac.lu_mid, fac.kernel.block(fac.Xhat, Y)).T
    return U, V


def si_apply(fac, X, Y, vec):
    """``K(X, Yhat) (K(Xhat, Yhat)^{-1} (K(Xhat, Y) vec))`` without forming an m x n matrix."""
    vec = np.asarray(vec, dtype=float)
    n = len(as_points(Y, fac.kernel.dim))
    if vec.shape[0] != n:
        raise ValueError(f"vector has length {vec.shape[0]}, expected {n}")
    w1 = fac.kernel.block(fac.Xhat, Y) @ vec
    w2 = lu_solve(fac.lu_mid, w1)
    return fac.kernel.block(X, fac.Yhat) @ w2


def relative_errors(kernel, X, Y, pairs, max_entries=MAX_DENSE_ENTRIES, chunk_entries=CHUNK_ENTRIES):
    """``||K(X,Y) - U V^T||_F / ||K(X,Y)||_F`` for each ``(U, V)`` in ``pairs``.

    ``K(X, Y)`` is evaluated once, in row chunks, so memory stays at
    ``chunk_entries`` whatever the mesh sizes.
    """
    X = as_points(X, kernel.dim)
    Y = as_points(Y, kernel.dim)
    m, n = len(X), len(Y)
    if m * n > max_entries:
        raise DenseGuardError(f"{m} x {n} kernel matrix exceeds the dense guard of {max_entries:g} entries")
    step = max(1, chunk_entries // n)
    ref = 0.0
    num = np.zeros(len(pairs))
    for start in range(0, m, step):
        K = kernel.block(X[start:start + step], Y)
        ref += np.einsum("ij,ij->", K, K)
        for t, (U, V) in enumerate(pairs):
            D = K - U[start:start + step] @ V.T
            num[t] += np.einsum("ij,ij->", D, D)
    return np.sqrt(num / ref)


def si_error(fac, X, Y, max_entries=MAX_DENSE_ENTRIES):
    """Relative Frobenius error of the factorization on the mesh ``X x Y``."""
    U, V = si_factors(fac, X, Y)
    return float(relative_errors(fac.kernel, X, Y, [(U, V)], max_entries)[0])


def _is_point(x, dim):
    # a scalar, or a flat array of length dim (so [x0] is one point in 1-D)
    return np.ndim(x) == 0 or (np.ndim(x) == 1 and np.size(x) == dim)


def s_hat_row(fac, x):
    """Cross-interpolation row ``K(x, Yhat) K(Xhat, Yhat)^{-1}``.

    A single point (scalar or flat array of length ``dim``) gives shape
    ``(r1,)``; ``p`` points give ``(p, r1)``.
    Column ``i`` is the Lagrange-like function that is 1 at ``Xhat[i]`` and
    0 at the other pivots.
    """
    single = _is_point(x, fac.kernel.dim)
    pts = np.atleast_2d(np.asarray(x, dtype=float).reshape(-1, fac.Xhat.shape[1]))
    rows = lu_solve(fac.lu_mid, fac.kernel.block(pts, fac.Yhat).T, trans=True).T
    return rows[0] if single else rows


def t_hat_row(fac, y):
    """Cross-interpolation row ``(K(Xhat, Yhat)^{-1} K(Xhat, y))^T``."""
    single = _is_point(y, fac.kernel.dim)
    pts = np.atleast_2d(np.asarray(y, dtype=float).reshape(-1, fac.Yhat.shape[1]))
    rows = lu_solve(fac.lu_mid, fac.kernel.block(fac.Xhat, pts)).T
    return rows[0] if single else rows
