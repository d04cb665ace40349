"""Dense linear algebra: column-pivoted QR, strong RRQR refinement, LU with
partial pivoting, singular values and Frobenius epsilon-rank.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import SingularMatrixError

# Downdated column norms are recomputed once they fall below this
# fraction of their reference value.
NORM_RECOMPUTE = 1e-3

# Residual norms within this relative distance of the largest (about the
# square root of machine epsilon) count as tied and go to the lowest column
# index, so mathematically equal norms pivot the same way on every platform.
TIE_RTOL = 1e-8


@dataclass(frozen=True)
class PivotedQR:
    """``A[:, perm] ~= Q1 @ R`` with ``Q1`` of ``rank`` orthonormal columns.

    Attributes
    ----------
    perm : ndarray
        Column order; ``perm[:rank]`` are the pivots in selection order,
        the rest follow.
    R : ndarray
        ``(rank, n)`` upper trapezoidal factor ``[R11 R12]`` in ``perm`` order.
    rank : int
        Numerical rank at the stopping tolerance.
    reflectors : ndarray
        ``(m, rank)`` Householder vectors ``v_k`` (zero above row ``k``).
    betas : ndarray
        ``H_k = I - beta_k v_k v_k^T``.
    residual_norms : ndarray
        Norms of the trailing columns ``perm[rank:]`` after elimination.
    """

    perm: np.ndarray
    R: np.ndarray
    rank: int
    reflectors: np.ndarray = field(repr=False)
    betas: np.ndarray = field(repr=False)
    residual_norms: np.ndarray = field(repr=False)

    @property
    def pivots(self):
        return self.perm[: self.rank]

    def q(self):
        """Explicit ``(m, rank)`` orthonormal factor ``Q1``."""
        return _form_q(self.reflectors, self.betas)

    def interpolation_matrix(self):
        """``R11^{-1} R12``: coefficients of the trailing columns in the pivot columns."""
        k = self.rank
        return solve_triangular(self.R[:, :k], self.R[:, k:])


def _reflector(x):
    """Householder vector ``v`` with ``(I - beta v v^T) x = alpha e_1``."""
    v = x.copy()
    norm = np.linalg.norm(x)
    if norm == 0.0:
        return v, 0.0, 0.0
    alpha = -norm if x[0] >= 0 else norm
    v[0] -= alpha
    return v, 2.0 / np.dot(v, v), alpha


def _apply(V, betas, k, x):
    """``H_{k-1} ... H_0 x`` for the first ``k`` reflectors."""
    for i in range(k):
        vi = V[i:, i]
        x[i:] -= betas[i] * vi * np.dot(vi, x[i:])
    return x


def _form_q(V, betas):
    m, k = V.shape
    Q = np.zeros((m, k))
    for j in range(k):
        e = np.zeros(m)
        e[j] = 1.0
        for i in range(j, -1, -1):
            vi = V[i:, i]
            e[i:] -= betas[i] * vi * np.dot(vi, e[i:])
        Q[:, j] = e
    return Q


def cpqr(A, tol, max_rank=None):
    """Businger-Golub column-pivoted Householder QR with early stopping.

    Stops at rank ``k`` once the largest residual column norm is at most
    ``tol`` times the largest initial column norm (or at ``max_rank``).
    Norms equal up to ``TIE_RTOL`` (relative) are broken towards the lowest
    column index.

    The factorization is left-looking: each step applies the previous
    reflectors to the pivot column only, and gets the new row of ``R`` for
    all columns from one product ``q_k^T A``.

    Parameters
    ----------
    A : (m, n) array_like
    tol : float
        Relative stopping tolerance; ``0`` runs to full (or ``max_rank``) rank.
    max_rank : int, optional
        Hard cap on the number of pivots.

    Returns
    -------
    PivotedQR
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise ValueError("A must be a matrix")
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    m, n = A.shape
    kmax = min(m, n) if max_rank is None else max(0, min(int(max_rank), m, n))

    V = np.zeros((m, kmax))
    betas = np.zeros(kmax)
    Q = np.zeros((m, kmax))
    rows = np.zeros((kmax, n))
    norm2 = np.einsum("ij,ij->j", A, A)
    ref2 = norm2.copy()
    threshold = tol * np.sqrt(norm2.max()) if n else 0.0
    active = np.ones(n, dtype=bool)
    piv = []

    k = 0
    while k < kmax:
        res = np.where(active, np.sqrt(np.maximum(norm2, 0.0)), -1.0)
        top = res.max()
        p = int(np.argmax(res >= top * (1.0 - TIE_RTOL)))
        if res[p] <= threshold:
            break
        col = _apply(V, betas, k, A[:, p].copy())
        v, beta, alpha = _reflector(col[k:])
        if beta == 0.0:
            break
        V[k:, k] = v
        betas[k] = beta
        e = np.zeros(m)
        e[k] = 1.0
        for i in range(k, -1, -1):
            vi = V[i:, i]
            e[i:] -= betas[i] * vi * np.dot(vi, e[i:])
        Q[:, k] = e
        rows[k] = e @ A
        rows[k, piv] = 0.0
        rows[k, p] = alpha
        active[p] = False
        piv.append(p)
        k += 1

        norm2 = norm2 - rows[k - 1] ** 2
        stale = active & (norm2 < NORM_RECOMPUTE * ref2)
        if stale.any():
            idx = np.flatnonzero(stale)
            resid = A[:, idx] - Q[:, :k] @ rows[:k, idx]
            norm2[idx] = np.einsum("ij,ij->j", resid, resid)
            ref2[idx] = norm2[idx]

    perm = np.concatenate([np.array(piv, dtype=int), np.flatnonzero(active)])
    rest = perm[k:]
    return PivotedQR(
        perm=perm,
        R=rows[:k][:, perm],
        rank=k,
        reflectors=V[:, :k],
        betas=betas[:k],
        residual_norms=np.sqrt(np.maximum(norm2[rest], 0.0)),
    )


def _qr_fixed(A, sel, rest):
    """QR of ``A[:, sel]`` with norm pivoting inside the block, plus the trailing data."""
    inner = cpqr(A[:, sel], 0.0)
    if inner.rank < len(sel):
        raise SingularMatrixError("selected columns are linearly dependent")
    sel = np.asarray(sel)[inner.perm]
    Q1 = inner.q()
    R11 = inner.R
    R12 = Q1.T @ A[:, rest]
    resid = A[:, rest] - Q1 @ R12
    gamma = np.sqrt(np.einsum("ij,ij->j", resid, resid))
    return sel, inner, R11, R12, gamma


def strong_rrqr(A, tol, f=2.0, rank=None, max_swaps=None):
    """Column-pivoted QR refined by Gu-Eisenstat swaps.

    Starting from :func:`cpqr` (same stopping rule, or a fixed ``rank``),
    pivot column ``i`` and trailing column ``j`` are exchanged while

        rho_ij^2 = (R11^{-1} R12)_ij^2 + (gamma_j(R22) * ||e_i^T R11^{-1}||)^2 > f^2,

    which is the factor by which the swap grows ``|det R11|``. On exit every
    entry of ``R11^{-1} R12`` is at most ``f`` in magnitude and
    ``sigma_i(R11) >= sigma_i(A) / sqrt(1 + f^2 k (n - k))``.
    """
    if f < 1:
        raise ValueError("f must be >= 1")
    A = np.asarray(A, dtype=float)
    base = cpqr(A, 0.0 if rank is not None else tol, max_rank=rank)
    k = base.rank
    n = A.shape[1]
    if k == 0 or k == n:
        return base
    sel = base.perm[:k].copy()
    rest = base.perm[k:].copy()
    limit = max_swaps if max_swaps is not None else 50 * n
    for _ in range(limit):
        sel, inner, R11, R12, gamma = _qr_fixed(A, sel, rest)
        R11inv = solve_triangular(R11, np.eye(k))
        M = R11inv @ R12
        w = np.sqrt(np.einsum("ij,ij->i", R11inv, R11inv))
        rho2 = M * M + np.outer(w, gamma) ** 2
        i, j = np.unravel_index(np.argmax(rho2), rho2.shape)
        if rho2[i, j] <= f * f * (1 + 1e-12):
            break
        sel[i], rest[j] = rest[j], sel[i]
    else:
        sel, inner, R11, R12, gamma = _qr_fixed(A, sel, rest)

    perm = np.concatenate([sel, rest])
    return PivotedQR(
        perm=perm,
        R=np.hstack([R11, R12]),
        rank=k,
        reflectors=inner.reflectors,
        betas=inner.betas,
        residual_norms=gamma,
    )


def solve_triangular(U, B, lower=False, unit=False):
    """Solve ``U X = B`` by substitution, vectorised over the columns of ``B``."""
    U = np.asarray(U, dtype=float)
    B = np.array(B, dtype=float)
    vec = B.ndim == 1
    X = B.reshape(len(B), -1).copy()
    n = U.shape[0]
    order = range(n) if lower else range(n - 1, -1, -1)
    for i in order:
        if lower:
            if i:
                X[i] -= U[i, :i] @ X[:i]
        elif i < n - 1:
            X[i] -= U[i, i + 1:] @ X[i + 1:]
        if not unit:
            X[i] /= U[i, i]
    return X[:, 0] if vec else X


@dataclass(frozen=True)
class LUFactors:
    """``A[perm] = L @ U`` with unit-lower ``L`` and upper ``U``."""

    perm: np.ndarray
    L: np.ndarray
    U: np.ndarray

    @property
    def size(self):
        return len(self.perm)


def lu_factor(A):
    """LU with partial pivoting.

    Raises
    ------
    SingularMatrixError
        On an exactly zero pivot; ``index`` is the elimination step.
    """
    A = np.array(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("lu_factor needs a square matrix")
    n = A.shape[0]
    perm = np.arange(n)
    for k in range(n):
        p = k + int(np.argmax(np.abs(A[k:, k])))
        if A[p, k] == 0.0:
            raise SingularMatrixError(f"zero pivot at step {k}", index=k)
        if p != k:
            A[[k, p]] = A[[p, k]]
            perm[[k, p]] = perm[[p, k]]
        A[k + 1:, k] /= A[k, k]
        A[k + 1:, k + 1:] -= np.outer(A[k + 1:, k], A[k, k + 1:])
    L = np.tril(A, -1) + np.eye(n)
    return LUFactors(perm, L, np.triu(A))


def lu_solve(lu, B, trans=False):
    """Solve ``A X = B`` (or ``A^T X = B`` with ``trans``) from :func:`lu_factor` output."""
    B = np.asarray(B, dtype=float)
    if B.shape[0] != lu.size:
        raise ValueError(f"right-hand side has {B.shape[0]} rows, expected {lu.size}")
    if not trans:
        y = solve_triangular(lu.L, B[lu.perm], lower=True, unit=True)
        return solve_triangular(lu.U, y)
    # A^T = U^T L^T P
    y = solve_triangular(lu.U.T, B, lower=True)
    z = solve_triangular(lu.L.T, y, unit=True)
    X = np.empty_like(z)
    X[lu.perm] = z
    return X


def singular_values(A):
    """Singular values in nonincreasing order (LAPACK divide and conquer)."""
    A = np.asarray(A, dtype=float)
    if A.size == 0:
        return np.zeros(0)
    return np.linalg.svd(A, compute_uv=False)


def eps_rank_frobenius(sigma, eps):
    """Smallest ``r`` with ``||sigma[r:]||_2 <= eps * ||sigma||_2``."""
    s = np.asarray(sigma, dtype=float)
    # tail[r] = sum_{i >= r} s_i^2, summed from the small end
    tail = np.concatenate([np.cumsum((s * s)[::-1])[::-1], [0.0]])
    bound = (eps * eps) * tail[0]
    return int(np.argmax(tail <= bound))


def condition_number(A):
    """2-norm condition number from the singular values (inf if singular)."""
    s = singular_values(A)
    return np.inf if s[-1] == 0 else float(s[0] / s[-1])
