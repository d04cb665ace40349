"""Comparison methods: partially pivoted ACA, random CUR, and the SVD/RRQR
reference ranks of a dense kernel matrix.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import SingularMatrixError
from .geometry import as_points
from .linalg import cpqr, eps_rank_frobenius, lu_factor, lu_solve, singular_values


@dataclass(frozen=True)
class LowRankPair:
    """``A ~= U @ V.T`` of rank ``rank``.

    ``rows``/``cols`` hold the pivot indices for cross-type methods and
    ``breakdown`` flags an ACA run that stopped on a zero pivot before
    reaching its budget.
    """

    U: np.ndarray = field(repr=False)
    V: np.ndarray = field(repr=False)
    rank: int
    method: str
    rows: np.ndarray = field(default=None, repr=False)
    cols: np.ndarray = field(default=None, repr=False)
    breakdown: bool = False
    evals: int = 0

    def full(self):
        return self.U @ self.V.T


class MatrixEvaluator:
    """Row/column access to a dense matrix, counting touched entries."""

    def __init__(self, A):
        self.A = np.asarray(A, dtype=float)
        self.shape = self.A.shape
        self.evals = 0

    def row(self, i):
        self.evals += self.shape[1]
        return self.A[i].copy()

    def col(self, j):
        self.evals += self.shape[0]
        return self.A[:, j].copy()


class KernelEvaluator:
    """Row/column access to ``K(X, Y)`` through kernel evaluations only."""

    def __init__(self, kernel, X, Y):
        self.kernel = kernel
        self.X = as_points(X, kernel.dim)
        self.Y = as_points(Y, kernel.dim)
        self.shape = (len(self.X), len(self.Y))
        self.evals = 0

    def row(self, i):
        self.evals += self.shape[1]
        return self.kernel.block(self.X[i:i + 1], self.Y)[0]

    def col(self, j):
        self.evals += self.shape[0]
        return self.kernel.block(self.X, self.Y[j:j + 1])[:, 0]


def aca(A, rank_budget=None, tol=0.0):
    """Adaptive cross approximation with partial pivoting.

    Starts from row 0. Step ``k`` evaluates the residual of the current
    row, pivots on its largest unused entry, evaluates that residual
    column and takes the next row at its largest unused entry. Stops at
    ``rank_budget`` or once ``||u_k|| ||v_k|| <= tol * ||A_k||_F`` (running
    estimate). A zero pivot ends the run early with ``breakdown=True``.

    Parameters
    ----------
    A : array_like or evaluator
        Dense matrix, or an object with ``shape``, ``row(i)``, ``col(j)``
        (e.g. :class:`KernelEvaluator`).
    """
    ev = A if hasattr(A, "row") else MatrixEvaluator(A)
    m, n = ev.shape
    if rank_budget is None and tol <= 0:
        raise ValueError("give a rank budget or a positive tolerance")
    kmax = min(m, n) if rank_budget is None else min(int(rank_budget), m, n)
    if kmax < 1:
        raise ValueError("rank_budget must be >= 1")

    us, vs, rows, cols = [], [], [], []
    used_r = np.zeros(m, dtype=bool)
    used_c = np.zeros(n, dtype=bool)
    frob2 = 0.0
    i = 0
    breakdown = False
    while len(us) < kmax:
        r = ev.row(i)
        for u, v in zip(us, vs):
            r -= u[i] * v
        used_r[i] = True
        cand = np.where(used_c, -1.0, np.abs(r))
        j = int(np.argmax(cand))
        if cand[j] <= 0.0:
            breakdown = True
            break
        v = r / r[j]
        c = ev.col(j)
        for u, vv in zip(us, vs):
            c -= vv[j] * u
        used_c[j] = True
        u = c
        # ||S_k||_F^2 = ||S_{k-1}||_F^2 + 2 sum_l (u^T u_l)(v_l^T v) + ||u||^2 ||v||^2
        cross = sum(np.dot(u, ul) * np.dot(vl, v) for ul, vl in zip(us, vs))
        uv = np.linalg.norm(u) * np.linalg.norm(v)
        frob2 += 2.0 * cross + uv * uv
        us.append(u)
        vs.append(v)
        rows.append(i)
        cols.append(j)
        if tol > 0 and uv <= tol * np.sqrt(max(frob2, 0.0)):
            break
        nxt = np.where(used_r, -1.0, np.abs(u))
        i = int(np.argmax(nxt))
        if nxt[i] < 0:
            break
    k = len(us)
    U = np.array(us).T if k else np.zeros((m, 0))
    V = np.array(vs).T if k else np.zeros((n, 0))
    return LowRankPair(U, V, k, "aca", np.array(rows, dtype=int), np.array(cols, dtype=int),
                       breakdown, ev.evals)


def cross_factors(kernel, X, Y, rows, cols):
    """``U = K(X, Y[cols])``, ``V^T = K(X[rows], Y[cols])^{-1} K(X[rows], Y)``."""
    X = as_points(X, kernel.dim)
    Y = as_points(Y, kernel.dim)
    mid = kernel.block(X[rows], Y[cols])
    lu = lu_factor(mid)
    s = singular_values(mid)
    if s[-1] <= len(s) * np.finfo(float).eps * s[0]:
        raise SingularMatrixError("middle matrix is singular to working precision")
    U = kernel.block(X, Y[cols])
    V = lu_solve(lu, kernel.block(X[rows], Y)).T
    return U, V


def random_cur(kernel, X, Y, r, seed):
    """CUR with ``r`` pivots drawn uniformly without replacement from ``X`` and ``Y``.

    Costs ``(m + n) r + r^2`` kernel evaluations.

    Raises
    ------
    SingularMatrixError
        If the sampled ``K(Xtilde, Ytilde)`` is singular to working precision.
    """
    X = as_points(X, kernel.dim)
    Y = as_points(Y, kernel.dim)
    if not 1 <= r <= min(len(X), len(Y)):
        raise ValueError(f"r must lie in [1, {min(len(X), len(Y))}]")
    rng = np.random.default_rng(seed)
    rows = np.sort(rng.choice(len(X), size=r, replace=False))
    cols = np.sort(rng.choice(len(Y), size=r, replace=False))
    before = kernel.evals
    U, V = cross_factors(kernel, X, Y, rows, cols)
    return LowRankPair(U, V, r, "random_cur", rows, cols, evals=kernel.evals - before)


def svd_rank(A, eps):
    """Frobenius epsilon-rank from the singular values of ``A``."""
    return eps_rank_frobenius(singular_values(A), eps)


def rrqr_rank(A, eps):
    """Rank found by column-pivoted QR of ``A`` at tolerance ``eps``."""
    return cpqr(A, eps).rank
