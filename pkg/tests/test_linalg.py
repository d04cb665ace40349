import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from skelfac.errors import SingularMatrixError
from skelfac.linalg import (
    condition_number, cpqr, eps_rank_frobenius, lu_factor, lu_solve, singular_values,
    solve_triangular, strong_rrqr,
)


def kahan(n=30, c=0.285):
    s = np.sqrt(1 - c * c)
    K = np.diag(s ** np.arange(n)) @ (np.eye(n) - c * np.triu(np.ones((n, n)), 1))
    # tiny column scaling makes the natural order the pivot order
    return K * (1 - 1e-10) ** np.arange(n)


def synthetic(sigma, seed=0):
    rng = np.random.default_rng(seed)
    n = len(sigma)
    U, _ = np.linalg.qr(rng.standard_normal((n, n)))
    V, _ = np.linalg.qr(rng.standard_normal((n, n)))
    return U @ np.diag(sigma) @ V.T


def recon(qr, A):
    return np.linalg.norm(A[:, qr.perm] - qr.q() @ qr.R) / np.linalg.norm(A)


def test_cpqr_identity():
    qr = cpqr(np.eye(3), 0.5)
    assert qr.rank == 3
    assert sorted(qr.pivots) == [0, 1, 2]
    # equal norms go to the lowest index
    np.testing.assert_array_equal(qr.pivots, [0, 1, 2])


def test_cpqr_rank_one():
    rng = np.random.default_rng(1)
    A = np.outer(rng.standard_normal(12), rng.standard_normal(9))
    qr = cpqr(A, 1e-10)
    assert qr.rank == 1
    assert qr.pivots[0] == np.argmax(np.linalg.norm(A, axis=0))


def test_cpqr_synthetic_spectrum():
    A = synthetic(10.0 ** -np.arange(1, 21))
    assert abs(cpqr(A, 1e-6).rank - 6) <= 1


def test_cpqr_zero_matrix():
    assert cpqr(np.zeros((4, 3)), 1e-8).rank == 0


@pytest.mark.parametrize("seed", range(5))
def test_cpqr_reconstruction(seed):
    A = np.random.default_rng(seed).standard_normal((50, 80))
    qr = cpqr(A, 0.0)
    assert qr.rank == 50
    assert recon(qr, A) <= 1e-12
    d = np.abs(np.diag(qr.R[:, :50]))
    assert np.all(np.diff(d) <= 1e-12 * d[0])
    Q = qr.q()
    np.testing.assert_allclose(Q.T @ Q, np.eye(50), atol=1e-13)


def test_cpqr_truncated_residuals():
    A = synthetic(10.0 ** -np.arange(0, 15, 0.5)[:30], seed=3)
    qr = cpqr(A, 1e-5)
    resid = A[:, qr.perm[qr.rank:]] - qr.q() @ qr.R[:, qr.rank:]
    np.testing.assert_allclose(np.linalg.norm(resid, axis=0), qr.residual_norms, rtol=1e-6, atol=1e-15)
    assert qr.residual_norms.max() <= 1e-5 * np.linalg.norm(A, axis=0).max()


def test_cpqr_symmetric_ties_are_deterministic():
    # two identical blocks: rows and columns must split the same way
    B = np.random.default_rng(4).random((6, 6)) + np.eye(6)
    A = np.block([[B, 1e-9 * B], [1e-9 * B, B]])
    a, b = cpqr(A, 0.0, max_rank=3), cpqr(A.T, 0.0, max_rank=3)
    assert sum(a.pivots < 6) == sum(b.pivots < 6)


def test_cpqr_bad_args():
    with pytest.raises(ValueError):
        cpqr(np.ones(3), 0.1)
    with pytest.raises(ValueError):
        cpqr(np.ones((2, 2)), -1.0)


@pytest.mark.parametrize("seed", range(3))
def test_strong_rrqr_reconstruction(seed):
    A = np.random.default_rng(seed).standard_normal((50, 80))
    qr = strong_rrqr(A, 1e-14)
    assert recon(qr, A) <= 1e-12
    assert np.abs(qr.interpolation_matrix()).max() <= 2.0 * (1 + 1e-12)


def test_strong_rrqr_no_swaps_when_bound_holds():
    A = np.diag([5.0, 4.0, 3.0, 2.0, 1.0])
    a, b = cpqr(A, 0.0, max_rank=3), strong_rrqr(A, 0.0, rank=3)
    np.testing.assert_array_equal(a.perm, b.perm)


def test_kahan_cpqr_misses_small_singular_value():
    K = kahan()
    sigma = singular_values(K)
    assert sigma[-1] < 1e-3 * sigma[0]
    # norm pivoting keeps every column: the small singular value stays hidden
    assert cpqr(K, 1e-3).rank == 30
    assert np.abs(cpqr(K, 0.0, max_rank=29).interpolation_matrix()).max() > 100


@pytest.mark.parametrize("f", [1.0, 2.0, 5.0])
def test_kahan_strong_rrqr_postcondition(f):
    K = kahan()
    qr = strong_rrqr(K, 0.0, f=f, rank=29)
    assert np.abs(qr.interpolation_matrix()).max() <= f * (1 + 1e-12)
    Q = qr.q()
    sel = K[:, qr.perm[:29]]
    assert np.linalg.norm(sel - Q @ qr.R[:, :29]) <= 1e-12 * np.linalg.norm(sel)
    resid = K[:, qr.perm[29:]] - Q @ qr.R[:, 29:]
    np.testing.assert_allclose(np.linalg.norm(resid, axis=0), qr.residual_norms, rtol=1e-8)


@pytest.mark.parametrize("k", [5, 10, 15])
def test_strong_rrqr_sandwich(k):
    f = 2.0
    sigma = np.concatenate([np.logspace(0, -3, k), np.logspace(-8, -12, 25 - k)])
    A = synthetic(sigma, seed=k)
    qr = strong_rrqr(A, 0.0, f=f, rank=k)
    n = A.shape[1]
    q = np.sqrt(1 + f * f * k * (n - k))
    s11 = singular_values(qr.R[:, :k])
    assert np.all(s11 * q >= sigma[:k] * (1 - 1e-10))
    assert np.all(s11 <= sigma[:k] * (1 + 1e-10))


def test_strong_rrqr_bad_f():
    with pytest.raises(ValueError):
        strong_rrqr(np.eye(3), 0.1, f=0.5)


def test_solve_triangular():
    U = np.array([[2.0, 1.0], [0.0, 4.0]])
    np.testing.assert_allclose(solve_triangular(U, [3.0, 4.0]), [1.0, 1.0])
    L = U.T
    np.testing.assert_allclose(solve_triangular(L, [2.0, 5.0], lower=True), [1.0, 1.0])


def test_lu_examples():
    B = np.random.default_rng(0).standard_normal((4, 2))
    np.testing.assert_allclose(lu_solve(lu_factor(np.eye(4)), B), B)
    np.testing.assert_allclose(lu_solve(lu_factor([[2.0, 0.0], [0.0, 4.0]]), [[1.0], [1.0]]), [[0.5], [0.25]])


def test_lu_well_conditioned_residual():
    rng = np.random.default_rng(5)
    A = rng.standard_normal((50, 50)) + 10 * np.eye(50)
    B = rng.standard_normal((50, 4))
    lu = lu_factor(A)
    assert np.linalg.norm(A @ lu_solve(lu, B) - B) / np.linalg.norm(B) <= 1e-12
    assert np.linalg.norm(A.T @ lu_solve(lu, B, trans=True) - B) / np.linalg.norm(B) <= 1e-12


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 30), seed=st.integers(0, 10**6))
def test_lu_backward_stability(n, seed):
    A = np.random.default_rng(seed).standard_normal((n, n))
    lu = lu_factor(A)
    assert np.linalg.norm(A[lu.perm] - lu.L @ lu.U) / np.linalg.norm(A) <= 1e-13
    assert np.all(np.abs(lu.L) <= 1.0 + 1e-15)


def test_lu_singular():
    with pytest.raises(SingularMatrixError) as info:
        lu_factor([[1.0, 2.0], [2.0, 4.0]])
    assert info.value.index == 1
    with pytest.raises(ValueError):
        lu_factor(np.ones((2, 3)))
    with pytest.raises(ValueError):
        lu_solve(lu_factor(np.eye(2)), np.ones(3))


def test_singular_values_examples():
    np.testing.assert_allclose(singular_values(np.diag([3.0, 1.0, 2.0])), [3, 2, 1])
    s = singular_values(np.outer([2.0, 0, 0], [0, 3.0, 0, 0]))
    np.testing.assert_allclose(s, [6, 0, 0], atol=1e-15)
    H = 1.0 / (np.arange(5)[:, None] + np.arange(5)[None, :] + 1)
    assert singular_values(H)[0] == pytest.approx(1.5671, abs=1e-4)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_singular_values_match_gram_eigenvalues(seed):
    A = np.random.default_rng(seed).standard_normal((10, 10))
    ev = np.sort(np.linalg.eigvalsh(A.T @ A))[::-1]
    s = singular_values(A)
    big = ev > 1e-6 * ev[0]
    np.testing.assert_allclose(s[big], np.sqrt(ev[big]), rtol=1e-10)
    assert np.all(np.diff(s) <= 0)


def test_eps_rank_examples():
    assert eps_rank_frobenius([1, 0, 0], 1e-3) == 1
    assert eps_rank_frobenius([1, 1, 1, 1], 0.5) == 3
    assert eps_rank_frobenius([3, 2, 1], 1.0) == 0
    assert eps_rank_frobenius([1, 1e-4, 1e-8], 1e-6) == 2


@settings(max_examples=50, deadline=None)
@given(s=st.lists(st.floats(0, 10), min_size=1, max_size=15), eps=st.floats(1e-9, 0.99))
def test_eps_rank_is_smallest(s, eps):
    s = np.sort(np.array(s))[::-1]
    r = eps_rank_frobenius(s, eps)
    total = np.sqrt(np.sum(s * s))
    assert np.sqrt(np.sum(s[r:] ** 2)) <= eps * total * (1 + 1e-12)
    if r > 0:
        assert np.sqrt(np.sum(s[r - 1:] ** 2)) > eps * total * (1 - 1e-12)


def test_condition_number():
    assert condition_number(np.diag([4.0, 2.0])) == pytest.approx(2.0)
    assert condition_number(np.zeros((2, 2))) == np.inf
