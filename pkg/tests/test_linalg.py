import numpy as np
import pytest
from hypothesis import given, strategies as st

from bcr import linalg
from bcr.errors import NotPsd, NotSpd
from bcr.oracle import jacobi_eigh

from conftest import random_psd, random_sym


def test_top_k_diagonal():
    res = linalg.sym_eig_top_k(np.diag([3.0, 1.0]), 1)
    assert res.converged
    assert res.values[0] == pytest.approx(3.0, abs=1e-12)
    np.testing.assert_allclose(res.vectors[:, 0], [1.0, 0.0], atol=1e-10)


def test_top_k_repeated_eigenvalue():
    res = linalg.sym_eig_top_k(2.0 * np.eye(2), 2)
    np.testing.assert_allclose(res.values, [2.0, 2.0], atol=1e-12)
    np.testing.assert_allclose(res.vectors.T @ res.vectors, np.eye(2), atol=1e-10)


def test_top_k_against_jacobi(rng):
    M = random_sym(rng, 8)
    w, _ = jacobi_eigh(M)
    res = linalg.sym_eig_top_k(M, 3)
    np.testing.assert_allclose(res.values, w[::-1][:3], atol=1e-9)
    for p in res.pairs:
        assert np.linalg.norm(M @ p.eigenvector - p.eigenvalue * p.eigenvector) <= 1e-8
        assert np.linalg.norm(p.eigenvector) == pytest.approx(1.0, abs=1e-10)
        assert p.eigenvector[np.argmax(np.abs(p.eigenvector))] >= 0


def test_top_k_negative_dominant():
    # Largest algebraic eigenvalue is wanted even when |lambda_min| is bigger.
    M = np.diag([1.0, 0.5, -10.0])
    res = linalg.sym_eig_top_k(M, 2)
    np.testing.assert_allclose(res.values, [1.0, 0.5], atol=1e-10)


def test_top_k_deterministic(rng):
    M = random_sym(rng, 12)
    a = linalg.sym_eig_top_k(M, 4)
    b = linalg.sym_eig_top_k(M, 4)
    assert np.array_equal(a.vectors, b.vectors) and np.array_equal(a.values, b.values)


def test_top_k_rejects_bad_k():
    with pytest.raises(ValueError):
        linalg.sym_eig_top_k(np.eye(3), 4)


def test_spectral_norm():
    assert linalg.spectral_norm(np.diag([-5.0, 2.0])) == pytest.approx(5.0, rel=1e-10)
    assert linalg.spectral_norm(np.zeros((4, 4))) == 0.0


def test_spectral_norm_against_jacobi(rng):
    M = random_sym(rng, 10)
    w, _ = jacobi_eigh(M)
    assert linalg.spectral_norm(M) == pytest.approx(np.max(np.abs(w)), rel=1e-6)


def test_sqrt_factor_identity_and_elementary():
    L = linalg.psd_sqrt_factor(np.eye(2))
    np.testing.assert_allclose(L.T @ L, np.eye(2), atol=1e-12)
    e1 = np.zeros((3, 3))
    e1[0, 0] = 1.0
    L = linalg.psd_sqrt_factor(e1)
    assert L.shape == (1, 3)
    np.testing.assert_allclose(L, [[1.0, 0.0, 0.0]], atol=1e-12)


def test_sqrt_factor_gram(rng):
    G = rng.standard_normal((6, 4))
    A = G.T @ G
    L = linalg.psd_sqrt_factor(A)
    assert np.linalg.norm(L.T @ L - A) <= 1e-8 * (1 + np.linalg.norm(A))


def test_sqrt_factor_drops_null_rows(rng):
    A = random_psd(rng, 7, rank=2)
    assert linalg.psd_sqrt_factor(A).shape == (2, 7)


def test_sqrt_factor_rejects_indefinite():
    with pytest.raises(NotPsd) as exc:
        linalg.psd_sqrt_factor(np.diag([1.0, -1e-3]), label="c7")
    assert "c7" in str(exc.value)


def test_sqrt_factor_rejects_asymmetric():
    with pytest.raises(ValueError):
        linalg.psd_sqrt_factor(np.array([[1.0, 0.5], [0.0, 1.0]]))


def test_spd_solve_examples():
    B = np.arange(6.0).reshape(3, 2)
    np.testing.assert_allclose(linalg.spd_solve_factor(np.eye(3)).solve(B), B)
    W = linalg.spd_solve_factor(np.diag([2.0, 4.0])).solve(np.array([[2.0], [4.0]]))
    np.testing.assert_allclose(W, [[1.0], [1.0]])


def test_spd_solve_residual(rng):
    M = random_psd(rng, 12) + np.eye(12)
    B = rng.standard_normal((12, 3))
    W = linalg.spd_solve_factor(M).solve(B)
    assert np.linalg.norm(M @ W - B) <= 1e-8 * (1 + np.linalg.norm(B))


def test_spd_solve_ridge_and_failure():
    M = np.diag([1.0, 0.0])
    with pytest.raises(NotSpd):
        linalg.spd_solve_factor(M)
    f = linalg.spd_solve_factor(M, ridge=1e-3)
    np.testing.assert_allclose((M + 1e-3 * np.eye(2)) @ f.solve(np.eye(2)), np.eye(2), atol=1e-9)


@given(n=st.integers(1, 16), rank=st.integers(1, 16), seed=st.integers(0, 2**31))
def test_factor_reconstruction_property(n, rank, seed):
    rng = np.random.default_rng(seed)
    A = random_psd(rng, n, rank=min(rank, n))
    L = linalg.psd_sqrt_factor(A)
    assert np.linalg.norm(L.T @ L - A) <= 1e-8 * (1 + np.linalg.norm(A))


@given(n=st.integers(2, 20), seed=st.integers(0, 2**31))
def test_spd_consistency_property(n, seed):
    rng = np.random.default_rng(seed)
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    M = (Q * np.logspace(0, 3, n)) @ Q.T
    M = 0.5 * (M + M.T)
    W0 = rng.standard_normal((n, 2))
    W = linalg.spd_solve_factor(M).solve(M @ W0)
    assert np.linalg.norm(W - W0) <= 1e-7 * np.linalg.norm(W0)
