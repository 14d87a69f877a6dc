"""Dense symmetric linear-algebra kernels.

Matrices are plain ``numpy.ndarray`` objects of dtype float64. Symmetric
inputs are checked against a relative asymmetry tolerance and then used
as-is (no silent symmetrization).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NotPsd, NotSpd

SYM_TOL = 1e-10


@dataclass(frozen=True)
class EigPair:
    eigenvalue: float
    eigenvector: np.ndarray


@dataclass(frozen=True)
class EigResult:
    """Leading eigenpairs, ordered by descending eigenvalue.

    ``converged`` is False when the residual tolerance was not met within the
    iteration cap; the values and vectors are then the best iterate found.
    """

    values: np.ndarray
    vectors: np.ndarray  # shape (n, k), unit columns
    converged: bool
    iterations: int
    residuals: np.ndarray

    @property
    def pairs(self) -> list[EigPair]:
        return [EigPair(float(v), self.vectors[:, i].copy()) for i, v in enumerate(self.values)]


def as_matrix(M, name="matrix") -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} has non-finite entries")
    return M


def check_symmetric(M, name="matrix") -> np.ndarray:
    M = as_matrix(M, name)
    if M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be square, got shape {M.shape}")
    scale = 1.0 + (np.abs(M).max() if M.size else 0.0)
    if M.size and np.abs(M - M.T).max() > SYM_TOL * scale:
        raise ValueError(f"{name} is not symmetric")
    return M


def sign_fix(v: np.ndarray) -> np.ndarray:
    """Flip ``v`` (columnwise for 2-D input) so its largest-magnitude entry is >= 0."""
    v = np.array(v, dtype=float, copy=True)
    if v.ndim == 1:
        if v.size and v[np.argmax(np.abs(v))] < 0:
            v = -v
        return v
    idx = np.argmax(np.abs(v), axis=0)
    signs = np.where(v[idx, np.arange(v.shape[1])] < 0, -1.0, 1.0)
    return v * signs


def _start_block(n: int, m: int, seed: int) -> np.ndarray:
    # First column is the normalized all-ones vector; the rest are seeded so the
    # block cannot be orthogonal to the dominant subspace.
    V = np.empty((n, m))
    V[:, 0] = 1.0 / np.sqrt(n)
    if m > 1:
        V[:, 1:] = np.random.default_rng(seed).standard_normal((n, m - 1))
    Q, _ = np.linalg.qr(V)
    return Q


def _rayleigh_ritz(M, V):
    H = V.T @ M @ V
    H = 0.5 * (H + H.T)
    theta, W = np.linalg.eigh(H)
    order = np.argsort(-theta, kind="stable")
    theta = theta[order]
    Y = V @ W[:, order]
    R = M @ Y - Y * theta
    return theta, Y, np.linalg.norm(R, axis=0)


def _subspace_iteration(M, k, tol, max_iters, oversample, seed, select, shift=0.0):
    """Block power iteration on ``M + shift*I`` with Rayleigh-Ritz extraction on M.

    ``select(theta)`` returns the indices (into the descending Ritz values) of
    the wanted pairs. The block converges to the dominant-magnitude subspace of
    the shifted operator, of size ``m = min(n, k + oversample)``.
    """
    n = M.shape[0]
    m = min(n, k + oversample)
    V = _start_block(n, m, seed)
    theta, Y, res = _rayleigh_ritz(M, V)
    it = 0
    while True:
        idx = select(theta)
        ok = np.all(res[idx] <= tol * (1.0 + np.abs(theta[idx])))
        if ok or m == n or it >= max_iters:
            break
        V, _ = np.linalg.qr(M @ Y + shift * Y)
        theta, Y, res = _rayleigh_ritz(M, V)
        it += 1
    idx = select(theta)
    converged = bool(np.all(res[idx] <= tol * (1.0 + np.abs(theta[idx]))))
    return theta, Y, res, idx, converged, it, m


def sym_eig_top_k(M, k: int, tol: float = 1e-10, max_iters: int = 5000,
                  oversample: int = 8, seed: int = 0) -> EigResult:
    """Top-k eigenpairs of a symmetric matrix by shifted subspace iteration.

    The unshifted block converges to the largest-magnitude eigenvalues. When
    that block cannot certify that its k largest Ritz values are the k largest
    eigenvalues (large negative eigenvalues crowd the block), the operator is
    shifted by the spectral radius estimate and the iteration is repeated.
    """
    M = check_symmetric(M)
    n = M.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")

    def top(theta):
        return np.arange(k)

    theta, Y, res, _, converged, it, m = _subspace_iteration(
        M, k, tol, max_iters, oversample, seed, top)
    if m < n and theta[k - 1] < np.abs(theta).min():
        # Uncaptured eigenvalues satisfy |lambda| <= min|theta| and may exceed
        # theta[k-1]; the shift makes the whole spectrum nonnegative.
        shift = float(np.abs(theta).max())
        theta, Y, res, _, converged, it2, m = _subspace_iteration(
            M, k, tol, max_iters, oversample, seed, top, shift=shift)
        it += it2
    vectors = sign_fix(Y[:, :k])
    return EigResult(values=theta[:k].copy(), vectors=vectors, converged=converged,
                     iterations=it, residuals=res[:k].copy())


def spectral_norm(M, tol: float = 1e-10, max_iters: int = 5000) -> float:
    """Largest absolute eigenvalue of a symmetric matrix (0 for the zero matrix)."""
    M = check_symmetric(M)
    if not np.any(M):
        return 0.0

    def biggest(theta):
        return np.array([int(np.argmax(np.abs(theta)))])

    theta, _, _, idx, _, _, _ = _subspace_iteration(M, 1, tol, max_iters, 4, 0, biggest)
    return float(np.abs(theta[idx[0]]))


def psd_sqrt_factor(A, clamp_tol: float = 1e-10, label=None) -> np.ndarray:
    """Return L (p x n) with L.T @ L == A, p the numerical rank of A.

    Eigenvalues below ``clamp_tol * lambda_max`` are dropped. Raises NotPsd
    when an eigenvalue is below ``-clamp_tol * max(1, lambda_max)``.
    """
    A = check_symmetric(A)
    n = A.shape[0]
    w, V = np.linalg.eigh(A)
    lam_max = max(float(w[-1]), 0.0) if n else 0.0
    if n and w[0] < -clamp_tol * max(1.0, lam_max):
        raise NotPsd(f"smallest eigenvalue {w[0]:.3e} below tolerance", label=label)
    keep = w > clamp_tol * lam_max if lam_max > 0 else np.zeros(n, dtype=bool)
    w, V = w[keep][::-1], V[:, keep][:, ::-1]
    V = sign_fix(V)
    return np.sqrt(w)[:, None] * V.T


def min_eigenvalue_ok(M, rel_tol: float) -> bool:
    """PSD test: min eigenvalue >= -rel_tol * max(1, lambda_max)."""
    w = np.linalg.eigvalsh(check_symmetric(M))
    return bool(w.size == 0 or w[0] >= -rel_tol * max(1.0, w[-1]))


@dataclass(frozen=True)
class SpdFactor:
    cho: tuple
    ridge: float
    n: int

    def solve(self, B) -> np.ndarray:
        B = np.asarray(B, dtype=float)
        return scipy.linalg.cho_solve(self.cho, B, check_finite=False)


def spd_solve_factor(M, ridge: float = 0.0) -> SpdFactor:
    """Cholesky factor of ``M + ridge * I``.

    Raises NotSpd when the factorization breaks down or a pivot is negligible
    relative to the diagonal (numerically singular).
    """
    M = check_symmetric(M)
    n = M.shape[0]
    K = M + ridge * np.eye(n) if ridge else M
    try:
        c, lower = scipy.linalg.cho_factor(K, lower=False, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise NotSpd(f"Cholesky failed at ridge={ridge:g}: {exc}") from None
    piv = np.diag(c) ** 2
    scale = max(float(np.max(np.abs(np.diag(K)))), np.finfo(float).tiny)
    if not np.all(np.isfinite(piv)) or piv.min() <= 1e-14 * scale:
        raise NotSpd(f"numerically singular at ridge={ridge:g}")
    return SpdFactor(cho=(c, lower), ridge=float(ridge), n=n)
