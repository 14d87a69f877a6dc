"""Spectral initialization of the factor X.

With C = U^T U and the substitution X~ = U X, the equality constraints become
<A~_i, X~ X~^T> = b_i with A~_i = U^-T A_i U^-1. The initial X~ is built from the
leading eigenvectors of the b-weighted average of the A~_i, then mapped back.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import linalg
from .errors import NoEqualityConstraints
from .model import ConstraintSense, SdpProblem


@dataclass(frozen=True)
class InitReport:
    X0: np.ndarray
    leading_eigenvalue: float
    used_equalities: int
    fallback_used: bool


def build_Z(problem: SdpProblem) -> np.ndarray:
    """Mean of b_i L_i^T L_i over equality constraints."""
    eqs = [c for c in problem.constraints if c.sense == ConstraintSense.EQ]
    if not any(c.bound > 0 for c in eqs):
        raise NoEqualityConstraints("need an equality constraint with b > 0")
    st = problem.stacked
    w = np.where(st.eq, st.bounds, 0.0)[st.seg]
    L = st.L
    Z = (L * w[:, None]).T @ L / len(eqs)
    return 0.5 * (Z + Z.T)


def _fallback(problem: SdpProblem, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    X0 = rng.standard_normal((problem.dim, problem.rank))
    target = float(np.mean([c.bound for c in problem.constraints]))
    if target > 0:
        X0 *= np.sqrt(target) / np.linalg.norm(X0)
    return X0


def fit_scale(problem: SdpProblem, X0: np.ndarray) -> np.ndarray:
    """Rescale X0 by c minimizing sum over equalities of (c^2 ||L_i X0||^2 - b_i)^2."""
    st = problem.stacked
    s = st.sq_norms(st.L @ X0)[st.eq]
    b = st.bounds[st.eq]
    den = float(s @ s)
    if den <= 0:
        return X0
    c2 = float(b @ s) / den
    return X0 * np.sqrt(c2) if c2 > 0 else X0


def initialize(problem: SdpProblem, seed: int = 0, scale: str = "eigenvalue") -> InitReport:
    """Spectral initializer.

    ``scale="eigenvalue"`` multiplies the eigenvector block by the leading
    eigenvalue of Z~. ``scale="fit"`` keeps that direction but rescales X0 to
    match the equality bounds in least squares, which keeps the first Q-stage
    sane for LE/GE constraints whose projections do not cap ||Q_i||.
    """
    if scale not in ("eigenvalue", "fit"):
        raise ValueError(f"unknown scale {scale!r}")
    n, r = problem.dim, problem.rank
    n_eq = problem.count(ConstraintSense.EQ)
    try:
        Z = build_Z(problem)
    except NoEqualityConstraints:
        return InitReport(_fallback(problem, seed), float("nan"), n_eq, True)

    C = problem.objective
    eps = 1e-6 * max(1.0, linalg.spectral_norm(C))
    U = scipy.linalg.cholesky(C + eps * np.eye(n), lower=False)
    # Z~ = U^-T Z U^-1 via two triangular solves.
    T = scipy.linalg.solve_triangular(U, Z, trans="T", lower=False)
    Zt = scipy.linalg.solve_triangular(U, T.T, trans="T", lower=False)
    Zt = 0.5 * (Zt + Zt.T)

    eig = linalg.sym_eig_top_k(Zt, r, seed=seed)
    if not eig.converged or not np.all(np.isfinite(eig.vectors)):
        return InitReport(_fallback(problem, seed), float("nan"), n_eq, True)
    lam = float(eig.values[0])
    Xt = lam * eig.vectors
    X0 = scipy.linalg.solve_triangular(U, Xt, lower=False)
    if scale == "fit":
        X0 = fit_scale(problem, X0)
    return InitReport(X0, lam, n_eq, False)
