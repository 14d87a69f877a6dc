"""Turning a low-rank factor X into +/-1 labels."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import linalg
from .errors import ZeroMatrix


@dataclass(frozen=True)
class Labeling:
    labels: np.ndarray  # int, entries in {-1, +1}
    objective: float
    feasible: bool = True
    source: str = ""


def score_vector(X) -> np.ndarray:
    """Leading left singular vector of X scaled by its singular value.

    Equivalently the leading eigenvector of X X^T scaled by sqrt of its
    eigenvalue, computed from the small r x r Gram X^T X.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[0] == 1 and X.shape[1] > 1:
        X = X.T
    if not np.any(X):
        raise ZeroMatrix("score vector of a zero matrix")
    G = X.T @ X
    v = linalg.sym_eig_top_k(0.5 * (G + G.T), 1).vectors[:, 0]
    return linalg.sign_fix(X @ v)


def quad_value(x, cost) -> float:
    x = np.asarray(x, dtype=float)
    return float(x @ np.asarray(cost, dtype=float) @ x)


def sign_round(score, cost=None) -> Labeling:
    """Threshold at zero; zeros map to +1."""
    score = np.asarray(score, dtype=float)
    labels = np.where(score >= 0, 1, -1)
    obj = quad_value(labels, cost) if cost is not None else float("nan")
    return Labeling(labels, obj, source="sign")


def _violations(problem, cands: np.ndarray) -> np.ndarray:
    """(K, m) constraint violations of rank-1 candidates x (rows of ``cands``)."""
    st = problem.stacked
    LX = st.L @ cands.T
    sq = np.zeros((st.bounds.size, cands.shape[0]))
    np.add.at(sq, st.seg, LX * LX)
    d = sq - st.bounds[:, None]
    viol = np.where(st.eq[:, None], np.abs(d),
                    np.where(st.le[:, None], np.maximum(d, 0.0), np.maximum(-d, 0.0)))
    return viol.T


def _sweep(y: np.ndarray) -> np.ndarray:
    """sign(y) followed by every threshold cut of y: top-j entries get +1."""
    n = y.size
    order = np.argsort(-y, kind="stable")
    cut = np.full((n - 1, n), -1)
    ranks = np.empty(n, dtype=int)
    ranks[order] = np.arange(n)
    cut[ranks[None, :] < np.arange(1, n)[:, None]] = 1
    return np.vstack([np.where(y >= 0, 1, -1)[None, :], cut])


def hyperplane_round(X, cost, trials: int = 100, seed: int = 0, problem=None,
                     sweep: bool = True, tol: float = 1e-9) -> Labeling:
    """Best of random-hyperplane labelings of X, plus the thresholded score vector.

    For each standard-normal g in R^r the projection y = X g yields sign(y)
    and, with ``sweep``, every threshold cut along the sorted y. The spectral
    score vector is swept the same way and always enters the pool first.

    When ``problem`` is given, candidates are filtered by its constraints
    evaluated at X = x (rank one); if none survive, the least-violating
    candidate is returned with ``feasible=False``. Ties go to the earliest
    candidate.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    X = np.atleast_2d(np.asarray(X, dtype=float))
    cost = np.asarray(cost, dtype=float)
    n, r = X.shape
    rng = np.random.default_rng(seed)

    def pool():
        s = score_vector(X)
        yield "sign", (_sweep(s) if sweep else np.where(s >= 0, 1, -1)[None, :])
        G = rng.standard_normal((trials, r))
        for t in range(trials):
            y = X @ G[t]
            yield f"trial[{t}]", (_sweep(y) if sweep else np.where(y >= 0, 1, -1)[None, :])

    best: Optional[tuple] = None  # (key, labels, obj, feasible, source)
    for source, cands in pool():
        vals = np.einsum("ki,ij,kj->k", cands, cost, cands)
        if problem is not None:
            viol = _violations(problem, cands.astype(float))
            slack = tol * (1.0 + problem.stacked.bounds)
            feas = np.all(viol <= slack, axis=1)
            total = viol.sum(axis=1)
        else:
            feas = np.ones(len(cands), dtype=bool)
            total = np.zeros(len(cands))
        # Feasible first, then least violation, then lowest cost.
        keys = np.where(feas, 0.0, 1.0), np.where(feas, 0.0, total), vals
        k = np.lexsort(keys[::-1])[0]
        key = (keys[0][k], keys[1][k], vals[k])
        if best is None or key < best[0]:
            best = (key, cands[k].copy(), float(vals[k]), bool(feas[k]), source)
    _, labels, _, feasible, source = best
    return Labeling(labels, quad_value(labels, cost), feasible, source)
