"""Independent reference computations used to check the solver.

Nothing here imports the solver, initializer or rounding code. The routines
are deliberately simple (enumeration, Jacobi rotations, scalar loops) so they
share no code path with what they verify.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import Infeasible, TooLarge

MAX_BRUTE_FORCE = 22


@dataclass(frozen=True)
class BruteForceResult:
    best_labels: np.ndarray
    best_objective: float
    num_feasible: int


def _labelings(n: int, start: int, stop: int) -> np.ndarray:
    # Integer k maps to labels with bit (n-1-i) of k selecting +1 at position i,
    # so increasing k is lexicographic order with -1 < +1.
    k = np.arange(start, stop, dtype=np.int64)[:, None]
    bits = (k >> np.arange(n - 1, -1, -1, dtype=np.int64)) & 1
    return (2 * bits - 1).astype(float)


def _satisfies(labels: np.ndarray, constraints, tol: float) -> np.ndarray:
    ok = np.ones(labels.shape[0], dtype=bool)
    for factor, bound, sense in constraints:
        v = labels @ np.atleast_2d(np.asarray(factor, dtype=float)).T
        val = np.sum(v * v, axis=1)
        slack = tol * (1.0 + abs(bound))
        sense = getattr(sense, "value", sense)
        if sense == "eq":
            ok &= np.abs(val - bound) <= slack
        elif sense == "le":
            ok &= val <= bound + slack
        elif sense == "ge":
            ok &= val >= bound - slack
        else:
            raise ValueError(f"unknown sense {sense!r}")
    return ok


def brute_force_bqp(cost, constraints=None, tol: float = 1e-9, chunk: int = 1 << 15,
                    reverse: bool = False) -> BruteForceResult:
    """Exact minimizer of x^T cost x over x in {-1, +1}^N by enumeration.

    ``constraints`` is an optional list of ``(factor, bound, sense)``; a labeling
    is feasible when ||factor @ x||^2 compares to ``bound`` within ``tol``.
    Ties go to the lexicographically smallest labeling. ``reverse`` walks the
    labelings in the opposite order (same answer; used as a cross-check).
    """
    cost = np.asarray(cost, dtype=float)
    n = cost.shape[0]
    if n > MAX_BRUTE_FORCE:
        raise TooLarge(f"N = {n} exceeds enumeration limit {MAX_BRUTE_FORCE}")
    constraints = list(constraints or [])
    total = 1 << n
    vals = np.empty(total)
    starts = range(0, total, chunk)
    for s in (reversed(starts) if reverse else starts):
        e = min(s + chunk, total)
        X = _labelings(n, s, e)
        v = np.einsum("ij,jk,ik->i", X, cost, X)
        if constraints:
            v[~_satisfies(X, constraints, tol)] = np.inf
        vals[s:e] = v
    feasible = int(np.isfinite(vals).sum())
    if feasible == 0:
        raise Infeasible("no labeling satisfies the constraints")
    best = vals.min()
    ties = vals <= best + 1e-12 * (1.0 + abs(best))
    if reverse:
        best_k = total - 1 - int(np.flatnonzero(ties[::-1])[-1])
    else:
        best_k = int(np.argmax(ties))
    labels = _labelings(n, best_k, best_k + 1)[0]
    return BruteForceResult(labels, float(labels @ cost @ labels), feasible)


@dataclass(frozen=True)
class FeasibilityReport:
    labels: list
    senses: list
    bounds: np.ndarray
    values: np.ndarray  # trace(X^T A_i X)
    signed: np.ndarray  # values - bounds
    violations: np.ndarray  # nonnegative, per sense
    max_violation: float

    def feasible(self, tol: float) -> bool:
        return self.max_violation <= tol


def check_solution(problem, X, tol: float = 1e-3) -> FeasibilityReport:
    """Re-evaluate every constraint at X as trace(X^T L^T L X)."""
    X = np.asarray(X, dtype=float)
    vals, signed, viol, labels, senses, bounds = [], [], [], [], [], []
    for c in problem.constraints:
        A = c.factor.T @ c.factor
        v = float(np.trace(X.T @ A @ X))
        d = v - c.bound
        s = c.sense.value
        vals.append(v)
        signed.append(d)
        viol.append(abs(d) if s == "eq" else max(d, 0.0) if s == "le" else max(-d, 0.0))
        labels.append(c.label)
        senses.append(s)
        bounds.append(c.bound)
    viol = np.array(viol)
    return FeasibilityReport(labels, senses, np.array(bounds), np.array(vals), np.array(signed),
                             viol, float(viol.max()) if viol.size else 0.0)


def jacobi_eigh(A, tol: float = 1e-14, max_sweeps: int = 100):
    """All eigenpairs of a symmetric matrix by cyclic Jacobi rotations.

    Returns ``(w, V)`` with ascending eigenvalues and orthonormal columns.
    """
    A = np.array(A, dtype=float, copy=True)
    n = A.shape[0]
    V = np.eye(n)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.triu(A, 1) ** 2) * 2.0)
        if off <= tol * max(1.0, np.linalg.norm(A)):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) < 1e-300:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                Ap, Aq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * Ap - s * Aq
                A[:, q] = s * Ap + c * Aq
                Ap, Aq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * Ap - s * Aq
                A[q, :] = s * Ap + c * Aq
                Vp, Vq = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * Vp - s * Vq
                V[:, q] = s * Vp + c * Vq
    w = np.diag(A).copy()
    order = np.argsort(w)
    return w[order], V[:, order]


def bcr_objective_termwise(C, factors, bounds, senses, alpha, beta, X, Q,
                           hinge_weight=None) -> float:
    """Relaxed objective summed one constraint at a time, in reverse order.

    ``hinge_weight`` adds the GE hinge term; leave None for exterior mode.
    """
    X = np.asarray(X, dtype=float)
    total = 0.0
    for i in reversed(range(len(factors))):
        L, q = np.asarray(factors[i]), np.asarray(Q[i])
        r = q - L @ X
        total += 0.5 * alpha * float(np.sum(r * r))
        qn = float(np.sum(q * q))
        if senses[i] == "eq" and bounds[i] > 0:
            total -= 0.5 * beta * qn
        if senses[i] == "ge" and hinge_weight is not None:
            total += hinge_weight * max(0.0, bounds[i] - qn) ** 2
    for k in range(X.shape[1]):
        x = X[:, k]
        total += float(x @ (np.asarray(C) @ x))
    return total
