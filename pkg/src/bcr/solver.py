"""Alternating minimization for the biconvex relaxation.

The relaxed objective over (X, {Q_i}) is::

    trace(X^T C X) + a/2 sum_i ||Q_i - L_i X||_F^2 - b/2 sum_{i in EQ} ||Q_i||_F^2
                   [+ mu sum_{i in GE} max(0, b_i - ||Q_i||_F^2)^2   in HINGE mode]

with ||Q_i||^2 <= b_i for EQ/LE constraints and ||Q_i||^2 >= b_i for GE
constraints in EXTERIOR_PROJECTION mode. Each sweep minimizes exactly over all
Q_i (radial closed forms) and then over X (one linear solve against a
precomputed Cholesky factor, or one gradient step).

Internally the Q_i are kept stacked row-wise in one array aligned with
``problem.stacked.L``.
"""

from __future__ import annotations

import logging
import time

import numpy as np

from . import linalg
from .errors import NotSpd
from .initializer import initialize
from .model import GeMode, SdpProblem, SolveResult, SolverConfig, XUpdate

log = logging.getLogger(__name__)


def _resolved(problem: SdpProblem, config: SolverConfig) -> SolverConfig:
    if config.alpha is None or config.beta is None or config.hinge_weight is None:
        config = config.resolve(problem)
    return config


def _stack_q(problem: SdpProblem, Q) -> np.ndarray:
    if isinstance(Q, np.ndarray):
        return Q
    return np.vstack(Q)


def split_q(problem: SdpProblem, Qs: np.ndarray) -> list:
    bounds = np.cumsum([c.factor.shape[0] for c in problem.constraints])[:-1]
    return np.split(Qs, bounds)


def bcr_objective(problem: SdpProblem, config: SolverConfig, X, Q) -> float:
    """Value of the relaxed objective at (X, Q). Q is a list or a stacked array."""
    config = _resolved(problem, config)
    st = problem.stacked
    X = np.asarray(X, dtype=float)
    Qs = _stack_q(problem, Q)
    LX = st.L @ X
    D = Qs - LX
    val = float(np.sum(X * (problem.objective @ X)))
    val += 0.5 * config.alpha * float(np.sum(D * D))
    qsq = st.sq_norms(Qs)
    val -= 0.5 * config.beta * float(np.sum(qsq[st.eq & (st.bounds > 0)]))
    if config.ge_mode is GeMode.HINGE and st.ge.any():
        gap = np.maximum(st.bounds[st.ge] - qsq[st.ge], 0.0)
        val += config.hinge_weight * float(np.sum(gap * gap))
    return val


def hinge_radii(a, b, alpha: float, mu: float) -> np.ndarray:
    """Elementwise argmin over s >= 0 of alpha/2 (s - a)^2 + mu max(0, b - s^2)^2.

    Candidates are max(a, sqrt b), min(a, sqrt b), sqrt b, 0 and the real roots
    in [0, sqrt b] of 4mu s^3 + (alpha - 4mu b) s - alpha a = 0, found for all entries at once
    from batched companion matrices.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    sb = np.sqrt(b)
    cands = [np.maximum(a, sb), np.minimum(a, sb), sb, np.zeros_like(a)]
    if mu > 0 and a.size:
        # Monic form s^3 + p s + q.
        p = (alpha - 4.0 * mu * b) / (4.0 * mu)
        q = -alpha * a / (4.0 * mu)
        comp = np.zeros((a.size, 3, 3))
        comp[:, 0, 1] = -p
        comp[:, 0, 2] = -q
        comp[:, 1, 0] = 1.0
        comp[:, 2, 1] = 1.0
        roots = np.linalg.eigvals(comp)
        real = np.abs(roots.imag) < 1e-8 * (1.0 + np.abs(roots.real))
        r = roots.real
        keep = real & (r >= 0.0) & (r <= sb[:, None]) & (b[:, None] > 0)
        cands += [np.where(keep[:, k], r[:, k], sb) for k in range(3)]
    S = np.stack(cands, axis=1)
    h = np.maximum(b[:, None] - S * S, 0.0)
    g = 0.5 * alpha * (S - a[:, None]) ** 2 + mu * h * h
    return S[np.arange(a.size), np.argmin(g, axis=1)]


def hinge_radius(a: float, b: float, alpha: float, mu: float) -> float:
    """Scalar version of :func:`hinge_radii`."""
    return float(hinge_radii(a, b, alpha, mu)[0])


def q_radii(problem: SdpProblem, config: SolverConfig, norms: np.ndarray) -> np.ndarray:
    """Target Frobenius norm of each Q_i given ||L_i X||_F."""
    st = problem.stacked
    a, b = norms, st.bounds
    sb = np.sqrt(b)
    alpha, beta = config.alpha, config.beta
    radius = np.empty_like(a)
    expand = alpha / (alpha - beta)
    radius[st.eq] = np.minimum(sb[st.eq], expand * a[st.eq])
    radius[st.eq & (b == 0)] = 0.0
    radius[st.le] = np.minimum(sb[st.le], a[st.le])
    if config.ge_mode is GeMode.EXTERIOR_PROJECTION:
        radius[st.ge] = np.maximum(sb[st.ge], a[st.ge])
    else:
        radius[st.ge] = hinge_radii(a[st.ge], b[st.ge], alpha, config.hinge_weight)
    return radius


def update_Q(problem: SdpProblem, config: SolverConfig, X, *, stacked: bool = False):
    """Exact minimization over every Q_i with X fixed.

    Q_i is L_i X rescaled to the optimal radius. When L_i X = 0 the radius is
    0 except for GE constraints, whose minimizer sits on the sphere in an
    arbitrary direction; the first entry of Q_i is used.
    """
    config = _resolved(problem, config)
    st = problem.stacked
    LX = st.L @ np.asarray(X, dtype=float)
    norms = np.sqrt(st.sq_norms(LX))
    radius = q_radii(problem, config, norms)
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(norms > 0, radius / norms, 0.0)
    Qs = LX * scale[st.seg][:, None]
    for i in np.flatnonzero((norms == 0) & (radius > 0)):
        row = np.flatnonzero(st.seg == i)[0]
        Qs[row, 0] = radius[i]
    return Qs if stacked else split_q(problem, Qs)


def x_system(problem: SdpProblem, config: SolverConfig) -> np.ndarray:
    """Matrix of the X-stage normal equations, ``cC + alpha sum L_i^T L_i``."""
    L = problem.stacked.L
    c = 2.0 if config.exact_x_stage else 1.0
    K = c * problem.objective + config.alpha * (L.T @ L)
    return 0.5 * (K + K.T)


def factor_x_system(problem: SdpProblem, config: SolverConfig) -> linalg.SpdFactor:
    """Cholesky factor of the X-stage system, escalating the ridge on failure."""
    K = x_system(problem, config)
    scale = 1.0 + float(np.max(np.abs(np.diag(K))))
    last = None
    for r in config.ridge_schedule:
        try:
            return linalg.spd_solve_factor(K, ridge=r * scale)
        except NotSpd as exc:
            last = exc
            log.debug("X-stage factorization failed at ridge %g", r * scale)
    raise NotSpd(f"X-stage system not factorizable with any ridge in schedule: {last}")


def update_X_closed(problem: SdpProblem, config: SolverConfig, Q, factor=None) -> np.ndarray:
    config = _resolved(problem, config)
    if factor is None:
        factor = factor_x_system(problem, config)
    rhs = config.alpha * (problem.stacked.L.T @ _stack_q(problem, Q))
    return factor.solve(rhs)


def x_stage_objective(problem: SdpProblem, config: SolverConfig, X, Q) -> float:
    """The X-dependent part of the relaxed objective."""
    config = _resolved(problem, config)
    X = np.asarray(X, dtype=float)
    D = _stack_q(problem, Q) - problem.stacked.L @ X
    return float(np.sum(X * (problem.objective @ X))) + 0.5 * config.alpha * float(np.sum(D * D))


def x_gradient(problem: SdpProblem, config: SolverConfig, X, Q) -> np.ndarray:
    config = _resolved(problem, config)
    L = problem.stacked.L
    X = np.asarray(X, dtype=float)
    return 2.0 * problem.objective @ X + config.alpha * (L.T @ (L @ X - _stack_q(problem, Q)))


def auto_step(problem: SdpProblem, config: SolverConfig) -> float:
    """Inverse Lipschitz constant of the X-stage gradient."""
    config = _resolved(problem, config)
    L = problem.stacked.L
    K = 2.0 * problem.objective + config.alpha * (L.T @ L)
    return 1.0 / linalg.spectral_norm(0.5 * (K + K.T))


def update_X_gradient(problem: SdpProblem, config: SolverConfig, X, Q, step=None) -> np.ndarray:
    config = _resolved(problem, config)
    if step is None:
        step = config.grad_step if config.grad_step is not None else auto_step(problem, config)
    return np.asarray(X, dtype=float) - step * x_gradient(problem, config, X, Q)


def solve(problem: SdpProblem, config: SolverConfig | None = None, X0=None) -> SolveResult:
    """Run alternating minimization from the spectral initializer (or ``X0``)."""
    t0 = time.perf_counter()
    config = _resolved(problem, config or SolverConfig())
    if config.alpha <= config.beta and problem.stacked.eq.any():
        raise ValueError("alpha must exceed beta")

    fallback = False
    if X0 is None:
        init = initialize(problem, seed=config.seed, scale=config.init_scale)
        X, fallback = init.X0, init.fallback_used
    else:
        X = np.array(X0, dtype=float)

    factor, step, ridge = None, None, 0.0
    if config.x_update is XUpdate.CLOSED_FORM:
        factor = factor_x_system(problem, config)
        ridge = factor.ridge
    else:
        step = config.grad_step if config.grad_step is not None else auto_step(problem, config)

    trace = []
    converged = False
    Qs = None
    for it in range(1, config.max_iters + 1):
        Qs = update_Q(problem, config, X, stacked=True)
        if factor is not None:
            X = update_X_closed(problem, config, Qs, factor)
        else:
            X = update_X_gradient(problem, config, X, Qs, step)
        f = bcr_objective(problem, config, X, Qs)
        if not np.isfinite(f):
            log.warning("objective became non-finite at sweep %d", it)
            trace.append(f)
            break
        if trace and abs(trace[-1] - f) <= config.rel_obj_tol * abs(trace[-1]):
            trace.append(f)
            converged = True
            break
        trace.append(f)

    zero_eq = [c.label for c in problem.constraints if c.sense == "eq" and c.bound == 0]
    return SolveResult(
        X=X,
        Q=split_q(problem, Qs),
        objective_trace=trace,
        iterations=len(trace),
        converged=converged,
        feasibility=problem.violations(X),
        wall_time_ms=1000.0 * (time.perf_counter() - t0),
        config=config,
        init_fallback=fallback,
        ridge=ridge,
        zero_bound_eq=zero_eq,
    )
