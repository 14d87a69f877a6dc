"""Problem representation and solver configuration.

An :class:`SdpProblem` holds the factored form of a low-rank SDP::

    minimize    trace(X^T C X)
    subject to  ||L_i X||_F^2  (=, <=, >=)  b_i

over X in R^{N x r}. Each constraint matrix A_i is stored through a factor
L_i with A_i = L_i^T L_i.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from . import linalg
from .errors import NegativeBound, NotPsd, RankOutOfRange

OBJECTIVE_PSD_TOL = 1e-8


class ConstraintSense(str, enum.Enum):
    EQ = "eq"
    LE = "le"
    GE = "ge"


class XUpdate(str, enum.Enum):
    CLOSED_FORM = "closed"
    GRADIENT = "gradient"


class GeMode(str, enum.Enum):
    EXTERIOR_PROJECTION = "exterior"
    HINGE = "hinge"


class Style(str, enum.Enum):
    GENERAL = "general"
    BQP = "bqp"
    METRIC = "metric"


@dataclass(frozen=True, eq=False)
class FactoredConstraint:
    factor: np.ndarray  # (p_i, N)
    bound: float
    sense: ConstraintSense = ConstraintSense.EQ
    label: str = ""

    def __post_init__(self):
        f = np.atleast_2d(np.asarray(self.factor, dtype=float))
        if f.ndim != 2 or not np.all(np.isfinite(f)):
            raise ValueError(f"{self.label or 'constraint'}: factor must be a finite 2-D array")
        b = float(self.bound)
        if not math.isfinite(b):
            raise ValueError(f"{self.label or 'constraint'}: bound must be finite")
        if b < 0:
            raise NegativeBound(f"{self.label or 'constraint'}: bound {b} < 0")
        f.setflags(write=False)
        object.__setattr__(self, "factor", f)
        object.__setattr__(self, "bound", b)
        object.__setattr__(self, "sense", ConstraintSense(self.sense))

    @property
    def gram(self) -> np.ndarray:
        return self.factor.T @ self.factor


@dataclass(frozen=True)
class Stacked:
    """All factors stacked row-wise, for vectorized per-constraint reductions."""

    L: np.ndarray  # (sum p_i, N)
    seg: np.ndarray  # row -> constraint index
    bounds: np.ndarray
    eq: np.ndarray
    le: np.ndarray
    ge: np.ndarray

    def sq_norms(self, LX: np.ndarray) -> np.ndarray:
        """||L_i X||_F^2 per constraint, given LX = L @ X."""
        return np.bincount(self.seg, weights=np.einsum("ij,ij->i", LX, LX),
                           minlength=self.bounds.size)


@dataclass(frozen=True, eq=False)
class SdpProblem:
    objective: np.ndarray
    constraints: tuple
    rank: int

    def __post_init__(self):
        C = linalg.check_symmetric(self.objective, "objective")
        n = C.shape[0]
        if not 1 <= int(self.rank) <= n:
            raise RankOutOfRange(f"rank {self.rank} outside [1, {n}]")
        cons = tuple(self.constraints)
        if not cons:
            raise ValueError("problem needs at least one constraint")
        for i, c in enumerate(cons):
            if not isinstance(c, FactoredConstraint):
                raise TypeError(f"constraint {i} is not a FactoredConstraint")
            if c.factor.shape[1] != n:
                raise ValueError(f"constraint {c.label or i}: factor has {c.factor.shape[1]} "
                                 f"columns, expected {n}")
        if np.any(C) and not linalg.min_eigenvalue_ok(C, OBJECTIVE_PSD_TOL):
            raise NotPsd("objective is not positive semidefinite", label="objective")
        C = C.copy()
        C.setflags(write=False)
        object.__setattr__(self, "objective", C)
        object.__setattr__(self, "constraints", cons)
        object.__setattr__(self, "rank", int(self.rank))

    @property
    def dim(self) -> int:
        return self.objective.shape[0]

    @property
    def num_constraints(self) -> int:
        return len(self.constraints)

    def count(self, sense: ConstraintSense) -> int:
        return sum(c.sense == sense for c in self.constraints)

    @cached_property
    def stacked(self) -> Stacked:
        L = np.vstack([c.factor for c in self.constraints])
        seg = np.repeat(np.arange(self.num_constraints),
                        [c.factor.shape[0] for c in self.constraints])
        senses = np.array([c.sense.value for c in self.constraints])
        return Stacked(
            L=L,
            seg=seg,
            bounds=np.array([c.bound for c in self.constraints]),
            eq=senses == "eq",
            le=senses == "le",
            ge=senses == "ge",
        )

    def violations(self, X) -> np.ndarray:
        """Nonnegative per-constraint violation of the factored constraints at X."""
        st = self.stacked
        sq = st.sq_norms(st.L @ np.asarray(X, dtype=float))
        d = sq - st.bounds
        return np.where(st.eq, np.abs(d), np.where(st.le, np.maximum(d, 0.0), np.maximum(-d, 0.0)))


@dataclass(frozen=True)
class SolverConfig:
    """Relaxation parameters and loop controls.

    ``alpha``/``beta`` left as None are filled from the GENERAL rule by
    :meth:`resolve`. ``exact_x_stage=False`` drops the factor 2 on C in the
    X-stage system, reproducing the published closed form instead of the
    exact block minimizer. ``init_scale`` selects the initializer scaling
    (see :func:`bcr.initializer.initialize`).
    """

    alpha: Optional[float] = None
    beta: Optional[float] = None
    alpha_beta_ratio: float = 2.0
    max_iters: int = 1000
    rel_obj_tol: float = 1e-6
    x_update: XUpdate = XUpdate.CLOSED_FORM
    grad_step: Optional[float] = None
    ge_mode: GeMode = GeMode.EXTERIOR_PROJECTION
    hinge_weight: Optional[float] = None
    ridge_schedule: tuple = (0.0, 1e-10, 1e-8, 1e-6)
    seed: int = 0
    exact_x_stage: bool = True
    init_scale: str = "fit"

    def __post_init__(self):
        object.__setattr__(self, "x_update", XUpdate(self.x_update))
        object.__setattr__(self, "ge_mode", GeMode(self.ge_mode))
        object.__setattr__(self, "ridge_schedule", tuple(float(r) for r in self.ridge_schedule))
        if self.init_scale not in ("fit", "eigenvalue"):
            raise ValueError(f"unknown init_scale {self.init_scale!r}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.alpha_beta_ratio <= 1:
            raise ValueError("alpha_beta_ratio must exceed 1")
        if self.alpha is not None and self.beta is not None and not self.alpha > self.beta > 0:
            raise ValueError(f"need alpha > beta > 0, got alpha={self.alpha}, beta={self.beta}")

    def resolve(self, problem: SdpProblem) -> "SolverConfig":
        """Fill unset alpha/beta (and hinge weight) from the GENERAL rule."""
        alpha, beta = self.alpha, self.beta
        if beta is None and alpha is None:
            beta = _general_beta(problem)
            alpha = self.alpha_beta_ratio * beta
        elif beta is None:
            beta = alpha / self.alpha_beta_ratio
        elif alpha is None:
            alpha = self.alpha_beta_ratio * beta
        mu = self.hinge_weight if self.hinge_weight is not None else alpha / 2
        return replace(self, alpha=float(alpha), beta=float(beta), hinge_weight=float(mu))


def _general_beta(problem: SdpProblem) -> float:
    beta = linalg.spectral_norm(problem.objective)
    return beta if beta > 0 else 1.0


@dataclass
class SolveResult:
    X: np.ndarray
    Q: list
    objective_trace: list
    iterations: int
    converged: bool
    feasibility: np.ndarray
    wall_time_ms: float
    config: Optional[SolverConfig] = None
    init_fallback: bool = False
    ridge: float = 0.0
    zero_bound_eq: list = field(default_factory=list)

    @property
    def objective(self) -> float:
        return self.objective_trace[-1] if self.objective_trace else float("nan")

    @property
    def max_violation(self) -> float:
        return float(np.max(self.feasibility)) if len(self.feasibility) else 0.0


def build_problem(objective, raw_constraints: Sequence, rank: int,
                  clamp_tol: float = 1e-10) -> SdpProblem:
    """Factor each constraint matrix A_i = L_i^T L_i and assemble the problem.

    ``raw_constraints`` holds ``(A, bound, sense)`` or ``(A, bound, sense, label)``
    tuples.
    """
    cons = []
    for i, raw in enumerate(raw_constraints):
        A, b, sense = raw[:3]
        label = raw[3] if len(raw) > 3 else f"c{i}"
        if float(b) < 0:
            raise NegativeBound(f"{label}: bound {b} < 0")
        L = linalg.psd_sqrt_factor(A, clamp_tol=clamp_tol, label=label)
        if L.shape[0] == 0:
            L = np.zeros((1, np.asarray(A).shape[0]))
        cons.append(FactoredConstraint(L, float(b), ConstraintSense(sense), label))
    return SdpProblem(np.asarray(objective, dtype=float), tuple(cons), rank)


def default_config(problem: SdpProblem, style: Style = Style.GENERAL, **overrides) -> SolverConfig:
    style = Style(style)
    if style is Style.GENERAL:
        beta = _general_beta(problem)
        cfg = SolverConfig(alpha=2.0 * beta, beta=beta)
    elif style is Style.BQP:
        beta = 5.0 / math.sqrt(problem.num_constraints)
        cfg = SolverConfig(alpha=2.0 * beta, beta=beta)
    else:
        pairs = problem.count(ConstraintSense.LE) + problem.count(ConstraintSense.GE)
        alpha = 1.0 / math.sqrt(max(pairs, 1))
        cfg = SolverConfig(alpha=alpha, beta=alpha / 2, hinge_weight=alpha / 2,
                           ge_mode=GeMode.HINGE)
    return replace(cfg, **overrides) if overrides else cfg
