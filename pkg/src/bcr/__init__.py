"""Low-rank SDP solver based on a biconvex relaxation with alternating minimization."""

from .errors import BCRError, NotPsd, NotSpd
from .generators import (CosegSpec, GraphCutSpec, MetricSpec, SyntheticSpec, gen_coseg,
                         gen_graphcut, gen_metric, gen_synthetic)
from .initializer import initialize
from .model import (ConstraintSense, FactoredConstraint, GeMode, SdpProblem, SolveResult,
                    SolverConfig, Style, XUpdate, build_problem, default_config)
from .rounding import hyperplane_round, score_vector, sign_round
from .solver import bcr_objective, solve, update_Q, update_X_closed, update_X_gradient

__version__ = "0.1.0"

__all__ = [
    "BCRError", "NotPsd", "NotSpd",
    "CosegSpec", "GraphCutSpec", "MetricSpec", "SyntheticSpec",
    "gen_coseg", "gen_graphcut", "gen_metric", "gen_synthetic",
    "initialize",
    "ConstraintSense", "FactoredConstraint", "GeMode", "SdpProblem", "SolveResult",
    "SolverConfig", "Style", "XUpdate", "build_problem", "default_config",
    "hyperplane_round", "score_vector", "sign_round",
    "bcr_objective", "solve", "update_Q", "update_X_closed", "update_X_gradient",
]
