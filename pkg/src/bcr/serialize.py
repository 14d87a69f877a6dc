"""JSON problem and result files.

Problem files::

    {"n": 3, "rank": 1,
     "objective": {"kind": "zero"} | {"kind": "dense", "values": [[...]]},
     "constraints": [{"sense": "eq", "b": 1.0, "factor": [[...]]}, ...],
     "config": {"alpha": ..., "beta": ..., "max_iters": ..., "tol": ...,
                "x_update": ..., "ge_mode": ..., "seed": ...}}

Each constraint carries exactly one of "matrix" (A_i, factored on load) or
"factor" (L_i). Optional extras: a per-constraint "label" and a top-level
"style" naming the default-parameter rule (general, bqp, metric).

Floats are written with Python's shortest round-trip repr, so a load after a
dump reproduces every value bit for bit.
"""

from __future__ import annotations

import json
import math
from typing import Optional

import numpy as np

from . import linalg
from .errors import BCRError
from .model import (ConstraintSense, FactoredConstraint, SdpProblem, SolveResult, Style,
                    SolverConfig, default_config)

CONFIG_KEYS = ("alpha", "beta", "max_iters", "tol", "x_update", "ge_mode", "seed",
               "hinge_weight", "grad_step")


class FormatError(BCRError, ValueError):
    """Malformed problem or result file."""


def _matrix(value, what: str, shape=None) -> np.ndarray:
    try:
        M = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"{what}: not a numeric matrix ({exc})") from None
    if M.ndim != 2:
        raise FormatError(f"{what}: expected a 2-D array, got {M.ndim}-D")
    if not np.all(np.isfinite(M)):
        raise FormatError(f"{what}: non-finite entry")
    if shape is not None:
        for got, want in zip(M.shape, shape):
            if want is not None and got != want:
                raise FormatError(f"{what}: shape {M.shape}, expected {shape}")
    return M


def _rows(M) -> list:
    return [[float(v) for v in row] for row in np.asarray(M)]


def problem_to_dict(problem: SdpProblem, style: Optional[Style] = None,
                    config: Optional[dict] = None) -> dict:
    C = problem.objective
    obj = {"kind": "zero"} if not np.any(C) else {"kind": "dense", "values": _rows(C)}
    cons = []
    for c in problem.constraints:
        cons.append({"label": c.label, "sense": c.sense.value, "b": c.bound,
                     "factor": _rows(c.factor)})
    out = {"n": problem.dim, "rank": problem.rank, "objective": obj, "constraints": cons}
    if style is not None:
        out["style"] = Style(style).value
    if config:
        out["config"] = dict(config)
    return out


def problem_from_dict(d: dict) -> tuple:
    """Returns ``(problem, style or None, config dict)``."""
    if not isinstance(d, dict):
        raise FormatError("problem file must hold a JSON object")
    for key in ("n", "rank", "objective", "constraints"):
        if key not in d:
            raise FormatError(f"missing field {key!r}")
    n, rank = d["n"], d["rank"]
    if not isinstance(n, int) or n < 1:
        raise FormatError("n must be a positive integer")
    if not isinstance(rank, int):
        raise FormatError("rank must be an integer")

    obj = d["objective"]
    kind = obj.get("kind") if isinstance(obj, dict) else None
    if kind == "zero":
        C = np.zeros((n, n))
    elif kind == "dense":
        C = _matrix(obj.get("values"), "objective", (n, n))
    else:
        raise FormatError("objective.kind must be 'zero' or 'dense'")

    raw = d["constraints"]
    if not isinstance(raw, list):
        raise FormatError("constraints must be a list")
    cons = []
    for i, c in enumerate(raw):
        label = str(c.get("label", f"c{i}"))
        try:
            sense = ConstraintSense(c.get("sense"))
        except ValueError:
            raise FormatError(f"{label}: sense must be eq, le or ge") from None
        b = c.get("b")
        if not isinstance(b, (int, float)) or isinstance(b, bool) or not math.isfinite(b):
            raise FormatError(f"{label}: b must be a finite number")
        if ("matrix" in c) == ("factor" in c):
            raise FormatError(f"{label}: give exactly one of 'matrix' or 'factor'")
        if "factor" in c:
            L = _matrix(c["factor"], label, (None, n))
        else:
            A = _matrix(c["matrix"], label, (n, n))
            L = linalg.psd_sqrt_factor(A, label=label)
            if L.shape[0] == 0:
                L = np.zeros((1, n))
        cons.append(FactoredConstraint(L, float(b), sense, label))

    style = d.get("style")
    if style is not None:
        try:
            style = Style(style)
        except ValueError:
            raise FormatError(f"unknown style {style!r}") from None
    config = d.get("config") or {}
    unknown = set(config) - set(CONFIG_KEYS)
    if unknown:
        raise FormatError(f"unknown config keys {sorted(unknown)}")
    return SdpProblem(C, tuple(cons), rank), style, dict(config)


def config_from(problem: SdpProblem, style: Optional[Style], settings: dict) -> SolverConfig:
    """Default config for ``style`` with file/flag settings layered on top."""
    s = {k: v for k, v in settings.items() if v is not None}
    if "tol" in s:
        s["rel_obj_tol"] = s.pop("tol")
    cfg = default_config(problem, style or Style.GENERAL)
    # Setting only one of alpha/beta keeps the configured ratio.
    if ("alpha" in s) != ("beta" in s):
        cfg = SolverConfig(**{**_fields(cfg), "alpha": None, "beta": None})
    return SolverConfig(**{**_fields(cfg), **s}).resolve(problem)


def _fields(cfg: SolverConfig) -> dict:
    return {k: getattr(cfg, k) for k in cfg.__dataclass_fields__}


def result_to_dict(result: SolveResult, timing: bool = True) -> dict:
    cfg = result.config
    out = {
        "objective_trace": [float(v) for v in result.objective_trace],
        "converged": bool(result.converged),
        "iterations": int(result.iterations),
        "runtime_ms": float(result.wall_time_ms) if timing else 0.0,
        "X": _rows(result.X),
        "feasibility": [float(v) for v in result.feasibility],
        "max_violation": result.max_violation,
    }
    if cfg is not None:
        out["config"] = {"alpha": cfg.alpha, "beta": cfg.beta, "hinge_weight": cfg.hinge_weight,
                         "x_update": cfg.x_update.value, "ge_mode": cfg.ge_mode.value,
                         "max_iters": cfg.max_iters, "tol": cfg.rel_obj_tol, "seed": cfg.seed}
    if result.zero_bound_eq:
        out["zero_bound_eq"] = list(result.zero_bound_eq)
    return out


def result_X(d: dict, n: int) -> np.ndarray:
    if not isinstance(d, dict) or "X" not in d:
        raise FormatError("result file has no 'X'")
    return _matrix(d["X"], "X", (n, None))


def dumps(obj) -> str:
    return json.dumps(obj, indent=1, allow_nan=False) + "\n"


def load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from None


def write_text(path: str, text: str) -> None:
    with open(path, "w") as fh:
        fh.write(text)
