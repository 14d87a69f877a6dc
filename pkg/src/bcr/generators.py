"""Synthetic benchmark instances for the four problem families.

All instances are built from seeded random data: a low-rank recovery problem,
a graph-cut BQP with grouping priors, a multi-image co-segmentation BQP, and
a metric-learning problem over SPD matrices.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DegenerateGraph, NotPsd
from .model import ConstraintSense, FactoredConstraint, SdpProblem

EQ, LE, GE = ConstraintSense.EQ, ConstraintSense.LE, ConstraintSense.GE


# ---------------------------------------------------------------------------
# Low-rank recovery


@dataclass(frozen=True)
class SyntheticSpec:
    n: int = 64
    true_rank: int = 3
    num_constraints: int = 600
    seed: int = 0
    factor_rows: int = 1

    def __post_init__(self):
        if not 1 <= self.true_rank <= self.n:
            raise ValueError("true_rank must be in [1, n]")
        if self.num_constraints < 1 or self.factor_rows < 1:
            raise ValueError("num_constraints and factor_rows must be >= 1")


def gen_synthetic(spec: SyntheticSpec, x_true: Optional[np.ndarray] = None):
    """Random rank-``true_rank`` recovery instance.

    Y_true = sum_k x_k x_k^T with standard-normal x_k, objective C = G^T G, and
    equality constraints <H_i^T H_i, Y_true> = b_i with standard-normal H_i of
    shape (factor_rows, n). Returns ``(problem, Y_true)``.
    """
    rng = np.random.default_rng(spec.seed)
    n, r = spec.n, spec.true_rank
    Xs = rng.standard_normal((n, r))
    if x_true is not None:
        Xs = np.asarray(x_true, dtype=float).reshape(n, r)
    G = rng.standard_normal((n, n))
    C = G.T @ G
    H = rng.standard_normal((spec.num_constraints, spec.factor_rows, n))
    HX = H @ Xs
    b = np.einsum("mij,mij->m", HX, HX)
    cons = tuple(FactoredConstraint(H[i], float(b[i]), EQ, f"meas[{i}]")
                 for i in range(spec.num_constraints))
    return SdpProblem(C, cons, r), Xs @ Xs.T


def synthetic_truth(spec: SyntheticSpec) -> np.ndarray:
    """The ground-truth factor X (n x true_rank) drawn by :func:`gen_synthetic`."""
    return np.random.default_rng(spec.seed).standard_normal((spec.n, spec.true_rank))


def relative_error(Y_rec, Y_true) -> float:
    return float(np.linalg.norm(Y_rec - Y_true) / np.linalg.norm(Y_true))


# ---------------------------------------------------------------------------
# Graph-cut segmentation


@dataclass(frozen=True)
class GraphCutSpec:
    """Synthetic segmentation instance.

    Points are uniform in the unit square, ``n // 2`` of them in the left half,
    and re-indexed by x coordinate, so index 0 is the leftmost point. Features
    are color-histogram stand-ins drawn around one of two palettes depending on
    which half of the square a point falls in.
    """

    n: int = 20
    feature_dim: int = 4
    gamma_f: float = 0.3
    gamma_d: float = 0.4
    radius: float = 0.8
    kappa: float = 0.6
    fg_idx: tuple = (0,)
    bg_idx: Optional[tuple] = None
    seed: int = 0
    rank: int = 2

    def __post_init__(self):
        bg = self.bg_idx if self.bg_idx is not None else (self.n - 1,)
        object.__setattr__(self, "fg_idx", tuple(int(i) for i in self.fg_idx))
        object.__setattr__(self, "bg_idx", tuple(int(i) for i in bg))
        if not self.fg_idx or not self.bg_idx:
            raise ValueError("fg_idx and bg_idx must be non-empty")
        if set(self.fg_idx) & set(self.bg_idx):
            raise ValueError("fg_idx and bg_idx must be disjoint")
        if any(not 0 <= i < self.n for i in self.fg_idx + self.bg_idx):
            raise ValueError("fg/bg index out of range")
        if not 0.0 <= self.kappa <= 1.0:
            raise ValueError("kappa must lie in [0, 1]")
        if not 1 <= self.rank <= self.n:
            raise ValueError("rank must be in [1, n]")


def affinity(features, positions, gamma_f: float, gamma_d: float, radius: float) -> np.ndarray:
    """Gaussian affinity on feature and spatial distance, zero beyond ``radius``."""
    F = np.asarray(features, dtype=float)
    P = np.asarray(positions, dtype=float)
    df2 = np.sum((F[:, None, :] - F[None, :, :]) ** 2, axis=-1)
    dd2 = np.sum((P[:, None, :] - P[None, :, :]) ** 2, axis=-1)
    W = np.exp(-df2 / gamma_f**2 - dd2 / gamma_d**2)
    W[np.sqrt(dd2) >= radius] = 0.0
    return 0.5 * (W + W.T)


def _two_region_points(rng, n, feature_dim, concentration=20.0):
    # Half the points fall in each half of the square, so the balanced cut
    # separating the two regions is available.
    pos = rng.uniform(size=(n, 2))
    pos[:, 0] = 0.5 * pos[:, 0] + 0.5 * (np.arange(n) >= n // 2)
    pos = pos[np.argsort(pos[:, 0], kind="stable")]
    palettes = rng.dirichlet(np.ones(feature_dim), size=2)
    region = (pos[:, 0] >= 0.5).astype(int)
    feats = np.array([rng.dirichlet(concentration * palettes[c] + 0.1) for c in region])
    return pos, feats, region


def gen_graphcut(spec: GraphCutSpec):
    """Graph-cut BQP over a synthetic image. Returns ``(problem, laplacian)``."""
    rng = np.random.default_rng(spec.seed)
    n = spec.n
    pos, feats, _ = _two_region_points(rng, n, spec.feature_dim)
    W = affinity(feats, pos, spec.gamma_f, spec.gamma_d, spec.radius)
    off = W.sum(axis=1) - np.diag(W)
    if np.any(off <= 0):
        raise DegenerateGraph(f"points {np.flatnonzero(off <= 0).tolist()} have no neighbours")
    d = W.sum(axis=1)
    lap = np.diag(d) - W
    P = W / d[:, None]

    t_f = np.zeros(n)
    t_f[list(spec.fg_idx)] = 1.0
    t_b = np.zeros(n)
    t_b[list(spec.bg_idx)] = 1.0

    eye = np.eye(n)
    cons = [FactoredConstraint(eye[i:i + 1], 1.0, EQ, f"diag[{i}]") for i in range(n)]
    cons.append(FactoredConstraint(np.ones((1, n)), 0.0, EQ, "balance"))
    for name, t in (("group_fg", t_f), ("group_bg", t_b), ("group_fg_bg", t_f - t_b)):
        row = (t @ P)[None, :]
        cons.append(FactoredConstraint(row, spec.kappa * float(np.abs(row).sum()) ** 2, GE, name))
    return SdpProblem(lap, tuple(cons), spec.rank), lap


# ---------------------------------------------------------------------------
# Co-segmentation


@dataclass(frozen=True)
class CosegSpec:
    images: int = 2
    sizes: tuple = (4, 4)
    mu: float = 1.0
    lambda_bound: float = 2.0
    seed: int = 0
    rank: int = 2
    feature_dim: int = 3
    ridge: float = 0.1

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        if len(self.sizes) != self.images or min(self.sizes) < 1:
            raise ValueError("sizes must list a positive pixel count per image")
        if self.lambda_bound <= 0:
            raise ValueError("lambda_bound must be positive")
        if not 1 <= self.rank <= sum(self.sizes):
            raise ValueError("rank must be in [1, N]")


def gen_coseg(spec: CosegSpec):
    """Co-segmentation BQP with per-image balance constraints.

    The cost is ``A_b + (mu/N) A_w``: A_w is block diagonal with one
    graph Laplacian per image; A_b is a ridge discriminative-clustering cost
    over features shared by all images (foreground pixels of every image share
    a feature mean). Negative eigenvalues of the sum are clamped to zero.
    Returns ``(problem, cost)``.
    """
    rng = np.random.default_rng(spec.seed)
    N = sum(spec.sizes)
    means = rng.standard_normal((2, spec.feature_dim)) * 2.0
    feats, blocks = [], []
    for size in spec.sizes:
        pos = rng.uniform(size=(size, 2))
        cls = (pos[:, 0] < 0.5).astype(int)
        f = means[cls] + 0.5 * rng.standard_normal((size, spec.feature_dim))
        W = affinity(f, pos, gamma_f=2.0, gamma_d=0.5, radius=np.inf)
        blocks.append(np.diag(W.sum(axis=1)) - W)
        feats.append(f)
    Phi = np.vstack(feats)
    Aw = np.zeros((N, N))
    o = 0
    for blk in blocks:
        k = blk.shape[0]
        Aw[o:o + k, o:o + k] = blk
        o += k
    Pi = np.eye(N) - np.ones((N, N)) / N
    PPhi = Pi @ Phi
    inner = PPhi.T @ PPhi + N * spec.ridge * np.eye(spec.feature_dim)
    Ab = Pi - PPhi @ np.linalg.solve(inner, PPhi.T)
    A = Ab + (spec.mu / N) * Aw
    A = 0.5 * (A + A.T)
    w, V = np.linalg.eigh(A)
    A = (V * np.maximum(w, 0.0)) @ V.T
    A = 0.5 * (A + A.T)

    eye = np.eye(N)
    cons = [FactoredConstraint(eye[i:i + 1], 1.0, EQ, f"diag[{i}]") for i in range(N)]
    o = 0
    for m, size in enumerate(spec.sizes):
        delta = np.zeros((1, N))
        delta[0, o:o + size] = 1.0
        cons.append(FactoredConstraint(delta, spec.lambda_bound**2, LE, f"balance[{m}]"))
        o += size
    return SdpProblem(A, tuple(cons), spec.rank), A


# ---------------------------------------------------------------------------
# Metric learning on SPD matrices


@dataclass(frozen=True)
class MetricSpec:
    """SPD metric-learning instance.

    Matrix i belongs to cluster ``i % 2``. When pair lists are omitted, every
    within-cluster pair is similar and every cross-cluster pair dissimilar.
    """

    num_matrices: int = 20
    dim: int = 10
    target_rank: int = 3
    xi: float = 0.5
    mu: Optional[float] = None
    similar_pairs: Optional[tuple] = None
    dissimilar_pairs: Optional[tuple] = None
    noise: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if not 1 <= self.target_rank <= self.dim:
            raise ValueError("target_rank must be in [1, dim]")
        if self.num_matrices < 2:
            raise ValueError("need at least two matrices")
        sim, dis = default_pairs(self)
        object.__setattr__(self, "similar_pairs", sim)
        object.__setattr__(self, "dissimilar_pairs", dis)
        for i, j in sim + dis:
            if not (0 <= i < self.num_matrices and 0 <= j < self.num_matrices) or i == j:
                raise ValueError(f"bad pair {(i, j)}")
        if {frozenset(p) for p in sim} & {frozenset(p) for p in dis}:
            raise ValueError("similar and dissimilar pair sets overlap")
        if not sim and not dis:
            raise ValueError("no pairs given")


def default_pairs(spec: MetricSpec):
    norm = lambda ps: tuple((int(i), int(j)) for i, j in ps)  # noqa: E731
    if spec.similar_pairs is not None and spec.dissimilar_pairs is not None:
        return norm(spec.similar_pairs), norm(spec.dissimilar_pairs)
    sim, dis = [], []
    for i, j in itertools.combinations(range(spec.num_matrices), 2):
        (sim if i % 2 == j % 2 else dis).append((i, j))
    sim = norm(spec.similar_pairs) if spec.similar_pairs is not None else tuple(sim)
    dis = norm(spec.dissimilar_pairs) if spec.dissimilar_pairs is not None else tuple(dis)
    return sim, dis


def spd_log(S) -> np.ndarray:
    """Matrix logarithm of an SPD matrix via its eigendecomposition."""
    w, V = np.linalg.eigh(np.asarray(S, dtype=float))
    R = (V * np.log(np.maximum(w, 1e-12))) @ V.T
    return 0.5 * (R + R.T)


def lem_distance(Si, Sj) -> float:
    """Squared log-Euclidean distance ||log Si - log Sj||_F^2."""
    D = spd_log(Si) - spd_log(Sj)
    return float(np.sum(D * D))


def projected_distance(X, Ri, Rj) -> float:
    """trace(X (Ri - Rj)^T (Ri - Rj)) for a PSD X."""
    D = np.asarray(Ri) - np.asarray(Rj)
    return float(np.trace(np.asarray(X) @ D.T @ D))


def spd_matrices(spec: MetricSpec) -> list:
    """S_i = B_c^T B_c + noise * G_i^T G_i with one base B_c per cluster."""
    rng = np.random.default_rng(spec.seed)
    bases = [rng.standard_normal((spec.dim, spec.dim)) for _ in range(2)]
    out = []
    for i in range(spec.num_matrices):
        B = bases[i % 2]
        G = rng.standard_normal((spec.dim, spec.dim))
        S = B.T @ B + spec.noise * (G.T @ G)
        S = 0.5 * (S + S.T)
        if np.linalg.eigvalsh(S)[0] <= 0:
            raise NotPsd(f"generated S[{i}] is not SPD")
        out.append(S)
    return out


def gen_metric(spec: MetricSpec):
    """Metric-learning problem in the factor Y (dim x K) with X = Y Y^T.

    Constraint factors are R_i - R_j (R = log S), so ||(R_i - R_j) Y||_F^2 equals
    the projected distance. Similar pairs get ``<= u`` and dissimilar pairs
    ``>= l`` with u, l = rho -/+ xi tau from the mean and standard deviation of
    all pairwise log-Euclidean distances. Returns ``(problem, pair_data)`` with
    ``pair_data`` a list of ``((i, j), sense, bound)``.
    """
    S = spd_matrices(spec)
    R = [spd_log(s) for s in S]
    all_d = [float(np.sum((R[i] - R[j]) ** 2))
             for i, j in itertools.combinations(range(spec.num_matrices), 2)]
    rho, tau = float(np.mean(all_d)), float(np.std(all_d))
    u, l = rho - spec.xi * tau, rho + spec.xi * tau
    if u < 0:
        raise ValueError(f"upper bound u = {u:.4g} < 0; lower xi")

    cons, pair_data = [], []
    for (i, j) in spec.similar_pairs:
        cons.append(FactoredConstraint(R[i] - R[j], u, LE, f"sim[{i},{j}]"))
        pair_data.append(((i, j), LE, u))
    for (i, j) in spec.dissimilar_pairs:
        cons.append(FactoredConstraint(R[i] - R[j], l, GE, f"dis[{i},{j}]"))
        pair_data.append(((i, j), GE, l))
    return SdpProblem(np.eye(spec.dim), tuple(cons), spec.target_rank), pair_data
