"""Nuclear-norm relaxations of maximum clique / maximum-edge biclique.

Both problems are solved in homogenized form

    minimize ||X||_*  subject to  sum(X) >= 1,  X_ij = 0 for (i, j) outside the pattern

by ADMM on the split ``X = Z``: the X-step is singular value thresholding, the
Z-step is the exact projection onto the constraint set, and the penalty is
adapted by residual balancing. The clique pattern is the edge set plus the
diagonal; iterates stay symmetric so an eigendecomposition replaces the SVD.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .graph import BipartiteGraph, Graph, VertexSet, is_biclique, is_clique
from .linalg import svt, svt_lowrank, svt_symmetric

# internal constraint level; optimum is homogeneous so this only sets the scale
_LEVEL_PER_ROW = 0.1


@dataclass(frozen=True)
class SolverConfig:
    max_iterations: int = 5000
    primal_tolerance: float = 1e-6
    dual_tolerance: float = 1e-6
    step_parameter: float = 1.0
    rounding_threshold: float = 0.5
    adaptive_step: bool = False
    relaxation: float = 1.0
    lowrank_prox: bool = True

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.primal_tolerance <= 0 or self.dual_tolerance <= 0:
            raise ValueError("tolerances must be positive")
        if self.step_parameter <= 0:
            raise ValueError("step_parameter must be positive")


@dataclass
class SolverResult:
    X: np.ndarray                 # raw optimizer, sum(X) >= 1
    X_scaled: np.ndarray          # rescaled to unit peak entry
    converged: bool
    iterations: int
    residuals: tuple
    objective: float              # nuclear norm of the raw X
    candidate: Union[VertexSet, tuple, None]
    rank_one_gap: float
    degenerate: bool = False
    runtime_ms: float = 0.0
    history: list = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        if isinstance(self.candidate, tuple):
            cand = {"left": list(self.candidate[0].members), "right": list(self.candidate[1].members)}
        elif self.candidate is None:
            cand = []
        else:
            cand = list(self.candidate.members)
        return {
            "converged": self.converged,
            "iterations": self.iterations,
            "objective": self.objective,
            "rank_one_gap": self.rank_one_gap,
            "candidate": cand,
            "degenerate": self.degenerate,
            "residuals": list(self.residuals),
            "runtime_ms": self.runtime_ms,
        }


def project_feasible(Y: np.ndarray, allowed: np.ndarray, level: float) -> np.ndarray:
    """Euclidean projection onto ``{X : X = 0 off allowed, sum(X) >= level}``."""
    mask = allowed if allowed.dtype == float else allowed.astype(float)
    Z = Y * mask
    deficit = level - Z.sum()
    if deficit > 0:
        Z += (deficit / np.count_nonzero(allowed)) * mask
    return Z


def admm_nuclear(allowed: np.ndarray, cfg: SolverConfig, symmetric: bool = False,
                 level: Optional[float] = None):
    """ADMM core. Returns ``(Z, iterations, converged, (r_pri, r_dual), history)``.

    Residuals are relative: primal ``||X-Z||_F / max(||X||_F, ||Z||_F)`` and
    dual ``rho ||Z - Z_prev||_F / ||rho U||_F``.
    """
    rows, cols = allowed.shape
    allowed = allowed.astype(float)
    if level is None:
        level = _LEVEL_PER_ROW * max(rows, cols)
    rho = cfg.step_parameter
    Z = project_feasible(np.zeros((rows, cols)), allowed, level)
    U = np.zeros_like(Z)
    history = []
    r_pri = r_dual = math.inf
    converged = False
    it = 0
    rank, lead = 1, None
    for it in range(1, cfg.max_iterations + 1):
        if cfg.lowrank_prox:
            X, rank, lead = svt_lowrank(Z - U, 1.0 / rho, k=rank + 2,
                                        symmetric=symmetric, v0=lead)
        else:
            X = (svt_symmetric if symmetric else svt)(Z - U, 1.0 / rho)
        Z_prev = Z
        Xh = cfg.relaxation * X + (1.0 - cfg.relaxation) * Z_prev
        Z = project_feasible(Xh + U, allowed, level)
        U = U + Xh - Z
        nz = np.linalg.norm(Z)
        r_pri = np.linalg.norm(X - Z) / max(np.linalg.norm(X), nz, 1e-300)
        r_dual = np.linalg.norm(Z - Z_prev) / max(np.linalg.norm(U), 1e-300)
        history.append((r_pri, r_dual))
        if r_pri <= cfg.primal_tolerance and r_dual <= cfg.dual_tolerance:
            converged = True
            break
        if cfg.adaptive_step and it % 10 == 0:
            # residual balancing; U is the scaled dual so it rescales with rho
            if r_pri > 10.0 * r_dual:
                rho *= 2.0
                U /= 2.0
            elif r_dual > 10.0 * r_pri:
                rho /= 2.0
                U *= 2.0
    return Z / level, it, converged, (float(r_pri), float(r_dual)), history


def _top_pair(X: np.ndarray):
    Uv, s, Vt = np.linalg.svd(X)
    gap = float(s[1] / s[0]) if s.size > 1 and s[0] > 0 else 0.0
    u, v = Uv[:, 0], Vt[0]
    # fix the sign so the dominant direction is nonnegative
    if u.sum() + v.sum() < 0:
        u, v = -u, -v
    return u, v, s, gap


def _peak_scores(x: np.ndarray) -> np.ndarray:
    x = np.clip(x, 0.0, None)
    peak = x.max()
    return x / peak if peak > 0 else x


def _repair_clique(g: Graph, members: list[int], scores: np.ndarray) -> list[int]:
    members = sorted(members, key=lambda v: (-scores[v], v))
    while members and not is_clique(g, members):
        members.pop()
    return sorted(members)


def _repair_biclique(g: BipartiteGraph, left: list[int], right: list[int],
                     ls: np.ndarray, rs: np.ndarray):
    pool = [(ls[i], 0, i) for i in left] + [(rs[j], 1, j) for j in right]
    pool.sort(key=lambda t: (t[0], -t[1], -t[2]))
    L, R = set(left), set(right)
    for _, side, v in pool:
        if is_biclique(g, sorted(L), sorted(R)):
            break
        (L if side == 0 else R).discard(v)
    return sorted(L), sorted(R)


def solve_clique_relaxation(g: Graph, cfg: SolverConfig = SolverConfig()) -> SolverResult:
    """Solve the clique relaxation and round to a clique.

    Rounding takes the top singular pair of the solution, scales the averaged
    vector to unit peak, keeps entries at or above ``rounding_threshold`` and
    greedily drops the lowest-scoring vertices until a clique remains. A
    solution whose top two singular values nearly coincide
    (``rank_one_gap >= 0.99``) is reported as degenerate with no candidate.
    """
    N = g.num_vertices
    if N == 0:
        raise ValueError("graph is empty")
    t0 = time.perf_counter()
    allowed = g.adjacency.astype(bool) | np.eye(N, dtype=bool)
    X, it, conv, res, hist = admm_nuclear(allowed, cfg, symmetric=True)
    X = 0.5 * (X + X.T)
    u, v, s, gap = _top_pair(X)
    peak = np.abs(X).max()
    Xs = X / peak if peak > 0 else X
    degenerate = gap >= 0.99
    cand = None
    if not degenerate:
        scores = _peak_scores(0.5 * (u + v))
        keep = [int(i) for i in np.flatnonzero(scores >= cfg.rounding_threshold)]
        cand = VertexSet(tuple(_repair_clique(g, keep, scores)), N)
    runtime = 1e3 * (time.perf_counter() - t0)
    return SolverResult(X, Xs, conv, it, res, float(s.sum()), cand, gap, degenerate,
                        runtime, hist)


def solve_biclique_relaxation(g: BipartiteGraph, cfg: SolverConfig = SolverConfig()) -> SolverResult:
    """Solve the biclique relaxation and round to a biclique (see
    :func:`solve_clique_relaxation` for the rounding rule; here the two sides
    use the left and right singular vectors respectively)."""
    M, N = g.left_count, g.right_count
    if M == 0 or N == 0:
        raise ValueError("graph is empty")
    t0 = time.perf_counter()
    allowed = g.biadjacency.astype(bool)
    if not allowed.any():
        raise ValueError("graph has no edges; the relaxation is infeasible")
    X, it, conv, res, hist = admm_nuclear(allowed, cfg, symmetric=False)
    u, v, s, gap = _top_pair(X)
    peak = np.abs(X).max()
    Xs = X / peak if peak > 0 else X
    degenerate = gap >= 0.99
    cand = None
    if not degenerate:
        ls, rs = _peak_scores(u), _peak_scores(v)
        left = [int(i) for i in np.flatnonzero(ls >= cfg.rounding_threshold)]
        right = [int(j) for j in np.flatnonzero(rs >= cfg.rounding_threshold)]
        L, R = _repair_biclique(g, left, right, ls, rs)
        cand = (VertexSet(tuple(L), M), VertexSet(tuple(R), N))
    runtime = 1e3 * (time.perf_counter() - t0)
    return SolverResult(X, Xs, conv, it, res, float(s.sum()), cand, gap, degenerate,
                        runtime, hist)
