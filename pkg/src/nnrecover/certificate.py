"""Explicit dual witnesses for the clique and biclique relaxations.

For a planted rank-one optimum ``X* = u v^T`` the witness ``(W, lambda, mu)``
must satisfy ``W v = 0``, ``u^T W = 0``, ``||W|| <= 1`` and the stationarity
identity

    u v^T / sqrt(m n) + W = mu * e e^T + sum_{(i,j) not in E} lambda_ij e_i e_j^T.

``||W|| < 1`` together with ``mu > 0`` makes ``X*`` the unique optimizer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .graph import BipartiteGraph, Graph, VertexSet, clique_degrees
from .linalg import frobenius_norm, power_spectral_norm, singular_values

STRICT_MARGIN = 1e-8
KKT_TOL = 1e-10


class CertificateInfeasible(ValueError):
    """Some outside vertex is adjacent to every planted vertex on the other side,
    so no witness of the prescribed form exists."""

    def __init__(self, message, saturated=()):
        super().__init__(message)
        self.saturated = list(saturated)


def adversarial_gamma() -> float:
    return 0.0


def random_gamma(p: float) -> float:
    """Gamma that makes the off-block witness entries ``-gamma/n`` equal to the
    mean-zero value ``-p/((1-p) n)`` of the random decomposition."""
    if not 0.0 <= p < 1.0:
        raise ValueError("p must lie in [0, 1)")
    return p / (1.0 - p)


@dataclass
class Certificate:
    W: np.ndarray
    lam: dict
    mu: float
    gamma: float
    left: VertexSet
    right: VertexSet
    forbidden: np.ndarray  # boolean mask of pairs outside E
    saturated_vertices: list = field(default_factory=list)

    @property
    def scale(self) -> float:
        return math.sqrt(len(self.left) * len(self.right))

    def lambda_matrix(self) -> np.ndarray:
        L = np.zeros_like(self.W)
        for (i, j), v in self.lam.items():
            L[i, j] = v
        return L

    def kkt_residual(self) -> float:
        """Max-abs entry of ``u v^T/sqrt(mn) + W - mu ee^T - sum lambda_ij e_i e_j^T``."""
        u = self.left.characteristic_vector
        v = self.right.characteristic_vector
        R = np.outer(u, v) / self.scale + self.W - self.mu - self.lambda_matrix()
        return float(np.abs(R).max()) if R.size else 0.0

    @property
    def diagnostics(self) -> dict:
        # recomputed on each access
        u = self.left.characteristic_vector
        v = self.right.characteristic_vector
        return {
            "W_spectral": witness_norm(self.W),
            "W_frobenius": frobenius_norm(self.W),
            "kkt_residual": self.kkt_residual(),
            "left_null_residual": float(np.abs(u @ self.W).max(initial=0.0)),
            "right_null_residual": float(np.abs(self.W @ v).max(initial=0.0)),
            "saturated_vertices": list(self.saturated_vertices),
        }


def witness_norm(W, tol: float = 1e-10) -> float:
    """Spectral norm by power iteration, falling back to a full SVD when the
    estimate lies close to the pass/fail boundary at 1."""
    W = np.asarray(W, dtype=float)
    if not np.any(W):
        return 0.0
    est = power_spectral_norm(W, tol=tol)
    if abs(est - 1.0) < 1e-3:
        return float(singular_values(W)[0])
    return est


def build_clique_certificate(g: Graph, vstar, gamma: float = 0.0) -> Certificate:
    """Witness for the clique relaxation with ``mu = 1/n``.

    Entry rules, with ``E`` the edge set plus the diagonal:

    * planted x planted: ``W = 0``
    * other edges (off-diagonal): ``W = 1/n``
    * diagonal outside the clique: ``W = 1/n``
    * non-edges between two outside vertices: ``W = -gamma/n``,
      ``lambda = -(1+gamma)/n``
    * non-edges between planted ``i`` and outside ``j``:
      ``W = -p_j/(n(n-p_j))``, ``lambda = -1/n - p_j/(n(n-p_j))`` (and the
      transpose), where ``p_j`` counts the planted neighbours of ``j``.
    """
    N = g.num_vertices
    if not isinstance(vstar, VertexSet):
        vstar = VertexSet(tuple(vstar), N)
    n = len(vstar)
    if n == 0:
        raise ValueError("planted set is empty")
    A = g.adjacency.astype(bool)
    inside = vstar.mask
    if not A[np.ix_(inside, inside)].sum() == n * (n - 1):
        raise ValueError("planted set does not induce a clique")

    deg = clique_degrees(g, vstar)
    outside = ~inside
    saturated = [int(j) for j in np.flatnonzero(outside & (deg == n))]
    if saturated:
        raise CertificateInfeasible(
            f"outside vertices adjacent to the whole clique: {saturated}", saturated)

    allowed = A | np.eye(N, dtype=bool)
    forbidden = ~allowed
    W = np.zeros((N, N))
    lam = np.zeros((N, N))

    W[allowed] = 1.0 / n
    W[np.ix_(inside, inside)] = 0.0

    out_out = forbidden & np.outer(outside, outside)
    W[out_out] = -gamma / n
    lam[out_out] = -(1.0 + gamma) / n

    pj = deg.astype(float)
    with np.errstate(divide="ignore", invalid="ignore"):
        corr = np.where(outside, -pj / (n * (n - pj)), 0.0)
    in_out = forbidden & np.outer(inside, outside)
    Wio = np.broadcast_to(corr[None, :], (N, N))
    W[in_out] = Wio[in_out]
    lam[in_out] = -1.0 / n + Wio[in_out]
    out_in = forbidden & np.outer(outside, inside)
    Woi = np.broadcast_to(corr[:, None], (N, N))
    W[out_in] = Woi[out_in]
    lam[out_in] = -1.0 / n + Woi[out_in]

    lam_map = {(int(i), int(j)): float(lam[i, j]) for i, j in zip(*np.nonzero(forbidden))}
    return Certificate(W, lam_map, 1.0 / n, gamma, vstar, vstar, forbidden, [])


def build_biclique_certificate(g: BipartiteGraph, ustar, vstar, gamma: float = 0.0) -> Certificate:
    """Witness for the biclique relaxation with ``mu = 1/sqrt(mn)``.

    * U* x V*: ``W = 0``
    * other edges: ``W = 1/sqrt(mn)``
    * non-edges in (U-U*) x (V-V*): ``W = -gamma/sqrt(mn)``
    * non-edges in (U-U*) x V*: ``W = -p_i/((n-p_i) sqrt(mn))``
    * non-edges in U* x (V-V*): ``W = -q_j/((m-q_j) sqrt(mn))``

    with ``lambda`` chosen so each stationarity entry balances.
    """
    M, N = g.left_count, g.right_count
    if not isinstance(ustar, VertexSet):
        ustar = VertexSet(tuple(ustar), M)
    if not isinstance(vstar, VertexSet):
        vstar = VertexSet(tuple(vstar), N)
    m, n = len(ustar), len(vstar)
    if m == 0 or n == 0:
        raise ValueError("planted sets must be nonempty")
    B = g.biadjacency.astype(bool)
    uin, vin = ustar.mask, vstar.mask
    if not B[np.ix_(uin, vin)].all():
        raise ValueError("planted sets do not induce a biclique")
    uout, vout = ~uin, ~vin

    p = B[:, vin].sum(axis=1)
    q = B[uin, :].sum(axis=0)
    sat = [("left", int(i)) for i in np.flatnonzero(uout & (p == n))]
    sat += [("right", int(j)) for j in np.flatnonzero(vout & (q == m))]
    if sat:
        raise CertificateInfeasible(f"saturated outside vertices: {sat}", sat)

    s = math.sqrt(m * n)
    forbidden = ~B
    W = np.zeros((M, N))
    lam = np.zeros((M, N))
    W[B] = 1.0 / s
    W[np.ix_(uin, vin)] = 0.0

    oo = forbidden & np.outer(uout, vout)
    W[oo] = -gamma / s
    lam[oo] = -(1.0 + gamma) / s

    with np.errstate(divide="ignore", invalid="ignore"):
        rowc = np.where(uout, -p / ((n - p) * s), 0.0)
        colc = np.where(vout, -q / ((m - q) * s), 0.0)
    ov = forbidden & np.outer(uout, vin)
    Wr = np.broadcast_to(rowc[:, None], (M, N))
    W[ov] = Wr[ov]
    lam[ov] = Wr[ov] - 1.0 / s
    uo = forbidden & np.outer(uin, vout)
    Wc = np.broadcast_to(colc[None, :], (M, N))
    W[uo] = Wc[uo]
    lam[uo] = Wc[uo] - 1.0 / s

    lam_map = {(int(i), int(j)): float(lam[i, j]) for i, j in zip(*np.nonzero(forbidden))}
    return Certificate(W, lam_map, 1.0 / s, gamma, ustar, vstar, forbidden, [])


@dataclass
class VerificationReport:
    null_space_ok: bool
    norm_ok: bool
    mu_positive: bool
    kkt_identity_ok: bool
    strict: bool
    W_spectral: float
    diagnostics: dict

    @property
    def overall(self) -> bool:
        ok = self.null_space_ok and self.norm_ok and self.kkt_identity_ok
        return ok and (self.mu_positive or not self.strict)

    def to_dict(self) -> dict:
        return {
            "null_space_ok": self.null_space_ok,
            "norm_ok": self.norm_ok,
            "mu_positive": self.mu_positive,
            "kkt_identity_ok": self.kkt_identity_ok,
            "strict": self.strict,
            "overall": self.overall,
            "W_spectral": self.W_spectral,
            **{k: v for k, v in self.diagnostics.items() if k != "W_spectral"},
        }


def verify(cert: Certificate, strict: bool = True,
           null_tol: float = 1e-12, kkt_tol: float = KKT_TOL) -> VerificationReport:
    """Check the witness conditions.

    ``strict`` asks for ``||W|| < 1 - 1e-8`` and ``mu > 1e-8`` (uniqueness);
    otherwise ``||W|| <= 1`` and ``mu >= 0`` (optimality).
    """
    diag = cert.diagnostics
    scale = max(len(cert.left), len(cert.right))
    null_ok = max(diag["left_null_residual"], diag["right_null_residual"]) <= null_tol * scale
    norm = diag["W_spectral"]
    norm_ok = norm < 1.0 - STRICT_MARGIN if strict else norm <= 1.0 + STRICT_MARGIN
    mu_ok = cert.mu > STRICT_MARGIN if strict else cert.mu >= 0.0
    kkt_ok = diag["kkt_residual"] <= kkt_tol
    return VerificationReport(null_ok, norm_ok, mu_ok, kkt_ok, strict, norm, diag)


def certify_instance(instance, gamma: Optional[float] = None, strict: bool = True):
    """Build the witness for a :class:`PlantedInstance` and verify it.

    ``gamma`` defaults to the random-model preset when the instance carries an
    edge probability, else to 0. Returns ``(certificate, report)``.
    """
    if gamma is None:
        p = instance.params.get("p") if instance.params else None
        gamma = random_gamma(p) if p is not None else adversarial_gamma()
    if instance.is_biclique:
        cert = build_biclique_certificate(instance.graph, instance.planted_left,
                                          instance.planted_right, gamma)
    else:
        cert = build_clique_certificate(instance.graph, instance.planted_left, gamma)
    return cert, verify(cert, strict=strict)


# ---------------------------------------------------------------------------
# orthogonal decomposition used in the uniqueness argument

@dataclass
class SubspaceParts:
    Z1: np.ndarray
    Z2: np.ndarray
    Z3: np.ndarray
    Z4: np.ndarray
    Z5: np.ndarray

    def as_tuple(self):
        return (self.Z1, self.Z2, self.Z3, self.Z4, self.Z5)

    def total(self) -> np.ndarray:
        return self.Z1 + self.Z2 + self.Z3 + self.Z4 + self.Z5


def subspace_decompose(Z, ustar: VertexSet, vstar: VertexSet) -> SubspaceParts:
    """Split ``Z`` into the five mutually orthogonal pieces

    * ``Z5 = a u v^T`` with ``a = u^T Z v / (|U*| |V*|)``
    * ``Z1`` with ``u^T Z1 = 0`` and ``Z1 v = 0``
    * ``Z2 = x2 v^T`` with ``x2`` supported off U*
    * ``Z3 = u y2^T`` with ``y2`` supported off V*
    * ``Z4 = x1 v^T + u y1^T`` inside U* x V* with zero entry sum.
    """
    Z = np.asarray(Z, dtype=float)
    if len(ustar) == 0 or len(vstar) == 0:
        raise ValueError("planted sets must be nonempty")
    if Z.shape != (ustar.universe, vstar.universe):
        raise ValueError(f"shape {Z.shape} does not match ({ustar.universe}, {vstar.universe})")
    u = ustar.characteristic_vector
    v = vstar.characteristic_vector
    uu, vv = u @ u, v @ v

    a = u @ Z @ v / (uu * vv)
    Z5 = a * np.outer(u, v)
    Zd = Z - Z5
    x = Zd @ v / vv
    y = Zd.T @ u / uu
    Z1 = Zd - np.outer(x, v) - np.outer(u, y)
    x1, x2 = x * u, x * (1 - u)
    y1, y2 = y * v, y * (1 - v)
    Z2 = np.outer(x2, v)
    Z3 = np.outer(u, y2)
    Z4 = np.outer(x1, v) + np.outer(u, y1)
    return SubspaceParts(Z1, Z2, Z3, Z4, Z5)


def subgradient_check(Xstar, phi, trials: int = 200, seed: int = 0,
                      atol: float = 1e-10) -> bool:
    """Sample ``Y`` and test ``||Y||_* - ||X*||_* >= phi . (Y - X*)``.

    Samples mix Gaussian matrices at several scales with perturbations of X*
    so both far and near points are probed. The first samples step along the
    top singular pair of the part of ``phi`` orthogonal to X*'s row and column
    spaces, the direction in which an oversized witness shows up.
    """
    Xstar = np.asarray(Xstar, dtype=float)
    phi = np.asarray(phi, dtype=float)
    rng = np.random.default_rng(seed)
    base = singular_values(Xstar).sum()
    U, s, Vt = np.linalg.svd(Xstar)
    r = int(np.sum(s > 1e-12 * max(s[0], 1e-300))) if s.size else 0
    Pl = np.eye(Xstar.shape[0]) - U[:, :r] @ U[:, :r].T
    Pr = np.eye(Xstar.shape[1]) - Vt[:r].T @ Vt[:r]
    a, _, bt = np.linalg.svd(Pl @ phi @ Pr)
    probes = [Xstar + t * np.outer(a[:, 0], bt[0]) for t in (1e-2, 1.0)]
    for k in range(trials):
        G = rng.standard_normal(Xstar.shape)
        if k < len(probes):
            Y = probes[k]
        elif k % 3 == 0:
            Y = G * rng.uniform(0.1, 10.0)
        elif k % 3 == 1:
            Y = Xstar + rng.uniform(1e-3, 1.0) * G
        else:
            Y = rng.uniform(-2.0, 3.0) * Xstar + 0.01 * G
        lhs = singular_values(Y).sum() - base
        rhs = float(np.sum(phi * (Y - Xstar)))
        if lhs < rhs - atol * max(1.0, abs(rhs)):
            return False
    return True
