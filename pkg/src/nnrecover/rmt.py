"""Samplers for the two-point mean-zero distribution and Monte-Carlo checks of
the random-matrix norm bounds behind the random-model recovery guarantees.

The two-point law takes the value 1 with probability ``p`` and ``-p/(1-p)``
otherwise; it has mean 0 and variance ``p/(1-p)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .certificate import build_biclique_certificate, build_clique_certificate
from .linalg import frobenius_norm, power_spectral_norm, spectral_norm


class SaturatedColumn(ValueError):
    """A column consists entirely of ones, so its recentred version is undefined."""


@dataclass(frozen=True)
class OmegaParams:
    p: float

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"p must lie in (0, 1), got {self.p}")

    @property
    def sigma_squared(self) -> float:
        return self.p / (1.0 - self.p)

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma_squared)

    @property
    def low(self) -> float:
        return -self.p / (1.0 - self.p)


@dataclass
class TrialReport:
    """Per-trial statistics against a bound; ``math.inf`` samples mark trials
    where the statistic is undefined and always count as violations."""

    trials: int
    samples: list
    bound: float
    seed: int
    extra: dict = field(default_factory=dict)

    @property
    def violation_count(self) -> int:
        return sum(1 for s in self.samples if s > self.bound or math.isinf(s))

    @property
    def estimate(self) -> float:
        finite = [s for s in self.samples if math.isfinite(s)]
        return max(finite) if finite else math.inf

    def rows(self):
        for k, s in enumerate(self.samples):
            yield k, s, self.bound, bool(s > self.bound or math.isinf(s))


def sample_omega(rows: int, cols: int, params: OmegaParams, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return np.where(rng.random((rows, cols)) < params.p, 1.0, params.low)


def sample_omega_symmetric(n: int, params: OmegaParams, seed: int) -> np.ndarray:
    """Symmetric sample: the lower triangle (with diagonal) is i.i.d., then mirrored."""
    A = sample_omega(n, n, params, seed)
    L = np.tril(A)
    return L + np.tril(L, -1).T


def recenter_columns(A, n: Optional[int] = None) -> np.ndarray:
    """Replace every non-one entry of column ``j`` by ``-n_j/(n - n_j)`` where
    ``n_j`` counts the ones in that column, forcing zero column sums."""
    A = np.asarray(A, dtype=float)
    if n is None:
        n = A.shape[0]
    if n != A.shape[0]:
        raise ValueError("n must equal the number of rows")
    ones = A == 1.0
    nj = ones.sum(axis=0)
    if np.any(nj == n):
        raise SaturatedColumn(f"columns {np.flatnonzero(nj == n).tolist()} are all ones")
    fill = -nj / (n - nj)
    return np.where(ones, 1.0, fill[None, :])


def recentering_column_formula(A, p: float) -> float:
    """``sum_j (n_j - p n)^2 / ((1-p)^2 (n - n_j))``, the closed form of
    ``||A - recenter_columns(A)||_F^2``."""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    nj = (A == 1.0).sum(axis=0).astype(float)
    if np.any(nj == n):
        return math.inf
    return float(np.sum((nj - p * n) ** 2 / ((1 - p) ** 2 * (n - nj))))


def check_furedi_komlos(n: int, p: float, trials: int, seed: int) -> TrialReport:
    """Sample ``||A||`` for symmetric two-point matrices; bound ``3 sigma sqrt(n)``.
    Trial ``t`` uses seed ``seed + t``."""
    params = OmegaParams(p)
    samples = []
    for t in range(trials):
        A = sample_omega_symmetric(n, params, seed + t)
        samples.append(power_spectral_norm(A, tol=1e-8))
    return TrialReport(trials, samples, 3.0 * params.sigma * math.sqrt(n), seed)


def check_geman(n: int, y: float, p: float, trials: int, seed: int) -> TrialReport:
    """Sample ``||A|| / sqrt(n)`` for ``ceil(y n) x n`` two-point matrices.

    No explicit constant is available, so ``bound`` is infinite and
    ``estimate`` (the maximum sample) serves as the empirical constant.
    """
    params = OmegaParams(p)
    rows = math.ceil(y * n)
    samples = []
    for t in range(trials):
        A = sample_omega(rows, n, params, seed + t)
        samples.append(power_spectral_norm(A, tol=1e-8) / math.sqrt(n))
    return TrialReport(trials, samples, math.inf, seed, {"rows": rows})


def chernoff_bound(k: int, p: float, delta: float) -> float:
    """Upper bound ``(e^d / (1+d)^(1+d))^(p k)`` on ``P(S > (1+d) p k)`` for
    ``S ~ Binomial(k, p)``."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    if k < 1 or not 0.0 < p <= 1.0:
        raise ValueError("need k >= 1 and p in (0, 1]")
    return math.exp(p * k * (delta - (1.0 + delta) * math.log1p(delta)))


def chernoff_sqrt_bound(k: int, p: float, a: float) -> float:
    """``2 exp(-a^2/p)``, stated as a bound on ``P(|S - p k| > a sqrt(k))`` for
    ``a`` in ``(0, p sqrt(k))``.

    Exact binomial tails exceed this value for some admissible ``a`` whenever
    ``p < 1/2``; it is a valid tail bound only for ``p >= 1/2``.
    """
    if k < 1 or not 0.0 < p <= 1.0:
        raise ValueError("need k >= 1 and p in (0, 1]")
    if not 0.0 < a < p * math.sqrt(k):
        raise ValueError(f"a must lie in (0, p*sqrt(k)) = (0, {p * math.sqrt(k)})")
    return 2.0 * math.exp(-a * a / p)


def empirical_chernoff_tail(k: int, p: float, delta: float, draws: int, seed: int) -> float:
    """Monte-Carlo estimate of ``P(S > (1+delta) p k)``."""
    S = np.random.default_rng(seed).binomial(k, p, size=draws)
    return float(np.mean(S > (1.0 + delta) * p * k))


def empirical_sqrt_tail(k: int, p: float, a: float, draws: int, seed: int) -> float:
    S = np.random.default_rng(seed).binomial(k, p, size=draws)
    return float(np.mean(np.abs(S - p * k) > a * math.sqrt(k)))


def check_recentering_bound(n: int, N: int, p: float, trials: int, seed: int,
                            c1: float = math.inf) -> TrialReport:
    """Sample ``||A - A~||_F^2 / N`` for ``n x N`` two-point matrices.

    Saturated trials record ``inf``. ``extra`` carries the worst mismatch
    between the direct Frobenius value and the per-column closed form, and the
    worst recentred column sum.
    """
    params = OmegaParams(p)
    samples = []
    worst_formula = 0.0
    worst_colsum = 0.0
    saturated = 0
    for t in range(trials):
        A = sample_omega(n, N, params, seed + t)
        try:
            At = recenter_columns(A)
        except SaturatedColumn:
            samples.append(math.inf)
            saturated += 1
            continue
        direct = float(np.sum((A - At) ** 2))
        formula = recentering_column_formula(A, p)
        worst_formula = max(worst_formula, abs(direct - formula) / max(1.0, direct))
        worst_colsum = max(worst_colsum, float(np.abs(At.sum(axis=0)).max()))
        samples.append(direct / N)
    return TrialReport(trials, samples, c1, seed, {
        "formula_rel_diff": worst_formula,
        "max_column_sum": worst_colsum,
        "saturated_trials": saturated,
    })


# ---------------------------------------------------------------------------
# splitting the random-model witness into independently bounded pieces

@dataclass
class WDecomposition:
    W: np.ndarray
    parts: dict  # name -> matrix

    def reconstruction_error(self) -> float:
        total = sum(self.parts.values())
        return float(np.abs(total - self.W).max())

    def norms(self) -> dict:
        out = {}
        for name, P in self.parts.items():
            out[name] = {"spectral": spectral_norm(P), "frobenius": frobenius_norm(P)}
        out["W"] = {"spectral": spectral_norm(self.W), "frobenius": frobenius_norm(self.W)}
        return out


def decompose_random_W(instance, gamma: float, p: Optional[float] = None,
                       seed: int = 0) -> WDecomposition:
    """Split the witness of a random planted instance into the pieces used to
    bound its norm.

    Clique (five parts): ``W1`` carries a fresh two-point sample (scaled by
    ``1/n``) on the planted block and on the outside diagonal, equals ``W`` on
    edges and on outside non-edges, and takes the low two-point value on
    planted/outside non-edges; ``W2`` cancels ``W1`` on the planted block,
    ``W3`` corrects the outside diagonal, ``W4``/``W5`` correct the
    planted-row / planted-column non-edges.

    Biclique (four parts): the same split with scale ``1/sqrt(mn)``; ``W3``
    corrects U* x (V - V*) and ``W4`` corrects (U - U*) x V*.

    The samples use ``numpy.random.default_rng(seed)``.
    """
    if p is None:
        p = instance.params.get("p")
    if p is None:
        raise ValueError("edge probability p is required")
    rng = np.random.default_rng(seed)
    if instance.is_biclique:
        return _decompose_biclique(instance, gamma, p, rng)
    return _decompose_clique(instance, gamma, p, rng)


def _two_point(rng, shape, p, scale):
    return np.where(rng.random(shape) < p, 1.0, -p / (1.0 - p)) / scale


def _decompose_clique(instance, gamma, p, rng) -> WDecomposition:
    g = instance.graph
    cert = build_clique_certificate(g, instance.planted_left, gamma)
    W = cert.W
    N, n = g.num_vertices, len(instance.planted_left)
    inside = instance.planted_left.mask
    outside = ~inside
    forbidden = cert.forbidden
    low = -p / ((1.0 - p) * n)

    planted = np.outer(inside, inside)
    diag_out = np.diag(outside)
    in_out = forbidden & np.outer(inside, outside)
    out_in = forbidden & np.outer(outside, inside)

    W1 = W.copy()
    W1[in_out] = low
    W1[out_in] = low
    sym = _two_point(rng, (N, N), p, n)
    sym = np.tril(sym) + np.tril(sym, -1).T
    W1[planted] = sym[planted]
    W1[diag_out] = sym[diag_out]

    W2 = np.where(planted, -W1, 0.0)
    W3 = np.where(diag_out, W - W1, 0.0)
    W4 = np.where(in_out, W - W1, 0.0)
    W5 = np.where(out_in, W - W1, 0.0)
    return WDecomposition(W, {"W1": W1, "W2": W2, "W3": W3, "W4": W4, "W5": W5})


def _decompose_biclique(instance, gamma, p, rng) -> WDecomposition:
    g = instance.graph
    cert = build_biclique_certificate(g, instance.planted_left, instance.planted_right, gamma)
    W = cert.W
    M, N = W.shape
    m, n = len(instance.planted_left), len(instance.planted_right)
    scale = math.sqrt(m * n)
    uin, vin = instance.planted_left.mask, instance.planted_right.mask
    forbidden = cert.forbidden
    low = -p / ((1.0 - p) * scale)

    planted = np.outer(uin, vin)
    top_right = forbidden & np.outer(uin, ~vin)
    bottom_left = forbidden & np.outer(~uin, vin)

    W1 = W.copy()
    W1[top_right] = low
    W1[bottom_left] = low
    W1[planted] = _two_point(rng, (M, N), p, scale)[planted]

    W2 = np.where(planted, -W1, 0.0)
    W3 = np.where(top_right, W - W1, 0.0)
    W4 = np.where(bottom_left, W - W1, 0.0)
    return WDecomposition(W, {"W1": W1, "W2": W2, "W3": W3, "W4": W4})
