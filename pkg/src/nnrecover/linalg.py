"""Matrix norms, singular value thresholding and a power-iteration spectral norm."""

from __future__ import annotations

import numpy as np


def _finite(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def singular_values(A) -> np.ndarray:
    A = _finite(A)
    if A.size == 0:
        return np.zeros(0)
    return np.linalg.svd(A, compute_uv=False)


def nuclear_norm(A) -> float:
    """Sum of singular values."""
    return float(singular_values(A).sum())


def spectral_norm(A) -> float:
    """Largest singular value (via SVD)."""
    s = singular_values(A)
    return float(s[0]) if s.size else 0.0


def frobenius_norm(A) -> float:
    return float(np.linalg.norm(_finite(A), "fro"))


def power_spectral_norm(A, tol: float = 1e-10, max_iter: int = 10000, seed: int = 0) -> float:
    """Largest singular value by power iteration on ``A^T A``.

    Stops once the relative change of the estimate drops below ``tol``. The
    start vector is drawn from a fixed seed so the result is reproducible.
    """
    A = _finite(A)
    if A.size == 0:
        return 0.0
    x = np.random.default_rng(seed).standard_normal(A.shape[1])
    x /= np.linalg.norm(x)
    est = 0.0
    for _ in range(max_iter):
        y = A.T @ (A @ x)
        ny = np.linalg.norm(y)
        if ny == 0.0:
            return 0.0
        new = np.sqrt(ny)
        x = y / ny
        if abs(new - est) <= tol * new:
            return float(new)
        est = new
    return float(est)


def svt(A, tau: float) -> np.ndarray:
    """Proximal map of ``tau * ||.||_*``: soft-threshold the singular values."""
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    A = _finite(A)
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    s = np.maximum(s - tau, 0.0)
    k = int(np.count_nonzero(s))
    return (U[:, :k] * s[:k]) @ Vt[:k]


def svt_symmetric(A, tau: float) -> np.ndarray:
    """Same map as :func:`svt` for a symmetric input, via one eigendecomposition.

    For ``A = Q diag(l) Q^T`` the singular values are ``|l|`` with singular
    vectors ``Q`` and ``sign(l) Q``, so thresholding keeps the eigenvalue signs.
    """
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    A = _finite(A)
    lam, Q = np.linalg.eigh(0.5 * (A + A.T))
    shrunk = np.sign(lam) * np.maximum(np.abs(lam) - tau, 0.0)
    keep = shrunk != 0.0
    Qk = Q[:, keep]
    return (Qk * shrunk[keep]) @ Qk.T


def svt_lowrank(A, tau: float, k: int = 4, symmetric: bool = False, v0=None):
    """:func:`svt` computed from a truncated decomposition.

    Asks ARPACK for the ``k`` leading singular (or largest-magnitude eigen)
    pairs and doubles ``k`` until the smallest returned value is at most
    ``tau``, which proves every discarded value would have been zeroed anyway.
    Falls back to the dense path once ``k`` reaches a third of the dimension.

    Returns ``(result, rank, lead)`` where ``lead`` is the leading vector, to be
    passed back as ``v0`` on the next call (a warm start; the default start
    vector is all ones, so results are reproducible).
    """
    from scipy.sparse.linalg import eigsh, svds

    A = _finite(A)
    dim = min(A.shape)
    size = A.shape[0] if symmetric else min(A.shape)
    if v0 is None or len(v0) != size or not np.any(v0):
        v0 = np.ones(size)
    k = max(1, int(k))
    while 3 * k < dim:
        if symmetric:
            lam, Q = eigsh(0.5 * (A + A.T), k=k, which="LM", v0=v0, tol=0)
            if np.abs(lam).min() <= tau:
                shrunk = np.sign(lam) * np.maximum(np.abs(lam) - tau, 0.0)
                keep = shrunk != 0.0
                Qk = Q[:, keep]
                lead = Q[:, np.argmax(np.abs(lam))]
                return (Qk * shrunk[keep]) @ Qk.T, int(keep.sum()), lead
        else:
            U, s, Vt = svds(A, k=k, v0=v0, tol=0, solver="arpack")
            if s.min() <= tau:
                top = int(np.argmax(s))
                lead = U[:, top] if A.shape[0] <= A.shape[1] else Vt[top]
                s = np.maximum(s - tau, 0.0)
                keep = s > 0
                return (U[:, keep] * s[keep]) @ Vt[keep], int(keep.sum()), lead
        k *= 2
    out = svt_symmetric(A, tau) if symmetric else svt(A, tau)
    return out, dim, None


def matrix_rank(A, tol: float = 1e-6) -> int:
    """Number of singular values above ``tol * sigma_1``."""
    s = singular_values(A)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol * s[0]))
