"""Planted clique / biclique instances under random and adversarial noise.

All randomness goes through ``numpy.random.default_rng(seed)`` (PCG64), so an
instance is a pure function of its parameters. Planted vertices are always the
lowest indices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .graph import BipartiteGraph, Graph, PlantedInstance, VertexSet


class InfeasibleBudget(ValueError):
    """The requested number of diversionary edges cannot be placed under the caps."""


@dataclass(frozen=True)
class RandomModelParams:
    """Random planted model. For a clique only ``N``, ``n`` are used; for a
    biclique ``M`` and ``m`` are the left-side sizes."""

    p: float
    N: int
    n: int
    M: Optional[int] = None
    m: Optional[int] = None
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.p < 1.0:
            raise ValueError(f"p must lie in [0, 1), got {self.p}")
        if not 0 <= self.n <= self.N:
            raise ValueError(f"need 0 <= n <= N, got n={self.n}, N={self.N}")
        if (self.M is None) != (self.m is None):
            raise ValueError("M and m must be given together")
        if self.M is not None and not 0 <= self.m <= self.M:
            raise ValueError(f"need 0 <= m <= M, got m={self.m}, M={self.M}")

    @classmethod
    def biclique(cls, N: int, n: int, p: float, y: float, z: float, seed: int = 0):
        """Sizes from aspect ratios: ``M = ceil(y N)``, ``m = ceil(z n)``."""
        if y <= 0 or z <= 0:
            raise ValueError("aspect ratios y, z must be positive")
        return cls(p=p, N=N, n=n, M=math.ceil(y * N), m=math.ceil(z * n), seed=seed)


@dataclass(frozen=True)
class AdversaryParams:
    """Budget ``r`` on diversionary edges; outside vertices may touch at most
    ``floor(alpha*m)`` vertices of U* and ``floor(beta*n)`` vertices of V*."""

    r: int
    alpha: float
    beta: float
    seed: int = 0

    def __post_init__(self):
        if self.r < 0:
            raise ValueError("r must be nonnegative")
        for name in ("alpha", "beta"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValueError(f"{name} must lie in (0, 1), got {v}")


def gen_clique_random(params: RandomModelParams) -> PlantedInstance:
    N, n, p = params.N, params.n, params.p
    rng = np.random.default_rng(params.seed)
    A = np.triu(rng.random((N, N)) < p, k=1)
    A[:n, :n] = np.triu(np.ones((n, n), dtype=bool), k=1)
    g = Graph.from_adjacency(A | A.T)
    meta = {"model": "random", "p": p, "N": N, "n": n, "seed": params.seed}
    return PlantedInstance(g, VertexSet(tuple(range(n)), N), None, meta)


def gen_biclique_random(params: RandomModelParams) -> PlantedInstance:
    if params.M is None:
        raise ValueError("biclique generation needs M and m")
    M, N, m, n, p = params.M, params.N, params.m, params.n, params.p
    rng = np.random.default_rng(params.seed)
    B = rng.random((M, N)) < p
    B[:m, :n] = True
    g = BipartiteGraph.from_biadjacency(B)
    meta = {"model": "random", "p": p, "M": M, "N": N, "m": m, "n": n, "seed": params.seed}
    return PlantedInstance(g, VertexSet(tuple(range(m)), M), VertexSet(tuple(range(n)), N), meta)


def adversarial_screen(m: int, n: int, r: float, alpha: float, beta: float) -> bool:
    """Closed-form sufficient condition ``r (1 + 1/(1-alpha) + 1/(1-beta)) < m n``
    for the gamma=0 biclique witness to have spectral norm below one."""
    if not (0.0 < alpha < 1.0 and 0.0 < beta < 1.0):
        raise ValueError("alpha and beta must lie in (0, 1)")
    return r * (1.0 + 1.0 / (1.0 - alpha) + 1.0 / (1.0 - beta)) < m * n


def _greedy_fill(rng, r, cross_slots, cross_owner, caps, inner_slots):
    """Shuffle cross slots and accept each while its owner is under cap, then
    top up with inner slots. Returns the chosen slot list."""
    chosen = []
    used = {}
    for k in rng.permutation(len(cross_slots)):
        if len(chosen) == r:
            return chosen
        o = cross_owner[k]
        if used.get(o, 0) < caps[o]:
            used[o] = used.get(o, 0) + 1
            chosen.append(cross_slots[k])
    if len(chosen) < r:
        need = r - len(chosen)
        pick = rng.choice(len(inner_slots), size=need, replace=False)
        chosen.extend(inner_slots[k] for k in sorted(pick.tolist()))
    return chosen


def gen_biclique_adversarial(m: int, n: int, M: int, N: int, adv: AdversaryParams,
                             require_screen: bool = False) -> PlantedInstance:
    """K(m, n) on the lowest indices plus exactly ``adv.r`` diversionary edges.

    Cross edges (touching exactly one planted side) are placed first in random
    order subject to the per-vertex caps; the remainder goes to U-U* x V-V*.
    Raises :class:`InfeasibleBudget` when ``r`` exceeds the available capacity
    and, with ``require_screen``, when the budget fails :func:`adversarial_screen`.
    """
    if not (0 < m <= M and 0 < n <= N):
        raise ValueError("need 0 < m <= M and 0 < n <= N")
    if require_screen and not adversarial_screen(m, n, adv.r, adv.alpha, adv.beta):
        raise InfeasibleBudget(f"budget r={adv.r} fails the recoverability screen")
    cap_left = math.floor(adv.beta * n)    # i in U-U*, edges into V*
    cap_right = math.floor(adv.alpha * m)  # j in V-V*, edges from U*
    capacity = (M - m) * cap_left + (N - n) * cap_right + (M - m) * (N - n)
    if adv.r > capacity:
        raise InfeasibleBudget(f"r={adv.r} exceeds capacity {capacity} under the caps")

    cross, owner, caps = [], [], {}
    for i in range(m, M):
        caps[("L", i)] = cap_left
        for j in range(n):
            cross.append((i, j))
            owner.append(("L", i))
    for j in range(n, N):
        caps[("R", j)] = cap_right
        for i in range(m):
            cross.append((i, j))
            owner.append(("R", j))
    inner = [(i, j) for i in range(m, M) for j in range(n, N)]

    rng = np.random.default_rng(adv.seed)
    extra = _greedy_fill(rng, adv.r, cross, owner, caps, inner)
    edges = {(i, j) for i in range(m) for j in range(n)} | set(extra)
    g = BipartiteGraph(M, N, frozenset(edges))
    meta = {"model": "adversarial", "r": adv.r, "alpha": adv.alpha, "beta": adv.beta,
            "M": M, "N": N, "m": m, "n": n, "seed": adv.seed}
    return PlantedInstance(g, VertexSet(tuple(range(m)), M), VertexSet(tuple(range(n)), N), meta)


def gen_clique_adversarial(n: int, N: int, adv: AdversaryParams) -> PlantedInstance:
    """K_n on ``0..n-1`` plus exactly ``adv.r`` diversionary edges; every outside
    vertex gets at most ``floor(beta*n)`` neighbours in the clique."""
    if not 0 < n <= N:
        raise ValueError("need 0 < n <= N")
    cap = math.floor(adv.beta * n)
    capacity = (N - n) * cap + (N - n) * (N - n - 1) // 2
    if adv.r > capacity:
        raise InfeasibleBudget(f"r={adv.r} exceeds capacity {capacity} under the caps")
    cross, owner, caps = [], [], {}
    for j in range(n, N):
        caps[j] = cap
        for i in range(n):
            cross.append((i, j))
            owner.append(j)
    inner = [(i, j) for i in range(n, N) for j in range(i + 1, N)]

    rng = np.random.default_rng(adv.seed)
    extra = _greedy_fill(rng, adv.r, cross, owner, caps, inner)
    edges = {(i, j) for i in range(n) for j in range(i + 1, n)} | set(extra)
    meta = {"model": "adversarial", "r": adv.r, "beta": adv.beta, "N": N, "n": n,
            "seed": adv.seed}
    return PlantedInstance(Graph(N, frozenset(edges)), VertexSet(tuple(range(n)), N), None, meta)


def biclique_with_edges(m: int, n: int, M: int, N: int, extra: Iterable[tuple[int, int]],
                        alpha: Optional[float] = None, beta: Optional[float] = None) -> PlantedInstance:
    """Planted K(m, n) plus a caller-chosen diversionary edge list.

    When ``alpha``/``beta`` are given the per-vertex caps are enforced and a
    violation raises :class:`InfeasibleBudget`.
    """
    extra = {(int(i), int(j)) for i, j in extra}
    planted = {(i, j) for i in range(m) for j in range(n)}
    extra -= planted
    g = BipartiteGraph(M, N, frozenset(planted | extra))
    if beta is not None:
        for i in range(m, M):
            deg = sum((i, j) in extra for j in range(n))
            if deg > math.floor(beta * n):
                raise InfeasibleBudget(f"left vertex {i} has {deg} > floor(beta*n) planted neighbours")
    if alpha is not None:
        for j in range(n, N):
            deg = sum((i, j) in extra for i in range(m))
            if deg > math.floor(alpha * m):
                raise InfeasibleBudget(f"right vertex {j} has {deg} > floor(alpha*m) planted neighbours")
    meta = {"model": "explicit", "r": len(extra), "alpha": alpha, "beta": beta,
            "M": M, "N": N, "m": m, "n": n}
    return PlantedInstance(g, VertexSet(tuple(range(m)), M), VertexSet(tuple(range(n)), N), meta)


def clique_with_edges(n: int, N: int, extra: Iterable[tuple[int, int]],
                      beta: Optional[float] = None) -> PlantedInstance:
    """Planted K_n plus a caller-chosen diversionary edge list."""
    canon = {(min(i, j), max(i, j)) for i, j in extra}
    planted = {(i, j) for i in range(n) for j in range(i + 1, n)}
    canon -= planted
    g = Graph(N, frozenset(planted | canon))
    if beta is not None:
        cap = math.floor(beta * n)
        for j in range(n, N):
            deg = sum((i, j) in canon for i in range(n))
            if deg > cap:
                raise InfeasibleBudget(f"vertex {j} has {deg} > floor(beta*n) planted neighbours")
    meta = {"model": "explicit", "r": len(canon), "beta": beta, "N": N, "n": n}
    return PlantedInstance(g, VertexSet(tuple(range(n)), N), None, meta)
