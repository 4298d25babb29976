"""Exact (exponential-time) maximum clique and maximum-edge biclique for small
graphs. Ground truth for the relaxation and certificate tests."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .graph import BipartiteGraph, Graph, VertexSet
from .linalg import matrix_rank  # noqa: F401  re-exported for callers of the oracle

MAX_CLIQUE_VERTICES = 40
MAX_BICLIQUE_SIDE = 20


class SizeGuardError(ValueError):
    """Instance too large for exhaustive search."""


@dataclass
class OracleResult:
    best_left: VertexSet
    best_right: Optional[VertexSet]
    objective: int
    nodes_explored: int

    def to_dict(self) -> dict:
        d = {"objective": self.objective, "nodes_explored": self.nodes_explored}
        if self.best_right is None:
            d["clique"] = list(self.best_left.members)
        else:
            d["left"] = list(self.best_left.members)
            d["right"] = list(self.best_right.members)
        return d


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _color_bound(P: int, nbr: list[int]) -> list[tuple[int, int]]:
    """Greedy sequential colouring of the candidate set ``P``.

    Returns ``(vertex, colour)`` pairs in non-decreasing colour order; the
    colour of a vertex bounds the clique size reachable from it and everything
    listed before it.
    """
    order = []
    uncolored = P
    color = 0
    while uncolored:
        color += 1
        avail = uncolored
        while avail:
            low = avail & -avail
            v = low.bit_length() - 1
            avail &= ~low & ~nbr[v]
            uncolored &= ~low
            order.append((v, color))
    return order


def max_clique_exact(g: Graph) -> OracleResult:
    """Maximum clique by branch and bound with greedy-colouring bounds.

    A first pass finds the clique number; a second depth-first pass in
    increasing vertex order returns the lexicographically smallest maximum
    clique, so ties resolve deterministically.
    """
    N = g.num_vertices
    if N > MAX_CLIQUE_VERTICES:
        raise SizeGuardError(f"max_clique_exact supports at most {MAX_CLIQUE_VERTICES} vertices, got {N}")
    if N == 0:
        return OracleResult(VertexSet((), 0), None, 0, 0)
    nbr = [0] * N
    for u, v in g.edges:
        nbr[u] |= 1 << v
        nbr[v] |= 1 << u

    nodes = 0
    best = 0

    def expand(size: int, P: int):
        nonlocal nodes, best
        nodes += 1
        order = _color_bound(P, nbr)
        for v, c in reversed(order):
            if size + c <= best:
                return
            newP = P & nbr[v]
            if newP:
                expand(size + 1, newP)
            elif size + 1 > best:
                best = size + 1
            P &= ~(1 << v)

    expand(0, (1 << N) - 1)
    target = best

    def lex_first(R: list[int], P: int):
        nonlocal nodes
        nodes += 1
        if len(R) == target:
            return list(R)
        while P:
            low = P & -P
            v = low.bit_length() - 1
            P ^= low
            cand = P & nbr[v]  # only larger vertices remain in P
            bound = max((c for _, c in _color_bound(cand, nbr)), default=0)
            if len(R) + 1 + bound < target:
                continue
            found = lex_first(R + [v], cand)
            if found is not None:
                return found
        return None

    clique = lex_first([], (1 << N) - 1)
    return OracleResult(VertexSet(tuple(clique), N), None, target, nodes)


def max_edge_biclique_exact(g: BipartiteGraph) -> OracleResult:
    """Maximum-edge biclique by enumerating subsets ``S`` of the smaller side.

    Each ``S`` is paired with its common neighbourhood on the other side and
    scored ``|S| * |CN(S)|``. Branches whose best possible score falls strictly
    below the incumbent are cut. Among maximizers the lexicographically
    smallest ``(left, right)`` pair is returned; an edgeless graph yields
    objective 0 with empty sets.
    """
    M, N = g.left_count, g.right_count
    if min(M, N) > MAX_BICLIQUE_SIDE:
        raise SizeGuardError(f"max_edge_biclique_exact needs min side <= {MAX_BICLIQUE_SIDE}, got {min(M, N)}")
    swap = N < M
    small, large = (N, M) if swap else (M, N)
    nbr = [0] * small
    for u, v in g.edges:
        s, l = (v, u) if swap else (u, v)
        nbr[s] |= 1 << l
    full = (1 << large) - 1

    nodes = 0
    best_obj = 0
    best_key: Optional[tuple] = None

    def consider(S: list[int], cn: int):
        nonlocal best_obj, best_key
        obj = len(S) * bin(cn).count("1")
        if obj == 0 or obj < best_obj:
            return
        side_s, side_l = tuple(S), tuple(_bits(cn))
        key = (side_l, side_s) if swap else (side_s, side_l)
        if obj > best_obj or key < best_key:
            best_obj, best_key = obj, key

    def dfs(start: int, S: list[int], cn: int):
        nonlocal nodes
        nodes += 1
        for v in range(start, small):
            new_cn = cn & nbr[v]
            if not new_cn:
                continue
            S.append(v)
            consider(S, new_cn)
            # every extension keeps at most new_cn and adds at most the rest
            if (len(S) + small - v - 1) * bin(new_cn).count("1") >= best_obj:
                dfs(v + 1, S, new_cn)
            S.pop()

    dfs(0, [], full)
    if best_key is None:
        return OracleResult(VertexSet((), M), VertexSet((), N), 0, nodes)
    left, right = best_key
    return OracleResult(VertexSet(left, M), VertexSet(right, N), best_obj, nodes)
