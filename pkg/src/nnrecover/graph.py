"""Graph and bipartite-graph containers, degree statistics and the
``planted-graph v1`` text format."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Optional, Union

import numpy as np

FORMAT_HEADER = "# planted-graph v1"


class GraphFormatError(ValueError):
    """Malformed planted-graph file."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class VertexSet:
    """Sorted vertex subset of ``{0, ..., universe - 1}``."""

    members: tuple[int, ...]
    universe: int

    def __post_init__(self):
        members = tuple(sorted({int(v) for v in self.members}))
        if members and (members[0] < 0 or members[-1] >= self.universe):
            raise IndexError(f"vertex out of range [0, {self.universe})")
        object.__setattr__(self, "members", members)

    @classmethod
    def from_indicator(cls, indicator) -> "VertexSet":
        indicator = np.asarray(indicator)
        return cls(tuple(np.flatnonzero(indicator).tolist()), indicator.size)

    @property
    def characteristic_vector(self) -> np.ndarray:
        x = np.zeros(self.universe)
        x[list(self.members)] = 1.0
        return x

    @property
    def mask(self) -> np.ndarray:
        return self.characteristic_vector.astype(bool)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, v) -> bool:
        return v in set(self.members)


def _check_vertex(v: int, n: int) -> int:
    v = int(v)
    if not 0 <= v < n:
        raise IndexError(f"vertex {v} out of range [0, {n})")
    return v


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on vertices ``0..num_vertices-1``.

    Edges are stored as ``(i, j)`` with ``i < j``. Self-loops are rejected;
    the clique relaxation treats the diagonal as allowed on its own.
    """

    num_vertices: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        n = int(self.num_vertices)
        if n < 0:
            raise ValueError("num_vertices must be nonnegative")
        canon = set()
        for u, v in self.edges:
            u, v = _check_vertex(u, n), _check_vertex(v, n)
            if u == v:
                raise ValueError(f"self-loop ({u}, {u}) not allowed")
            canon.add((min(u, v), max(u, v)))
        object.__setattr__(self, "num_vertices", n)
        object.__setattr__(self, "edges", frozenset(canon))

    @classmethod
    def from_adjacency(cls, A) -> "Graph":
        A = np.asarray(A)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError("adjacency matrix must be square")
        iu, ju = np.nonzero(np.triu(A != 0, k=1))
        return cls(A.shape[0], frozenset(zip(iu.tolist(), ju.tolist())))

    @cached_property
    def adjacency(self) -> np.ndarray:
        """Dense symmetric 0/1 matrix with zero diagonal (read-only)."""
        A = np.zeros((self.num_vertices, self.num_vertices), dtype=np.int8)
        if self.edges:
            e = np.array(sorted(self.edges))
            A[e[:, 0], e[:, 1]] = 1
            A[e[:, 1], e[:, 0]] = 1
        return _frozen(A)

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edges

    def __len__(self) -> int:
        return self.num_vertices


@dataclass(frozen=True)
class BipartiteGraph:
    """Bipartite graph with ``left_count`` left and ``right_count`` right vertices."""

    left_count: int
    right_count: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        m, n = int(self.left_count), int(self.right_count)
        if m < 0 or n < 0:
            raise ValueError("side sizes must be nonnegative")
        canon = frozenset((_check_vertex(u, m), _check_vertex(v, n)) for u, v in self.edges)
        object.__setattr__(self, "left_count", m)
        object.__setattr__(self, "right_count", n)
        object.__setattr__(self, "edges", canon)

    @classmethod
    def from_biadjacency(cls, B) -> "BipartiteGraph":
        B = np.asarray(B)
        if B.ndim != 2:
            raise ValueError("biadjacency matrix must be 2-D")
        iu, ju = np.nonzero(B)
        return cls(B.shape[0], B.shape[1], frozenset(zip(iu.tolist(), ju.tolist())))

    @cached_property
    def biadjacency(self) -> np.ndarray:
        """Dense ``left_count x right_count`` 0/1 matrix (read-only)."""
        B = np.zeros((self.left_count, self.right_count), dtype=np.int8)
        if self.edges:
            e = np.array(sorted(self.edges))
            B[e[:, 0], e[:, 1]] = 1
        return _frozen(B)

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self.edges


AnyGraph = Union[Graph, BipartiteGraph]


@dataclass(frozen=True)
class PlantedInstance:
    """A graph together with its planted clique (``planted_right is None``)
    or planted biclique."""

    graph: AnyGraph
    planted_left: VertexSet
    planted_right: Optional[VertexSet] = None
    params: dict = field(default_factory=dict)

    @property
    def is_biclique(self) -> bool:
        return isinstance(self.graph, BipartiteGraph)

    def validate(self) -> bool:
        if self.is_biclique:
            return is_biclique(self.graph, self.planted_left, self.planted_right)
        return is_clique(self.graph, self.planted_left)


def _as_members(s) -> list[int]:
    return list(s.members) if isinstance(s, VertexSet) else [int(v) for v in s]


def clique_degree_to_planted(g: Graph, vstar, j: int) -> int:
    """Number of neighbours of ``j`` inside the planted set."""
    j = _check_vertex(j, g.num_vertices)
    members = _as_members(vstar)
    for v in members:
        _check_vertex(v, g.num_vertices)
    if j in members:
        raise ValueError(f"vertex {j} belongs to the planted set")
    return int(g.adjacency[j, members].sum())


def clique_degrees(g: Graph, vstar) -> np.ndarray:
    """Vector of planted-degrees ``p_j`` for every vertex (entries on the planted
    set itself are ``n - 1`` and are not meaningful to callers)."""
    members = _as_members(vstar)
    return g.adjacency[:, members].sum(axis=1).astype(np.int64)


def biclique_degrees(g: BipartiteGraph, ustar, vstar) -> tuple[dict, dict]:
    """Cross-degrees of outside vertices.

    Returns ``(p, q)`` where ``p[i]`` counts edges from left vertex ``i`` (not in
    ``ustar``) into ``vstar`` and ``q[j]`` counts edges from right vertex ``j``
    (not in ``vstar``) into ``ustar``.
    """
    U = _as_members(ustar)
    V = _as_members(vstar)
    for u in U:
        _check_vertex(u, g.left_count)
    for v in V:
        _check_vertex(v, g.right_count)
    B = g.biadjacency
    pv = B[:, V].sum(axis=1)
    qv = B[U, :].sum(axis=0)
    Uset, Vset = set(U), set(V)
    p = {i: int(pv[i]) for i in range(g.left_count) if i not in Uset}
    q = {j: int(qv[j]) for j in range(g.right_count) if j not in Vset}
    return p, q


def is_clique(g: Graph, s) -> bool:
    members = _as_members(s)
    if len(members) <= 1:
        return True
    sub = g.adjacency[np.ix_(members, members)]
    return int(sub.sum()) == len(members) * (len(members) - 1)


def is_biclique(g: BipartiteGraph, su, sv) -> bool:
    U, V = _as_members(su), _as_members(sv)
    if not U or not V:
        return True
    return bool(g.biadjacency[np.ix_(U, V)].all())


# ---------------------------------------------------------------------------
# planted-graph v1

def dumps(instance: PlantedInstance) -> str:
    g = instance.graph
    lines = [FORMAT_HEADER]
    if isinstance(g, BipartiteGraph):
        lines.append("type biclique")
        lines.append(f"nodes {g.left_count} {g.right_count}")
        right = instance.planted_right.members if instance.planted_right else ()
        lines.append(" ".join(["planted-left", *map(str, instance.planted_left.members)]))
        lines.append(" ".join(["planted-right", *map(str, right)]))
    else:
        lines.append("type clique")
        lines.append(f"nodes {g.num_vertices}")
        lines.append(" ".join(["planted", *map(str, instance.planted_left.members)]))
    lines.extend(f"edge {u} {v}" for u, v in sorted(g.edges))
    return "\n".join(lines) + "\n"


def _ints(tokens: list[str], lineno: int) -> list[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise GraphFormatError(f"line {lineno}: expected integers, got {' '.join(tokens)!r}")


def loads(text: str) -> PlantedInstance:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0] != FORMAT_HEADER:
        raise GraphFormatError("missing '# planted-graph v1' header")
    if len(lines) < 4:
        raise GraphFormatError("truncated header")
    kind = lines[1].split()
    if kind not in (["type", "clique"], ["type", "biclique"]):
        raise GraphFormatError(f"line 2: bad type line {lines[1]!r}")
    bip = kind[1] == "biclique"

    nodes = lines[2].split()
    if not nodes or nodes[0] != "nodes" or len(nodes) != (3 if bip else 2):
        raise GraphFormatError(f"line 3: bad nodes line {lines[2]!r}")
    sizes = _ints(nodes[1:], 3)

    def planted(lineno: int, key: str, universe: int) -> VertexSet:
        if lineno > len(lines):
            raise GraphFormatError(f"line {lineno}: missing {key} line")
        tok = lines[lineno - 1].split()
        if not tok or tok[0] != key:
            raise GraphFormatError(f"line {lineno}: expected {key!r}")
        try:
            return VertexSet(tuple(_ints(tok[1:], lineno)), universe)
        except IndexError as exc:
            raise GraphFormatError(f"line {lineno}: {exc}")

    if bip:
        left = planted(4, "planted-left", sizes[0])
        right = planted(5, "planted-right", sizes[1])
        start = 5
    else:
        left = planted(4, "planted", sizes[0])
        right = None
        start = 4

    edges = []
    for k, line in enumerate(lines[start:], start=start + 1):
        tok = line.split()
        if len(tok) != 3 or tok[0] != "edge":
            raise GraphFormatError(f"line {k}: unknown line {line!r}")
        edges.append(tuple(_ints(tok[1:], k)))
    try:
        if bip:
            g: AnyGraph = BipartiteGraph(sizes[0], sizes[1], frozenset(edges))
        else:
            g = Graph(sizes[0], frozenset(edges))
    except (IndexError, ValueError) as exc:
        raise GraphFormatError(str(exc))
    return PlantedInstance(g, left, right)


def save(instance: PlantedInstance, path) -> None:
    Path(path).write_text(dumps(instance), newline="\n")


def load(path) -> PlantedInstance:
    return loads(Path(path).read_text())
