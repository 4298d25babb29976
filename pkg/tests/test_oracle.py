import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nnrecover.generators import RandomModelParams, gen_biclique_random, gen_clique_random
from nnrecover.graph import BipartiteGraph, Graph, is_biclique, is_clique
from nnrecover.oracle import (SizeGuardError, matrix_rank, max_clique_exact,
                              max_edge_biclique_exact)


def brute_clique(g):
    """Lexicographically smallest maximum clique by full subset enumeration."""
    for k in range(g.num_vertices, 0, -1):
        for S in itertools.combinations(range(g.num_vertices), k):
            if all(g.has_edge(a, b) for a, b in itertools.combinations(S, 2)):
                return k, S
    return 0, ()


def brute_biclique(g):
    best = 0
    for k in range(1, g.left_count + 1):
        for S in itertools.combinations(range(g.left_count), k):
            common = [j for j in range(g.right_count) if all(g.has_edge(i, j) for i in S)]
            best = max(best, k * len(common))
    return best


def random_graph(n, p, seed):
    rng = np.random.default_rng(seed)
    edges = [e for e in itertools.combinations(range(n), 2) if rng.random() < p]
    return Graph(n, frozenset(edges))


def complete(n, offset=0):
    return {(a + offset, b + offset) for a, b in itertools.combinations(range(n), 2)}


class TestClique:
    def test_five_cycle(self):
        g = Graph(5, frozenset((i, (i + 1) % 5) for i in range(5)))
        res = max_clique_exact(g)
        assert res.objective == brute_clique(g)[0] == 2
        assert res.best_left.members == (0, 1)

    def test_k7(self):
        res = max_clique_exact(Graph(7, frozenset(complete(7))))
        assert res.objective == 7 and res.best_left.members == tuple(range(7))

    def test_disjoint_union(self):
        res = max_clique_exact(Graph(7, frozenset(complete(4) | complete(3, 4))))
        assert res.objective == 4 and res.best_left.members == (0, 1, 2, 3)

    def test_edgeless(self):
        res = max_clique_exact(Graph(3))
        assert res.objective == 1 and res.best_left.members == (0,)

    def test_size_guard(self):
        with pytest.raises(SizeGuardError):
            max_clique_exact(Graph(41))

    @pytest.mark.parametrize("seed", range(40))
    def test_against_enumeration(self, seed):
        rng = np.random.default_rng(1000 + seed)
        g = random_graph(int(rng.integers(1, 13)), float(rng.choice([0.2, 0.5, 0.8])), seed)
        res = max_clique_exact(g)
        k, S = brute_clique(g)
        assert res.objective == k
        assert res.best_left.members == S
        assert is_clique(g, res.best_left.members)

    def test_planted_p0(self):
        inst = gen_clique_random(RandomModelParams(p=0.0, N=30, n=7, seed=1))
        assert max_clique_exact(inst.graph).best_left.members == inst.planted_left.members


class TestBiclique:
    def test_k34(self):
        res = max_edge_biclique_exact(BipartiteGraph.from_biadjacency(np.ones((3, 4))))
        assert res.objective == 12
        assert res.best_left.members == (0, 1, 2) and res.best_right.members == (0, 1, 2, 3)

    def test_k25_dangling(self):
        B = np.zeros((3, 6))
        B[:2, :5] = 1
        B[2, 5] = 1
        g = BipartiteGraph.from_biadjacency(B)
        assert brute_biclique(g) == 10
        res = max_edge_biclique_exact(g)
        assert res.objective == 10 and res.best_left.members == (0, 1)

    def test_empty(self):
        res = max_edge_biclique_exact(BipartiteGraph(3, 4))
        assert res.objective == 0 and res.best_left.members == () and res.best_right.members == ()

    def test_size_guard(self):
        with pytest.raises(SizeGuardError):
            max_edge_biclique_exact(BipartiteGraph(21, 25))
        # large side is fine when the small one is within the guard
        max_edge_biclique_exact(BipartiteGraph(5, 60))

    @settings(max_examples=80, deadline=None)
    @given(st.integers(1, 8), st.integers(1, 9), st.data())
    def test_against_enumeration(self, M, N, data):
        B = np.array(data.draw(st.lists(st.lists(st.booleans(), min_size=N, max_size=N),
                                        min_size=M, max_size=M)))
        g = BipartiteGraph.from_biadjacency(B)
        res = max_edge_biclique_exact(g)
        assert res.objective == brute_biclique(g)
        assert res.objective == len(res.best_left) * len(res.best_right)
        if res.objective:
            assert is_biclique(g, res.best_left.members, res.best_right.members)

    def test_planted_p0(self):
        inst = gen_biclique_random(RandomModelParams(p=0.0, N=12, n=4, M=10, m=3))
        res = max_edge_biclique_exact(inst.graph)
        assert res.best_left.members == inst.planted_left.members
        assert res.best_right.members == inst.planted_right.members

    def test_deterministic(self):
        rng = np.random.default_rng(5)
        g = BipartiteGraph.from_biadjacency(rng.random((8, 10)) < 0.5)
        assert max_edge_biclique_exact(g).to_dict() == max_edge_biclique_exact(g).to_dict()


def test_matrix_rank_examples():
    u = np.array([1, 1, 0.0])
    v = np.array([0, 1, 1, 1.0])
    assert matrix_rank(np.outer(u, v)) == 1
    assert matrix_rank(np.eye(5)) == 5
