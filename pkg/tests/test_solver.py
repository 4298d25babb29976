import itertools
import math

import numpy as np
import pytest

from nnrecover.certificate import certify_instance
from nnrecover.generators import (AdversaryParams, RandomModelParams, gen_biclique_adversarial,
                                  gen_biclique_random, gen_clique_random)
from nnrecover.graph import BipartiteGraph, Graph
from nnrecover.linalg import nuclear_norm, spectral_norm
from nnrecover.oracle import matrix_rank, max_clique_exact, max_edge_biclique_exact
from nnrecover.solver import (SolverConfig, project_feasible, solve_biclique_relaxation,
                              solve_clique_relaxation)

CFG = SolverConfig()


def check_feasible(res, allowed, tol):
    X = res.X
    assert np.abs(X[~allowed]).max(initial=0.0) <= tol
    assert X.sum() >= 1 - tol


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(max_iterations=0)
    with pytest.raises(ValueError):
        SolverConfig(primal_tolerance=0)


def test_projection_exact():
    rng = np.random.default_rng(0)
    Y = rng.standard_normal((5, 6))
    allowed = rng.random((5, 6)) < 0.5
    Z = project_feasible(Y, allowed, 2.0)
    assert np.all(Z[~allowed] == 0)
    assert Z.sum() >= 2.0 - 1e-12
    # projection is idempotent
    np.testing.assert_allclose(project_feasible(Z, allowed, 2.0), Z, atol=1e-12)


class TestClique:
    def test_k4(self):
        g = Graph(4, frozenset(itertools.combinations(range(4), 2)))
        res = solve_clique_relaxation(g, CFG)
        assert res.converged
        assert res.candidate.members == (0, 1, 2, 3)
        np.testing.assert_allclose(res.X_scaled, np.ones((4, 4)), atol=1e-4)
        assert res.objective == pytest.approx(0.25, abs=1e-5)

    def test_k4_plus_isolated(self):
        g = Graph(6, frozenset(itertools.combinations(range(4), 2)))
        res = solve_clique_relaxation(g, CFG)
        assert res.candidate.members == max_clique_exact(g).best_left.members == (0, 1, 2, 3)

    @pytest.mark.parametrize("seed", range(4))
    def test_certified_random_instance(self, seed):
        inst = gen_clique_random(RandomModelParams(p=0.3, N=60, n=25, seed=seed))
        _, rep = certify_instance(inst)
        assert rep.overall
        res = solve_clique_relaxation(inst.graph, CFG)
        assert res.candidate.members == inst.planted_left.members
        assert res.rank_one_gap <= 1e-4
        assert matrix_rank(res.X, tol=1e-6) == 1
        allowed = inst.graph.adjacency.astype(bool) | np.eye(60, dtype=bool)
        check_feasible(res, allowed, 1e-5)
        assert res.objective <= 1 / 25 + 1e-5
        assert nuclear_norm(res.X) >= spectral_norm(res.X)

    def test_objective_sandwich_general_graph(self):
        rng = np.random.default_rng(4)
        edges = [e for e in itertools.combinations(range(12), 2) if rng.random() < 0.5]
        g = Graph(12, frozenset(edges))
        res = solve_clique_relaxation(g, CFG)
        k = max_clique_exact(g).objective
        assert res.objective <= 1 / k + 1e-5
        assert 0.0 <= res.rank_one_gap <= 1.0

    def test_nonconvergence_reported(self):
        inst = gen_clique_random(RandomModelParams(p=0.5, N=40, n=6, seed=1))
        res = solve_clique_relaxation(inst.graph, SolverConfig(max_iterations=2))
        assert not res.converged and res.iterations == 2

    def test_degenerate_two_cliques(self):
        # two disjoint K3: the top singular value has multiplicity two
        g = Graph(6, frozenset(itertools.combinations(range(3), 2))
                  | frozenset(itertools.combinations(range(3, 6), 2)))
        res = solve_clique_relaxation(g, CFG)
        if res.degenerate:
            assert res.candidate is None
        else:
            assert len(res.candidate) == 3


class TestBiclique:
    def test_k33(self):
        g = BipartiteGraph.from_biadjacency(np.ones((3, 3)))
        res = solve_biclique_relaxation(g, CFG)
        assert res.candidate[0].members == (0, 1, 2) and res.candidate[1].members == (0, 1, 2)
        assert matrix_rank(res.X) == 1

    def test_planted_k45_in_8x10(self):
        B = np.zeros((8, 10))
        B[:4, :5] = 1
        g = BipartiteGraph.from_biadjacency(B)
        orc = max_edge_biclique_exact(g)
        res = solve_biclique_relaxation(g, CFG)
        assert res.candidate[0] == orc.best_left and res.candidate[1] == orc.best_right
        assert orc.objective == 20

    @pytest.mark.parametrize("seed", range(3))
    def test_adversarial_screened(self, seed):
        inst = gen_biclique_adversarial(10, 10, 20, 20, AdversaryParams(19, 0.5, 0.5, seed),
                                        require_screen=True)
        res = solve_biclique_relaxation(inst.graph, CFG)
        assert res.candidate[0] == inst.planted_left
        assert res.candidate[1] == inst.planted_right
        check_feasible(res, inst.graph.biadjacency.astype(bool), 1e-5)
        assert res.objective <= 1 / 10 + 1e-5

    def test_random_certified(self):
        inst = gen_biclique_random(RandomModelParams(p=0.3, N=50, n=20, M=40, m=18, seed=2))
        _, rep = certify_instance(inst)
        assert rep.overall
        res = solve_biclique_relaxation(inst.graph, CFG)
        assert res.candidate[0] == inst.planted_left and res.candidate[1] == inst.planted_right
        assert res.rank_one_gap <= 1e-4
        assert res.objective <= 1 / math.sqrt(18 * 20) + 1e-5

    def test_no_edges(self):
        with pytest.raises(ValueError):
            solve_biclique_relaxation(BipartiteGraph(3, 3), CFG)

    def test_to_dict(self):
        res = solve_biclique_relaxation(BipartiteGraph.from_biadjacency(np.ones((2, 2))), CFG)
        d = res.to_dict()
        assert d["candidate"] == {"left": [0, 1], "right": [0, 1]}
        assert set(d) >= {"converged", "iterations", "objective", "rank_one_gap", "runtime_ms"}
