"""Planted clique and biclique recovery by nuclear-norm minimization, with
explicit dual witnesses and random-matrix norm checks."""

from .certificate import (Certificate, CertificateInfeasible, SubspaceParts, VerificationReport,
                          adversarial_gamma, build_biclique_certificate, build_clique_certificate,
                          certify_instance, random_gamma, subgradient_check, subspace_decompose,
                          verify)
from .generators import (AdversaryParams, InfeasibleBudget, RandomModelParams, adversarial_screen,
                         gen_biclique_adversarial, gen_biclique_random, gen_clique_adversarial,
                         gen_clique_random)
from .graph import (BipartiteGraph, Graph, PlantedInstance, VertexSet, biclique_degrees,
                    clique_degree_to_planted, is_biclique, is_clique)
from .linalg import frobenius_norm, matrix_rank, nuclear_norm, spectral_norm, svt
from .oracle import OracleResult, SizeGuardError, max_clique_exact, max_edge_biclique_exact
from .solver import SolverConfig, SolverResult, solve_biclique_relaxation, solve_clique_relaxation

__version__ = "0.1.0"
