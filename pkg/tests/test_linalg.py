import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from nnrecover.linalg import (frobenius_norm, matrix_rank, nuclear_norm, power_spectral_norm,
                              singular_values, spectral_norm, svt, svt_lowrank, svt_symmetric)

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
matrices = st.tuples(st.integers(1, 7), st.integers(1, 7)).flatmap(
    lambda s: arrays(np.float64, s, elements=finite))


def test_identity_norms():
    I = np.eye(3)
    assert nuclear_norm(I) == pytest.approx(3)
    assert spectral_norm(I) == pytest.approx(1)
    assert frobenius_norm(I) == pytest.approx(math.sqrt(3))


def test_diag_norms():
    D = np.diag([3.0, 4.0])
    assert spectral_norm(D) == pytest.approx(4)
    assert nuclear_norm(D) == pytest.approx(7)
    assert frobenius_norm(D) == pytest.approx(5)


@pytest.mark.parametrize("M,N,m,n", [(5, 6, 2, 3), (8, 8, 4, 4), (3, 9, 1, 7)])
def test_rank_one_characteristic(M, N, m, n):
    u = np.r_[np.ones(m), np.zeros(M - m)]
    v = np.r_[np.ones(n), np.zeros(N - n)]
    X = np.outer(u, v)
    for f in (nuclear_norm, spectral_norm, frobenius_norm):
        assert f(X) == pytest.approx(math.sqrt(m * n), abs=1e-10)
    assert matrix_rank(X) == 1


def test_non_finite_rejected():
    with pytest.raises(ValueError):
        nuclear_norm(np.array([[1.0, np.nan]]))
    with pytest.raises(ValueError):
        spectral_norm(np.array([[np.inf]]))


@settings(max_examples=100, deadline=None)
@given(matrices)
def test_norm_chain(A):
    s = spectral_norm(A)
    f = frobenius_norm(A)
    nu = nuclear_norm(A)
    assert s <= f + 1e-10 * max(1, f)
    assert f <= nu + 1e-10 * max(1, nu)
    assert s <= nu + 1e-10 * max(1, nu)
    # Frobenius by definition
    assert f == pytest.approx(math.sqrt(float((A ** 2).sum())), rel=1e-10, abs=1e-10)


@pytest.mark.parametrize("seed", range(5))
def test_power_iteration_matches_svd(seed):
    A = np.random.default_rng(seed).standard_normal((40, 30))
    assert power_spectral_norm(A) == pytest.approx(np.linalg.svd(A, compute_uv=False)[0], rel=1e-8)


def test_svt_identity_and_diag():
    A = np.random.default_rng(1).standard_normal((4, 5))
    np.testing.assert_allclose(svt(A, 0.0), A, atol=1e-12)
    np.testing.assert_allclose(svt(np.diag([3.0, 1.0]), 2.0), np.diag([1.0, 0.0]), atol=1e-12)
    with pytest.raises(ValueError):
        svt(A, -1.0)


@settings(max_examples=100, deadline=None)
@given(matrices, st.floats(0, 5))
def test_svt_singular_value_contract(A, tau):
    out = svt(A, tau)
    expected = np.maximum(np.linalg.svd(A, compute_uv=False) - tau, 0.0)
    np.testing.assert_allclose(singular_values(out), expected, atol=1e-10)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 8).flatmap(lambda n: arrays(np.float64, (n, n), elements=finite)),
       st.floats(0, 5))
def test_symmetric_path_matches_general(B, tau):
    S = (B + B.T) / 2
    np.testing.assert_allclose(svt_symmetric(S, tau), svt(S, tau), atol=1e-10)


@pytest.mark.parametrize("symmetric", [False, True])
def test_lowrank_prox_matches_dense(symmetric):
    rng = np.random.default_rng(3)
    u = rng.standard_normal((60, 2))
    A = u @ u.T * 5 + 0.1 * rng.standard_normal((60, 60))
    if symmetric:
        A = (A + A.T) / 2
    tau = 2.0
    out, rank, _ = svt_lowrank(A, tau, k=2, symmetric=symmetric)
    ref = svt_symmetric(A, tau) if symmetric else svt(A, tau)
    np.testing.assert_allclose(out, ref, atol=1e-8)
    assert rank == matrix_rank(ref, tol=1e-12)


def test_matrix_rank():
    assert matrix_rank(np.eye(4)) == 4
    assert matrix_rank(np.zeros((3, 3))) == 0
