import math

import mpmath
import numpy as np
import pytest
from scipy.stats import binom

from nnrecover.certificate import random_gamma
from nnrecover.generators import RandomModelParams, gen_biclique_random, gen_clique_random
from nnrecover.linalg import spectral_norm
from nnrecover.rmt import (OmegaParams, SaturatedColumn, TrialReport, check_furedi_komlos,
                           check_geman, check_recentering_bound, chernoff_bound,
                           chernoff_sqrt_bound, decompose_random_W, empirical_chernoff_tail,
                           empirical_sqrt_tail, recenter_columns, recentering_column_formula,
                           sample_omega, sample_omega_symmetric)

# (e/4)^5 evaluated with mpmath at 50 digits, frozen
CHERNOFF_10_HALF_1 = 0.14493472568610996


def test_frozen_value_matches_mpmath():
    mpmath.mp.dps = 50
    assert float((mpmath.e / 4) ** 5) == CHERNOFF_10_HALF_1


class TestSamplers:
    def test_params(self):
        prm = OmegaParams(0.25)
        assert prm.sigma_squared == 0.25 / 0.75
        assert prm.low == -1 / 3
        with pytest.raises(ValueError):
            OmegaParams(1.0)

    def test_mean_zero(self):
        prm = OmegaParams(0.3)
        A = sample_omega(1000, 1000, prm, seed=11)
        assert abs(A.mean()) <= 3 * prm.sigma / 1e3

    def test_half_variance(self):
        A = sample_omega(1000, 1000, OmegaParams(0.5), seed=12)
        assert set(np.unique(A)) == {-1.0, 1.0}
        assert abs(A.var() - 1.0) <= 0.01

    def test_symmetric(self):
        A = sample_omega_symmetric(50, OmegaParams(0.4), seed=3)
        assert np.array_equal(A, A.T)

    def test_deterministic(self):
        prm = OmegaParams(0.4)
        assert np.array_equal(sample_omega(5, 7, prm, 9), sample_omega(5, 7, prm, 9))
        assert check_furedi_komlos(60, 0.5, 3, 4).samples == check_furedi_komlos(60, 0.5, 3, 4).samples


class TestRecenter:
    def test_substitution(self):
        out = recenter_columns(np.array([[1.0], [-1.0], [-1.0]]), 3)
        np.testing.assert_allclose(out[:, 0], [1, -0.5, -0.5])

    def test_saturated(self):
        with pytest.raises(SaturatedColumn):
            recenter_columns(np.ones((3, 2)))
        assert recentering_column_formula(np.ones((3, 2)), 0.5) == math.inf

    @pytest.mark.parametrize("seed", range(5))
    def test_column_sums_and_formula(self, seed):
        p = 0.3
        A = sample_omega(40, 60, OmegaParams(p), seed)
        At = recenter_columns(A)
        assert np.abs(At.sum(axis=0)).max() <= 1e-12
        assert np.array_equal(At == 1.0, A == 1.0)
        direct = float(((A - At) ** 2).sum())
        assert abs(direct - recentering_column_formula(A, p)) <= 1e-10 * max(1, direct)

    def test_saturated_trials_count_as_violations(self):
        rep = check_recentering_bound(2, 40, 0.9, trials=5, seed=0)
        assert rep.extra["saturated_trials"] > 0
        assert rep.violation_count >= rep.extra["saturated_trials"]

    def test_small_p_no_saturation(self):
        rep = check_recentering_bound(200, 100, 0.05, trials=5, seed=0)
        assert rep.extra["saturated_trials"] == 0


class TestFurediKomlos:
    def test_bound_field(self):
        rep = check_furedi_komlos(64, 0.3, 1, 0)
        assert abs(rep.bound - 3 * math.sqrt(0.3 / 0.7) * 8) <= 1e-12

    def test_n1(self):
        rep = check_furedi_komlos(1, 0.5, 10, 0)
        assert all(s == 1.0 for s in rep.samples) and rep.violation_count == 0

    def test_moderate(self):
        rep = check_furedi_komlos(200, 0.5, 5, 1)
        assert rep.violation_count == 0
        assert rep.trials == 5 and len(list(rep.rows())) == 5


class TestGeman:
    def test_semicircle_scale(self):
        rep = check_geman(1000, 1.0, 0.5, 3, 0)
        assert all(1.9 <= s <= 2.2 for s in rep.samples)
        assert rep.trials == 3 and rep.bound == math.inf

    def test_wider_is_larger(self):
        a = check_geman(200, 1.0, 0.5, 5, 0)
        b = check_geman(200, 4.0, 0.5, 5, 0)
        assert min(b.samples) > max(a.samples)
        assert b.extra["rows"] == 800


class TestChernoff:
    def test_spec_value(self):
        assert chernoff_bound(10, 0.5, 1.0) == pytest.approx(CHERNOFF_10_HALF_1, rel=1e-12)
        assert chernoff_bound(10, 0.5, 1.0) == pytest.approx(0.145, abs=1e-3)

    def test_sqrt_near_zero(self):
        assert chernoff_sqrt_bound(100, 0.5, 1e-9) == pytest.approx(2.0, rel=1e-12)

    def test_domains(self):
        with pytest.raises(ValueError):
            chernoff_bound(10, 0.5, 0.0)
        with pytest.raises(ValueError):
            chernoff_sqrt_bound(100, 0.5, 5.0)
        with pytest.raises(ValueError):
            chernoff_sqrt_bound(100, 0.5, 0.0)

    def test_monotone(self):
        ds = [chernoff_bound(20, 0.3, d) for d in (0.1, 0.5, 1, 2, 5)]
        assert all(a > b for a, b in zip(ds, ds[1:]))
        ks = [chernoff_bound(k, 0.3, 0.5) for k in (5, 10, 50, 100)]
        assert all(a > b for a, b in zip(ks, ks[1:]))

    @pytest.mark.parametrize("k,p,d", [(10, 0.5, 1.0), (50, 0.2, 0.5), (200, 0.05, 1.5)])
    def test_exact_tail_below_bound(self, k, p, d):
        exact = binom.sf(math.floor((1 + d) * p * k), k, p)
        assert exact <= chernoff_bound(k, p, d)
        assert empirical_chernoff_tail(k, p, d, 200_000, 0) <= chernoff_bound(k, p, d)

    def test_sqrt_bound_holds_for_half(self):
        k, p = 100, 0.5
        for a in np.linspace(0.05, p * math.sqrt(k) * 0.99, 30):
            lo, hi = p * k - a * math.sqrt(k), p * k + a * math.sqrt(k)
            exact = binom.cdf(math.ceil(lo) - 1, k, p) + binom.sf(math.floor(hi), k, p)
            assert exact <= chernoff_sqrt_bound(k, p, a)
        assert empirical_sqrt_tail(k, p, 2.0, 100_000, 1) <= chernoff_sqrt_bound(k, p, 2.0)

    def test_sqrt_bound_fails_for_small_p(self):
        # documents why the square-root form is only used for p >= 1/2
        k, p, a = 100, 0.1, 0.99
        hi = p * k + a * math.sqrt(k)
        exact = binom.sf(math.floor(hi), k, p) + binom.cdf(math.ceil(p * k - a * math.sqrt(k)) - 1, k, p)
        assert exact > chernoff_sqrt_bound(k, p, a)


def test_trial_report_counts():
    r = TrialReport(4, [1.0, 3.0, math.inf, 2.0], 2.0, 0)
    assert r.violation_count == 2
    assert r.estimate == 3.0


class TestDecomposition:
    @pytest.mark.parametrize("seed", range(5))
    @pytest.mark.parametrize("p", [0.2, 0.5])
    def test_clique_parts(self, seed, p):
        inst = gen_clique_random(RandomModelParams(p=p, N=80, n=20, seed=seed))
        dec = decompose_random_W(inst, random_gamma(p), seed=seed)
        assert dec.reconstruction_error() <= 1e-12
        np.testing.assert_array_equal(dec.parts["W4"], dec.parts["W5"].T)
        assert spectral_norm(dec.parts["W3"]) <= 2 / 20 + 1e-12
        # blocks as designated
        inside = inst.planted_left.mask
        assert np.all(dec.parts["W2"][~np.outer(inside, inside)] == 0)
        assert np.all(dec.parts["W4"][~np.outer(inside, ~inside)] == 0)
        off_diag = ~np.eye(80, dtype=bool)
        assert np.all(dec.parts["W3"][off_diag] == 0)

    @pytest.mark.parametrize("seed", range(3))
    def test_biclique_parts(self, seed):
        inst = gen_biclique_random(RandomModelParams(p=0.4, N=40, n=12, M=30, m=10, seed=seed))
        dec = decompose_random_W(inst, random_gamma(0.4), seed=seed)
        assert set(dec.parts) == {"W1", "W2", "W3", "W4"}
        assert dec.reconstruction_error() <= 1e-12

    def test_w1_bound_rate(self):
        ok = 0
        for seed in range(50):
            inst = gen_clique_random(RandomModelParams(p=0.5, N=400, n=80, seed=seed))
            dec = decompose_random_W(inst, random_gamma(0.5), seed=seed)
            ok += spectral_norm(dec.parts["W1"]) <= 3 * 20 / 80
        assert ok >= 48

    def test_requires_p(self):
        inst = gen_clique_random(RandomModelParams(p=0.5, N=20, n=8, seed=0))
        inst.params.pop("p", None)
        with pytest.raises(ValueError):
            decompose_random_W(inst, 1.0)
