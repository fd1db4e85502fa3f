import math

import numpy as np
import pytest
from scipy import stats

from zicount import (CountSample, DegenerateSampleError, Family, Sidedness,
                     TestMethod, ZipsModel, lr_test, mle_full, mle_null,
                     sample_values, score_test)
from zicount.distributions import _log_likelihood
from zicount.frequentist import _mle_full_stats, _score_statistic, gradient_norm_at
from zicount.power import _lr_statistic_stats


class TestMleNull:
    def test_uti_rate(self, uti):
        fit = mle_null(Family.POISSON, uti)
        assert fit.theta_hat == pytest.approx(26 / 98, abs=1e-12)
        assert fit.p_hat == 0.0
        assert fit.converged

    def test_terror_rate(self, terror):
        assert mle_null(Family.POISSON, terror).theta_hat == pytest.approx(52 / 75, abs=1e-12)

    def test_geometric_moment_identity(self):
        cs = CountSample({0: 5, 2: 5})  # ybar = 1
        assert mle_null(Family.GEOMETRIC, cs).theta_hat == pytest.approx(0.5, abs=1e-12)

    def test_degenerate(self):
        with pytest.raises(DegenerateSampleError):
            mle_null(Family.POISSON, CountSample({0: 10}))


class TestMleFull:
    def test_uti_fixed_point(self, uti):
        fit = mle_full(Family.POISSON, uti)
        assert fit.converged and not fit.boundary
        assert fit.theta_hat == pytest.approx(0.9197, abs=5e-4)
        assert fit.p_hat == pytest.approx(0.7115, abs=5e-4)
        assert gradient_norm_at(Family.POISSON, fit, uti) < 1e-6

    def test_uti_beats_grid_maximization(self, uti):
        fit = mle_full(Family.POISSON, uti)
        best = -np.inf
        for p in np.linspace(0.3, 0.95, 200):
            for theta in np.linspace(0.4, 2.0, 200):
                best = max(best, _log_likelihood(Family.POISSON, p, theta, uti))
        assert fit.loglik >= best - 1e-8

    def test_poisson_shaped_sample_gives_zero_weight(self):
        # with n0/n equal to exp(-theta_hat) the weight estimate vanishes;
        # arrange it exactly by solving the fixed point for a real-valued s
        theta_star = math.log(4.0)
        n, n0 = 100, 25
        s = theta_star * (n - n0) / (1.0 - math.exp(-theta_star))
        p_hat, theta_hat, _, converged, boundary = _mle_full_stats(
            Family.POISSON, n, n0, s)
        assert converged and not boundary
        assert theta_hat == pytest.approx(theta_star, abs=1e-9)
        assert p_hat == pytest.approx(0.0, abs=1e-9)

    def test_geometric_closed_form(self):
        cs = CountSample({0: 50, 1: 25, 2: 25})
        fit = mle_full(Family.GEOMETRIC, cs)
        assert fit.theta_hat == pytest.approx(1.0 / 3.0, abs=1e-12)
        assert fit.p_hat == pytest.approx(-0.5, abs=1e-12)

    def test_geometric_closed_form_matches_numeric_maximum(self):
        cs = CountSample({0: 50, 1: 25, 2: 25})
        fit = mle_full(Family.GEOMETRIC, cs)
        best = -np.inf
        for p in np.linspace(-0.9, 0.5, 300):
            for theta in np.linspace(0.05, 0.8, 300):
                lo = -(1.0 - theta) / theta
                if p <= lo + 1e-6:
                    continue
                best = max(best, _log_likelihood(Family.GEOMETRIC, p, theta, cs))
        assert fit.loglik >= best - 1e-8

    def test_no_zeros_boundary_flag(self):
        cs = CountSample({1: 6, 2: 3, 4: 1})
        fit = mle_full(Family.POISSON, cs)
        assert fit.boundary
        assert fit.p_hat < 0.0
        e = math.exp(-fit.theta_hat)
        assert fit.p_hat == pytest.approx(-e / (1.0 - e), rel=1e-9)

    def test_all_zeros_error(self):
        with pytest.raises(DegenerateSampleError):
            mle_full(Family.POISSON, CountSample({0: 9}))

    def test_all_positive_ones_boundary(self):
        cs = CountSample({0: 5, 1: 5})
        fit = mle_full(Family.POISSON, cs)
        assert fit.boundary and math.isnan(fit.p_hat)
        assert fit.loglik == pytest.approx(10 * math.log(0.5), rel=1e-12)


class TestScoreTest:
    # frozen statistics for the bundled datasets, confirmed by an
    # independent hand evaluation of the closed form
    KNOWN = {"uti": 15.34, "terror": 0.04, "cholera": 30.56}

    def test_uti(self, uti):
        report = score_test(Family.POISSON, uti)
        assert report.statistic == pytest.approx(15.34, abs=0.01)
        two = score_test(Family.POISSON, uti, sidedness=Sidedness.TWO_SIDED)
        assert two.p_value == pytest.approx(0.0001, abs=5e-5)
        assert report.reject

    def test_terror(self, terror):
        two = score_test(Family.POISSON, terror, sidedness=Sidedness.TWO_SIDED)
        assert two.statistic == pytest.approx(0.04, abs=0.01)
        assert two.p_value == pytest.approx(0.83, abs=0.01)
        assert not two.reject

    def test_cholera(self, cholera):
        report = score_test(Family.POISSON, cholera)
        assert report.statistic == pytest.approx(30.56, abs=0.01)

    def test_depends_only_on_sufficient_statistics(self):
        # different tables, identical (n, n0, s)
        a = CountSample({0: 5, 4: 1, 1: 2})
        b = CountSample({0: 5, 3: 1, 2: 1, 1: 1})
        assert (a.n, a.n0, a.s) == (b.n, b.n0, b.s)
        ra = score_test(Family.POISSON, a)
        rb = score_test(Family.POISSON, b)
        assert ra.statistic == rb.statistic  # bit identical

    def test_zero_statistic_identity(self):
        # statistic vanishes exactly when n0/n equals the fitted zero mass
        n, s = 100.0, 100.0
        n0 = n * math.exp(-s / n)
        stat, _ = _score_statistic(Family.POISSON, n, n0, s)
        assert abs(stat) < 1e-20
        theta0 = 1.0  # geometric: ybar = 1 -> theta0 = 1/2, f0 = 1/2
        stat_g, _ = _score_statistic(Family.GEOMETRIC, 100.0, 50.0, 100.0)
        assert abs(stat_g) < 1e-20
        assert theta0  # silence lint

    def test_monotone_in_n0_above_the_null_mass(self):
        n, s = 200, 240
        stats_seq = []
        for n0 in range(70, 130, 10):
            if n0 / n > math.exp(-s / n):
                stats_seq.append(_score_statistic(Family.POISSON, n, n0, s)[0])
        assert stats_seq == sorted(stats_seq)

    def test_signed_root_normality_under_null(self):
        rng = np.random.default_rng(2024)
        model = ZipsModel(Family.POISSON, 1e-14, 1.0)
        roots = []
        for _ in range(5000):
            values = sample_values(model, 500, rng)
            n0 = int(np.count_nonzero(values == 0))
            s = int(values.sum())
            stat, sign = _score_statistic(Family.POISSON, 500, n0, s)
            roots.append(sign * math.sqrt(stat))
        result = stats.kstest(np.asarray(roots), "norm")
        assert result.statistic < 0.025

    def test_degenerate_propagates(self):
        with pytest.raises(DegenerateSampleError):
            score_test(Family.POISSON, CountSample({0: 4}))


class TestLrTest:
    def test_zero_when_sample_is_poisson_shaped(self):
        theta_star = math.log(4.0)
        n, n0 = 100, 25
        s = theta_star * (n - n0) / (1.0 - math.exp(-theta_star))
        stat, _ = _lr_statistic_stats(Family.POISSON, n, n0, s)
        assert stat == pytest.approx(0.0, abs=1e-12)

    def test_uti_rejects_one_sided(self, uti):
        report = lr_test(Family.POISSON, uti)
        assert report.statistic > 0
        assert report.reject
        assert report.signed_root == pytest.approx(math.sqrt(report.statistic), abs=1e-10)

    def test_null_rejection_rate(self):
        # one-sided LR at the 5% level over 10,000 null replications
        rng_spawn = np.random.SeedSequence(424242).spawn(10_000)
        model = ZipsModel(Family.POISSON, 1e-14, 1.0)
        z_cut = stats.norm.ppf(0.95)
        rejections = 0
        for child in rng_spawn:
            values = sample_values(model, 100, np.random.default_rng(child))
            n0 = int(np.count_nonzero(values == 0))
            if n0 == 100:
                continue
            stat, sign = _lr_statistic_stats(Family.POISSON, 100, n0, int(values.sum()))
            if sign * math.sqrt(stat) > z_cut:
                rejections += 1
        assert rejections / 10_000 == pytest.approx(0.048, abs=0.01)

    def test_nesting_over_random_samples(self):
        rng = np.random.default_rng(8)
        for _ in range(60):
            fam = Family.POISSON if rng.random() < 0.5 else Family.GEOMETRIC
            theta = rng.uniform(0.3, 2.5) if fam is Family.POISSON else rng.uniform(0.2, 0.8)
            p = rng.uniform(-0.1, 0.6)
            try:
                model = ZipsModel(fam, p, theta)
            except Exception:
                continue
            cs = CountSample.from_values(sample_values(model, 80, rng))
            if cs.n0 == cs.n:
                continue
            full = mle_full(fam, cs)
            try:
                null = mle_null(fam, cs)
            except DegenerateSampleError:
                continue
            assert full.loglik >= null.loglik - 1e-9

    def test_report_invariants(self, uti, terror):
        for cs in (uti, terror):
            for sided in Sidedness:
                for report in (score_test(Family.POISSON, cs, sidedness=sided),
                               lr_test(Family.POISSON, cs, sidedness=sided)):
                    assert report.statistic >= 0.0
                    assert report.signed_root ** 2 == pytest.approx(
                        report.statistic, abs=1e-10)
                    assert 0.0 <= report.p_value <= 1.0
                    if sided is Sidedness.ONE_SIDED:
                        expected = report.signed_root > stats.norm.ppf(0.95)
                    else:
                        expected = report.statistic > stats.chi2.ppf(0.95, 1)
                    assert report.reject == expected

    def test_method_tags(self, uti):
        assert score_test(Family.POISSON, uti).method is TestMethod.SCORE
        assert lr_test(Family.POISSON, uti).method is TestMethod.LR
