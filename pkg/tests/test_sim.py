"""Tests for the Monte Carlo harness: design generation, replication,
aggregation, determinism and the qualitative multicollinearity claims."""

import numpy as np
import numpy.testing as npt
import pytest

from groupfx import (
    SimCaseConfig,
    SingularDesignError,
    Transform,
    correlation,
    fit_ols,
    generate_design,
    paper_case_config,
    run_case,
    run_paper_suite,
)
from groupfx.sim import GROUPS, RunningMoments, worker_count

GROUP_EFFECTS = ("tau1", "tau2", "tau3", "tau4",
                 "tau1_w", "tau2_w", "tau3_w", "tau4_w")


class TestGenerateDesign:
    def test_shape_and_names(self):
        design = generate_design(SimCaseConfig(w1=0.5, w2=0.5, seed=0))
        assert design.X.shape == (15, 11)
        assert design.names[0] == "intercept"
        assert design.names[1:] == tuple(f"x{j}" for j in range(1, 11))

    def test_degenerate_mixing_weight_makes_fit_singular(self):
        # w1 = 1 duplicates x1 as x2; the fit must refuse it
        design = generate_design(SimCaseConfig(w1=1.0, w2=0.5, seed=0))
        npt.assert_array_equal(design.X[:, 1], design.X[:, 2])
        with pytest.raises(SingularDesignError):
            fit_ols(design)

    def test_sample_correlation_approaches_population_value(self):
        # population corr = w1 / sqrt(w1^2 + (1-w1)^2) = 0.99388 at w1 = 0.9
        design = generate_design(SimCaseConfig(w1=0.9, w2=0.4, n=10_000, seed=1))
        r12 = correlation(design, [1, 2]).values[0, 1]
        assert abs(r12 - 0.99388) < 0.05

    def test_sign_flip_transform_creates_negative_correlation(self):
        cfg = SimCaseConfig(w1=0.9, w2=0.9, seed=0,
                            transforms=(Transform(2, flip=True),))
        design = generate_design(cfg)
        assert correlation(design, [1, 2]).values[0, 1] < 0

    def test_scale_transform_doubles_column_norm(self):
        base = generate_design(SimCaseConfig(w1=0.5, w2=0.5, seed=3))
        doubled = generate_design(SimCaseConfig(w1=0.5, w2=0.5, seed=3,
                                                transforms=(Transform(5, scale=2.0),)))
        npt.assert_allclose(doubled.X[:, 5], 2.0 * base.X[:, 5], rtol=1e-12)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            SimCaseConfig(w1=1.2, w2=0.5)
        with pytest.raises(ValueError):
            SimCaseConfig(w1=0.5, w2=0.5, replicates=0)
        with pytest.raises(ValueError):
            Transform(0)
        with pytest.raises(ValueError):
            Transform(3, scale=0.0)


class TestRunningMoments:
    def test_matches_numpy(self):
        rng = np.random.default_rng(0)
        x = rng.standard_normal(500)
        acc = RunningMoments()
        for v in x:
            acc.add(float(v))
        npt.assert_allclose(acc.mean, x.mean(), rtol=1e-12)
        npt.assert_allclose(acc.variance, x.var(ddof=1), rtol=1e-12)

    def test_merge_any_split(self):
        rng = np.random.default_rng(1)
        x = rng.standard_normal(301)
        for cut in (1, 57, 300):
            a, b = RunningMoments(), RunningMoments()
            for v in x[:cut]:
                a.add(float(v))
            for v in x[cut:]:
                b.add(float(v))
            a.merge(b)
            npt.assert_allclose(a.mean, x.mean(), rtol=1e-10)
            npt.assert_allclose(a.variance, x.var(ddof=1), rtol=1e-10)


class TestRunCase:
    def test_noiseless_null_model_is_exact(self):
        cfg = SimCaseConfig(w1=0.4, w2=0.6, beta=(0.0,) * 11, sigma2=0.0,
                            replicates=25, seed=2)
        report = run_case(cfg)
        for eff in report.effects:
            assert eff.mean == 0.0
            assert eff.variance == 0.0

    def test_noiseless_nonzero_model_recovers_truth(self):
        cfg = SimCaseConfig(w1=0.4, w2=0.6, sigma2=0.0, replicates=10, seed=2)
        report = run_case(cfg)
        for eff in report.effects:
            npt.assert_allclose(eff.mean, eff.true_value, atol=1e-9)
            assert eff.variance < 1e-18

    def test_determinism_bitwise(self):
        a = run_case(SimCaseConfig(w1=0.7, w2=0.6, replicates=100, seed=9))
        b = run_case(SimCaseConfig(w1=0.7, w2=0.6, replicates=100, seed=9))
        for ea, eb in zip(a.effects, b.effects):
            assert ea == eb
        assert a.corr_ranges == b.corr_ranges

    def test_determinism_under_threads(self, monkeypatch):
        base = run_case(SimCaseConfig(w1=0.7, w2=0.6, replicates=100, seed=9))
        monkeypatch.setenv("GROUPFX_THREADS", "4")
        assert worker_count() == 4
        threaded = run_case(SimCaseConfig(w1=0.7, w2=0.6, replicates=100, seed=9))
        for ea, eb in zip(base.effects, threaded.effects):
            assert ea == eb

    def test_unbiasedness_within_four_mc_standard_errors(self):
        report = run_case(paper_case_config(2, seed=0, replicates=1000))
        for eff in report.effects:
            mc_se = np.sqrt(eff.variance / report.replicates)
            assert abs(eff.mean - eff.true_value) < 4.0 * mc_se

    def test_case2_weighted_effect_mean_hits_realized_target(self):
        # the target w_w' (beta3, beta4, beta5) is computed from the realized
        # column norms of the generated design
        report = run_case(paper_case_config(2, seed=0, replicates=1000))
        eff = report.effect("tau2_w")
        mc_se = np.sqrt(eff.variance / report.replicates)
        assert abs(eff.mean - eff.true_value) < 3.0 * mc_se

    def test_case1_variance_bands(self):
        report = run_case(paper_case_config(1, seed=0, replicates=1000))
        for label in GROUP_EFFECTS:
            assert report.effect(label).variance < 0.5
        for j in range(11):
            assert report.effect(f"beta{j}").variance < 2.0

    def test_true_weighted_effect_uses_realized_scales(self):
        cfg = paper_case_config(4, seed=0, replicates=10)
        design = generate_design(cfg)
        report = run_case(cfg)
        from groupfx import variability_weights
        w = variability_weights(correlation(design, [1, 2])).weights
        expected = float(w @ np.asarray(cfg.beta)[[1, 2]])
        npt.assert_allclose(report.effect("tau1_w").true_value, expected, rtol=1e-12)
        # the doubled x2 dominates the weighting
        assert w[1] > 0.6

    def test_corr_ranges_recorded_for_all_groups(self):
        report = run_case(SimCaseConfig(w1=0.9, w2=0.9, replicates=5, seed=0))
        assert set(report.corr_ranges) == set(GROUPS)
        lo, hi = report.corr_ranges["g1"]
        assert lo <= hi and hi > 0.9

    def test_monotone_benefit_of_correlation(self):
        # with a shared base seed, the weighted-effect variance of group 1 is
        # non-increasing as the mixing weight rises; at n = 15 a single draw
        # is noisy, so the trend is demonstrated at a larger n across seeds
        # plus the pinned default seed at n = 15
        for seed in (0, 1, 2):
            variances = [
                run_case(SimCaseConfig(w1=w1, w2=0.4, n=120, seed=seed,
                                       replicates=300)).effect("tau1_w").variance
                for w1 in (0.3, 0.9, 0.999)
            ]
            assert variances[0] >= variances[1] >= variances[2]
        variances = [
            run_case(SimCaseConfig(w1=w1, w2=0.4, seed=0,
                                   replicates=300)).effect("tau1_w").variance
            for w1 in (0.3, 0.9, 0.999)
        ]
        assert variances[0] >= variances[1] >= variances[2]


@pytest.fixture(scope="module")
def suite():
    return run_paper_suite(seed=0, replicates=400)


class TestPaperSuite:

    def test_five_cases(self, suite):
        assert [r.label for r in suite.reports] == [f"case{k}" for k in range(1, 6)]

    def test_all_checks_pass(self, suite):
        for check in suite.checks:
            assert check.passed, f"{check.name}: {check.detail}"

    def test_locality_is_exact_under_shared_seed(self, suite):
        # the mixing design spans the same column space whatever the weights,
        # so the uncorrelated coefficients' estimators agree across cases
        for j in range(6, 11):
            v1 = suite.report("case1").effect(f"beta{j}").variance
            v3 = suite.report("case3").effect(f"beta{j}").variance
            assert max(v1 / v3, v3 / v1) < 5.0
            npt.assert_allclose(v1, v3, rtol=1e-9)

    def test_case4_average_effect_breaks_weighted_survives(self, suite):
        rep = suite.report("case4")
        assert rep.effect("tau1").variance > 10.0
        assert rep.effect("tau1_w").variance < 0.1

    def test_case5_weighted_effect_not_estimable(self, suite):
        assert suite.report("case5").effect("tau1_w").variance > 5.0
