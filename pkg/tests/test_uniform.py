"""Tests for the closed-form equicorrelated-model analytics.

The generic oracle throughout is plain numerical inversion of the explicit
equicorrelation matrix; every closed form must agree with it.
"""

import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from groupfx import (
    BudgetTooSmallError,
    DegenerateCorrelationError,
    NegativeDeltaError,
    UniformSpec,
    average_effect_variance,
    delta_variance,
    effect_variance,
    estimable_delta_bound,
    individual_effect_variance,
    table1,
    uniform_inverse,
)

R_GRID = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99, 0.999)

# Published reference variances for p = 8 (r, var_avg, var_indiv); the r
# levels are the exact fractions behind the table's seven-decimal prints.
TABLE1_EXPECTED = (
    (0.0, 0.12500000, 1.000000),
    (1 / 2, 0.02777778, 1.777778),
    (2 / 3, 0.02205882, 2.647059),
    (3 / 4, 0.02000000, 3.520000),
    (4 / 5, 0.01893939, 4.393939),
    (5 / 6, 0.01829268, 5.268293),
    (6 / 7, 0.01785714, 6.142857),
    (7 / 8, 0.01754386, 7.017544),
    (8 / 9, 0.01730769, 7.892308),
    (9 / 10, 0.01712329, 8.767123),
    (0.999, 0.01563868, 875.015639),
)


class TestUniformSpec:
    def test_rejects_r_outside_range(self):
        for r in (-0.1, 1.0, 1.5):
            with pytest.raises(DegenerateCorrelationError):
                UniformSpec(p=4, r=r)

    def test_rejects_bad_p_and_sigma2(self):
        with pytest.raises(ValueError):
            UniformSpec(p=1, r=0.5)
        with pytest.raises(ValueError):
            UniformSpec(p=4, r=0.5, sigma2=0.0)

    def test_denominator_factored_form(self):
        spec = UniformSpec(p=8, r=0.9)
        npt.assert_allclose(spec.denominator,
                            1 + 6 * 0.9 - 7 * 0.81, rtol=1e-12)


class TestUniformInverse:
    def test_p3_r09_against_numeric_inversion(self):
        spec = UniformSpec(p=3, r=0.9)
        inv = uniform_inverse(spec)
        npt.assert_allclose(inv.t, 1.9 / 0.28, rtol=1e-12)
        npt.assert_allclose(inv.v, -0.9 / 0.28, rtol=1e-12)
        npt.assert_allclose(inv.matrix(), np.linalg.inv(spec.matrix()), rtol=1e-9)

    def test_r0_identity(self):
        for p in (2, 5, 9):
            inv = uniform_inverse(UniformSpec(p=p, r=0.0))
            assert inv.t == 1.0 and inv.v == 0.0

    def test_reconstruction_product_is_identity(self):
        spec = UniformSpec(p=8, r=0.5)
        prod = uniform_inverse(spec).matrix() @ spec.matrix()
        npt.assert_allclose(prod, np.eye(8), atol=1e-10)

    def test_defining_equations(self):
        # t + (p-1) r v = 1 and v + t r + (p-2) r v = 0
        for p in (2, 4, 8):
            for r in (0.1, 0.5, 0.9, 0.999):
                inv = uniform_inverse(UniformSpec(p=p, r=r))
                npt.assert_allclose(inv.t + (p - 1) * r * inv.v, 1.0, atol=1e-12)
                npt.assert_allclose(inv.v + inv.t * r + (p - 2) * r * inv.v, 0.0,
                                    atol=1e-12)


class TestEffectVariance:
    def test_published_values(self):
        npt.assert_allclose(
            effect_variance(UniformSpec(8, 0.5), np.full(8, 1 / 8)),
            0.02777778, atol=1e-8)
        e1 = np.zeros(8); e1[3] = 1.0
        npt.assert_allclose(effect_variance(UniformSpec(8, 0.999), e1),
                            875.015639, atol=1e-6)

    def test_p2_basis_vector(self):
        npt.assert_allclose(effect_variance(UniformSpec(2, 0.5), [1.0, 0.0]),
                            4.0 / 3.0, rtol=1e-12)

    def test_matches_generic_inversion_oracle(self):
        rng = np.random.default_rng(0)
        for p in range(2, 11):
            for r in R_GRID:
                spec = UniformSpec(p=p, r=r)
                inv = np.linalg.inv(spec.matrix())
                w = rng.standard_normal((50, p))
                for wi in w:
                    npt.assert_allclose(effect_variance(spec, wi),
                                        wi @ inv @ wi, rtol=1e-9)

    def test_special_cases_consistent(self):
        for p in (2, 3, 8):
            for r in (0.0, 0.3, 0.9, 0.999):
                spec = UniformSpec(p=p, r=r, sigma2=2.5)
                npt.assert_allclose(effect_variance(spec, np.full(p, 1 / p)),
                                    average_effect_variance(spec), atol=1e-12)
                e = np.zeros(p); e[p // 2] = 1.0
                npt.assert_allclose(effect_variance(spec, e),
                                    individual_effect_variance(spec), rtol=1e-12)

    def test_average_is_minimum_over_simplex(self):
        # 1000 random simplex weights never beat the equal-weight vector
        rng = np.random.default_rng(1)
        spec = UniformSpec(p=6, r=0.8)
        floor = average_effect_variance(spec)
        for _ in range(1000):
            w = rng.dirichlet(np.ones(6))
            assert effect_variance(spec, w) >= floor - 1e-12

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.floats(-1.0, 1.0, allow_nan=False), min_size=2, max_size=8),
           st.floats(0.01, 0.99))
    def test_unsigned_weights_never_do_worse(self, w, r):
        # dominance of the all-positive subclass: var(|w'|) <= var(w')
        w = np.asarray(w)
        if np.all(w == 0.0):
            w[0] = 1.0
        spec = UniformSpec(p=w.size, r=r)
        assert effect_variance(spec, np.abs(w)) <= effect_variance(spec, w) + 1e-12


class TestMonotonicityAndLimits:
    def test_average_strictly_decreasing_individual_increasing(self):
        r_grid = np.arange(0.01, 1.0, 0.01)
        for p in (2, 3, 8):
            avg = [average_effect_variance(UniformSpec(p, r)) for r in r_grid]
            ind = [individual_effect_variance(UniformSpec(p, r)) for r in r_grid]
            assert np.all(np.diff(avg) < 0)
            assert np.all(np.diff(ind) > 0)

    def test_limits_near_r_equal_one(self):
        for p in (2, 3, 8):
            spec = UniformSpec(p=p, r=1 - 1e-6)
            assert abs(average_effect_variance(spec) - 1.0 / p**2) < 1e-4
            assert individual_effect_variance(spec) > 1e4


class TestDeltaVariance:
    def test_zero_delta_equals_average(self):
        for p in (2, 5, 8):
            for r in (0.0, 0.5, 0.99):
                spec = UniformSpec(p=p, r=r, sigma2=1.7)
                npt.assert_allclose(delta_variance(spec, 0.0),
                                    average_effect_variance(spec), atol=1e-12)

    def test_delta_p_minus_one_equals_individual(self):
        spec = UniformSpec(p=8, r=0.5)
        npt.assert_allclose(delta_variance(spec, 7.0),
                            individual_effect_variance(spec), rtol=1e-12)
        npt.assert_allclose(delta_variance(spec, 7.0), 1.777778, atol=1e-6)

    def test_delta_matches_weight_dispersion(self):
        # delta = p * sum(w^2) - 1 links the two variance formulas exactly
        rng = np.random.default_rng(2)
        spec = UniformSpec(p=5, r=0.7)
        for _ in range(200):
            w = rng.dirichlet(np.ones(5))
            delta = 5.0 * float(w @ w) - 1.0
            npt.assert_allclose(delta_variance(spec, delta),
                                effect_variance(spec, w), rtol=1e-10)

    def test_strictly_increasing_in_delta(self):
        spec = UniformSpec(p=8, r=0.9)
        vals = [delta_variance(spec, d) for d in np.linspace(0.0, 7.0, 50)]
        assert np.all(np.diff(vals) > 0)

    def test_fixed_delta_endpoints(self):
        # frozen oracle values at delta = 0.01, p = 8: the variance at
        # r = 0.5 exceeds the one at r = 0.9 (the r-profile dips before its
        # divergence toward r = 1 sets in)
        npt.assert_allclose(delta_variance(UniformSpec(8, 0.5), 0.01),
                            0.545 / 18.0, rtol=1e-12)
        npt.assert_allclose(delta_variance(UniformSpec(8, 0.9), 0.01),
                            0.173 / 5.84, rtol=1e-12)
        assert delta_variance(UniformSpec(8, 0.5), 0.01) > \
            delta_variance(UniformSpec(8, 0.9), 0.01)

    def test_fixed_delta_diverges_as_r_approaches_one(self):
        # increasing on the high-r range and unbounded in the limit
        vals = [delta_variance(UniformSpec(8, r), 0.01)
                for r in np.arange(0.80, 0.9999, 0.001)]
        assert np.all(np.diff(vals) > 0)
        assert delta_variance(UniformSpec(8, 1 - 1e-9), 0.01) > 1e5

    def test_negative_delta_rejected(self):
        with pytest.raises(NegativeDeltaError):
            delta_variance(UniformSpec(8, 0.5), -0.01)


class TestEstimableDeltaBound:
    def test_boundary_budget_gives_zero(self):
        spec = UniformSpec(p=8, r=0.5)
        assert estimable_delta_bound(spec, average_effect_variance(spec)) == 0.0

    def test_individual_budget_gives_p_minus_one(self):
        spec = UniformSpec(p=8, r=0.5)
        npt.assert_allclose(
            estimable_delta_bound(spec, individual_effect_variance(spec)),
            7.0, rtol=1e-12)

    def test_round_trip_with_delta_variance(self):
        spec = UniformSpec(p=6, r=0.8)  # variance floor 1/30
        for budget in (0.034, 0.05, 0.2, 1.0):
            delta = estimable_delta_bound(spec, budget)
            npt.assert_allclose(delta_variance(spec, delta), budget, rtol=1e-10)

    def test_neighborhood_shrinks_at_high_correlation(self):
        # for a fixed budget the admissible dispersion collapses as r -> 1
        budget = 0.05
        deltas = [estimable_delta_bound(UniformSpec(8, r), budget)
                  for r in (0.9, 0.99, 0.999, 0.9999)]
        assert np.all(np.diff(deltas) < 0)
        assert deltas[-1] < 1e-3

    def test_budget_below_minimum_rejected(self):
        spec = UniformSpec(p=8, r=0.5)
        with pytest.raises(BudgetTooSmallError):
            estimable_delta_bound(spec, 0.5 * average_effect_variance(spec))


class TestTable1:
    def test_reproduces_published_table(self):
        rows = table1(8)
        assert len(rows) == len(TABLE1_EXPECTED)
        for (r, avg, ind), (er, ea, ei) in zip(rows, TABLE1_EXPECTED):
            assert r == er
            assert abs(avg - ea) < 1e-6
            assert abs(ind - ei) < 1e-6

    def test_custom_grid_and_sigma2(self):
        rows = table1(4, (0.0, 0.5), sigma2=2.0)
        npt.assert_allclose(rows[0][1], 2.0 / 4.0)
        npt.assert_allclose(rows[1][2],
                            2.0 * individual_effect_variance(UniformSpec(4, 0.5)),
                            rtol=1e-12)
