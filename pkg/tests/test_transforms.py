import numpy as np
import pytest

from occutime import (
    green,
    joint_lt_general,
    joint_lt_skipfree,
    marginal_rate,
    mc_transform,
    occupation_covariance,
    validate_generator,
    validate_killing,
)
from occutime import linalg
from occutime.errors import NoKillingReachable, NotSkipFree, SingularMatrix

from conftest import make_general, make_skipfree


class TestJointLtSkipfree:
    def test_single_state(self):
        g = validate_generator([[-2.0]])
        assert joint_lt_skipfree(g, [2.0]) == pytest.approx(0.5, rel=1e-14)

    def test_fixtures_exact(self, g_bd, g_sf):
        assert joint_lt_skipfree(g_bd, [1.0, 1.0]) == pytest.approx(1 / 4.5, rel=1e-12)
        assert joint_lt_skipfree(g_sf, [1.0, 1.0, 1.0]) == pytest.approx(
            1 / 10.65, rel=1e-12)

    def test_unit_at_zero(self, g_sf):
        assert joint_lt_skipfree(g_sf, [0.0, 0.0, 0.0]) == 1.0

    def test_strictly_decreasing_in_each_coordinate(self):
        rng = np.random.default_rng(20)
        for _ in range(10):
            g = make_skipfree(int(rng.integers(2, 8)), rng)
            d = rng.uniform(0.1, 2.0, g.n)
            base = joint_lt_skipfree(g, d)
            assert 0.0 < base <= 1.0
            for i in range(g.n):
                bumped = d.copy()
                bumped[i] += rng.uniform(0.1, 1.0)
                assert joint_lt_skipfree(g, bumped) < base

    def test_requires_skip_free(self):
        g = validate_generator(np.array([[-2.0, 0.5], [1.0, -1.5]]))
        with pytest.raises(NotSkipFree):
            joint_lt_skipfree(g, [1.0, 1.0])


class TestJointLtGeneral:
    def test_total_mass_at_zero(self):
        rng = np.random.default_rng(21)
        for _ in range(5):
            g = make_general(int(rng.integers(2, 7)), rng)
            for start in range(g.n):
                assert joint_lt_general(g, start, np.zeros(g.n)) == pytest.approx(
                    1.0, rel=1e-10)

    def test_collapses_to_skipfree_from_zero(self):
        rng = np.random.default_rng(22)
        for _ in range(25):
            g = make_skipfree(int(rng.integers(2, 9)), rng)
            for _ in range(4):
                d = rng.uniform(0.0, 3.0, g.n)
                assert joint_lt_general(g, 0, d) == pytest.approx(
                    joint_lt_skipfree(g, d), rel=1e-10)

    def test_fixture_value(self, g_sf):
        assert joint_lt_general(g_sf, 0, [1.0, 1.0, 1.0]) == pytest.approx(
            1 / 10.65, rel=1e-12)

    def test_minor_is_d_independent(self):
        rng = np.random.default_rng(23)
        for _ in range(5):
            g = make_skipfree(int(rng.integers(3, 8)), rng)
            vals = []
            for _ in range(20):
                d = rng.uniform(0.0, 3.0, g.n)
                m = np.diag(d) - g.q
                vals.append(linalg.signed_minor(m, 0, g.n - 1))
            assert np.ptp(vals) <= 1e-10 * max(1.0, abs(vals[0]))

    def test_general_start_against_oracle(self, g_bd):
        # occupation of state 0 before absorption, started at 1
        d = np.array([0.7, 0.0])
        exact = joint_lt_general(g_bd, 1, d)
        est = mc_transform(g_bd, 1, d, 100_000, seed=2024)
        assert abs(exact - est.mean) <= 4 * est.std_error

    def test_dense_chains_arbitrary_starts_against_oracle(self):
        # non-skip-free generators exercise the full cofactor sum
        rng = np.random.default_rng(314)
        for k in range(6):
            g = make_general(int(rng.integers(2, 7)), rng)
            start = int(rng.integers(0, g.n))
            d = rng.uniform(0.1, 1.5, g.n)
            exact = joint_lt_general(g, start, d)
            est = mc_transform(g, start, d, 60_000, seed=7000 + k)
            assert abs(exact - est.mean) <= 4 * est.std_error

    def test_killing_must_be_reachable(self):
        g = validate_generator([[-1.0, 1.0], [1.0, -1.0]], kind="full")
        with pytest.raises(NoKillingReachable):
            joint_lt_general(g, 0, [1.0, 1.0])


class TestGreenAndMarginals:
    def test_green_fixtures(self, g_bd, g_sf):
        np.testing.assert_allclose(green(g_bd), [[1.5, 1.0], [0.5, 1.0]], atol=1e-12)
        np.testing.assert_allclose(
            green(g_sf),
            [[2.15, 1.5, 1.0], [1.15, 1.5, 1.0], [0.65, 0.5, 1.0]], atol=1e-12)

    def test_identity_generator(self):
        g = validate_generator(-np.eye(3))
        np.testing.assert_allclose(green(g), np.eye(3), atol=1e-14)

    def test_skip_free_row_zero_equals_diagonal(self):
        rng = np.random.default_rng(24)
        for _ in range(20):
            g = make_skipfree(int(rng.integers(2, 9)), rng)
            gm = green(g)
            np.testing.assert_allclose(gm[0, :], np.diag(gm), atol=1e-10)

    def test_full_conservative_is_singular(self):
        g = validate_generator([[-1.0, 1.0], [1.0, -1.0]], kind="full")
        with pytest.raises(SingularMatrix):
            green(g)

    def test_marginal_rates(self, g_bd, g_sf):
        assert marginal_rate(g_bd, 0) == pytest.approx(2 / 3, rel=1e-12)
        assert marginal_rate(g_bd, 1) == pytest.approx(1.0, rel=1e-12)
        assert marginal_rate(g_sf, 2) == pytest.approx(1.0, rel=1e-12)

    def test_marginal_matches_green_diagonal(self):
        rng = np.random.default_rng(25)
        g = make_skipfree(6, rng)
        gm = green(g)
        for i in range(6):
            assert marginal_rate(g, i) == pytest.approx(1 / gm[i, i], rel=1e-12)

    def test_green_rows_are_mean_occupations(self):
        # row x of (-Q)^-1 is the expected occupation vector started at x,
        # including zero entries for states unreachable from x
        from occutime import empirical_moments
        rng = np.random.default_rng(26)
        for k in range(4):
            g = make_general(int(rng.integers(2, 6)), rng)
            start = int(rng.integers(0, g.n))
            gm = green(g)
            mom = empirical_moments(g, start, 60_000, seed=7100 + k)
            gaps = np.abs(mom.mean - gm[start])
            assert np.all(gaps <= 3 * mom.mean_se + 1e-12)


class TestOccupationCovariance:
    def test_birth_death_values(self, g_bd):
        cov = occupation_covariance(g_bd, 0)
        # exponential marginal: Var(l_1) = green[1,1]**2
        assert cov[1, 1] == pytest.approx(1.0, rel=1e-4)
        # tridiagonal case: Cov(l_0, l_1) = g01 * g10 = 1 * 0.5
        assert cov[0, 1] == pytest.approx(0.5, rel=1e-4)
        assert cov[0, 0] == pytest.approx(1.5 ** 2, rel=1e-4)

    def test_against_simulation(self, g_sf):
        from occutime import empirical_moments
        cov = occupation_covariance(g_sf, 0)
        mom = empirical_moments(g_sf, 0, 100_000, seed=31)
        for i in range(3):
            for j in range(3):
                se = mom.cov_se[i, j]
                assert abs(cov[i, j] - mom.cov[i, j]) <= 4 * se

    def test_general_start(self, g_bd):
        cov = occupation_covariance(g_bd, 1)
        # started at 1, l_0 is a geometric sum of Exp(1) holds
        from occutime import empirical_moments
        mom = empirical_moments(g_bd, 1, 100_000, seed=32)
        assert abs(cov[0, 0] - mom.cov[0, 0]) <= 4 * mom.cov_se[0, 0]


class TestValidateKilling:
    def test_rejects_wrong_length(self):
        with pytest.raises(ValueError):
            validate_killing([1.0], 2)

    def test_rejects_negative_and_nan(self):
        with pytest.raises(ValueError):
            validate_killing([-0.1, 0.0], 2)
        with pytest.raises(ValueError):
            validate_killing([np.nan, 0.0], 2)
