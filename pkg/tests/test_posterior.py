"""Beta-binomial posterior math against exact and quadrature oracles."""

from fractions import Fraction

import pytest

from mtpi2.posterior import (
    BetaParams,
    DoseData,
    interval_mass,
    posterior,
    posterior_mean,
    posterior_variance,
    prob_over_target,
    reg_inc_beta,
)

from oracles import beta_pdf, ibeta_exact, ibeta_quad


class TestRegIncBeta:
    def test_upper_support(self):
        for a, b in [(1, 1), (4, 4), (17, 3)]:
            assert reg_inc_beta(1.0, BetaParams(a, b)) == 1.0

    def test_symmetric_midpoint(self):
        assert reg_inc_beta(0.5, BetaParams(4, 4)) == pytest.approx(0.5, abs=1e-15)

    def test_closed_form_b_equals_one(self):
        # I_t(a, 1) = t^a
        assert reg_inc_beta(0.3, BetaParams(4, 1)) == pytest.approx(0.0081, abs=1e-15)

    def test_binomial_tail_value(self):
        # Pr(Bin(6, 0.3) >= 4) = 0.07047 exactly
        exact = ibeta_exact(Fraction(3, 10), 4, 3)
        assert float(exact) == pytest.approx(0.070470, abs=1e-12)
        assert reg_inc_beta(0.3, BetaParams(4, 3)) == pytest.approx(float(exact), abs=1e-14)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            reg_inc_beta(-0.1, BetaParams(2, 2))
        with pytest.raises(ValueError):
            reg_inc_beta(1.1, BetaParams(2, 2))
        with pytest.raises(ValueError):
            reg_inc_beta(0.5, BetaParams(0, 2))

    def test_monotone_in_t_with_exact_endpoints(self):
        p = BetaParams(7, 12)
        grid = [i / 100 for i in range(101)]
        values = [reg_inc_beta(t, p) for t in grid]
        assert values[0] == 0.0
        assert values[-1] == 1.0
        assert all(b >= a for a, b in zip(values, values[1:]))

    def test_against_quadrature_small_shapes(self):
        # the full <=50 sweep runs in the acceptance suite
        for a in range(1, 11):
            for b in range(1, 11):
                for t in (0.01, 0.1, 0.25, 0.5, 0.77, 0.99):
                    assert reg_inc_beta(t, BetaParams(a, b)) == pytest.approx(
                        ibeta_quad(t, a, b), abs=1e-9
                    )

    def test_large_shapes_stable(self):
        # log-space accumulation keeps n ~ 1000 finite and in [0, 1]
        v = reg_inc_beta(0.31, BetaParams(300, 701))
        assert 0.0 <= v <= 1.0
        assert v == pytest.approx(ibeta_quad(0.31, 300, 701), abs=1e-9)


class TestPosterior:
    def test_no_data_returns_prior(self):
        assert posterior(DoseData(0, 0)) == BetaParams(1, 1)

    def test_three_of_six(self):
        assert posterior(DoseData(3, 6)) == BetaParams(4, 4)

    def test_direct_formula(self):
        assert posterior(DoseData(2, 9)) == BetaParams(3, 8)

    def test_rejects_x_over_n(self):
        with pytest.raises(ValueError):
            posterior(DoseData(4, 3))


class TestIntervalMass:
    def test_uniform_prior_mass_is_length(self):
        assert interval_mass(DoseData(0, 0), 0.25, 0.35) == pytest.approx(0.1, abs=1e-15)

    def test_frozen_values_beta44(self):
        # exact rational oracle: 6930419/32000000 and the (0.25, 0.35) analogue
        m_hi = ibeta_exact(Fraction(55, 100), 4, 4) - ibeta_exact(Fraction(45, 100), 4, 4)
        assert float(m_hi) == pytest.approx(0.21657559375, abs=1e-15)
        assert interval_mass(DoseData(3, 6), 0.45, 0.55) == pytest.approx(float(m_hi), abs=1e-13)
        m_ei = ibeta_exact(Fraction(35, 100), 4, 4) - ibeta_exact(Fraction(25, 100), 4, 4)
        assert interval_mass(DoseData(3, 6), 0.25, 0.35) == pytest.approx(float(m_ei), abs=1e-13)
        assert float(m_ei) == pytest.approx(0.12928909375, abs=1e-15)

    def test_rejects_inverted_bounds(self):
        with pytest.raises(ValueError):
            interval_mass(DoseData(1, 3), 0.5, 0.5)
        with pytest.raises(ValueError):
            interval_mass(DoseData(1, 3), 0.7, 0.2)

    def test_partition_masses_sum_to_one(self):
        cuts = [0.0, 0.07, 0.25, 0.35, 0.62, 0.95, 1.0]
        for x, n in [(0, 0), (3, 6), (2, 9), (11, 30)]:
            total = sum(
                interval_mass(DoseData(x, n), lo, hi) for lo, hi in zip(cuts, cuts[1:])
            )
            assert total == pytest.approx(1.0, abs=1e-12)

    def test_mirror_symmetry(self):
        for x, n in [(0, 3), (2, 6), (3, 7), (5, 12)]:
            for lo, hi in [(0.1, 0.3), (0.0, 0.45), (0.6, 1.0)]:
                assert interval_mass(DoseData(x, n), lo, hi) == pytest.approx(
                    interval_mass(DoseData(n - x, n), 1 - hi, 1 - lo), abs=1e-12
                )


class TestMoments:
    def test_prior_mean(self):
        assert posterior_mean(DoseData(0, 0)) == 0.5

    def test_mean_zero_of_three(self):
        assert posterior_mean(DoseData(0, 3)) == pytest.approx(0.2)

    def test_variance_one_of_three(self):
        # Beta(2, 3): ab / ((a+b)^2 (a+b+1)) = 6 / 150
        assert posterior_variance(DoseData(1, 3)) == pytest.approx(0.04, abs=1e-15)

    def test_moments_match_numeric_integration(self):
        from scipy.integrate import quad

        for x, n in [(0, 0), (1, 3), (3, 6), (2, 9), (7, 21)]:
            a, b = x + 1, n - x + 1
            mean, _ = quad(lambda u: u * beta_pdf(u, a, b), 0, 1, epsabs=1e-12)
            var, _ = quad(lambda u: (u - mean) ** 2 * beta_pdf(u, a, b), 0, 1, epsabs=1e-12)
            assert posterior_mean(DoseData(x, n)) == pytest.approx(mean, abs=1e-10)
            assert posterior_variance(DoseData(x, n)) == pytest.approx(var, abs=1e-10)


class TestProbOverTarget:
    def test_three_of_three(self):
        # 1 - 0.3^4
        assert prob_over_target(DoseData(3, 3), 0.3) == pytest.approx(0.9919, abs=1e-12)

    def test_four_of_six(self):
        exact = 1 - ibeta_exact(Fraction(3, 10), 5, 3)
        assert float(exact) == pytest.approx(0.9712045, abs=1e-12)
        assert prob_over_target(DoseData(4, 6), 0.3) == pytest.approx(float(exact), abs=1e-13)

    def test_three_of_six(self):
        # Beta(4, 4): 1 - Pr(Bin(7, 0.3) >= 4) = 0.873964; below xi = 0.95,
        # so (3, 6) is D rather than U in the p_T = 0.3 table
        exact = 1 - ibeta_exact(Fraction(3, 10), 4, 4)
        assert float(exact) == pytest.approx(0.873964, abs=1e-12)
        assert prob_over_target(DoseData(3, 6), 0.3) == pytest.approx(float(exact), abs=1e-13)

    def test_rejects_bad_target(self):
        with pytest.raises(ValueError):
            prob_over_target(DoseData(1, 3), 0.0)
        with pytest.raises(ValueError):
            prob_over_target(DoseData(1, 3), 1.0)
