"""Long-run coefficients, stationary laws, ergodic limits, expansions.

Two independent oracles appear here: adaptive quadrature of the
stationary density (scipy) for the closed-form ergodic limits, and the
exact factor samplers for a Monte Carlo cross-check of the same limits
under the tilted measure.
"""

from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import integrate, stats

from stochopt import (
    DivergentIntegral,
    HestonParams,
    KimOmbergParams,
    Preferences,
    RngSpec,
    StationaryLaw,
    TheoremConditionFailed,
    condition_boundary,
    ergodic_limit,
    expand_heston,
    expand_ko,
    heston_longrun,
    ko_longrun,
    sample_cir_exact,
    sample_ou_exact,
    sample_stationary,
    solve_heston,
    solve_ko,
    tilted_factor_law,
)


def _replace_sigma_y(p, sigma_y):
    if isinstance(p, HestonParams):
        return HestonParams(
            r=p.r,
            mu_s=p.mu_s,
            lambda_y=p.lambda_y,
            y_bar=p.y_bar,
            sigma_y=sigma_y,
            rho=p.rho,
        )
    return KimOmbergParams(
        r=p.r,
        sigma=p.sigma,
        lambda_y=p.lambda_y,
        y_bar=p.y_bar,
        sigma_y=sigma_y,
        rho=p.rho,
    )


class TestHestonLongRun:
    def test_root_residual(self, pan, crra5):
        lr = heston_longrun(pan, crra5)
        co = lr.coeffs
        assert abs(co.c * lr.b_inf**2 + co.b * lr.b_inf + co.a) < 1e-12

    def test_smaller_root_selected(self, pan, crra5):
        lr = heston_longrun(pan, crra5)
        assert lr.b_inf <= -lr.coeffs.b / (2.0 * lr.coeffs.c)

    def test_frozen_pan_values(self, pan, crra5):
        lr = heston_longrun(pan, crra5)
        assert lr.b_inf == pytest.approx(-1.6736554566471564, rel=1e-12)
        assert lr.esr == pytest.approx(0.08622224352137958, rel=1e-12)
        assert lr.pi_inf == pytest.approx(0.9525027543819549, rel=1e-12)
        assert lr.lambda_phat == pytest.approx(4.716427461543324, rel=1e-12)
        assert lr.a_inf == pytest.approx((1.0 - 5.0) * lr.esr, rel=1e-14)

    def test_tilted_speed_equals_sqrt_discriminant(self, pan, crra5):
        # lambda_phat is computed from the drift-adjustment display; it
        # provably collapses to sqrt(d).
        lr = heston_longrun(pan, crra5)
        assert lr.lambda_phat == pytest.approx(math.sqrt(lr.coeffs.d), rel=1e-13)
        assert lr.lambda_phat > 0.0
        assert lr.cond_bound

    def test_conditions_hold_for_pan(self, pan, crra5):
        lr = heston_longrun(pan, crra5)
        assert lr.cond_discriminant and lr.cond_theorem and lr.cond_bound

    def test_zero_correlation_policy_is_myopic(self, pan, crra5):
        p = _replace_sigma_y(pan, pan.sigma_y)
        p = HestonParams(
            r=p.r,
            mu_s=p.mu_s,
            lambda_y=p.lambda_y,
            y_bar=p.y_bar,
            sigma_y=p.sigma_y,
            rho=0.0,
        )
        assert heston_longrun(p, crra5).pi_inf == p.mu_s / crra5.gamma

    def test_matches_long_horizon_finite_solution(self, pan, crra5):
        lr = heston_longrun(pan, crra5)
        sol = solve_heston(pan, crra5, T=200.0)
        assert abs(sol.B(0.0) - lr.b_inf) < 1e-6

    def test_stationary_law_moments(self, pan, crra5):
        lr = heston_longrun(pan, crra5)
        law = lr.stationary_law
        assert law.kind == "gamma"
        assert law.shape == pytest.approx(
            2.0 * pan.lambda_y * pan.y_bar / pan.sigma_y**2, rel=1e-14
        )
        assert law.scale == pytest.approx(
            pan.sigma_y**2 / (2.0 * lr.lambda_phat), rel=1e-14
        )
        assert law.shape == pytest.approx(1.7617728531855956, rel=1e-12)
        assert law.scale == pytest.approx(0.015308196847868936, rel=1e-12)

    def test_welfare_ordering(self, pan):
        # Above log utility the hedged long-run rate beats the
        # small-volatility limit; below it the ordering flips.
        for gamma, better in ((5.0, True), (0.5, False)):
            lr = heston_longrun(pan, Preferences(gamma=gamma))
            zeroth = pan.r + pan.mu_s**2 * pan.y_bar / (2.0 * gamma)
            assert (lr.esr > zeroth) is better


class TestKoLongRun:
    def test_root_residual(self, barberis, crra5):
        lr = ko_longrun(barberis, crra5)
        co = lr.coeffs
        # c_inf is around -2e4, so the residual scale is |c| c_inf^2.
        resid = co.c * lr.c_inf**2 + co.b * lr.c_inf + co.a
        assert abs(resid) < 1e-12 * max(1.0, abs(co.c) * lr.c_inf**2)

    def test_algebraic_relations(self, barberis, crra5):
        lr = ko_longrun(barberis, crra5)
        co = lr.coeffs
        lam_ybar = barberis.lambda_y * barberis.y_bar
        assert lr.b_inf == pytest.approx(
            lam_ybar * lr.c_inf / (2.0 * co.c * lr.c_inf + co.b), rel=1e-13
        )
        expected_a = (
            (1.0 - 5.0) * barberis.r
            - co.c * lr.b_inf**2
            + lam_ybar * lr.b_inf
            + 0.5 * barberis.sigma_y**2 * lr.c_inf
        )
        assert lr.a_inf == pytest.approx(expected_a, rel=1e-13)

    def test_frozen_barberis_values(self, barberis, crra5):
        lr = ko_longrun(barberis, crra5)
        assert lr.c_inf == pytest.approx(-19561.23588619123, rel=1e-12)
        assert lr.b_inf == pytest.approx(-118.92675607739903, rel=1e-12)
        assert lr.a_inf == pytest.approx(-0.01963733829775867, rel=1e-12)
        assert lr.esr == pytest.approx(0.004909334574439667, rel=1e-12)
        assert lr.k_phat == pytest.approx(0.012638748546346517, rel=1e-12)
        assert lr.l_phat == pytest.approx(5.395887269632787e-05, rel=1e-12)

    def test_tilted_speed_equals_sqrt_discriminant(self, barberis, crra5):
        lr = ko_longrun(barberis, crra5)
        assert lr.k_phat == pytest.approx(math.sqrt(lr.coeffs.d), rel=1e-13)
        assert lr.k_phat > 0.0
        assert lr.cond_bound

    def test_stationary_law_moments(self, barberis, crra5):
        lr = ko_longrun(barberis, crra5)
        law = lr.stationary_law
        assert law.kind == "gaussian"
        assert law.mean == pytest.approx(lr.l_phat / lr.k_phat, rel=1e-14)
        assert law.variance == pytest.approx(
            barberis.sigma_y**2 / (2.0 * lr.k_phat), rel=1e-14
        )
        assert law.mean == pytest.approx(0.004269320850751933, rel=1e-12)
        assert law.variance == pytest.approx(2.531896246108183e-05, rel=1e-12)

    def test_affine_policy_consistent_with_coefficients(self, barberis, crra5):
        lr = ko_longrun(barberis, crra5)
        intercept, slope = lr.pi_inf_coeffs
        for y in (-0.01, 0.0, 0.0034, 0.02):
            direct = y / (5.0 * barberis.sigma**2) + (
                barberis.rho * barberis.sigma_y / (5.0 * barberis.sigma)
            ) * (lr.b_inf + lr.c_inf * y)
            assert lr.pi_inf(y) == pytest.approx(direct, rel=1e-13)
            assert lr.pi_inf(y) == pytest.approx(intercept + slope * y, rel=1e-13)

    def test_zero_correlation_policy_is_myopic(self, barberis, crra5):
        p = KimOmbergParams(
            r=barberis.r,
            sigma=barberis.sigma,
            lambda_y=barberis.lambda_y,
            y_bar=barberis.y_bar,
            sigma_y=barberis.sigma_y,
            rho=0.0,
        )
        lr = ko_longrun(p, crra5)
        for y in (0.0, 0.0034, 0.02):
            assert lr.pi_inf(y) == y / (crra5.gamma * p.sigma**2)

    def test_matches_long_horizon_finite_solution(self, barberis, crra5):
        lr = ko_longrun(barberis, crra5)
        sol = solve_ko(barberis, crra5, T=2400.0)
        assert abs(sol.C(0.0) - lr.c_inf) < 1e-6 * abs(lr.c_inf)

    def test_condition_fails_high_risk_aversion_with_warning(self, barberis):
        with pytest.warns(TheoremConditionFailed):
            lr = ko_longrun(barberis, Preferences(gamma=20.0))
        assert not lr.cond_theorem
        # The candidate is still returned and satisfies its algebra.
        co = lr.coeffs
        resid = co.c * lr.c_inf**2 + co.b * lr.c_inf + co.a
        assert abs(resid) < 1e-12 * max(1.0, abs(co.c) * lr.c_inf**2)


class TestConditionBoundary:
    def test_printed_calibration_boundary(self, barberis):
        # Truthful location for sigma_y = 0.0008: the optimality
        # condition flips a little above gamma = 18. A nearby
        # calibration (sigma_y = 0.000824) flips near 13.4 instead;
        # both are pinned so any drift in the condition formula shows
        # up immediately. See also the acceptance suite, where the
        # stated 13.3-13.5 window for this calibration fails honestly.
        g_star = condition_boundary(barberis, 14.0, 25.0)
        assert g_star == pytest.approx(18.06, abs=0.01)
        assert ko_longrun(barberis, Preferences(gamma=18.0)).cond_theorem
        with pytest.warns(TheoremConditionFailed):
            assert not ko_longrun(barberis, Preferences(gamma=18.1)).cond_theorem

    def test_nearby_calibration_flips_at_thirteen_four(self, barberis):
        p = KimOmbergParams(
            r=barberis.r,
            sigma=barberis.sigma,
            lambda_y=barberis.lambda_y,
            y_bar=barberis.y_bar,
            sigma_y=0.000824,
            rho=barberis.rho,
        )
        assert condition_boundary(p, 13.3, 13.5) == pytest.approx(13.413, abs=0.01)

    def test_bracket_validation(self, barberis):
        with pytest.raises(ValueError, match="same sign"):
            condition_boundary(barberis, 2.0, 3.0)
        with pytest.raises(ValueError, match="need 1 < gamma_lo < gamma_hi"):
            condition_boundary(barberis, 0.5, 3.0)
        with pytest.raises(TypeError):
            condition_boundary(object(), 2.0, 3.0)


class TestErgodicLimit:
    def test_zero_exponent_is_one(self, pan, crra5):
        law = heston_longrun(pan, crra5).stationary_law
        assert ergodic_limit(law, 0.0) == 1.0

    def test_gamma_law_matches_quadrature(self, pan, crra5):
        lr = heston_longrun(pan, crra5)
        law = lr.stationary_law
        lin = -lr.b_inf / crra5.gamma
        closed = ergodic_limit(law, lin)
        dist = stats.gamma(a=law.shape, scale=law.scale)
        # Integrate exp(lin y + logpdf) as one exponential: the two
        # factors individually overflow/underflow long before their
        # product does.
        val, _ = integrate.quad(
            lambda y: math.exp(lin * y + dist.logpdf(y)),
            0.0,
            np.inf,
            epsabs=1e-13,
            epsrel=1e-13,
        )
        assert abs(closed - val) < 1e-10 * abs(closed)

    def test_gaussian_law_matches_quadrature(self, barberis, crra5):
        lr = ko_longrun(barberis, crra5)
        law = lr.stationary_law
        lin = -lr.b_inf / crra5.gamma
        quad_coef = -lr.c_inf / (2.0 * crra5.gamma)
        closed = ergodic_limit(law, lin, quad_coef)
        dist = stats.norm(loc=law.mean, scale=math.sqrt(law.variance))
        val, _ = integrate.quad(
            lambda y: math.exp(lin * y + quad_coef * y * y + dist.logpdf(y)),
            -np.inf,
            np.inf,
            epsabs=1e-14,
            epsrel=1e-13,
        )
        assert abs(closed - val) < 1e-10 * abs(closed)

    def test_gamma_law_matches_exact_transition_mc(self, pan, crra5):
        # Stationary start plus one exact transition leaves the law
        # invariant; the sample mean of the ergodic integrand must
        # agree with the closed form inside three standard errors.
        lr = heston_longrun(pan, crra5)
        law = lr.stationary_law
        tilted = tilted_factor_law(lr)
        rng = RngSpec(master_seed=20240817).generator(0)
        y0 = sample_stationary(law, rng, 100_000)
        y_T = sample_cir_exact(y0, 50.0, tilted, rng)
        vals = np.exp(-lr.b_inf / crra5.gamma * y_T)
        mean = float(np.mean(vals))
        se = float(np.std(vals, ddof=1) / math.sqrt(len(vals)))
        closed = ergodic_limit(law, -lr.b_inf / crra5.gamma)
        assert abs(mean - closed) < 3.0 * se

    def test_gaussian_law_matches_exact_transition_mc(self, barberis, crra5):
        lr = ko_longrun(barberis, crra5)
        law = lr.stationary_law
        tilted = tilted_factor_law(lr)
        rng = RngSpec(master_seed=20240818).generator(0)
        y0 = sample_stationary(law, rng, 100_000)
        y_T = sample_ou_exact(y0, 50.0, tilted, rng)
        vals = np.exp(
            -lr.b_inf / crra5.gamma * y_T - lr.c_inf / (2.0 * crra5.gamma) * y_T**2
        )
        mean = float(np.mean(vals))
        se = float(np.std(vals, ddof=1) / math.sqrt(len(vals)))
        closed = ergodic_limit(
            law, -lr.b_inf / crra5.gamma, -lr.c_inf / (2.0 * crra5.gamma)
        )
        assert abs(mean - closed) < 3.0 * se

    def test_divergent_gamma_exponent(self):
        law = StationaryLaw.gamma_law(shape=2.0, scale=1.0)
        with pytest.raises(DivergentIntegral):
            ergodic_limit(law, 1.5)

    def test_divergent_gaussian_quadratic(self):
        law = StationaryLaw.gaussian_law(mean=0.0, variance=1.0)
        with pytest.raises(DivergentIntegral):
            ergodic_limit(law, 0.0, 0.6)

    def test_gamma_law_rejects_quadratic_exponent(self, pan, crra5):
        law = heston_longrun(pan, crra5).stationary_law
        with pytest.raises(ValueError, match="quadratic exponents"):
            ergodic_limit(law, 0.1, 0.1)


class TestExpansions:
    def test_heston_zeroth_order_is_constant_volatility_limit(self, pan, crra5):
        ex = expand_heston(pan, crra5)
        assert ex.esr.zeroth == pytest.approx(
            pan.r + pan.mu_s**2 * pan.y_bar / (2.0 * 5.0), rel=1e-14
        )
        assert ex.portfolio.zeroth == pytest.approx(pan.mu_s / 5.0, rel=1e-14)
        assert ex.esr.value(0.0) == ex.esr.zeroth

    def test_ko_zeroth_order_is_constant_volatility_limit(self, barberis, crra5):
        ex = expand_ko(barberis, crra5)
        assert ex.esr.zeroth == pytest.approx(
            barberis.r + barberis.y_bar**2 / (2.0 * 5.0 * barberis.sigma**2),
            rel=1e-14,
        )
        assert ex.portfolio.zeroth == pytest.approx(
            barberis.y_bar / (5.0 * barberis.sigma**2), rel=1e-14
        )

    def test_relative_corrections_in_two_to_one_ratio(self, pan, barberis, crra5):
        for ex in (expand_heston(pan, crra5), expand_ko(barberis, crra5)):
            ratio = ex.esr.relative_first / ex.portfolio.relative_first
            assert abs(ratio - 2.0) < 1e-10

    def test_heston_remainder_is_second_order(self, pan, crra5):
        ex = expand_heston(pan, crra5)
        s0 = 0.05 * pan.sigma_y
        gaps = [
            abs(heston_longrun(_replace_sigma_y(pan, s), crra5).esr - ex.esr.value(s))
            for s in (s0, s0 / 2.0, s0 / 4.0)
        ]
        assert 3.4 < gaps[0] / gaps[1] < 4.6
        assert 3.4 < gaps[1] / gaps[2] < 4.6

    def test_ko_remainder_is_second_order(self, barberis, crra5):
        ex = expand_ko(barberis, crra5)
        s0 = 0.05 * barberis.sigma_y
        gaps = [
            abs(ko_longrun(_replace_sigma_y(barberis, s), crra5).esr - ex.esr.value(s))
            for s in (s0, s0 / 2.0, s0 / 4.0)
        ]
        assert 3.4 < gaps[0] / gaps[1] < 4.6
        assert 3.4 < gaps[1] / gaps[2] < 4.6

    def test_expansion_value_is_affine(self, pan, crra5):
        ex = expand_heston(pan, crra5)
        assert ex.esr.value(0.1) == pytest.approx(
            ex.esr.zeroth + ex.esr.first_coeff * 0.1, rel=1e-14
        )
