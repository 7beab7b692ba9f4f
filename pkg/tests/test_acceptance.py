"""Acceptance suite: thirteen numbered criteria, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -s`` to see the per-criterion
lines as they print; without ``-s`` pytest shows them for failing
criteria only.  Every criterion is asserted exactly as stated, at its
stated tolerance and Monte Carlo scale; statistical checks use pinned
seeds.  Criterion 5 asserts a published boundary location that the
implemented condition does not reproduce; it is expected to fail and is
left failing deliberately (see notes/decisions.md in the workspace for
the blocking analysis).

The suite is self-contained: model parameters are module constants, not
conftest fixtures, so this file can be pointed at directly.
"""

from __future__ import annotations

import dataclasses
import math
import os
import sys
import time
import warnings

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.stats import gamma as gamma_dist
from scipy.stats import norm

sys.path.insert(0, os.path.dirname(__file__))
from oracle_systems import heston_system, ko_system  # noqa: E402

from stochopt import (
    BlackScholesParams,
    HestonParams,
    KimOmbergParams,
    PolicySpec,
    Preferences,
    RngSpec,
    TheoremConditionFailed,
    budget_report,
    condition_boundary,
    ergodic_limit,
    esr_finite,
    expand_heston,
    expand_ko,
    heston_longrun,
    heston_portfolio,
    ko_longrun,
    ko_portfolio,
    riccati_coeffs_heston,
    riccati_coeffs_ko,
    reports_to_csv,
    sample_cir_exact,
    sample_ou_exact,
    sample_stationary,
    simulate,
    solve_heston,
    solve_ko,
    tilt_exponent,
    tilted_factor_law,
    verify_bs,
    verify_finite_bounds,
)
from stochopt.ode_oracle import HjbCoefficients, hjb_residual, rk4
from stochopt.sde_sim import estimate_from_samples

PAN = HestonParams(
    r=0.033, mu_s=4.4, lambda_y=5.3, y_bar=0.024, sigma_y=0.38, rho=-0.57
)
BARBERIS = KimOmbergParams(
    r=0.0014, sigma=0.0436, lambda_y=0.0226, y_bar=0.0034,
    sigma_y=0.0008, rho=-0.935,
)
BS = BlackScholesParams(r=0.01, mu=0.08, sigma=0.2)
P5 = Preferences(5.0)
GAMMAS = (0.5, 2.0, 5.0, 10.0)


def _record(num: int, ok: bool, detail: str) -> bool:
    print(f"[criterion {num:02d}] {'PASS' if ok else 'FAIL'} {detail}")
    return ok


def test_criterion_01_oracle_equivalence():
    t0 = time.perf_counter()
    worst = 0.0
    for g in GAMMAS:
        prefs = Preferences(g)
        sol = solve_heston(PAN, prefs, 10.0)
        grid = rk4(heston_system(PAN, prefs, 10.0), 4096)
        for i, t in enumerate(grid.times):
            worst = max(worst, abs(sol.B(t) - grid.states[i][0]))
            worst = max(worst, abs(sol.A(t) - grid.states[i][1]))
    for g in GAMMAS:
        prefs = Preferences(g)
        sol = solve_ko(BARBERIS, prefs, 240.0)
        grid = rk4(ko_system(BARBERIS, prefs, 240.0), 8192)
        for i, t in enumerate(grid.times):
            worst = max(worst, abs(sol.C(t) - grid.states[i][0]))
            worst = max(worst, abs(sol.B(t) - grid.states[i][1]))
            worst = max(worst, abs(sol.A(t) - grid.states[i][2]))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-8 and elapsed < 5.0
    assert _record(
        1, ok, f"sup error {worst:.3g} (bound 1e-8), {elapsed:.2f}s (bound 5s)"
    )


def test_criterion_02_hjb_residual():
    t0 = time.perf_counter()
    sol_h = solve_heston(PAN, P5, 10.0)
    coeffs_h = HjbCoefficients.from_heston(PAN, P5)
    samples_h = [
        (t, y)
        for t in np.linspace(0.5, 9.5, 50)
        for y in np.linspace(0.5 * PAN.y_bar, 2.0 * PAN.y_bar, 50)
    ]
    res_h = hjb_residual(
        lambda t, y: math.exp(sol_h.A(t) + sol_h.B(t) * y), coeffs_h, samples_h
    )
    sol_k = solve_ko(BARBERIS, P5, 240.0)
    coeffs_k = HjbCoefficients.from_ko(BARBERIS, P5)
    sd = BARBERIS.sigma_y / math.sqrt(2.0 * BARBERIS.lambda_y)
    samples_k = [
        (t, y)
        for t in np.linspace(12.0, 228.0, 50)
        for y in np.linspace(BARBERIS.y_bar - 2 * sd, BARBERIS.y_bar + 2 * sd, 50)
    ]
    res_k = hjb_residual(
        lambda t, y: math.exp(
            sol_k.A(t) + sol_k.B(t) * y + 0.5 * sol_k.C(t) * y * y
        ),
        coeffs_k,
        samples_k,
    )
    elapsed = time.perf_counter() - t0
    ok = res_h < 1e-6 and res_k < 1e-6 and elapsed < 5.0
    assert _record(
        2, ok,
        f"residuals {res_h:.3g} / {res_k:.3g} (bound 1e-6), {elapsed:.2f}s",
    )


def test_criterion_03_variance_model_hedging_is_small():
    sol = solve_heston(PAN, P5, 10.0)
    myopic = PAN.mu_s / P5.gamma
    ratio = abs(heston_portfolio(sol, 0.0) - myopic) / myopic
    assert _record(3, ratio < 0.15, f"hedging/myopic = {ratio:.4f} (bound 0.15)")


def test_criterion_04_predictability_model_hedging_is_large():
    sol = solve_ko(BARBERIS, P5, 240.0)
    myopic = BARBERIS.y_bar / (P5.gamma * BARBERIS.sigma**2)
    hedge = ko_portfolio(sol, 0.0, BARBERIS.y_bar) - myopic
    ratio = hedge / myopic
    assert _record(4, ratio > 0.5, f"hedging/myopic = {ratio:.4f} (bound 0.5)")


@pytest.mark.filterwarnings("ignore::stochopt.TheoremConditionFailed")
def test_criterion_05_condition_boundary_location():
    gamma_star = condition_boundary(BARBERIS, 2.0, 40.0)
    ok = 13.3 <= gamma_star <= 13.5
    assert _record(
        5, ok, f"boundary gamma* = {gamma_star:.4f} (required in [13.3, 13.5])"
    )


def test_criterion_06_variance_model_condition_universality():
    flags = []
    for g in (1.5, 2.0, 5.0, 10.0, 50.0, 100.0):
        lr = heston_longrun(PAN, Preferences(g))
        flags.append(lr.cond_discriminant and lr.cond_theorem and lr.cond_bound)
    assert _record(6, all(flags), f"condition flags at six gammas: {flags}")


def test_criterion_07_constant_model_duality():
    t0 = time.perf_counter()
    prefs = Preferences(2.0)
    rep = verify_bs(BS, prefs, 1.0)
    closed_ok = abs(rep.gap) <= 1e-12 * abs(rep.lhs)
    pi = BS.mu / (prefs.gamma * BS.sigma**2)
    sim = simulate(
        BS, prefs, PolicySpec.constant(pi), 1.0, 256, 100_000, RngSpec(707)
    )
    u = sim.wealth ** (1.0 - prefs.gamma) / (1.0 - prefs.gamma)
    se = u.std(ddof=1) / math.sqrt(u.shape[0])
    z = (u.mean() - rep.lhs) / se
    elapsed = time.perf_counter() - t0
    ok = closed_ok and abs(z) <= 3.0 and elapsed < 10.0
    assert _record(
        7, ok,
        f"closed gap {rep.gap:.2e} (tol 1e-12 rel), MC z = {z:.2f}, "
        f"{elapsed:.1f}s",
    )


def _relabel(report, prefix):
    return dataclasses.replace(report, label=f"{prefix} {report.label}")


def _criterion8_battery():
    """The criterion-8 report set; also rerun by criterion 13."""
    reports = []
    r1h, r2h = verify_finite_bounds(
        PAN, P5, 1.0, n_paths=100_000, n_steps=256, rng=RngSpec(813)
    )
    reports += [_relabel(r1h, "heston"), _relabel(r2h, "heston")]
    r1k, r2k = verify_finite_bounds(
        BARBERIS, P5, 12.0, n_paths=100_000, n_steps=3072, rng=RngSpec(814)
    )
    reports += [_relabel(r1k, "ko"), _relabel(r2k, "ko")]
    perturbed = PolicySpec.from_longrun(ko_longrun(BARBERIS, P5)).perturbed(1.1)
    rp, _ = verify_finite_bounds(
        BARBERIS, P5, 12.0, n_paths=100_000, n_steps=3072,
        rng=RngSpec(815), policy=perturbed,
    )
    reports.append(_relabel(rp, "ko perturbed-x1.1"))
    reports.append(
        budget_report(
            BARBERIS, P5, perturbed, 12.0, n_paths=100_000, n_steps=3072,
            rng=RngSpec(825), label="ko perturbed-x1.1 budget",
        )
    )
    return reports


@pytest.fixture(scope="module")
def crit8_runs():
    """Battery results keyed by worker-thread count, with timings."""
    saved = os.environ.get("STOCHOPT_THREADS")
    results = {}
    try:
        for threads in (1, 4, 8):
            os.environ["STOCHOPT_THREADS"] = str(threads)
            t0 = time.perf_counter()
            reports = _criterion8_battery()
            results[threads] = (
                reports, reports_to_csv(reports), time.perf_counter() - t0
            )
    finally:
        if saved is None:
            os.environ.pop("STOCHOPT_THREADS", None)
        else:
            os.environ["STOCHOPT_THREADS"] = saved
    return results


def test_criterion_08_finite_horizon_identities(crit8_runs):
    reports, _, elapsed = crit8_runs[1]
    id_h1, id_h2, id_k1, id_k2, pert, budget = reports
    zs = [r.gap / r.combined_se for r in (id_h1, id_h2, id_k1, id_k2)]
    identities_ok = all(abs(z) <= 3.0 for z in zs)
    z_pert = pert.gap / pert.combined_se
    pert_ok = abs(z_pert) > 3.0
    budget_ok = budget.gap <= 3.0 * budget.combined_se
    ok = identities_ok and pert_ok and budget_ok and elapsed < 120.0
    assert _record(
        8, ok,
        "identity z = " + "/".join(f"{z:.2f}" for z in zs)
        + f" (bound 3), perturbed z = {z_pert:.2f} (required > 3), "
        f"budget z = {budget.gap / budget.combined_se:.2f}, {elapsed:.0f}s",
    )


def test_criterion_09_ergodic_limits():
    t0 = time.perf_counter()
    lr_h = heston_longrun(PAN, P5)
    law_h = lr_h.stationary_law
    lin_h = -lr_h.b_inf / P5.gamma
    closed_h = ergodic_limit(law_h, lin_h)
    quad_h, _ = quad(
        lambda y: math.exp(
            lin_h * y + gamma_dist.logpdf(y, a=law_h.shape, scale=law_h.scale)
        ),
        0.0, np.inf,
    )
    lr_k = ko_longrun(BARBERIS, P5)
    law_k = lr_k.stationary_law
    lin_k = -lr_k.b_inf / P5.gamma
    quad_coef_k = -lr_k.c_inf / (2.0 * P5.gamma)
    closed_k = ergodic_limit(law_k, lin_k, quad_coef_k)
    quad_k, _ = quad(
        lambda y: math.exp(
            lin_k * y + quad_coef_k * y * y
            + norm.logpdf(y, law_k.mean, math.sqrt(law_k.variance))
        ),
        -np.inf, np.inf,
    )
    quad_ok = (
        abs(closed_h - quad_h) <= 1e-10 * abs(closed_h)
        and abs(closed_k - quad_k) <= 1e-10 * abs(closed_k)
    )

    # Long-horizon tilted-measure MC: stationary start plus one exact
    # transition over T=50 keeps the terminal law stationary without
    # discretization bias, so the sample mean estimates the ergodic
    # limit directly.
    gen = RngSpec(909).generator(0)
    y0_h = sample_stationary(law_h, gen, 100_000)
    y_h = sample_cir_exact(y0_h, 50.0, tilted_factor_law(lr_h), gen)
    vals_h = np.exp(lin_h * y_h)
    z_h = (vals_h.mean() - closed_h) / (
        vals_h.std(ddof=1) / math.sqrt(vals_h.shape[0])
    )
    y0_k = sample_stationary(law_k, gen, 100_000)
    y_k = sample_ou_exact(y0_k, 50.0, tilted_factor_law(lr_k), gen)
    vals_k = np.exp(lin_k * y_k + quad_coef_k * y_k**2)
    z_k = (vals_k.mean() - closed_k) / (
        vals_k.std(ddof=1) / math.sqrt(vals_k.shape[0])
    )
    elapsed = time.perf_counter() - t0
    ok = quad_ok and abs(z_h) <= 3.0 and abs(z_k) <= 3.0 and elapsed < 60.0
    assert _record(
        9, ok,
        f"quadrature rel err {abs(closed_h - quad_h) / closed_h:.2g} / "
        f"{abs(closed_k - quad_k) / closed_k:.2g} (tol 1e-10), "
        f"MC z = {z_h:.2f} / {z_k:.2f}, {elapsed:.1f}s",
    )


def _sigma_y_replaced(p, sigma_y):
    return dataclasses.replace(p, sigma_y=sigma_y)


def test_criterion_10_small_noise_remainder():
    factors = []
    for params, expander, solver in (
        (PAN, expand_heston, heston_longrun),
        (BARBERIS, expand_ko, ko_longrun),
    ):
        ex = expander(params, P5)
        s0 = 0.05 * params.sigma_y
        gaps = [
            abs(solver(_sigma_y_replaced(params, s), P5).esr - ex.esr.value(s))
            for s in (s0, s0 / 2.0, s0 / 4.0)
        ]
        factors += [gaps[0] / gaps[1], gaps[1] / gaps[2]]
    ratio_h = expand_heston(PAN, P5)
    ratio_k = expand_ko(BARBERIS, P5)
    r1 = ratio_h.esr.relative_first / ratio_h.portfolio.relative_first
    r2 = ratio_k.esr.relative_first / ratio_k.portfolio.relative_first
    factors_ok = all(3.4 < f < 4.6 for f in factors)
    ratio_ok = abs(r1 - 2.0) < 1e-10 and abs(r2 - 2.0) < 1e-10
    assert _record(
        10, factors_ok and ratio_ok,
        "shrink factors " + "/".join(f"{f:.2f}" for f in factors)
        + f" (bound [3.4, 4.6]), correction ratios {r1:.12f} / {r2:.12f}",
    )


def test_criterion_11_growth_rate_convergence_at_two_years():
    t0 = time.perf_counter()
    lr = heston_longrun(PAN, P5)
    sol = solve_heston(PAN, P5, 2.0)
    rel_fin = (esr_finite(sol, PAN.y_bar, 2.0) - lr.esr) / lr.esr
    gen = RngSpec(911).generator(0)
    y_t = sample_cir_exact(
        np.full(100_000, PAN.y_bar), 2.0, tilted_factor_law(lr), gen
    )
    dq = tilt_exponent(lr, y_t) - float(tilt_exponent(lr, PAN.y_bar))
    tilt = estimate_from_samples(np.exp(dq), 1024, 911)
    esr_lr = (lr.a_inf * 2.0 + math.log(tilt.mean)) / ((1.0 - P5.gamma) * 2.0)
    rel_lr = (esr_lr - lr.esr) / lr.esr
    elapsed = time.perf_counter() - t0
    ok = abs(rel_fin) < 0.02 and abs(rel_lr) < 0.02 and elapsed < 60.0
    assert _record(
        11, ok,
        f"relative gaps: finite {rel_fin:+.4f}, long-run policy {rel_lr:+.4f} "
        f"(bound 0.02), {elapsed:.1f}s",
    )


@pytest.mark.filterwarnings("ignore::stochopt.TheoremConditionFailed")
def test_criterion_12_sign_suite():
    t0 = time.perf_counter()
    rng = np.random.default_rng(20260825)
    check_ts = (1.25, 2.5, 3.75)
    failures = 0
    reversed_cases = 0

    for _ in range(50):
        lam = rng.uniform(0.5, 8.0)
        ybar = rng.uniform(0.005, 0.2)
        p = HestonParams(
            r=rng.uniform(0.0, 0.05),
            mu_s=rng.uniform(0.5, 8.0),
            lambda_y=lam,
            y_bar=ybar,
            sigma_y=rng.uniform(0.1, 0.9) * math.sqrt(2.0 * lam * ybar),
            rho=rng.uniform(-0.95, 0.0),
        )
        hi = Preferences(rng.uniform(1.2, 30.0))
        sol = solve_heston(p, hi, 5.0)
        lr = heston_longrun(p, hi)
        if not (all(sol.B(t) < 0 for t in check_ts) and lr.b_inf < 0):
            failures += 1
        lo = Preferences(rng.uniform(0.15, 0.9))
        if riccati_coeffs_heston(p, lo).d > 0:
            reversed_cases += 1
            sol_lo = solve_heston(p, lo, 5.0)
            lr_lo = heston_longrun(p, lo)
            if not (all(sol_lo.B(t) > 0 for t in check_ts) and lr_lo.b_inf > 0):
                failures += 1

    for _ in range(50):
        p = KimOmbergParams(
            r=rng.uniform(0.0, 0.01),
            sigma=rng.uniform(0.02, 0.4),
            lambda_y=rng.uniform(0.01, 1.0),
            y_bar=rng.uniform(0.001, 0.05),
            sigma_y=rng.uniform(1e-4, 2e-3),
            rho=rng.uniform(-0.99, 0.0),
        )
        hi = Preferences(rng.uniform(1.2, 30.0))
        sol = solve_ko(p, hi, 5.0)
        lr = ko_longrun(p, hi)
        if not (
            all(sol.B(t) < 0 for t in check_ts)
            and all(sol.C(t) < 0 for t in check_ts)
            and lr.b_inf < 0
            and lr.c_inf < 0
        ):
            failures += 1
        lo = Preferences(rng.uniform(0.15, 0.9))
        if riccati_coeffs_ko(p, lo).d > 0:
            reversed_cases += 1
            sol_lo = solve_ko(p, lo, 5.0)
            lr_lo = ko_longrun(p, lo)
            if not (
                all(sol_lo.B(t) > 0 for t in check_ts)
                and all(sol_lo.C(t) > 0 for t in check_ts)
                and lr_lo.b_inf > 0
                and lr_lo.c_inf > 0
            ):
                failures += 1

    # Zero correlation removes the hedging term exactly, not just
    # approximately.
    pan0 = dataclasses.replace(PAN, rho=0.0)
    sol0 = solve_heston(pan0, P5, 5.0)
    rho_kill = all(
        heston_portfolio(sol0, t) == PAN.mu_s / P5.gamma for t in check_ts
    )
    bar0 = dataclasses.replace(BARBERIS, rho=0.0)
    solk0 = solve_ko(bar0, P5, 5.0)
    y_probe = 2.0 * BARBERIS.y_bar
    rho_kill &= all(
        ko_portfolio(solk0, t, y_probe)
        == y_probe / (P5.gamma * BARBERIS.sigma**2)
        for t in check_ts
    )

    def _hedge_sizes(gamma):
        prefs = Preferences(gamma)
        h = solve_heston(PAN, prefs, 5.0)
        k = solve_ko(BARBERIS, prefs, 60.0)
        return (
            abs(heston_portfolio(h, 1.0) - PAN.mu_s / gamma),
            abs(
                ko_portfolio(k, 10.0, BARBERIS.y_bar)
                - BARBERIS.y_bar / (gamma * BARBERIS.sigma**2)
            ),
        )

    ref_h, ref_k = _hedge_sizes(5.0)
    log_limit = all(
        near_h < 1e-3 * ref_h and near_k < 1e-3 * ref_k
        for near_h, near_k in (_hedge_sizes(1.0 + 1e-4), _hedge_sizes(1.0 - 1e-4))
    )
    elapsed = time.perf_counter() - t0
    ok = failures == 0 and rho_kill and log_limit and elapsed < 10.0
    assert _record(
        12, ok,
        f"100 parameter sets, {reversed_cases} reversed-sign cases, "
        f"{failures} sign failures, rho=0 kill {rho_kill}, "
        f"log-limit kill {log_limit}, {elapsed:.1f}s",
    )


def test_criterion_13_thread_count_determinism(crit8_runs):
    csv_1 = crit8_runs[1][1].encode()
    csv_4 = crit8_runs[4][1].encode()
    csv_8 = crit8_runs[8][1].encode()
    ok = csv_1 == csv_4 == csv_8
    assert _record(
        13, ok,
        f"criterion-8 CSV bytes identical across threads 1/4/8: {ok} "
        f"({len(csv_1)} bytes)",
    )
