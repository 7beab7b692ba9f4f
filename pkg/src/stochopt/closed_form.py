"""Finite-horizon value-function coefficients and candidate portfolios.

For the constant-opportunity model everything is elementary. For the
two factor models the value function is exponentially affine
(variance model) or exponentially quadratic (return-predictability
model) in the factor, with time coefficients solving scalar ODEs:

* variance model: B solves a Riccati equation with coefficients from
  :func:`stochopt.model_core.riccati_coeffs_heston`; both B and the
  integrated coefficient A are evaluated in closed form, written so
  every exponential has a nonpositive argument (no overflow for any
  horizon).
* predictability model: the quadratic coefficient C solves the same
  kind of Riccati equation with doubled coefficients and is evaluated
  through the identical closed-form kernel; the linear ODE for B and
  the quadrature for A have no printed closed form and are integrated
  numerically on a dense grid with cubic Hermite interpolation and a
  Richardson error estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GridTooCoarse, NonpositiveDiscriminant
from .model_core import (
    BlackScholesParams,
    HestonParams,
    KimOmbergParams,
    Preferences,
    RiccatiCoeffs,
    riccati_coeffs_heston,
    riccati_coeffs_ko,
    validate,
)

__all__ = [
    "BsSolution",
    "HestonFiniteSolution",
    "KoFiniteSolution",
    "solve_bs",
    "solve_heston",
    "heston_portfolio",
    "solve_ko",
    "ko_portfolio",
    "esr_finite",
]


def _require_positive_discriminant(coeffs: RiccatiCoeffs, gamma: float) -> float:
    if not coeffs.d > 0.0:
        raise NonpositiveDiscriminant(
            f"discriminant {coeffs.d} <= 0 at gamma = {gamma}: the value "
            "function explodes in finite time for these parameters"
        )
    return math.sqrt(coeffs.d)


def _riccati_zero_start(tau, a: float, b: float, sqrt_d: float):
    """Solution at time-to-go tau of x' = -(c x^2 + b x + a), x(0) = 0.

    Evaluated in the overflow-stable form: with e = exp(-sqrt_d * tau),

        x(tau) = -2 a (1 - e) / ((b + sqrt_d) + (sqrt_d - b) e).

    The denominator stays strictly positive for every valid coefficient
    set, and e <= 1 always, so horizons with sqrt_d * T in the hundreds
    are safe.
    """
    e = np.exp(-sqrt_d * np.asarray(tau, dtype=float))
    return -2.0 * a * (1.0 - e) / ((b + sqrt_d) + (sqrt_d - b) * e)


# ---------------------------------------------------------------------------
# Constant opportunity set
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BsSolution:
    """Constant-opportunity solution: weight and safe rate are horizon-free."""

    pi_hat: float
    esr: float
    gamma: float
    params: BlackScholesParams

    def value_exponent(self, t, T):
        """Exponent g with value(t, x) = x**(1-gamma) * exp(g) at horizon T."""
        return (1.0 - self.gamma) * self.esr * (np.asarray(T) - np.asarray(t))


def solve_bs(p: BlackScholesParams, prefs: Preferences, T: float) -> BsSolution:
    """Optimal weight mu/(gamma sigma^2) and safe rate r + mu^2/(2 gamma sigma^2).

    ``T`` is accepted for interface symmetry only: both outputs are
    independent of the horizon.
    """
    validate(p, prefs)
    del T
    pi_hat = p.mu / (prefs.gamma * p.sigma**2)
    esr = p.r + p.mu**2 / (2.0 * prefs.gamma * p.sigma**2)
    return BsSolution(pi_hat=pi_hat, esr=esr, gamma=prefs.gamma, params=p)


# ---------------------------------------------------------------------------
# Stochastic variance
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HestonFiniteSolution:
    """Closed-form coefficients of the exponentially affine value function.

    ``B`` and ``A`` are evaluable at scalar or array t in [0, T] (small
    excursions outside are tolerated; the formulas extrapolate smoothly).
    """

    T: float
    coeffs: RiccatiCoeffs
    gamma: float
    params: HestonParams
    sqrt_d: float

    def B(self, t):
        tau = self.T - np.asarray(t, dtype=float)
        return _riccati_zero_start(tau, self.coeffs.a, self.coeffs.b, self.sqrt_d)

    def A(self, t):
        a, b, c = self.coeffs.a, self.coeffs.b, self.coeffs.c
        sd = self.sqrt_d
        p = self.params
        tau = self.T - np.asarray(t, dtype=float)
        e = np.exp(-sd * tau)
        denom = (b + sd) + (sd - b) * e
        b_inf = -2.0 * a / (b + sd)
        running = p.lambda_y * p.y_bar * (b_inf * tau + np.log(denom / (2.0 * sd)) / c)
        return (1.0 - self.gamma) * p.r * tau + running


def solve_heston(
    p: HestonParams, prefs: Preferences, T: float
) -> HestonFiniteSolution:
    """Solve the variance model on [0, T].

    Raises
    ------
    NonpositiveDiscriminant
        When the coefficient quadratic has no two real roots (possible
        only for gamma < 1), i.e. the non-explosive solution does not
        exist on the whole interval.
    """
    validate(p, prefs)
    if not T > 0.0:
        raise ValueError(f"horizon T must be positive, got {T}")
    coeffs = riccati_coeffs_heston(p, prefs)
    sqrt_d = _require_positive_discriminant(coeffs, prefs.gamma)
    return HestonFiniteSolution(
        T=T, coeffs=coeffs, gamma=prefs.gamma, params=p, sqrt_d=sqrt_d
    )


def heston_portfolio(sol: HestonFiniteSolution, t):
    """Candidate risky weight mu_s/gamma + (rho sigma_y/gamma) B(t).

    Deterministic in time: the weight does not depend on the current
    variance level.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0) or np.any(t > sol.T):
        raise ValueError(f"t must lie in [0, {sol.T}]")
    p = sol.params
    return p.mu_s / sol.gamma + (p.rho * p.sigma_y / sol.gamma) * sol.B(t)


# ---------------------------------------------------------------------------
# Mean-reverting returns
# ---------------------------------------------------------------------------


def _hermite(grid_h: float, values: np.ndarray, derivs: np.ndarray, tau):
    """Cubic Hermite evaluation on a uniform grid starting at 0."""
    tau = np.asarray(tau, dtype=float)
    n_seg = len(values) - 1
    idx = np.clip(np.floor(tau / grid_h).astype(int), 0, n_seg - 1)
    s = tau / grid_h - idx
    s2, s3 = s * s, s * s * s
    h00 = 2.0 * s3 - 3.0 * s2 + 1.0
    h10 = s3 - 2.0 * s2 + s
    h01 = -2.0 * s3 + 3.0 * s2
    h11 = s3 - s2
    return (
        h00 * values[idx]
        + h10 * grid_h * derivs[idx]
        + h01 * values[idx + 1]
        + h11 * grid_h * derivs[idx + 1]
    )


@dataclass(frozen=True)
class KoFiniteSolution:
    """Quadratic-exponent coefficients for the predictability model.

    ``C`` is closed-form; ``B`` and ``A`` are dense-grid integrations
    exposed through cubic Hermite interpolation (matching the local
    order of the integrator). ``error_estimate`` is the Richardson
    bound of the grid solve.
    """

    T: float
    coeffs: RiccatiCoeffs
    gamma: float
    params: KimOmbergParams
    sqrt_d: float
    grid_step: float
    error_estimate: float
    _grid_B: np.ndarray
    _grid_A: np.ndarray
    _grid_dB: np.ndarray
    _grid_dA: np.ndarray

    def C(self, t):
        # Same closed-form kernel as the variance model's B, with all
        # quadratic coefficients doubled (hence decay rate 2 sqrt_d).
        tau = self.T - np.asarray(t, dtype=float)
        return _riccati_zero_start(
            tau, 2.0 * self.coeffs.a, 2.0 * self.coeffs.b, 2.0 * self.sqrt_d
        )

    def B(self, t):
        tau = self.T - np.asarray(t, dtype=float)
        return _hermite(self.grid_step, self._grid_B, self._grid_dB, tau)

    def A(self, t):
        tau = self.T - np.asarray(t, dtype=float)
        return _hermite(self.grid_step, self._grid_A, self._grid_dA, tau)


def _ko_grid_integrate(
    p: KimOmbergParams, gamma: float, coeffs: RiccatiCoeffs, sqrt_d: float,
    T: float, n: int,
):
    """March (B, A) in time-to-go tau with RK4; C enters in closed form.

        dB/dtau = -(2 c C(tau) + b) B + lam ybar C(tau)
        dA/dtau = (1 - gamma) r - c B^2 + lam ybar B + (sigma_y^2 / 2) C(tau)

    Returns node values and node derivatives for Hermite interpolation.
    """
    a, b, c = coeffs.a, coeffs.b, coeffs.c
    lyb = p.lambda_y * p.y_bar
    half_vol2 = 0.5 * p.sigma_y**2
    r1g = (1.0 - gamma) * p.r

    def c_of(tau: float) -> float:
        e = math.exp(-2.0 * sqrt_d * tau)
        return -4.0 * a * (1.0 - e) / ((2.0 * b + 2.0 * sqrt_d) + (2.0 * sqrt_d - 2.0 * b) * e)

    def rhs(tau: float, bb: float, aa: float) -> tuple[float, float]:
        cc = c_of(tau)
        return (
            -(2.0 * c * cc + b) * bb + lyb * cc,
            r1g - c * bb * bb + lyb * bb + half_vol2 * cc,
        )

    h = T / n
    grid_B = np.empty(n + 1)
    grid_A = np.empty(n + 1)
    grid_dB = np.empty(n + 1)
    grid_dA = np.empty(n + 1)
    bb = aa = 0.0
    grid_B[0] = grid_A[0] = 0.0
    grid_dB[0], grid_dA[0] = rhs(0.0, 0.0, 0.0)
    for k in range(n):
        tau = k * h
        db1, da1 = rhs(tau, bb, aa)
        db2, da2 = rhs(tau + 0.5 * h, bb + 0.5 * h * db1, aa + 0.5 * h * da1)
        db3, da3 = rhs(tau + 0.5 * h, bb + 0.5 * h * db2, aa + 0.5 * h * da2)
        db4, da4 = rhs(tau + h, bb + h * db3, aa + h * da3)
        bb += (h / 6.0) * (db1 + 2.0 * db2 + 2.0 * db3 + db4)
        aa += (h / 6.0) * (da1 + 2.0 * da2 + 2.0 * da3 + da4)
        grid_B[k + 1] = bb
        grid_A[k + 1] = aa
        grid_dB[k + 1], grid_dA[k + 1] = rhs(tau + h, bb, aa)
    return grid_B, grid_A, grid_dB, grid_dA


def solve_ko(
    p: KimOmbergParams,
    prefs: Preferences,
    T: float,
    grid_step: float | None = None,
    tol: float = 1e-8,
) -> KoFiniteSolution:
    """Solve the predictability model on [0, T].

    Parameters
    ----------
    grid_step : float, optional
        Node spacing of the dense grid for B and A; defaults to T/4096.
    tol : float
        Acceptable Richardson error estimate for the grid integration.

    Raises
    ------
    NonpositiveDiscriminant
        Explosive regime (possible only for gamma < 1).
    GridTooCoarse
        If the half-resolution rerun suggests the requested grid cannot
        deliver ``tol``.
    """
    validate(p, prefs)
    if not T > 0.0:
        raise ValueError(f"horizon T must be positive, got {T}")
    coeffs = riccati_coeffs_ko(p, prefs)
    sqrt_d = _require_positive_discriminant(coeffs, prefs.gamma)
    if grid_step is None:
        n = 4096
    else:
        if not grid_step > 0.0:
            raise ValueError(f"grid_step must be positive, got {grid_step}")
        n = max(4, int(round(T / grid_step)))
    n += n & 1  # even, so the half-resolution rerun shares nodes
    grid_B, grid_A, grid_dB, grid_dA = _ko_grid_integrate(
        p, prefs.gamma, coeffs, sqrt_d, T, n
    )
    coarse_B, coarse_A, _, _ = _ko_grid_integrate(
        p, prefs.gamma, coeffs, sqrt_d, T, n // 2
    )
    err = max(
        np.max(np.abs(grid_B[::2] - coarse_B)), np.max(np.abs(grid_A[::2] - coarse_A))
    ) / 15.0
    if err > tol:
        raise GridTooCoarse(
            f"estimated grid error {err:.3e} exceeds tolerance {tol:.3e}; "
            f"decrease grid_step (currently {T / n:.3e})"
        )
    return KoFiniteSolution(
        T=T,
        coeffs=coeffs,
        gamma=prefs.gamma,
        params=p,
        sqrt_d=sqrt_d,
        grid_step=T / n,
        error_estimate=err,
        _grid_B=grid_B,
        _grid_A=grid_A,
        _grid_dB=grid_dB,
        _grid_dA=grid_dA,
    )


def ko_portfolio(sol: KoFiniteSolution, t, y):
    """Candidate weight y/(gamma sigma^2) + (rho sigma_y/(gamma sigma)) (B(t) + C(t) y)."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0) or np.any(t > sol.T):
        raise ValueError(f"t must lie in [0, {sol.T}]")
    y = np.asarray(y, dtype=float)
    p = sol.params
    myopic = y / (sol.gamma * p.sigma**2)
    hedge = (p.rho * p.sigma_y / (sol.gamma * p.sigma)) * (sol.B(t) + sol.C(t) * y)
    return myopic + hedge


# ---------------------------------------------------------------------------
# Equivalent safe rate at finite horizons
# ---------------------------------------------------------------------------


def esr_finite(sol, y0: float, T: float | None = None) -> float:
    """Equivalent safe rate of the optimal policy over a horizon T.

    Defined as log U^{-1}(E[U(X_T)]) / T for unit initial wealth, which
    the coefficient functions express directly. ``T`` defaults to the
    solution's own horizon; smaller values reuse the same solve (the
    coefficients depend on time-to-go only).
    """
    if isinstance(sol, BsSolution):
        return sol.esr
    if not isinstance(sol, (HestonFiniteSolution, KoFiniteSolution)):
        raise TypeError(f"unknown solution type {type(sol).__name__}")
    if T is None:
        T = sol.T
    if not 0.0 < T <= sol.T:
        raise ValueError(f"T must lie in (0, {sol.T}], got {T}")
    t_eval = sol.T - T
    if isinstance(sol, HestonFiniteSolution):
        exponent = sol.A(t_eval) + sol.B(t_eval) * y0
    else:
        exponent = sol.A(t_eval) + sol.B(t_eval) * y0 + 0.5 * sol.C(t_eval) * y0**2
    return float(exponent) / ((1.0 - sol.gamma) * T)
