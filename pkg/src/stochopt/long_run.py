"""Infinite-horizon solutions: algebraic coefficients, safe rates,
optimality conditions, factor laws under the tilted measure, and
small-volatility expansions.

As the horizon grows, the time coefficients of the value function
converge to the smaller root of the shared quadratic; the long-run
equivalent safe rate, the constant (variance model) or affine
(predictability model) policy, and the tilted-measure factor dynamics
all follow algebraically from that root. Optimality of the candidates
additionally requires explicit inequality conditions; those are
returned as flags (plus a warning), never hard errors, because the
candidate numbers remain well defined and informative where the
optimality argument fails.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .errors import DivergentIntegral, NonpositiveDiscriminant, TheoremConditionFailed
from .model_core import (
    HestonParams,
    KimOmbergParams,
    Preferences,
    RiccatiCoeffs,
    riccati_coeffs_heston,
    riccati_coeffs_ko,
    validate,
)

__all__ = [
    "HestonLongRun",
    "KoLongRun",
    "StationaryLaw",
    "Expansion",
    "ModelExpansion",
    "heston_longrun",
    "ko_longrun",
    "ergodic_limit",
    "expand_heston",
    "expand_ko",
    "condition_boundary",
]


def _smaller_root(coeffs: RiccatiCoeffs, gamma: float) -> tuple[float, float]:
    """Smaller real root of c x^2 + b x + a = 0 and sqrt of the discriminant.

    Uses the cancellation-safe quadratic formula (c can be tiny when
    rho^2 (gamma-1)/gamma is close to 1). The smaller root is the one
    the finite-horizon coefficient converges to from 0.
    """
    if not coeffs.d > 0.0:
        raise NonpositiveDiscriminant(
            f"discriminant {coeffs.d} <= 0 at gamma = {gamma}: no real "
            "long-run coefficient exists for these parameters"
        )
    sqrt_d = math.sqrt(coeffs.d)
    qq = -0.5 * (coeffs.b + math.copysign(sqrt_d, coeffs.b))
    return min(qq / coeffs.c, coeffs.a / qq), sqrt_d


@dataclass(frozen=True)
class StationaryLaw:
    """Stationary factor law under the tilted measure.

    Either a Gamma law (``kind='gamma'``, fields shape/scale) for the
    square-root factor or a Gaussian (``kind='gaussian'``, fields
    mean/variance) for the mean-reverting factor. Scale, shape and
    variance are strictly positive by construction; the Gaussian mean
    carries the sign of the tilted drift constant.
    """

    kind: str
    shape: float | None = None
    scale: float | None = None
    mean: float | None = None
    variance: float | None = None

    @classmethod
    def gamma_law(cls, shape: float, scale: float) -> "StationaryLaw":
        if not (shape > 0.0 and scale > 0.0):
            raise ValueError(f"shape and scale must be positive, got {shape}, {scale}")
        return cls(kind="gamma", shape=shape, scale=scale)

    @classmethod
    def gaussian_law(cls, mean: float, variance: float) -> "StationaryLaw":
        if not variance > 0.0:
            raise ValueError(f"variance must be positive, got {variance}")
        return cls(kind="gaussian", mean=mean, variance=variance)


@dataclass(frozen=True)
class HestonLongRun:
    """Long-run solution of the stochastic-variance model."""

    b_inf: float
    a_inf: float
    esr: float
    pi_inf: float
    lambda_phat: float
    cond_discriminant: bool
    cond_theorem: bool
    cond_bound: bool
    stationary_law: StationaryLaw | None
    coeffs: RiccatiCoeffs
    gamma: float
    params: HestonParams


@dataclass(frozen=True)
class KoLongRun:
    """Long-run solution of the return-predictability model."""

    c_inf: float
    b_inf: float
    a_inf: float
    esr: float
    k_phat: float
    l_phat: float
    cond_discriminant: bool
    cond_theorem: bool
    cond_bound: bool
    stationary_law: StationaryLaw | None
    coeffs: RiccatiCoeffs
    gamma: float
    params: KimOmbergParams

    def pi_inf(self, y):
        """Long-run candidate weight at factor level y (affine in y)."""
        p0, p1 = self.pi_inf_coeffs
        return p0 + p1 * y

    @property
    def pi_inf_coeffs(self) -> tuple[float, float]:
        """Intercept and slope of the affine long-run policy."""
        p = self.params
        hedge = p.rho * p.sigma_y / (self.gamma * p.sigma)
        return hedge * self.b_inf, 1.0 / (self.gamma * p.sigma**2) + hedge * self.c_inf


def _flag_theorem(value: float, gamma: float, what: str) -> bool:
    ok = gamma < 1.0 or value > 0.0
    if not ok:
        warnings.warn(
            f"long-run optimality condition fails for the {what} model "
            f"(condition value {value:.6g} <= 0 at gamma = {gamma}); the "
            "returned candidate need not be optimal",
            TheoremConditionFailed,
            stacklevel=3,
        )
    return ok


def heston_longrun(p: HestonParams, prefs: Preferences) -> HestonLongRun:
    """Long-run coefficients, policy, and tilted dynamics (variance model).

    The tilted-measure mean-reversion speed ``lambda_phat`` is computed
    from its defining display (drift adjustment of the factor under the
    measure change), not from the algebraic shortcut it provably equals;
    tests cross-check the identity.
    """
    validate(p, prefs)
    coeffs = riccati_coeffs_heston(p, prefs)
    b_inf, sqrt_d = _smaller_root(coeffs, prefs.gamma)
    q = prefs.q
    a_inf = (1.0 - prefs.gamma) * p.r + p.lambda_y * p.y_bar * b_inf
    pi_inf = (p.mu_s + p.rho * p.sigma_y * b_inf) / prefs.gamma
    lambda_phat = (
        p.lambda_y
        - p.sigma_y**2 * b_inf
        + q * p.sigma_y * p.rho * (p.mu_s + p.rho * p.sigma_y * b_inf)
    )
    cond_value = (1.0 - 2.0 * q * p.rho**2) * sqrt_d + coeffs.b
    cond_theorem = _flag_theorem(cond_value, prefs.gamma, "variance")
    bound_rhs = (p.lambda_y + q * p.mu_s * p.rho * p.sigma_y) / (
        p.sigma_y**2 * (1.0 - q * p.rho**2)
    )
    cond_bound = b_inf < bound_rhs
    law = None
    if lambda_phat > 0.0:
        law = StationaryLaw.gamma_law(
            shape=2.0 * p.lambda_y * p.y_bar / p.sigma_y**2,
            scale=p.sigma_y**2 / (2.0 * lambda_phat),
        )
    return HestonLongRun(
        b_inf=b_inf,
        a_inf=a_inf,
        esr=a_inf / (1.0 - prefs.gamma),
        pi_inf=pi_inf,
        lambda_phat=lambda_phat,
        cond_discriminant=coeffs.d > 0.0,
        cond_theorem=cond_theorem,
        cond_bound=cond_bound,
        stationary_law=law,
        coeffs=coeffs,
        gamma=prefs.gamma,
        params=p,
    )


def ko_longrun(p: KimOmbergParams, prefs: Preferences) -> KoLongRun:
    """Long-run coefficients, affine policy, and tilted dynamics
    (predictability model).

    ``k_phat`` (tilted mean-reversion speed) and ``l_phat`` (tilted
    drift constant) are computed from their defining displays; tests
    cross-check k_phat = sqrt(d) and the stationary mean l_phat/k_phat.
    """
    validate(p, prefs)
    coeffs = riccati_coeffs_ko(p, prefs)
    c_inf, sqrt_d = _smaller_root(coeffs, prefs.gamma)
    q = prefs.q
    b_inf = p.lambda_y * p.y_bar * c_inf / (2.0 * coeffs.c * c_inf + coeffs.b)
    a_inf = (
        (1.0 - prefs.gamma) * p.r
        - coeffs.c * b_inf**2
        + p.lambda_y * p.y_bar * b_inf
        + 0.5 * p.sigma_y**2 * c_inf
    )
    # Tilted factor: dY = (l_phat - k_phat Y) dt + sigma_y dW under the
    # changed measure.
    tilt = 1.0 - q * p.rho**2
    k_phat = p.lambda_y + q * p.sigma_y * p.rho / p.sigma - c_inf * p.sigma_y**2 * tilt
    l_phat = p.lambda_y * p.y_bar + b_inf * p.sigma_y**2 * tilt
    cond_value = (1.0 - 2.0 * q * p.rho**2) * sqrt_d + coeffs.b
    cond_theorem = _flag_theorem(cond_value, prefs.gamma, "predictability")
    bound_rhs = (p.lambda_y + q * p.sigma_y * p.rho / p.sigma) / (
        p.sigma_y**2 * (1.0 - q * p.rho**2)
    )
    cond_bound = c_inf < bound_rhs
    law = None
    if k_phat > 0.0:
        law = StationaryLaw.gaussian_law(
            mean=l_phat / k_phat, variance=p.sigma_y**2 / (2.0 * k_phat)
        )
    return KoLongRun(
        c_inf=c_inf,
        b_inf=b_inf,
        a_inf=a_inf,
        esr=a_inf / (1.0 - prefs.gamma),
        k_phat=k_phat,
        l_phat=l_phat,
        cond_discriminant=coeffs.d > 0.0,
        cond_theorem=cond_theorem,
        cond_bound=cond_bound,
        stationary_law=law,
        coeffs=coeffs,
        gamma=prefs.gamma,
        params=p,
    )


def ergodic_limit(law: StationaryLaw, linear: float, quadratic: float = 0.0) -> float:
    """Stationary expectation E[exp(linear*Y + quadratic*Y^2)] in closed form.

    For the Gamma law only linear exponents are supported (the quadratic
    moment has no closed form and never arises here); convergence
    requires ``linear < 1/scale``. For the Gaussian law convergence
    requires ``1/(2 variance) - quadratic > 0``.

    Raises
    ------
    DivergentIntegral
        When the convergence condition fails.
    """
    if law.kind == "gamma":
        if quadratic != 0.0:
            raise ValueError("quadratic exponents are not supported for the Gamma law")
        tail = 1.0 - linear * law.scale
        if not tail > 0.0:
            raise DivergentIntegral(
                f"E[exp({linear} Y)] diverges: need linear < 1/scale = {1.0 / law.scale}"
            )
        return tail ** (-law.shape)
    if law.kind == "gaussian":
        m, v = law.mean, law.variance
        quad = 0.5 / v - quadratic
        if not quad > 0.0:
            raise DivergentIntegral(
                f"E[exp({linear} Y + {quadratic} Y^2)] diverges: need "
                f"quadratic < 1/(2 variance) = {0.5 / v}"
            )
        lin = m / v + linear
        return math.exp(lin**2 / (4.0 * quad) - m**2 / (2.0 * v)) / math.sqrt(
            2.0 * v * quad
        )
    raise ValueError(f"unknown stationary law kind {law.kind!r}")


# ---------------------------------------------------------------------------
# Small factor-volatility expansions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Expansion:
    """First-order behaviour of a long-run quantity in the factor volatility.

    ``value(s) ~ zeroth + first_coeff * s`` for small ``s = sigma_y``;
    ``relative_first`` is the same correction expressed relative to the
    risky part of the zeroth order (the whole weight for portfolios, the
    excess over r for safe rates).
    """

    zeroth: float
    first_coeff: float
    relative_first: float

    def value(self, sigma_y: float) -> float:
        return self.zeroth + self.first_coeff * sigma_y


@dataclass(frozen=True)
class ModelExpansion:
    """Safe-rate and portfolio expansions of one model."""

    esr: Expansion
    portfolio: Expansion


def expand_heston(p: HestonParams, prefs: Preferences) -> ModelExpansion:
    """Small-sigma_y expansions (variance model).

    Safe rate: r + (mu_s^2 y_bar / 2 gamma)(1 + (1-gamma)(mu_s/gamma)
    (rho sigma_y / lambda_y) + ...); the portfolio correction is exactly
    half the safe-rate correction in relative terms.
    """
    validate(p, prefs)
    g = prefs.gamma
    excess = p.mu_s**2 * p.y_bar / (2.0 * g)
    rel_esr = (1.0 - g) * p.mu_s * p.rho / (g * p.lambda_y)
    pi0 = p.mu_s / g
    rel_pi = 0.5 * rel_esr
    return ModelExpansion(
        esr=Expansion(p.r + excess, excess * rel_esr, rel_esr),
        portfolio=Expansion(pi0, pi0 * rel_pi, rel_pi),
    )


def expand_ko(p: KimOmbergParams, prefs: Preferences) -> ModelExpansion:
    """Small-sigma_y expansions (predictability model).

    Safe rate: r + (y_bar^2 / 2 gamma sigma^2)(1 + (1-gamma)
    2 rho sigma_y/(gamma lambda_y sigma) + ...); the portfolio here is
    the mean weight over the stationary factor law, with relative
    correction again exactly half the safe-rate one.
    """
    validate(p, prefs)
    g = prefs.gamma
    excess = p.y_bar**2 / (2.0 * g * p.sigma**2)
    rel_esr = 2.0 * (1.0 - g) * p.rho / (g * p.lambda_y * p.sigma)
    pi0 = p.y_bar / (g * p.sigma**2)
    rel_pi = 0.5 * rel_esr
    return ModelExpansion(
        esr=Expansion(p.r + excess, excess * rel_esr, rel_esr),
        portfolio=Expansion(pi0, pi0 * rel_pi, rel_pi),
    )


# ---------------------------------------------------------------------------
# Condition boundary location
# ---------------------------------------------------------------------------


def condition_boundary(
    p, gamma_lo: float, gamma_hi: float, tol: float = 1e-3
) -> float:
    """Bisect for the risk aversion where the optimality condition flips.

    Operates on the continuous condition value (1 - 2 q rho^2) sqrt(d) + b,
    which is positive where the condition holds. The bracket must lie in
    gamma > 1 and straddle a sign change.
    """
    if isinstance(p, HestonParams):
        coeff_fn = riccati_coeffs_heston
    elif isinstance(p, KimOmbergParams):
        coeff_fn = riccati_coeffs_ko
    else:
        raise TypeError(f"unsupported parameter record {type(p).__name__}")
    if not 1.0 < gamma_lo < gamma_hi:
        raise ValueError("need 1 < gamma_lo < gamma_hi")

    def value(g: float) -> float:
        prefs = Preferences(gamma=g)
        coeffs = coeff_fn(p, prefs)
        if coeffs.d <= 0.0:
            return -math.inf
        return (1.0 - 2.0 * prefs.q * p.rho**2) * math.sqrt(coeffs.d) + coeffs.b

    lo, hi = gamma_lo, gamma_hi
    f_lo, f_hi = value(lo), value(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if (f_lo > 0.0) == (f_hi > 0.0):
        raise ValueError(
            f"condition value has the same sign at both ends of "
            f"[{gamma_lo}, {gamma_hi}]: {f_lo:.6g}, {f_hi:.6g}"
        )
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if (value(mid) > 0.0) == (f_lo > 0.0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
