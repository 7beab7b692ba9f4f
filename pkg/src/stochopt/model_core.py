"""Parameter records, validation, and the shared quadratic coefficients.

Three market models are supported:

* constant investment opportunities (Black-Scholes),
* square-root stochastic variance, where the excess return is
  proportional to the variance level (``HestonParams``),
* mean-reverting expected excess returns with constant volatility
  (``KimOmbergParams``).

Both factor models lead to the same scalar quadratic (Riccati)
structure for the value-function coefficients; this module computes
those coefficients in one place so every downstream solver shares a
single, tested implementation.

All rates are per caller-chosen time unit; the core is unit-agnostic.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    CorrelationOutOfRange,
    FellerViolation,
    GammaIsOne,
    NonpositiveParameter,
)

__all__ = [
    "Preferences",
    "BlackScholesParams",
    "HestonParams",
    "KimOmbergParams",
    "RiccatiCoeffs",
    "validate",
    "riccati_coeffs_heston",
    "riccati_coeffs_ko",
]


@dataclass(frozen=True)
class Preferences:
    """Constant relative risk aversion.

    Parameters
    ----------
    gamma : float
        Relative risk aversion. Must be positive and different from 1;
        logarithmic utility is excluded by construction.
    """

    gamma: float

    def __post_init__(self) -> None:
        if not self.gamma > 0.0:
            raise NonpositiveParameter(
                f"gamma must be strictly positive, got {self.gamma}"
            )
        if self.gamma == 1.0:
            raise GammaIsOne("gamma = 1 (log utility) is not supported")

    @property
    def q(self) -> float:
        """The recurring risk-adjustment ratio (gamma - 1) / gamma."""
        return (self.gamma - 1.0) / self.gamma


@dataclass(frozen=True)
class BlackScholesParams:
    """Constant opportunity set.

    Parameters
    ----------
    r : float
        Riskless rate (per unit time).
    mu : float
        Excess return of the risky asset over the riskless rate.
    sigma : float
        Volatility (per square-root unit time).
    """

    r: float
    mu: float
    sigma: float


@dataclass(frozen=True)
class HestonParams:
    """Square-root stochastic variance.

    The factor Y is the instantaneous variance,

        dY = lambda_y (y_bar - Y) dt + sigma_y sqrt(Y) dW^Y,

    and the risky asset earns the excess return mu_s * Y, i.e. ``mu_s``
    is the risk premium per unit of variance. ``rho`` is the constant
    correlation between the return and factor Brownian motions,
    restricted to [-1, 0].
    """

    r: float
    mu_s: float
    lambda_y: float
    y_bar: float
    sigma_y: float
    rho: float


@dataclass(frozen=True)
class KimOmbergParams:
    """Mean-reverting expected returns.

    The factor Y is the expected excess return itself,

        dY = lambda_y (y_bar - Y) dt + sigma_y dW^Y,

    while the return volatility ``sigma`` stays constant. ``rho`` as in
    :class:`HestonParams`.
    """

    r: float
    sigma: float
    lambda_y: float
    y_bar: float
    sigma_y: float
    rho: float


@dataclass(frozen=True)
class RiccatiCoeffs:
    """Coefficients of the scalar quadratic driving the value function.

    The time coefficient of both factor models satisfies a Riccati
    equation whose right-hand side is ``c x**2 + b x + a``; ``d`` is the
    discriminant ``b**2 - 4 a c``. ``c`` is strictly negative for every
    valid parameter set, and ``d > 0`` holds automatically for risk
    aversion above 1.
    """

    a: float
    b: float
    c: float
    d: float


def _positive(name: str, value: float) -> None:
    if not value > 0.0:
        raise NonpositiveParameter(f"{name} must be strictly positive, got {value}")


def _nonnegative(name: str, value: float) -> None:
    if not value >= 0.0:
        raise NonpositiveParameter(f"{name} must be nonnegative, got {value}")


def _correlation(rho: float) -> None:
    if not (-1.0 <= rho <= 0.0):
        raise CorrelationOutOfRange(f"rho must lie in [-1, 0], got {rho}")


def validate(params, prefs: Preferences):
    """Check a parameter record against its model invariants.

    Parameters
    ----------
    params : BlackScholesParams or HestonParams or KimOmbergParams
        Raw parameter record.
    prefs : Preferences
        Risk-aversion record (validated on construction; accepted here so
        every caller states the full problem in one call).

    Returns
    -------
    The same record, unchanged, if every invariant holds.

    Raises
    ------
    NonpositiveParameter, CorrelationOutOfRange, FellerViolation
        With a message naming the violated invariant.
    TypeError
        For an unknown parameter type.
    """
    if not isinstance(prefs, Preferences):
        raise TypeError(f"prefs must be Preferences, got {type(prefs).__name__}")
    if isinstance(params, BlackScholesParams):
        _nonnegative("r", params.r)
        _positive("sigma", params.sigma)
    elif isinstance(params, HestonParams):
        _nonnegative("r", params.r)
        _positive("mu_s", params.mu_s)
        _positive("lambda_y", params.lambda_y)
        _positive("y_bar", params.y_bar)
        _positive("sigma_y", params.sigma_y)
        _correlation(params.rho)
        if not 2.0 * params.lambda_y * params.y_bar > params.sigma_y**2:
            raise FellerViolation(
                "2*lambda_y*y_bar > sigma_y**2 must hold strictly: "
                f"{2.0 * params.lambda_y * params.y_bar} <= {params.sigma_y**2}"
            )
    elif isinstance(params, KimOmbergParams):
        _nonnegative("r", params.r)
        _positive("sigma", params.sigma)
        _positive("lambda_y", params.lambda_y)
        _positive("y_bar", params.y_bar)
        _positive("sigma_y", params.sigma_y)
        _correlation(params.rho)
    else:
        raise TypeError(f"unknown parameter record {type(params).__name__}")
    return params


def riccati_coeffs_heston(p: HestonParams, prefs: Preferences) -> RiccatiCoeffs:
    """Quadratic coefficients for the stochastic-variance model.

    Pure function of validated inputs: identical inputs give
    bit-identical outputs.
    """
    q = prefs.q
    a = 0.5 * q * p.mu_s**2
    b = q * p.mu_s * p.rho * p.sigma_y + p.lambda_y
    c = 0.5 * (q * p.rho**2 - 1.0) * p.sigma_y**2
    return RiccatiCoeffs(a=a, b=b, c=c, d=b * b - 4.0 * a * c)


def riccati_coeffs_ko(p: KimOmbergParams, prefs: Preferences) -> RiccatiCoeffs:
    """Quadratic coefficients for the mean-reverting-return model."""
    q = prefs.q
    a = q / (2.0 * p.sigma**2)
    b = q * p.rho * p.sigma_y / p.sigma + p.lambda_y
    c = 0.5 * (q * p.rho**2 - 1.0) * p.sigma_y**2
    return RiccatiCoeffs(a=a, b=b, c=c, d=b * b - 4.0 * a * c)
