"""Exception taxonomy shared across the package.

Two families matter for the command-line surface: validation failures
(bad inputs or an unsupported parameter regime, exit code 2) and
numerical failures (the machinery breaking down at runtime, exit
code 4).
"""

__all__ = [
    "StochOptError",
    "ValidationError",
    "NonpositiveParameter",
    "CorrelationOutOfRange",
    "FellerViolation",
    "GammaIsOne",
    "NonpositiveDiscriminant",
    "NumericalError",
    "NonFiniteState",
    "GridTooCoarse",
    "StepTooCoarse",
    "NonFiniteSample",
    "DivergentIntegral",
    "TheoremConditionFailed",
]


class StochOptError(Exception):
    """Base class for every package-specific error."""


class ValidationError(StochOptError, ValueError):
    """Invalid parameters or a parameter regime the closed forms exclude."""


class NonpositiveParameter(ValidationError):
    """A parameter that must be strictly positive (or nonnegative) is not."""


class CorrelationOutOfRange(ValidationError):
    """Correlation outside [-1, 0]; positive values are rejected, not clamped."""


class FellerViolation(ValidationError):
    """2 * lambda_y * y_bar > sigma_y**2 fails, so the variance process
    could reach zero."""


class GammaIsOne(ValidationError):
    """Relative risk aversion of exactly 1 (log utility) is excluded."""


class NonpositiveDiscriminant(ValidationError):
    """The coefficient quadratic has no two distinct real roots; the value
    function explodes in finite time in this regime and no solution is
    returned."""


class NumericalError(StochOptError, RuntimeError):
    """A numerical procedure failed or declared its own output untrustworthy."""


class NonFiniteState(NumericalError):
    """ODE integration produced inf/nan (blow-up in the explosive regime)."""


class GridTooCoarse(NumericalError):
    """The dense-output grid's interpolation error estimate exceeds tolerance."""


class StepTooCoarse(NumericalError):
    """Halving the simulation time step moves a pilot estimate by more than
    its statistical resolution: discretization bias dominates."""


class NonFiniteSample(NumericalError):
    """A Monte Carlo functional evaluated to inf/nan on at least one path."""


class DivergentIntegral(NumericalError):
    """The requested stationary-law expectation does not exist (the exponent
    grows faster than the density decays)."""


class TheoremConditionFailed(UserWarning):
    """The long-run optimality condition fails for these parameters.

    This is a warning category, not an exception: results are still
    returned, flagged, because the candidate quantities remain computable
    even where their optimality is not guaranteed.
    """
