"""Long-run portfolio choice under stochastic investment opportunities.

Closed-form and semi-numeric solutions of the finite-horizon and
long-run optimal investment problems for three models of the opportunity
set (constant, square-root stochastic variance, mean-reverting expected
return), plus a seeded parallel Monte Carlo engine and a statistical
harness verifying the convex-duality bounds the candidate policies are
built on.
"""

from .closed_form import (
    BsSolution,
    HestonFiniteSolution,
    KoFiniteSolution,
    esr_finite,
    heston_portfolio,
    ko_portfolio,
    solve_bs,
    solve_heston,
    solve_ko,
)
from .duality_verify import (
    BoundReport,
    GrowthRateRow,
    budget_report,
    exclusivity_check,
    growth_rate_scan,
    holder_bound,
    reports_to_csv,
    reports_to_text,
    verify_bs,
    verify_finite_bounds,
    verify_finite_bounds_heston,
    verify_finite_bounds_ko,
)
from .errors import (
    CorrelationOutOfRange,
    DivergentIntegral,
    FellerViolation,
    GammaIsOne,
    GridTooCoarse,
    NonFiniteSample,
    NonFiniteState,
    NonpositiveDiscriminant,
    NonpositiveParameter,
    NumericalError,
    StepTooCoarse,
    StochOptError,
    TheoremConditionFailed,
    ValidationError,
)
from .long_run import (
    Expansion,
    HestonLongRun,
    KoLongRun,
    ModelExpansion,
    StationaryLaw,
    condition_boundary,
    ergodic_limit,
    expand_heston,
    expand_ko,
    heston_longrun,
    ko_longrun,
)
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
from .ode_oracle import (
    GridSolution,
    HjbCoefficients,
    OdeSystem,
    hjb_residual,
    rk4,
)
from .sde_sim import (
    FactorLaw,
    McEstimate,
    NovikovReport,
    PathBundle,
    PolicySpec,
    RngSpec,
    SimulationResult,
    kernel_backend,
    mc_expect,
    novikov_partition,
    sample_cir_exact,
    sample_ou_exact,
    sample_stationary,
    simulate,
    step_diagnostic,
    thread_count,
    tilt_exponent,
    tilted_factor_law,
    write_path_csv,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
