"""Monte Carlo simulation of factor, wealth, deflator, and density paths.

The joint dynamics are discretized with an Euler scheme (full truncation
for the square-root factor), driven by correlated Brownian increments
``W^Y = rho*W + sqrt(1-rho^2)*W_perp``.  Paths can be generated under the
physical measure or under the tilted measure associated with the
long-run candidate portfolio; in the latter case the factor mean-reverts
with the tilted speed/level while wealth and deflator keep their
physical-measure dynamics, written in terms of the reconstructed
physical Brownian increments.

Exact one-step transition samplers for both factor laws are provided
separately for marginal-law validation and for evaluating tilted-measure
expectations without discretization error.

Reproducibility: paths are partitioned into fixed-size chunks, each
chunk owns a counter-based RNG substream derived from (master seed,
stream id, chunk index), and reductions run in fixed chunk order, so
results are bit-identical for any worker-thread count and for either
kernel backend.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

import numpy as np

from . import _kernel_np
from ._io import csv_lines, write_text
from .closed_form import (
    BsSolution,
    HestonFiniteSolution,
    KoFiniteSolution,
    heston_portfolio,
    ko_portfolio,
)
from .errors import NonFiniteSample, StepTooCoarse, ValidationError
from .long_run import (
    HestonLongRun,
    KoLongRun,
    StationaryLaw,
    heston_longrun,
    ko_longrun,
)
from .model_core import (
    BlackScholesParams,
    HestonParams,
    KimOmbergParams,
    Preferences,
    validate,
)

try:
    from . import _kernel as _compiled_kernel
except ImportError:  # extension not built; NumPy fallback only
    _compiled_kernel = None

_MASK32 = 0xFFFFFFFF
_MASK64 = 0xFFFFFFFFFFFFFFFF

_KIND_SQRT = 1
_KIND_GAUSS = 2


def kernel_backend() -> str:
    """Return the active chunk-kernel backend: ``"compiled"`` or ``"numpy"``.

    The environment variable ``STOCHOPT_KERNEL`` forces a backend
    (values ``compiled`` or ``numpy``); by default the compiled kernel
    is used when the extension is importable.
    """
    forced = os.environ.get("STOCHOPT_KERNEL", "").strip().lower()
    if forced == "numpy":
        return "numpy"
    if forced == "compiled":
        if _compiled_kernel is None:
            raise RuntimeError(
                "STOCHOPT_KERNEL=compiled but the extension is not built"
            )
        return "compiled"
    if forced not in ("", "auto"):
        raise ValueError(f"unrecognized STOCHOPT_KERNEL value: {forced!r}")
    return "numpy" if _compiled_kernel is None else "compiled"


def thread_count() -> int:
    """Worker threads for path generation (capped by STOCHOPT_THREADS)."""
    env = os.environ.get("STOCHOPT_THREADS", "").strip()
    if env:
        n = int(env)
        if n < 1:
            raise ValueError("STOCHOPT_THREADS must be >= 1")
        return n
    return min(8, os.cpu_count() or 1)


@dataclass(frozen=True)
class RngSpec:
    """Reproducible random-number configuration.

    Substream derivation: chunk ``i`` of stream ``s`` uses a Philox
    counter-based generator keyed by ``(master_seed, s << 32 | i)``.
    Since the key, not the call order, determines the stream, identical
    (seed, stream, chunk) triples reproduce identical draws regardless
    of scheduling or thread count.
    """

    master_seed: int
    stream: int = 0
    chunk_size: int = 1024

    def __post_init__(self):
        if self.chunk_size < 1:
            raise ValidationError("chunk_size must be >= 1")
        if not 0 <= self.stream <= _MASK32:
            raise ValidationError("stream must fit in 32 bits")

    def generator(self, chunk_index: int = 0) -> np.random.Generator:
        """Generator for one chunk, independent across (stream, chunk)."""
        key = np.array(
            [
                self.master_seed & _MASK64,
                ((self.stream & _MASK32) << 32) | (chunk_index & _MASK32),
            ],
            dtype=np.uint64,
        )
        return np.random.Generator(np.random.Philox(key=key))

    def with_stream(self, stream: int) -> "RngSpec":
        return replace(self, stream=stream)


@dataclass(frozen=True)
class FactorLaw:
    """Mean-reversion triple of a factor process.

    Works for either factor family: speed ``lambda_y``, level ``y_bar``,
    and diffusion scale ``sigma_y``.  Use :func:`tilted_factor_law` to
    get the law of the factor under the tilted measure.
    """

    lambda_y: float
    y_bar: float
    sigma_y: float


def tilted_factor_law(longrun) -> FactorLaw:
    """Factor dynamics under the tilted (myopic) measure.

    For the square-root model the tilted process is again a square-root
    process with speed ``lambda_phat`` and unchanged product
    speed*level; for the Gaussian model it is an OU process with speed
    ``k_phat`` and level ``l_phat / k_phat``.
    """
    if isinstance(longrun, HestonLongRun):
        lam = longrun.lambda_phat
        if lam <= 0.0:
            raise ValidationError(
                "tilted factor law undefined: tilted mean-reversion speed <= 0"
            )
        p = longrun.params
        return FactorLaw(lam, p.lambda_y * p.y_bar / lam, p.sigma_y)
    if isinstance(longrun, KoLongRun):
        k = longrun.k_phat
        if k <= 0.0:
            raise ValidationError(
                "tilted factor law undefined: tilted mean-reversion speed <= 0"
            )
        return FactorLaw(k, longrun.l_phat / k, longrun.params.sigma_y)
    raise TypeError(f"unsupported long-run solution: {type(longrun).__name__}")


def sample_cir_exact(y0, dt, p, rng, size=None):
    """Draw from the exact square-root-process transition law.

    Uses the noncentral chi-squared representation: with
    ``c = 2*lambda/(sigma_y^2*(1 - e^{-lambda*dt}))``, the scaled value
    ``2*c*Y_dt`` is noncentral chi-squared with ``4*lambda*y_bar/sigma_y^2``
    degrees of freedom and noncentrality ``2*c*y0*e^{-lambda*dt}``.
    Sampling goes through the Poisson mixture of Gammas, valid for any
    positive (non-integer) degrees of freedom.

    Parameters
    ----------
    y0 : float or ndarray
        Starting value(s), must be positive.
    dt : float
        Time step, must be positive.
    p : HestonParams or FactorLaw
        Anything with ``lambda_y``, ``y_bar``, ``sigma_y`` attributes.
    rng : numpy.random.Generator
    size : int, optional
        Number of draws; defaults to the shape of ``y0``.
    """
    if dt <= 0.0:
        raise ValidationError("dt must be positive")
    y0 = np.asarray(y0, dtype=float)
    if np.any(y0 <= 0.0):
        raise ValidationError("y0 must be positive")
    if size is None:
        size = y0.shape
    if p.sigma_y == 0.0:
        decay = math.exp(-p.lambda_y * dt)
        return np.broadcast_to(p.y_bar + (y0 - p.y_bar) * decay, size).copy()
    decay = math.exp(-p.lambda_y * dt)
    c_bar = 2.0 * p.lambda_y / (p.sigma_y**2 * (1.0 - decay))
    df = 4.0 * p.lambda_y * p.y_bar / p.sigma_y**2
    ncp = 2.0 * c_bar * y0 * decay
    mixture = rng.poisson(np.broadcast_to(ncp / 2.0, size))
    return rng.standard_gamma(df / 2.0 + mixture) / c_bar


def sample_ou_exact(y0, dt, p, rng, size=None):
    """Draw from the exact Ornstein-Uhlenbeck transition law.

    Gaussian with mean ``y_bar + (y0 - y_bar)e^{-lambda*dt}`` and
    variance ``sigma_y^2 (1 - e^{-2*lambda*dt}) / (2*lambda)``.  Accepts
    the physical parameter record or a tilted :class:`FactorLaw`.
    """
    if dt <= 0.0:
        raise ValidationError("dt must be positive")
    y0 = np.asarray(y0, dtype=float)
    if size is None:
        size = y0.shape
    decay = math.exp(-p.lambda_y * dt)
    mean = p.y_bar + (y0 - p.y_bar) * decay
    if p.lambda_y == 0.0:
        var = p.sigma_y**2 * dt
    else:
        var = p.sigma_y**2 * (-math.expm1(-2.0 * p.lambda_y * dt)) / (2.0 * p.lambda_y)
    if var == 0.0:
        return np.broadcast_to(mean, size).copy()
    return rng.normal(np.broadcast_to(mean, size), math.sqrt(var))


def sample_stationary(law: StationaryLaw, rng, size):
    """Draw from a stationary factor law (Gamma or Gaussian)."""
    if law.kind == "gamma":
        return rng.gamma(law.shape, law.scale, size)
    if law.kind == "gaussian":
        return rng.normal(law.mean, math.sqrt(law.variance), size)
    raise ValueError(f"unknown stationary law kind: {law.kind}")


@dataclass(frozen=True)
class PolicySpec:
    """A risky-weight rule pi(t, y), possibly perturbed.

    ``kind`` is one of ``constant``, ``heston_finite``, ``heston_longrun``,
    ``ko_finite``, ``ko_longrun``, or ``custom``.  The realized weight is
    ``scale * pi_base(t, y) + shift``, which is how the verification
    harness builds perturbed policies around a candidate.
    """

    kind: str
    weight: float = 0.0
    solution: object = None
    fn: Optional[Callable] = None
    scale: float = 1.0
    shift: float = 0.0

    @classmethod
    def constant(cls, weight: float) -> "PolicySpec":
        return cls(kind="constant", weight=float(weight))

    @classmethod
    def custom(cls, fn: Callable) -> "PolicySpec":
        """Arbitrary feedback rule ``fn(t, y) -> weight`` (NumPy backend only)."""
        return cls(kind="custom", fn=fn)

    @classmethod
    def from_solution(cls, sol) -> "PolicySpec":
        """Candidate finite-horizon policy of a solved model."""
        if isinstance(sol, BsSolution):
            return cls(kind="constant", weight=sol.pi_hat)
        if isinstance(sol, HestonFiniteSolution):
            return cls(kind="heston_finite", solution=sol)
        if isinstance(sol, KoFiniteSolution):
            return cls(kind="ko_finite", solution=sol)
        raise TypeError(f"unsupported solution type: {type(sol).__name__}")

    @classmethod
    def from_longrun(cls, lr) -> "PolicySpec":
        """Stationary candidate policy of a long-run solution."""
        if isinstance(lr, HestonLongRun):
            return cls(kind="heston_longrun", solution=lr)
        if isinstance(lr, KoLongRun):
            return cls(kind="ko_longrun", solution=lr)
        raise TypeError(f"unsupported long-run type: {type(lr).__name__}")

    def perturbed(self, scale: float = 1.0, shift: float = 0.0) -> "PolicySpec":
        """Compose an affine perturbation on top of this policy."""
        return replace(
            self, scale=self.scale * scale, shift=self.shift * scale + shift
        )

    def coefficient_tables(self, T: float, n_steps: int):
        """Per-step affine weights (p0, p1) at left endpoints, or None.

        The realized weight at step k is ``p0[k] + p1[k] * y``.  Custom
        policies return None and are evaluated through the flexible
        NumPy kernel instead.
        """
        if self.kind == "custom":
            return None
        dt = T / n_steps
        times = np.arange(n_steps) * dt
        if self.kind == "constant":
            p0 = np.full(n_steps, self.weight)
            p1 = np.zeros(n_steps)
        elif self.kind == "heston_finite":
            sol = self.solution
            p0 = np.array([heston_portfolio(sol, t) for t in times])
            p1 = np.zeros(n_steps)
        elif self.kind == "ko_finite":
            sol = self.solution
            p = sol.params
            hedge = p.rho * p.sigma_y / (sol.gamma * p.sigma)
            myopic = 1.0 / (sol.gamma * p.sigma**2)
            p0 = np.array([hedge * sol.B(t) for t in times])
            p1 = np.array([myopic + hedge * sol.C(t) for t in times])
        elif self.kind == "heston_longrun":
            p0 = np.full(n_steps, self.solution.pi_inf)
            p1 = np.zeros(n_steps)
        elif self.kind == "ko_longrun":
            c0, c1 = self.solution.pi_inf_coeffs
            p0 = np.full(n_steps, c0)
            p1 = np.full(n_steps, c1)
        else:
            raise ValueError(f"unknown policy kind: {self.kind}")
        return self.scale * p0 + self.shift, self.scale * p1

    def weight_fn(self) -> Optional[Callable]:
        if self.kind != "custom":
            return None
        base = self.fn
        scale, shift = self.scale, self.shift

        def fn(t, y):
            return scale * np.asarray(base(t, y), dtype=float) + shift

        return fn


@dataclass(frozen=True)
class PathBundle:
    """One recorded trajectory on a uniform grid."""

    times: np.ndarray
    y: np.ndarray
    x: np.ndarray
    z: np.ndarray
    measure: str


@dataclass(frozen=True)
class McEstimate:
    """Monte Carlo mean with its standard error."""

    mean: float
    std_error: float
    n_paths: int
    seed: int


@dataclass(frozen=True)
class SimulationResult:
    """Terminal-state arrays of a batch of simulated paths.

    ``log_density`` accumulates the log-likelihood ratio of the tilted
    measure with respect to the physical one along each path, whatever
    measure the paths were drawn under.
    """

    y: np.ndarray
    log_wealth: np.ndarray
    log_deflator: np.ndarray
    log_density: np.ndarray
    measure: str
    x0: float
    paths: tuple = ()

    @property
    def wealth(self) -> np.ndarray:
        return self.x0 * np.exp(self.log_wealth)

    @property
    def deflator(self) -> np.ndarray:
        return np.exp(self.log_deflator)

    @property
    def density(self) -> np.ndarray:
        return np.exp(self.log_density)


@dataclass(frozen=True)
class _KernelConfig:
    kind: int
    speed: float
    level: float
    sigma_y: float
    rho: float
    r: float
    mu_s: float
    sigma: float
    az0: float
    az1: float
    bz0: float
    bz1: float
    ad0: float
    ad1: float
    bd0: float
    bd1: float
    shy0: float
    shy1: float
    shw0: float
    shw1: float
    y_start: float


def _kernel_config(params, prefs: Preferences, measure: str, y0) -> _KernelConfig:
    """Translate model + measure into the flat kernel parameterization."""
    q = prefs.q
    if isinstance(params, BlackScholesParams):
        bz0 = -params.mu / params.sigma
        bd0 = q * bz0
        return _KernelConfig(
            kind=_KIND_GAUSS,
            speed=1.0,
            level=params.mu,
            sigma_y=0.0,
            rho=0.0,
            r=params.r,
            mu_s=0.0,
            sigma=params.sigma,
            az0=0.0, az1=0.0, bz0=bz0, bz1=0.0,
            ad0=0.0, ad1=0.0, bd0=bd0, bd1=0.0,
            shy0=0.0,
            shy1=0.0,
            shw0=0.0 if measure == "P" else bd0,
            shw1=0.0,
            y_start=params.mu,
        )
    if isinstance(params, HestonParams):
        lr = heston_longrun(params, prefs)
        az0 = params.sigma_y * lr.b_inf
        bz0 = -(params.mu_s + params.rho * params.sigma_y * lr.b_inf)
        ad0, bd0 = az0, q * bz0
        if measure == "P":
            speed, level = params.lambda_y, params.y_bar
            shy0 = shw0 = 0.0
        else:
            law = tilted_factor_law(lr)
            speed, level = law.lambda_y, law.y_bar
            shy0 = ad0 + params.rho * bd0
            shw0 = params.rho * ad0 + bd0
        return _KernelConfig(
            kind=_KIND_SQRT,
            speed=speed,
            level=level,
            sigma_y=params.sigma_y,
            rho=params.rho,
            r=params.r,
            mu_s=params.mu_s,
            sigma=0.0,
            az0=az0, az1=0.0, bz0=bz0, bz1=0.0,
            ad0=ad0, ad1=0.0, bd0=bd0, bd1=0.0,
            shy0=shy0, shy1=0.0, shw0=shw0, shw1=0.0,
            y_start=params.y_bar if y0 is None else float(y0),
        )
    if isinstance(params, KimOmbergParams):
        lr = ko_longrun(params, prefs)
        az0 = params.sigma_y * lr.b_inf
        az1 = params.sigma_y * lr.c_inf
        bz0 = -params.rho * params.sigma_y * lr.b_inf
        bz1 = -(1.0 / params.sigma + params.rho * params.sigma_y * lr.c_inf)
        ad0, ad1 = az0, az1
        bd0, bd1 = q * bz0, q * bz1
        if measure == "P":
            speed, level = params.lambda_y, params.y_bar
            shy0 = shy1 = shw0 = shw1 = 0.0
        else:
            law = tilted_factor_law(lr)
            speed, level = law.lambda_y, law.y_bar
            shy0 = ad0 + params.rho * bd0
            shy1 = ad1 + params.rho * bd1
            shw0 = params.rho * ad0 + bd0
            shw1 = params.rho * ad1 + bd1
        return _KernelConfig(
            kind=_KIND_GAUSS,
            speed=speed,
            level=level,
            sigma_y=params.sigma_y,
            rho=params.rho,
            r=params.r,
            mu_s=0.0,
            sigma=params.sigma,
            az0=az0, az1=az1, bz0=bz0, bz1=bz1,
            ad0=ad0, ad1=ad1, bd0=bd0, bd1=bd1,
            shy0=shy0, shy1=shy1, shw0=shw0, shw1=shw1,
            y_start=params.y_bar if y0 is None else float(y0),
        )
    raise TypeError(f"unsupported parameter record: {type(params).__name__}")


def _check_policy_model(policy: PolicySpec, params) -> None:
    if policy.kind.startswith("heston") and not isinstance(params, HestonParams):
        raise ValidationError(f"policy kind {policy.kind!r} requires the Heston model")
    if policy.kind.startswith("ko") and not isinstance(params, KimOmbergParams):
        raise ValidationError(
            f"policy kind {policy.kind!r} requires the Kim-Omberg model"
        )


def simulate(
    params,
    prefs: Preferences,
    policy: PolicySpec,
    T: float,
    n_steps: int,
    n_paths: int,
    rng: RngSpec,
    measure: str = "P",
    *,
    x0: float = 1.0,
    y0: Optional[float] = None,
    record_paths: int = 0,
    check_step: bool = False,
) -> SimulationResult:
    """Simulate terminal (factor, wealth, deflator, density) values.

    Parameters
    ----------
    params, prefs
        Model parameter record and preferences.
    policy : PolicySpec
        Risky-weight rule; wealth always follows the physical dynamics.
    T, n_steps, n_paths
        Horizon, Euler steps over [0, T], and number of paths.
    rng : RngSpec
        Seed/stream configuration; determines every draw.
    measure : {"P", "Phat"}
        Measure the paths are drawn under.  Under ``Phat`` the factor
        follows its tilted dynamics and the physical Brownian increments
        entering wealth/deflator/density are reconstructed from the
        tilted ones by the Girsanov drift shift.
    x0 : float
        Initial wealth (> 0).
    y0 : float, optional
        Initial factor value; defaults to the model's long-run level.
    record_paths : int
        Record the first ``record_paths`` trajectories (at most one
        chunk's worth) as :class:`PathBundle` objects.
    check_step : bool
        Run the discretization pilot diagnostic before the main run
        (raises :class:`StepTooCoarse` on failure).

    Returns
    -------
    SimulationResult
    """
    validate(params, prefs)
    if measure not in ("P", "Phat"):
        raise ValidationError("measure must be 'P' or 'Phat'")
    if T <= 0.0:
        raise ValidationError("T must be positive")
    if n_steps < 1:
        raise ValidationError("n_steps must be >= 1")
    if n_paths < 1:
        raise ValidationError("n_paths must be >= 1")
    if x0 <= 0.0:
        raise ValidationError("x0 must be positive")
    _check_policy_model(policy, params)

    if check_step:
        step_diagnostic(
            params, prefs, policy, T, n_steps, rng, measure, x0=x0, y0=y0
        )

    cfg = _kernel_config(params, prefs, measure, y0)
    dt = T / n_steps
    tables = policy.coefficient_tables(T, n_steps)
    policy_fn = policy.weight_fn()
    if tables is None:
        p0 = p1 = np.zeros(n_steps)
    else:
        p0, p1 = tables

    backend = kernel_backend()
    use_compiled = backend == "compiled" and policy_fn is None
    chunk = rng.chunk_size
    n_chunks = -(-n_paths // chunk)
    y_init = np.full(chunk, cfg.y_start)

    kernel_args = (
        cfg.kind,
        None,  # normals, filled per chunk
        dt,
        y_init,
        cfg.speed, cfg.level, cfg.sigma_y, cfg.rho, cfg.r, cfg.mu_s, cfg.sigma,
        p0, p1,
        cfg.az0, cfg.az1, cfg.bz0, cfg.bz1,
        cfg.ad0, cfg.ad1, cfg.bd0, cfg.bd1,
        cfg.shy0, cfg.shy1, cfg.shw0, cfg.shw1,
    )

    def run_chunk(ci: int):
        normals = rng.generator(ci).standard_normal((n_steps, 2, chunk))
        args = kernel_args[:1] + (normals,) + kernel_args[2:]
        if use_compiled:
            return _compiled_kernel.run_chunk(*args)
        if policy_fn is None:
            return _kernel_np.run_chunk(*args)
        return _kernel_np.run_chunk_flexible(*args, policy_fn=policy_fn)

    workers = min(thread_count(), n_chunks)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_chunk, range(n_chunks)))
    else:
        results = [run_chunk(ci) for ci in range(n_chunks)]

    y = np.concatenate([res[0] for res in results])[:n_paths]
    lx = np.concatenate([res[1] for res in results])[:n_paths]
    lz = np.concatenate([res[2] for res in results])[:n_paths]
    ld = np.concatenate([res[3] for res in results])[:n_paths]

    bundles = ()
    if record_paths > 0:
        k = min(record_paths, n_paths, chunk)
        normals = rng.generator(0).standard_normal((n_steps, 2, chunk))
        args = kernel_args[:1] + (normals,) + kernel_args[2:]
        out = _kernel_np.run_chunk_flexible(*args, policy_fn=policy_fn, record=True)
        times, y_ser, lx_ser, lz_ser = out[4], out[5], out[6], out[7]
        bundles = tuple(
            PathBundle(
                times=times,
                y=y_ser[:, j].copy(),
                x=x0 * np.exp(lx_ser[:, j]),
                z=np.exp(lz_ser[:, j]),
                measure=measure,
            )
            for j in range(k)
        )

    return SimulationResult(
        y=y,
        log_wealth=lx,
        log_deflator=lz,
        log_density=ld,
        measure=measure,
        x0=x0,
        paths=bundles,
    )


def _chunked_mean_se(values: np.ndarray, chunk: int):
    """One-pass mean/M2 over fixed-size blocks, merged in fixed order."""
    n_tot = 0
    mean = 0.0
    m2 = 0.0
    for start in range(0, values.shape[0], chunk):
        block = values[start : start + chunk]
        nb = block.shape[0]
        mb = float(block.mean())
        m2b = float(((block - mb) ** 2).sum())
        delta = mb - mean
        n_new = n_tot + nb
        mean += delta * nb / n_new
        m2 += m2b + delta * delta * n_tot * nb / n_new
        n_tot = n_new
    return n_tot, mean, m2


def mc_expect(
    functional: Callable[[SimulationResult], np.ndarray],
    params,
    prefs: Preferences,
    policy: PolicySpec,
    T: float,
    n_steps: int,
    n_paths: int,
    rng: RngSpec,
    measure: str = "P",
    *,
    x0: float = 1.0,
    y0: Optional[float] = None,
) -> McEstimate:
    """Estimate E[f(terminal state)] with a chunked one-pass reduction.

    ``functional`` receives the :class:`SimulationResult` and must
    return one value per path.  The reduction runs in fixed chunk order
    so that the estimate is bit-identical for any thread count.
    """
    if n_paths < 2:
        raise ValidationError("n_paths must be >= 2 for a standard error")
    sim = simulate(
        params, prefs, policy, T, n_steps, n_paths, rng, measure, x0=x0, y0=y0
    )
    values = np.asarray(functional(sim), dtype=float)
    if values.shape != (n_paths,):
        raise ValueError("functional must return one value per path")
    if not np.all(np.isfinite(values)):
        bad = int(np.count_nonzero(~np.isfinite(values)))
        raise NonFiniteSample(f"{bad} non-finite samples out of {n_paths}")
    n, mean, m2 = _chunked_mean_se(values, rng.chunk_size)
    se = math.sqrt(m2 / (n - 1) / n)
    return McEstimate(mean=mean, std_error=se, n_paths=n, seed=rng.master_seed)


def estimate_from_samples(values: np.ndarray, chunk: int, seed: int) -> McEstimate:
    """McEstimate from raw per-path values (fixed-order reduction)."""
    values = np.asarray(values, dtype=float)
    if values.shape[0] < 2:
        raise ValidationError("need at least 2 samples")
    if not np.all(np.isfinite(values)):
        bad = int(np.count_nonzero(~np.isfinite(values)))
        raise NonFiniteSample(f"{bad} non-finite samples out of {values.shape[0]}")
    n, mean, m2 = _chunked_mean_se(values, chunk)
    se = math.sqrt(m2 / (n - 1) / n)
    return McEstimate(mean=mean, std_error=se, n_paths=n, seed=seed)


def step_diagnostic(
    params,
    prefs: Preferences,
    policy: PolicySpec,
    T: float,
    n_steps: int,
    rng: RngSpec,
    measure: str = "P",
    *,
    n_pilot: int = 4096,
    x0: float = 1.0,
    y0: Optional[float] = None,
):
    """Discretization pilot: compare E[log X_T] at n_steps vs 2*n_steps.

    Runs two small independent batches and raises :class:`StepTooCoarse`
    when the estimates differ by more than 3 combined standard errors
    (a plain 1-SE rule would reject a perfectly converged scheme about a
    third of the time on noise alone).  Returns ``(shift, combined_se)``.
    """
    est = []
    for mult, offset in ((1, 101), (2, 102)):
        sim = simulate(
            params,
            prefs,
            policy,
            T,
            mult * n_steps,
            n_pilot,
            rng.with_stream(rng.stream + offset),
            measure,
            x0=x0,
            y0=y0,
        )
        est.append(
            estimate_from_samples(sim.log_wealth, rng.chunk_size, rng.master_seed)
        )
    shift = est[1].mean - est[0].mean
    se = math.hypot(est[0].std_error, est[1].std_error)
    if abs(shift) > 3.0 * se:
        raise StepTooCoarse(
            f"doubling n_steps moved E[log X_T] by {shift:.3e} "
            f"(> 3 x combined SE {se:.3e}); increase n_steps"
        )
    return shift, se


def tilt_exponent(longrun, y):
    """Exponent q(y) of the stationary tilt in the finite-horizon bounds.

    ``-B_inf * y`` for the square-root model and
    ``-B_inf * y - C_inf * y^2 / 2`` for the Gaussian one; shared by the
    bound evaluation and the simulation-based checks.
    """
    y = np.asarray(y, dtype=float)
    if isinstance(longrun, HestonLongRun):
        return -longrun.b_inf * y
    if isinstance(longrun, KoLongRun):
        return -longrun.b_inf * y - 0.5 * longrun.c_inf * y * y
    raise TypeError(f"unsupported long-run solution: {type(longrun).__name__}")


@dataclass(frozen=True)
class NovikovReport:
    """Partition diagnostic for the exponential-moment condition.

    The martingale argument behind the measure change needs
    ``E[exp(alpha * integral of Y)]`` finite on subintervals; that holds
    whenever the subinterval length stays below ``lambda_y/(alpha*sigma_y^2)``.
    The report states the bound and how many subintervals cover [0, T].
    """

    alpha: float
    max_width: float
    n_intervals: int

    @property
    def admits_partition(self) -> bool:
        return self.max_width > 0.0


def novikov_partition(params, prefs: Preferences, T: float) -> Optional[NovikovReport]:
    """Exponential-moment partition diagnostic (square-root model only).

    Returns None for the Gaussian-factor model, whose justification uses
    a different argument with no published width bound of this form.
    """
    if T <= 0.0:
        raise ValidationError("T must be positive")
    if not isinstance(params, HestonParams):
        return None
    lr = heston_longrun(params, prefs)
    gamma = prefs.gamma
    cs = params.rho * params.sigma_y * lr.b_inf
    g = 1.0 / gamma - 1.0
    l2 = (
        params.sigma_y**2 * lr.b_inf**2
        + 2.0 * cs * g * (params.mu_s + cs)
        + g * g * (params.mu_s + cs) ** 2
    )
    alpha = 0.5 * abs(l2)
    if alpha == 0.0:
        return NovikovReport(alpha=0.0, max_width=math.inf, n_intervals=1)
    width = params.lambda_y / (alpha * params.sigma_y**2)
    n = int(math.floor(T / width)) + 1
    return NovikovReport(alpha=alpha, max_width=width, n_intervals=n)


def write_path_csv(bundle: PathBundle, path: str) -> None:
    """Dump one trajectory as CSV with header ``t,y,x,z``."""
    rows = zip(
        (float(t) for t in bundle.times),
        (float(v) for v in bundle.y),
        (float(v) for v in bundle.x),
        (float(v) for v in bundle.z),
    )
    write_text(path, csv_lines(("t", "y", "x", "z"), rows))
