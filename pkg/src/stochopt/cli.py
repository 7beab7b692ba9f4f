"""Command-line surface: solving, verification runs, and CSV emission.

Subcommands
-----------
solve     closed-form / semi-numeric finite-horizon solution + policy curve
longrun   stationary coefficients, safe rate, condition flags
expand    small-volatility expansion table
verify    duality bound checks (exit code 3 on a statistical violation)
figure    plot-ready CSV for the four standard figures
simulate  Monte Carlo run with summary statistics and optional path dumps

Configuration can come from a preset (``pan``: variance model, yearly
time units; ``barberis``: predictability model, monthly time units), a
flat ``key = value`` config file, and per-parameter flags; flags beat
file values, which beat preset values.

Exit codes: 0 success, 2 validation error, 3 verification violation,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, fields, replace
from typing import Optional

import numpy as np

from ._io import csv_lines, format_double, write_text
from .closed_form import (
    esr_finite,
    heston_portfolio,
    ko_portfolio,
    solve_bs,
    solve_heston,
    solve_ko,
)
from .duality_verify import (
    budget_report,
    exclusivity_check,
    growth_rate_scan,
    reports_to_csv,
    reports_to_text,
    verify_bs,
    verify_finite_bounds,
)
from .errors import NumericalError, ValidationError
from .long_run import expand_heston, expand_ko, heston_longrun, ko_longrun
from .model_core import (
    BlackScholesParams,
    HestonParams,
    KimOmbergParams,
    Preferences,
)
from .sde_sim import PolicySpec, RngSpec, simulate, write_path_csv

PRESETS = {
    "pan": {
        "model": "heston",
        "r": 0.033,
        "mu_s": 4.4,
        "lambda_y": 5.3,
        "y_bar": 0.024,
        "sigma_y": 0.38,
        "rho": -0.57,
        "gamma": 5.0,
        "horizon": 10.0,
    },
    "barberis": {
        "model": "ko",
        "r": 0.0014,
        "sigma": 0.0436,
        "lambda_y": 0.0226,
        "y_bar": 0.0034,
        "sigma_y": 0.0008,
        "rho": -0.935,
        "gamma": 5.0,
        "horizon": 240.0,
    },
}

_INT_FIELDS = {"paths", "steps", "seed"}
_STR_FIELDS = {"model", "out"}


@dataclass(frozen=True)
class RunConfig:
    """Resolved run configuration; round-trips through the config format."""

    model: str = ""
    gamma: float = 5.0
    horizon: float = 10.0
    paths: int = 100_000
    steps: int = 0  # 0 = automatic (256 per unit time)
    grid_step: float = 0.0  # 0 = automatic
    seed: int = 0
    out: str = ""
    y0: Optional[float] = None
    r: Optional[float] = None
    mu: Optional[float] = None
    mu_s: Optional[float] = None
    sigma: Optional[float] = None
    lambda_y: Optional[float] = None
    y_bar: Optional[float] = None
    sigma_y: Optional[float] = None
    rho: Optional[float] = None

    def serialize(self) -> str:
        """Flat ``key = value`` text; omits unset optional fields."""
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if v is None or v == "":
                continue
            if f.name in _INT_FIELDS:
                lines.append(f"{f.name} = {int(v)}")
            elif f.name in _STR_FIELDS:
                lines.append(f"{f.name} = {v}")
            else:
                lines.append(f"{f.name} = {format_double(v)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str) -> "RunConfig":
        return cls(**parse_config_text(text))


def parse_config_text(text: str) -> dict:
    """Parse flat ``key = value`` lines (``#`` starts a comment)."""
    known = {f.name for f in fields(RunConfig)}
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"config line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in known:
            raise ValidationError(f"config line {lineno}: unknown key {key!r}")
        try:
            if key in _STR_FIELDS:
                out[key] = value
            elif key in _INT_FIELDS:
                out[key] = int(value)
            else:
                out[key] = float(value)
        except ValueError as exc:
            raise ValidationError(f"config line {lineno}: {exc}") from exc
    return out


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Merge defaults <- preset <- config file <- explicit flags."""
    merged: dict = {}
    preset = getattr(args, "preset", None)
    if preset:
        if preset not in PRESETS:
            raise ValidationError(f"unknown preset {preset!r}")
        merged.update(PRESETS[preset])
    config_path = getattr(args, "config", None)
    if config_path:
        with open(config_path, "r", encoding="utf-8") as fh:
            merged.update(parse_config_text(fh.read()))
    for f in fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            merged[f.name] = v
    if preset and getattr(args, "model", None):
        if args.model != PRESETS[preset]["model"]:
            raise ValidationError(
                f"--model {args.model} conflicts with preset {preset!r} "
                f"({PRESETS[preset]['model']})"
            )
    return RunConfig(**merged)


def build_params(cfg: RunConfig):
    """Parameter record for the configured model."""

    def need(*names):
        missing = [n for n in names if getattr(cfg, n) is None]
        if missing:
            raise ValidationError(
                f"model {cfg.model!r} needs parameters: {', '.join(missing)} "
                "(set them via flags, a config file, or a preset)"
            )
        return [getattr(cfg, n) for n in names]

    if cfg.model == "bs":
        r, mu, sigma = need("r", "mu", "sigma")
        return BlackScholesParams(r=r, mu=mu, sigma=sigma)
    if cfg.model == "heston":
        r, mu_s, lam, yb, sy, rho = need(
            "r", "mu_s", "lambda_y", "y_bar", "sigma_y", "rho"
        )
        return HestonParams(
            r=r, mu_s=mu_s, lambda_y=lam, y_bar=yb, sigma_y=sy, rho=rho
        )
    if cfg.model == "ko":
        r, sigma, lam, yb, sy, rho = need(
            "r", "sigma", "lambda_y", "y_bar", "sigma_y", "rho"
        )
        return KimOmbergParams(
            r=r, sigma=sigma, lambda_y=lam, y_bar=yb, sigma_y=sy, rho=rho
        )
    raise ValidationError(
        f"unknown or unset model {cfg.model!r}; use --model bs|heston|ko or a preset"
    )


def _y_ref(cfg: RunConfig, params) -> float:
    if cfg.y0 is not None:
        return cfg.y0
    if isinstance(params, BlackScholesParams):
        return params.mu
    return params.y_bar


def _auto_steps(cfg: RunConfig) -> int:
    return cfg.steps if cfg.steps > 0 else max(1, round(256 * cfg.horizon))


def _emit(cfg: RunConfig, csv_text: str) -> None:
    if cfg.out:
        write_text(cfg.out, csv_text)
        print(f"wrote {cfg.out}")


def _print_kv(name: str, value) -> None:
    if isinstance(value, float):
        print(f"{name:>24} = {value:.10g}")
    else:
        print(f"{name:>24} = {value}")


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_solve(cfg: RunConfig) -> int:
    params = build_params(cfg)
    prefs = Preferences(gamma=cfg.gamma)
    T = cfg.horizon
    y_ref = _y_ref(cfg, params)
    grid = np.linspace(0.0, T, 101)

    print(f"model = {cfg.model}, gamma = {cfg.gamma}, horizon = {T}")
    if isinstance(params, BlackScholesParams):
        sol = solve_bs(params, prefs, T)
        _print_kv("pi_hat", sol.pi_hat)
        _print_kv("esr", sol.esr)
        rows = [(t, sol.pi_hat) for t in grid]
        _emit(cfg, csv_lines(("t", "pi"), rows))
        return 0
    if isinstance(params, HestonParams):
        sol = solve_heston(params, prefs, T)
        _print_kv("B(0)", sol.B(0.0))
        _print_kv("A(0)", sol.A(0.0))
        _print_kv("pi(0)", heston_portfolio(sol, 0.0))
        _print_kv("esr_finite", esr_finite(sol, y_ref, T))
        rows = [
            (t, sol.B(t), sol.A(t), heston_portfolio(sol, t)) for t in grid
        ]
        _emit(cfg, csv_lines(("t", "B", "A", "pi"), rows))
        return 0
    sol = solve_ko(params, prefs, T, grid_step=cfg.grid_step or None)
    _print_kv("C(0)", sol.C(0.0))
    _print_kv("B(0)", sol.B(0.0))
    _print_kv("A(0)", sol.A(0.0))
    _print_kv("pi(0, y_ref)", ko_portfolio(sol, 0.0, y_ref))
    _print_kv("esr_finite", esr_finite(sol, y_ref, T))
    _print_kv("ode_error_estimate", sol.error_estimate)
    rows = [
        (t, sol.B(t), sol.A(t), sol.C(t), ko_portfolio(sol, t, y_ref))
        for t in grid
    ]
    _emit(cfg, csv_lines(("t", "B", "A", "C", "pi"), rows))
    return 0


def cmd_longrun(cfg: RunConfig) -> int:
    params = build_params(cfg)
    prefs = Preferences(gamma=cfg.gamma)
    y_ref = _y_ref(cfg, params)
    if isinstance(params, BlackScholesParams):
        raise ValidationError("longrun requires a factor model (heston or ko)")
    print(f"model = {cfg.model}, gamma = {cfg.gamma}")
    if isinstance(params, HestonParams):
        lr = heston_longrun(params, prefs)
        _print_kv("B_inf", lr.b_inf)
        _print_kv("A_inf", lr.a_inf)
        _print_kv("esr", lr.esr)
        _print_kv("pi_inf", lr.pi_inf)
        _print_kv("lambda_tilted", lr.lambda_phat)
        header = (
            "B_inf", "A_inf", "esr", "pi_inf", "lambda_tilted",
            "cond_discriminant", "cond_theorem", "cond_bound",
        )
        row = (
            lr.b_inf, lr.a_inf, lr.esr, lr.pi_inf, lr.lambda_phat,
            lr.cond_discriminant, lr.cond_theorem, lr.cond_bound,
        )
    else:
        lr = ko_longrun(params, prefs)
        _print_kv("C_inf", lr.c_inf)
        _print_kv("B_inf", lr.b_inf)
        _print_kv("A_inf", lr.a_inf)
        _print_kv("esr", lr.esr)
        _print_kv("pi_inf(y_ref)", lr.pi_inf(y_ref))
        _print_kv("k_tilted", lr.k_phat)
        _print_kv("l_tilted", lr.l_phat)
        header = (
            "C_inf", "B_inf", "A_inf", "esr", "pi_inf_y_ref",
            "k_tilted", "l_tilted",
            "cond_discriminant", "cond_theorem", "cond_bound",
        )
        row = (
            lr.c_inf, lr.b_inf, lr.a_inf, lr.esr, lr.pi_inf(y_ref),
            lr.k_phat, lr.l_phat,
            lr.cond_discriminant, lr.cond_theorem, lr.cond_bound,
        )
    _print_kv("cond_discriminant", lr.cond_discriminant)
    _print_kv("cond_theorem", lr.cond_theorem)
    _print_kv("cond_bound", lr.cond_bound)
    if lr.stationary_law is not None:
        law = lr.stationary_law
        _print_kv("stationary_kind", law.kind)
        _print_kv("stationary_mean", law.mean)
        _print_kv("stationary_variance", law.variance)
    _emit(cfg, csv_lines(header, [row]))
    return 0


def cmd_expand(cfg: RunConfig) -> int:
    params = build_params(cfg)
    prefs = Preferences(gamma=cfg.gamma)
    if isinstance(params, HestonParams):
        ex = expand_heston(params, prefs)
        lr = heston_longrun(params, prefs)
        exact_esr, exact_pi = lr.esr, lr.pi_inf
    elif isinstance(params, KimOmbergParams):
        ex = expand_ko(params, prefs)
        lr = ko_longrun(params, prefs)
        exact_esr, exact_pi = lr.esr, lr.pi_inf(params.y_bar)
    else:
        raise ValidationError("expand requires a factor model (heston or ko)")
    sy = params.sigma_y
    rows = []
    for name, e, exact in (
        ("esr", ex.esr, exact_esr),
        ("portfolio", ex.portfolio, exact_pi),
    ):
        approx = e.value(sy)
        rows.append(
            (name, e.zeroth, e.first_coeff, e.relative_first, approx, exact,
             exact - approx)
        )
        print(
            f"{name:>10}: zeroth {e.zeroth:.8g}, first-order coeff "
            f"{e.first_coeff:.8g} (relative {e.relative_first:.8g}), "
            f"value {approx:.8g}, exact {exact:.8g}, "
            f"remainder {exact - approx:.3g}"
        )
    _emit(
        cfg,
        csv_lines(
            ("quantity", "zeroth", "first_coeff", "relative_first",
             "expansion", "exact", "remainder"),
            rows,
        ),
    )
    return 0


def cmd_verify(cfg: RunConfig, with_exclusivity: bool = False) -> int:
    params = build_params(cfg)
    prefs = Preferences(gamma=cfg.gamma)
    T = cfg.horizon
    rng = RngSpec(cfg.seed)
    reports = []
    informational = set()
    if isinstance(params, BlackScholesParams):
        reports.append(verify_bs(params, prefs, T))
    else:
        r1, r2 = verify_finite_bounds(
            params,
            prefs,
            T,
            n_paths=cfg.paths,
            n_steps=_auto_steps(cfg),
            rng=rng,
            y0=cfg.y0,
        )
        if isinstance(params, HestonParams):
            lr = heston_longrun(params, prefs)
        else:
            lr = ko_longrun(params, prefs)
        bud = budget_report(
            params,
            prefs,
            PolicySpec.from_longrun(lr),
            T,
            n_paths=cfg.paths,
            n_steps=_auto_steps(cfg),
            rng=rng.with_stream(rng.stream + 2),
            y0=cfg.y0,
            label="budget[candidate]",
        )
        reports.extend([r1, r2, bud])
        if with_exclusivity:
            excl = exclusivity_check(
                params,
                prefs,
                T,
                n_paths=cfg.paths,
                n_steps=_auto_steps(cfg),
                rng=rng.with_stream(rng.stream + 100),
                y0=cfg.y0,
            )
            # Perturbed policies are *supposed* to break the identity;
            # only their budget rows carry pass/fail weight.
            for rep in excl:
                if rep.label.startswith("identity[") and "candidate" not in rep.label:
                    informational.add(rep.label)
            reports.extend(excl)
    text = reports_to_text(reports)
    sys.stdout.write(text)
    _emit(cfg, reports_to_csv(reports))
    violated = [
        r for r in reports
        if r.verdict == "violated" and r.label not in informational
    ]
    if violated:
        print(f"{len(violated)} bound check(s) violated", file=sys.stderr)
        return 3
    return 0


_FIGURE_PRESET = {1: "pan", 2: "barberis", 3: "pan", 4: "barberis"}


def cmd_figure(which: int, cfg: RunConfig) -> int:
    params = build_params(cfg)
    prefs = Preferences(gamma=cfg.gamma)
    T = cfg.horizon
    y_ref = _y_ref(cfg, params)

    if which in (1, 2):
        grid = np.linspace(0.0, T, 201)
        if isinstance(params, HestonParams):
            sol = solve_heston(params, prefs, T)
            lr = heston_longrun(params, prefs)
            pi_static = params.mu_s / prefs.gamma
            rows = [
                (t, heston_portfolio(sol, t), lr.pi_inf, pi_static)
                for t in grid
            ]
        elif isinstance(params, KimOmbergParams):
            sol = solve_ko(params, prefs, T, grid_step=cfg.grid_step or None)
            lr = ko_longrun(params, prefs)
            pi_static = y_ref / (prefs.gamma * params.sigma**2)
            rows = [
                (t, ko_portfolio(sol, t, y_ref), lr.pi_inf(y_ref), pi_static)
                for t in grid
            ]
        else:
            raise ValidationError("figures need a factor model")
        csv_text = csv_lines(("t", "pi_finite", "pi_longrun", "pi_static"), rows)
    else:
        if isinstance(params, BlackScholesParams):
            raise ValidationError("figures need a factor model")
        t_min = 0.25 if which == 3 else 6.0
        horizons = np.linspace(min(t_min, T / 2.0), T, 40)
        table = growth_rate_scan(
            params,
            prefs,
            horizons,
            n_paths=cfg.paths,
            rng=RngSpec(cfg.seed),
            y0=cfg.y0,
        )
        rows = [
            (
                row.horizon,
                row.esr_finite,
                row.esr_longrun_policy,
                row.se_longrun_policy,
                row.esr_static,
                row.esr_limit,
            )
            for row in table
        ]
        csv_text = csv_lines(
            ("horizon", "esr_finite", "esr_longrun_policy",
             "se_longrun_policy", "esr_static", "esr_limit"),
            rows,
        )
    if cfg.out:
        _emit(cfg, csv_text)
    else:
        sys.stdout.write(csv_text)
    return 0


def cmd_simulate(
    cfg: RunConfig, policy_name: str, measure: str, dump_paths: int
) -> int:
    params = build_params(cfg)
    prefs = Preferences(gamma=cfg.gamma)
    T = cfg.horizon
    n_steps = _auto_steps(cfg)
    rng = RngSpec(cfg.seed)
    y_ref = _y_ref(cfg, params)

    if policy_name == "finite":
        if isinstance(params, BlackScholesParams):
            policy = PolicySpec.from_solution(solve_bs(params, prefs, T))
        elif isinstance(params, HestonParams):
            policy = PolicySpec.from_solution(solve_heston(params, prefs, T))
        else:
            policy = PolicySpec.from_solution(
                solve_ko(params, prefs, T, grid_step=cfg.grid_step or None)
            )
    elif policy_name == "longrun":
        if isinstance(params, HestonParams):
            policy = PolicySpec.from_longrun(heston_longrun(params, prefs))
        elif isinstance(params, KimOmbergParams):
            policy = PolicySpec.from_longrun(ko_longrun(params, prefs))
        else:
            raise ValidationError("longrun policy needs a factor model")
    elif policy_name == "myopic":
        if isinstance(params, BlackScholesParams):
            policy = PolicySpec.constant(
                params.mu / (prefs.gamma * params.sigma**2)
            )
        elif isinstance(params, HestonParams):
            policy = PolicySpec.constant(params.mu_s / prefs.gamma)
        else:
            g2 = prefs.gamma * params.sigma**2
            policy = PolicySpec.custom(lambda t, y: y / g2)
    elif policy_name == "safe":
        policy = PolicySpec.constant(0.0)
    else:
        raise ValidationError(f"unknown policy {policy_name!r}")

    if dump_paths > 0 and not cfg.out:
        raise ValidationError("--dump-paths needs --out as filename prefix")

    sim = simulate(
        params,
        prefs,
        policy,
        T,
        n_steps,
        cfg.paths,
        rng,
        measure,
        y0=cfg.y0,
        record_paths=dump_paths,
    )
    x = sim.wealth
    one_minus = 1.0 - prefs.gamma
    util_mean = float(np.mean(x**one_minus))
    esr_mc = math.log(util_mean) / (one_minus * T)
    print(f"model = {cfg.model}, policy = {policy_name}, measure = {measure}")
    _print_kv("paths", cfg.paths)
    _print_kv("steps", n_steps)
    _print_kv("E[X_T]", float(np.mean(x)))
    _print_kv("sd[X_T]", float(np.std(x, ddof=1)))
    _print_kv("esr_mc", esr_mc)
    _print_kv("E[log X_T]/T", float(np.mean(sim.log_wealth)) / T)
    _print_kv("E[density]", float(np.mean(sim.density)))
    _print_kv("E[Y_T]", float(np.mean(sim.y)))
    if cfg.out:
        header = ("quantity", "value")
        rows = [
            ("mean_wealth", float(np.mean(x))),
            ("sd_wealth", float(np.std(x, ddof=1))),
            ("esr_mc", esr_mc),
            ("mean_log_wealth_rate", float(np.mean(sim.log_wealth)) / T),
            ("mean_density", float(np.mean(sim.density))),
            ("mean_factor", float(np.mean(sim.y))),
        ]
        write_text(cfg.out, csv_lines(header, rows))
        print(f"wrote {cfg.out}")
    for i, bundle in enumerate(sim.paths):
        path_file = f"{cfg.out}.path{i:04d}.csv"
        write_path_csv(bundle, path_file)
        print(f"wrote {path_file}")
    return 0


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("configuration")
    g.add_argument("--model", choices=("bs", "heston", "ko"))
    g.add_argument(
        "--preset",
        choices=tuple(PRESETS),
        help="pan: variance model, YEARLY units; barberis: predictability "
        "model, MONTHLY units",
    )
    g.add_argument("--config", help="flat key = value config file")
    g.add_argument("--gamma", type=float, help="relative risk aversion")
    g.add_argument("--horizon", type=float, help="horizon T (preset time units)")
    g.add_argument("--paths", type=int, help="Monte Carlo paths")
    g.add_argument("--steps", type=int, help="Euler steps (default 256/unit)")
    g.add_argument(
        "--grid-step", type=float, help="ODE grid step for the ko model"
    )
    g.add_argument("--seed", type=int, help="master RNG seed")
    g.add_argument("--out", help="output CSV path")
    g.add_argument("--y0", type=float, help="initial factor value")
    p = common.add_argument_group("parameter overrides")
    p.add_argument("--r", type=float, help="interest rate")
    p.add_argument("--mu", type=float, help="bs: constant excess return")
    p.add_argument("--mu-s", type=float, help="heston: excess return slope")
    p.add_argument("--sigma", type=float, help="bs/ko: asset volatility")
    p.add_argument("--lambda-y", type=float, help="factor mean-reversion speed")
    p.add_argument("--y-bar", type=float, help="factor long-run level")
    p.add_argument("--sigma-y", type=float, help="factor volatility scale")
    p.add_argument("--rho", type=float, help="asset/factor correlation")

    parser = argparse.ArgumentParser(
        prog="stochopt",
        description="Long-run portfolio choice: solvers, simulation, and "
        "duality verification.",
        epilog="Environment: STOCHOPT_THREADS caps simulation worker "
        "threads; STOCHOPT_KERNEL=compiled|numpy forces the kernel backend. "
        "Preset time units: pan is per YEAR, barberis per MONTH.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("solve", parents=[common], help="finite-horizon solution")
    sub.add_parser("longrun", parents=[common], help="stationary solution")
    sub.add_parser("expand", parents=[common], help="small-volatility expansion")
    v = sub.add_parser("verify", parents=[common], help="duality bound checks")
    v.add_argument(
        "--exclusivity",
        action="store_true",
        help="also run the perturbed-policy exclusivity battery",
    )
    f = sub.add_parser("figure", parents=[common], help="figure CSV emission")
    f.add_argument("which", type=int, choices=(1, 2, 3, 4))
    s = sub.add_parser("simulate", parents=[common], help="Monte Carlo run")
    s.add_argument(
        "--policy",
        choices=("finite", "longrun", "myopic", "safe"),
        default="finite",
    )
    s.add_argument("--measure", choices=("P", "Phat"), default="P")
    s.add_argument(
        "--dump-paths",
        type=int,
        default=0,
        help="write this many path CSVs (needs --out prefix)",
    )
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "figure" and not args.preset and not args.model:
            args.preset = _FIGURE_PRESET[args.which]
        cfg = resolve_config(args)
        if args.command == "solve":
            return cmd_solve(cfg)
        if args.command == "longrun":
            return cmd_longrun(cfg)
        if args.command == "expand":
            return cmd_expand(cfg)
        if args.command == "verify":
            return cmd_verify(cfg, with_exclusivity=args.exclusivity)
        if args.command == "figure":
            return cmd_figure(args.which, cfg)
        if args.command == "simulate":
            return cmd_simulate(cfg, args.policy, args.measure, args.dump_paths)
        raise ValidationError(f"unknown command {args.command!r}")
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
