"""Benchmark the compiled simulation kernel against the NumPy fallback.

Both backends consume identical random draws in identical order, so
besides timing them this script asserts that their outputs are
bit-identical before reporting throughput.

Usage::

    python3 benchmarks/bench_kernel.py [--paths N] [--steps N] [--repeats N]
"""

from __future__ import annotations

import argparse
import os
import time

import numpy as np

from stochopt import (
    HestonParams,
    PolicySpec,
    Preferences,
    RngSpec,
    heston_longrun,
    simulate,
)

PARAMS = HestonParams(
    r=0.033, mu_s=4.4, lambda_y=5.3, y_bar=0.024, sigma_y=0.38, rho=-0.57
)
PREFS = Preferences(5.0)


def run_once(backend: str, n_paths: int, n_steps: int, T: float):
    os.environ["STOCHOPT_KERNEL"] = backend
    policy = PolicySpec.from_longrun(heston_longrun(PARAMS, PREFS))
    t0 = time.perf_counter()
    res = simulate(PARAMS, PREFS, policy, T, n_steps, n_paths, RngSpec(1234))
    return time.perf_counter() - t0, res


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--paths", type=int, default=50_000)
    ap.add_argument("--steps", type=int, default=1024)
    ap.add_argument("--horizon", type=float, default=4.0)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    saved = os.environ.get("STOCHOPT_KERNEL")
    try:
        results = {}
        times = {}
        for backend in ("compiled", "numpy"):
            run_once(backend, 256, 16, 1.0)  # warm up / JIT imports
            best = float("inf")
            for _ in range(args.repeats):
                dt, res = run_once(backend, args.paths, args.steps, args.horizon)
                best = min(best, dt)
            times[backend] = best
            results[backend] = res

        for field in ("y", "log_wealth", "log_deflator", "log_density"):
            a = getattr(results["compiled"], field)
            b = getattr(results["numpy"], field)
            if not np.array_equal(a, b):
                raise SystemExit(f"backend outputs differ in {field}")

        work = args.paths * args.steps
        print(f"workload: {args.paths} paths x {args.steps} steps "
              f"(best of {args.repeats})")
        for backend in ("compiled", "numpy"):
            rate = work / times[backend] / 1e6
            print(f"  {backend:>8}: {times[backend]*1e3:8.1f} ms   "
                  f"{rate:8.1f} M path-steps/s")
        print(f"  speedup : {times['numpy'] / times['compiled']:.2f}x "
              "(outputs bit-identical)")
    finally:
        if saved is None:
            os.environ.pop("STOCHOPT_KERNEL", None)
        else:
            os.environ["STOCHOPT_KERNEL"] = saved
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
