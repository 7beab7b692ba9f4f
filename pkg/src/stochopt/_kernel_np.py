"""Pure-NumPy Monte Carlo kernel, the fallback twin of ``_kernel.pyx``.

``run_chunk`` here must produce bit-identical doubles to the compiled
kernel: every value goes through the same +, -, *, /, sqrt, max
operations in the same order, just vectorised across the lane axis.
IEEE-754 makes elementwise results independent of whether the loop runs
in C or in NumPy, as long as no operation is fused or reordered — so
keep the expressions in this file and in ``_kernel.pyx`` textually
parallel.

``run_chunk_flexible`` extends the same scheme with callable policies
and full path recording; it has no compiled counterpart and is used for
custom policies and trajectory output.
"""

from __future__ import annotations

import math

import numpy as np


def run_chunk(
    kind,
    normals,
    dt,
    y0,
    speed,
    level,
    sigma_y,
    rho,
    r,
    mu_s,
    sigma,
    p0,
    p1,
    az0, az1, bz0, bz1,
    ad0, ad1, bd0, bd1,
    shy0, shy1, shw0, shw1,
):
    """Advance one chunk of paths over a uniform grid.

    Parameters
    ----------
    kind : int
        1 for a square-root factor (nonnegative part + sqrt envelope on
        every state-dependent coefficient), 2 for a Gaussian factor with
        constant diffusion.
    normals : ndarray, shape (n_steps, 2, lanes)
        Standard normal draws; slot 0 drives the asset Brownian motion,
        slot 1 its orthogonal complement (the factor Brownian motion is
        the rho-mixture of the two).
    dt : float
        Grid spacing.
    y0 : ndarray, shape (lanes,)
        Initial factor values.
    speed, level : float
        Mean-reversion speed and level of the factor *under the
        simulating measure*.
    sigma_y, rho : float
        Factor volatility scale and the asset/factor correlation.
    r, mu_s, sigma : float
        Interest rate; excess-return slope (kind 1, excess return is
        ``mu_s * y``); asset volatility (kind 2, excess return is ``y``).
    p0, p1 : ndarray, shape (n_steps,)
        Per-step affine policy weights: the risky fraction at step ``k``
        is ``p0[k] + p1[k] * y``.
    az0, az1, bz0, bz1 : float
        Deflator loadings: the deflator's factor-Brownian and
        asset-Brownian integrands are ``(az0 + az1*y) * s(y)`` and
        ``(bz0 + bz1*y) * s(y)`` with envelope ``s``.
    ad0, ad1, bd0, bd1 : float
        Same layout for the measure-change density accumulator.
    shy0, shy1, shw0, shw1 : float
        Drift shifts per unit time relating the simulating measure's
        Brownian increments to the physical ones; all zero when
        simulating under the physical measure.

    Returns
    -------
    tuple of ndarray
        ``(y, log_wealth, log_deflator, log_density)`` at the terminal
        time, each of shape ``(lanes,)``.  Wealth dynamics are always
        the physical ones; the log-density accumulates the tilted
        measure's log-likelihood ratio along the path.
    """
    n_steps = normals.shape[0]
    lanes = normals.shape[2]
    ys = np.array(y0, dtype=np.float64, copy=True)
    lx = np.zeros(lanes)
    lz = np.zeros(lanes)
    ld = np.zeros(lanes)

    sdt = math.sqrt(dt)
    srho = math.sqrt(1.0 - rho * rho)
    sig2_const = sigma * sigma

    for k in range(n_steps):
        p0k = p0[k]
        p1k = p1[k]
        zw = normals[k, 0] * sdt
        zy = rho * zw + srho * (normals[k, 1] * sdt)
        y = ys
        if kind == 1:
            y_eff = np.maximum(y, 0.0)
            s_env = np.sqrt(y_eff)
            mu_y = mu_s * y_eff
            sig_y = s_env
            sig2_y = y_eff
        else:
            y_eff = y
            s_env = 1.0
            mu_y = y
            sig_y = sigma
            sig2_y = sig2_const
        shy = (shy0 + shy1 * y_eff) * s_env
        shw = (shw0 + shw1 * y_eff) * s_env
        dwy = zy + shy * dt
        dw = zw + shw * dt
        pi = p0k + p1k * y_eff
        lx = lx + (
            (r + pi * mu_y - 0.5 * (pi * pi) * sig2_y) * dt
            + (pi * sig_y) * dw
        )
        az = (az0 + az1 * y_eff) * s_env
        bz = (bz0 + bz1 * y_eff) * s_env
        lz = lz + (
            -r * dt
            + az * dwy
            + bz * dw
            - 0.5 * (az * az + 2.0 * rho * (az * bz) + bz * bz) * dt
        )
        ad = (ad0 + ad1 * y_eff) * s_env
        bd = (bd0 + bd1 * y_eff) * s_env
        ld = ld + (
            ad * dwy
            + bd * dw
            - 0.5 * (ad * ad + 2.0 * rho * (ad * bd) + bd * bd) * dt
        )
        if kind == 1:
            ys = y + speed * (level - y_eff) * dt + (sigma_y * s_env) * zy
        else:
            ys = y + speed * (level - y) * dt + sigma_y * zy

    return ys, lx, lz, ld


def run_chunk_flexible(
    kind,
    normals,
    dt,
    y0,
    speed,
    level,
    sigma_y,
    rho,
    r,
    mu_s,
    sigma,
    p0,
    p1,
    az0, az1, bz0, bz1,
    ad0, ad1, bd0, bd1,
    shy0, shy1, shw0, shw1,
    policy_fn=None,
    record=False,
):
    """Like :func:`run_chunk` but with hooks the compiled kernel lacks.

    ``policy_fn(t, y)`` overrides the affine policy arrays when given;
    it receives the left grid time and the (truncated) factor vector and
    returns the risky fractions. With ``record=True`` the full per-step
    series of factor, log-wealth and log-deflator are returned as
    ``(times, y_series, lx_series, lz_series)`` extra outputs, each of
    shape ``(n_steps + 1, lanes)``.
    """
    n_steps = normals.shape[0]
    lanes = normals.shape[2]
    ys = np.array(y0, dtype=np.float64, copy=True)
    lx = np.zeros(lanes)
    lz = np.zeros(lanes)
    ld = np.zeros(lanes)

    sdt = math.sqrt(dt)
    srho = math.sqrt(1.0 - rho * rho)
    sig2_const = sigma * sigma

    if record:
        y_series = np.empty((n_steps + 1, lanes))
        lx_series = np.empty((n_steps + 1, lanes))
        lz_series = np.empty((n_steps + 1, lanes))
        y_series[0] = ys
        lx_series[0] = 0.0
        lz_series[0] = 0.0

    for k in range(n_steps):
        zw = normals[k, 0] * sdt
        zy = rho * zw + srho * (normals[k, 1] * sdt)
        y = ys
        if kind == 1:
            y_eff = np.maximum(y, 0.0)
            s_env = np.sqrt(y_eff)
            mu_y = mu_s * y_eff
            sig_y = s_env
            sig2_y = y_eff
        else:
            y_eff = y
            s_env = 1.0
            mu_y = y
            sig_y = sigma
            sig2_y = sig2_const
        shy = (shy0 + shy1 * y_eff) * s_env
        shw = (shw0 + shw1 * y_eff) * s_env
        dwy = zy + shy * dt
        dw = zw + shw * dt
        if policy_fn is None:
            pi = p0[k] + p1[k] * y_eff
        else:
            pi = np.asarray(policy_fn(k * dt, y_eff), dtype=np.float64)
        lx = lx + (
            (r + pi * mu_y - 0.5 * (pi * pi) * sig2_y) * dt
            + (pi * sig_y) * dw
        )
        az = (az0 + az1 * y_eff) * s_env
        bz = (bz0 + bz1 * y_eff) * s_env
        lz = lz + (
            -r * dt
            + az * dwy
            + bz * dw
            - 0.5 * (az * az + 2.0 * rho * (az * bz) + bz * bz) * dt
        )
        ad = (ad0 + ad1 * y_eff) * s_env
        bd = (bd0 + bd1 * y_eff) * s_env
        ld = ld + (
            ad * dwy
            + bd * dw
            - 0.5 * (ad * ad + 2.0 * rho * (ad * bd) + bd * bd) * dt
        )
        if kind == 1:
            ys = y + speed * (level - y_eff) * dt + (sigma_y * s_env) * zy
        else:
            ys = y + speed * (level - y) * dt + sigma_y * zy
        if record:
            y_series[k + 1] = ys
            lx_series[k + 1] = lx
            lz_series[k + 1] = lz

    if record:
        times = np.arange(n_steps + 1) * dt
        return ys, lx, lz, ld, times, y_series, lx_series, lz_series
    return ys, lx, lz, ld
