# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled Monte Carlo kernel: evolve one chunk of paths.

This is the hot loop of the package. It advances, per path, the factor,
log-wealth, log-deflator, and log-density-change accumulators over a
uniform grid, under either the physical or the tilted measure (the
caller encodes the measure in the drift pair and the shift constants).

The arithmetic here must stay bit-identical to the NumPy fallback in
``_kernel_np.py``: both use only +, -, *, /, sqrt and max in the same
order per value, so either backend (and any thread count) reproduces
the same doubles. Keep the two files in lockstep when editing.
"""

from libc.math cimport sqrt

import numpy as np


def run_chunk(
    int kind,
    double[:, :, ::1] normals,
    double dt,
    double[::1] y0,
    double speed,
    double level,
    double sigma_y,
    double rho,
    double r,
    double mu_s,
    double sigma,
    double[::1] p0,
    double[::1] p1,
    double az0, double az1, double bz0, double bz1,
    double ad0, double ad1, double bd0, double bd1,
    double shy0, double shy1, double shw0, double shw1,
):
    """Advance a chunk of paths; see ``_kernel_np.run_chunk`` for the contract."""
    cdef Py_ssize_t n_steps = normals.shape[0]
    cdef Py_ssize_t lanes = normals.shape[2]
    out_y = np.empty(lanes, dtype=np.float64)
    out_lx = np.zeros(lanes, dtype=np.float64)
    out_lz = np.zeros(lanes, dtype=np.float64)
    out_ld = np.zeros(lanes, dtype=np.float64)
    out_y[:] = y0
    cdef double[::1] ys = out_y
    cdef double[::1] lx = out_lx
    cdef double[::1] lz = out_lz
    cdef double[::1] ld = out_ld

    cdef double sdt = sqrt(dt)
    cdef double srho = sqrt(1.0 - rho * rho)
    cdef double sig2_const = sigma * sigma
    cdef Py_ssize_t k, j
    cdef double p0k, p1k, zw, zy, y, y_eff, s_env, mu_y, sig_y, sig2_y
    cdef double shy, shw, dwy, dw, pi, az, bz, ad, bd

    with nogil:
        for k in range(n_steps):
            p0k = p0[k]
            p1k = p1[k]
            for j in range(lanes):
                zw = normals[k, 0, j] * sdt
                zy = rho * zw + srho * (normals[k, 1, j] * sdt)
                y = ys[j]
                if kind == 1:
                    y_eff = max(y, 0.0)
                    s_env = sqrt(y_eff)
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
                lx[j] = lx[j] + (
                    (r + pi * mu_y - 0.5 * (pi * pi) * sig2_y) * dt
                    + (pi * sig_y) * dw
                )
                az = (az0 + az1 * y_eff) * s_env
                bz = (bz0 + bz1 * y_eff) * s_env
                lz[j] = lz[j] + (
                    -r * dt
                    + az * dwy
                    + bz * dw
                    - 0.5 * (az * az + 2.0 * rho * (az * bz) + bz * bz) * dt
                )
                ad = (ad0 + ad1 * y_eff) * s_env
                bd = (bd0 + bd1 * y_eff) * s_env
                ld[j] = ld[j] + (
                    ad * dwy
                    + bd * dw
                    - 0.5 * (ad * ad + 2.0 * rho * (ad * bd) + bd * bd) * dt
                )
                if kind == 1:
                    y = y + speed * (level - y_eff) * dt + (sigma_y * s_env) * zy
                else:
                    y = y + speed * (level - y) * dt + sigma_y * zy
                ys[j] = y

    return out_y, out_lx, out_lz, out_ld
