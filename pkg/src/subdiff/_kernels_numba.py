"""Numba-compiled twins of the hot time-stepping loops.

Same algorithms and branch structure as `_kernels_numpy`, written as plain
nested loops so the JIT can fuse the weight evaluation with the history
accumulation and keep each step allocation-free.  History sums run in
ascending k, so results are reproducible and agree with the numpy path up
to summation-order rounding.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

STABLE_RATIO = 1.0
BASE_CLAMP = -1e-15


@njit(cache=True, nogil=True, inline="always")
def _pow_diff(A, B, dt, q):
    # A**q - B**q with A = B + dt; expm1 form when the direct difference cancels
    if B <= 0.0:
        return A**q
    r = dt / B
    if r < STABLE_RATIO:
        return B**q * math.expm1(q * math.log1p(r))
    return A**q - B**q


@njit(cache=True, nogil=True, inline="always")
def _clamped_base(B):
    if B < 0.0:
        if B < BASE_CLAMP:
            raise ValueError("negative kernel base: temporal mesh is corrupted")
        return 0.0
    return B


@njit(cache=True, nogil=True, inline="always")
def _thomas_shifted(sigma, beta, lam, c_vals, rhs, out, cp, dp):
    n = rhs.shape[0] - 2
    off = -beta * lam
    d0 = sigma + beta * (2.0 * lam + c_vals[1])
    cp[0] = off / d0
    dp[0] = rhs[1] / d0
    for i in range(1, n):
        m = sigma + beta * (2.0 * lam + c_vals[i + 1]) - off * cp[i - 1]
        cp[i] = off / m
        dp[i] = (rhs[i + 1] - off * dp[i - 1]) / m
    out[0] = 0.0
    out[rhs.shape[0] - 1] = 0.0
    out[n] = dp[n - 1]
    for i in range(n - 2, -1, -1):
        out[i + 1] = dp[i] - cp[i] * out[i + 2]


@njit(cache=True, nogil=True)
def solve_product_integration(t, f_grid, G_grid, p, c_vals, h, alpha):
    N = t.shape[0] - 1
    Mp1 = f_grid.shape[1]
    q = alpha + 1.0
    inv_g1 = 1.0 / math.gamma(q)
    inv_g2 = 1.0 / math.gamma(alpha + 2.0)
    lam = p / (h * h)

    V = np.zeros((N + 1, Mp1))
    P = np.empty((N + 1, Mp1))
    for i in range(Mp1):
        P[0, i] = f_grid[0, i]
    rhs = np.empty(Mp1)
    cp = np.empty(Mp1 - 2)
    dp = np.empty(Mp1 - 2)

    for j in range(1, N + 1):
        tj = t[j]
        b_jj = (tj - t[j - 1]) ** alpha * inv_g2
        for i in range(Mp1):
            rhs[i] = G_grid[j, i] + b_jj * f_grid[j, i]
        for k in range(1, j + 1):
            A = tj - t[k - 1]
            B = _clamped_base(tj - t[k])
            dtk = t[k] - t[k - 1]
            if B == 0.0:
                # diagonal panel: b-part is implicit (in the matrix / f^j term)
                a_w = alpha * A**alpha * inv_g2
                for i in range(Mp1):
                    rhs[i] += a_w * P[k - 1, i]
            else:
                D = _pow_diff(A, B, dtk, q) / (q * dtk)
                a_w = (A**alpha - D) * inv_g1
                b_w = (D - B**alpha) * inv_g1
                for i in range(Mp1):
                    rhs[i] += a_w * P[k - 1, i] + b_w * P[k, i]
        rhs[0] = 0.0
        rhs[Mp1 - 1] = 0.0
        _thomas_shifted(1.0, b_jj, lam, c_vals, rhs, V[j], cp, dp)
        P[j, 0] = f_grid[j, 0]
        P[j, Mp1 - 1] = f_grid[j, Mp1 - 1]
        for i in range(1, Mp1 - 1):
            P[j, i] = f_grid[j, i] - (
                -lam * (V[j, i + 1] - 2.0 * V[j, i] + V[j, i - 1]) + c_vals[i] * V[j, i]
            )
    return V


@njit(cache=True, nogil=True)
def solve_l1(t, rhs_grid, u0, p, c_vals, h, alpha):
    N = t.shape[0] - 1
    Mp1 = rhs_grid.shape[1]
    q = 1.0 - alpha
    inv_g = 1.0 / math.gamma(2.0 - alpha)
    lam = p / (h * h)

    U = np.zeros((N + 1, Mp1))
    for i in range(Mp1):
        U[0, i] = u0[i]
    dU = np.zeros((N + 1, Mp1))
    rhs = np.empty(Mp1)
    cp = np.empty(Mp1 - 2)
    dp = np.empty(Mp1 - 2)

    for j in range(1, N + 1):
        tj = t[j]
        d_jj = (tj - t[j - 1]) ** (-alpha) * inv_g
        for i in range(Mp1):
            rhs[i] = rhs_grid[j, i] + d_jj * U[j - 1, i]
        for k in range(1, j):
            A = tj - t[k - 1]
            B = _clamped_base(tj - t[k])
            dtk = t[k] - t[k - 1]
            # direct power difference on purpose: the published baseline
            # tables carry its round-off regime (see _kernels_numpy)
            d = (A**q - B**q) / dtk * inv_g
            for i in range(Mp1):
                rhs[i] -= d * dU[k, i]
        rhs[0] = 0.0
        rhs[Mp1 - 1] = 0.0
        _thomas_shifted(d_jj, 1.0, lam, c_vals, rhs, U[j], cp, dp)
        for i in range(Mp1):
            dU[j, i] = U[j, i] - U[j - 1, i]
    return U
