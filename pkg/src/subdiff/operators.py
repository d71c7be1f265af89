"""Discrete spatial operator and the tridiagonal step solver.

L^M is the standard second-order discretization of -p u_xx + c(x) u on a
uniform mesh.  Every time step of every scheme solves a system of the form
(sigma I + beta L^M) y = w on the interior nodes with Dirichlet zeros at
the ends; for sigma, beta > 0 and c >= 0 the matrix is strictly
diagonally dominant, so plain Thomas elimination without pivoting is safe.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SolverError


@dataclass(frozen=True)
class DiscreteOperator:
    """Interior-node stencil L^M y_i = -p (y_{i+1} - 2 y_i + y_{i-1})/h^2 + c_i y_i."""

    p: float
    c_vals: np.ndarray
    h: float
    M: int


def apply_discrete_operator(op: DiscreteOperator, row: np.ndarray) -> np.ndarray:
    """Apply L^M to a row of nodal values; boundary entries are set to 0."""
    lam = op.p / (op.h * op.h)
    out = np.zeros_like(row)
    out[1:-1] = -lam * (row[2:] - 2.0 * row[1:-1] + row[:-2]) + op.c_vals[1:-1] * row[1:-1]
    return out


def thomas_shifted(sigma, beta, lam, c_vals, rhs, out):
    """Solve (sigma I + beta L^M) out = rhs on interior nodes, zero ends.

    The tridiagonal system has diagonal sigma + beta*(2*lam + c_i) and
    constant off-diagonals -beta*lam, lam = p/h^2.  Forward elimination of
    the subdiagonal followed by back substitution; writes into ``out``.
    """
    n = rhs.shape[0] - 2
    off = -beta * lam
    diag = sigma + beta * (2.0 * lam + c_vals[1:-1])
    cp = np.empty(n)
    dp = np.empty(n)
    cp[0] = off / diag[0]
    dp[0] = rhs[1] / diag[0]
    for i in range(1, n):
        m = diag[i] - off * cp[i - 1]
        cp[i] = off / m
        dp[i] = (rhs[i + 1] - off * dp[i - 1]) / m
    out[0] = 0.0
    out[-1] = 0.0
    out[n] = dp[n - 1]
    for i in range(n - 2, -1, -1):
        out[i + 1] = dp[i] - cp[i] * out[i + 2]
    return out


def solve_shifted(op: DiscreteOperator, sigma: float, beta: float, rhs: np.ndarray) -> np.ndarray:
    """Checked front end for thomas_shifted; returns a fresh row."""
    lam = op.p / (op.h * op.h)
    # strict diagonal dominance: sigma + beta*c_i > 0 with beta*lam > 0
    if sigma <= 0.0 or beta <= 0.0 or op.p <= 0.0:
        raise SolverError(
            f"step matrix is not strictly diagonally dominant "
            f"(sigma={sigma}, beta={beta}, p={op.p})"
        )
    if np.any(op.c_vals < 0.0):
        raise SolverError("step matrix requires c(x) >= 0")
    out = np.empty_like(rhs)
    thomas_shifted(sigma, beta, lam, op.c_vals, rhs, out)
    return out
