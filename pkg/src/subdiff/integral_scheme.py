"""Product-integration scheme for the integral form of the remainder problem.

The remainder v of the split u = z t^a + phi + v satisfies

    v(x,t) = v(x,0) + 1/Gamma(a) * int_0^t (t-s)^(a-1) [f(x,s) - Lv(x,s)] ds
             + G(x,t),

and the scheme replaces f - Lv on each mesh panel [t_{k-1}, t_k] by its
linear interpolant, integrating kernel times hat function exactly.  The
resulting weights (k = 1..j)

    a(j,k) = [dt_k A^a - (A^(a+1) - B^(a+1))/(a+1)] / (Gamma(a+1) dt_k)
    b(j,k) = [-dt_k B^a + (A^(a+1) - B^(a+1))/(a+1)] / (Gamma(a+1) dt_k)

with A = t_j - t_{k-1}, B = t_j - t_k multiply the history values at
t_{k-1} and t_k.  Only the k = j term is implicit: each step solves the
tridiagonal system (I + b(j,j) L^M) V^j = known history, after which the
approximation of u is reconstructed as U = z t^a + phi + V.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import backend
from ._kernels_numpy import STABLE_RATIO, BASE_CLAMP
from .errors import DomainError, InvalidArgumentError, SolverError
from .meshes import SpatialMesh, TemporalMesh
from .operators import DiscreteOperator, apply_discrete_operator, solve_shifted
from .problems import DecomposedProblem, G_row
from .special import gamma_fn


def _bases(j: int, k: int, mesh: TemporalMesh):
    if not 1 <= k <= j <= mesh.N:
        raise InvalidArgumentError(f"need 1 <= k <= j <= N, got j={j}, k={k}, N={mesh.N}")
    t = mesh.nodes
    A = t[j] - t[k - 1]
    B = t[j] - t[k]
    if B < 0.0:
        if B < BASE_CLAMP:
            raise DomainError(f"negative kernel base {B} at (j={j}, k={k}): mesh corrupted")
        B = 0.0
    return A, B, t[k] - t[k - 1]


def _stable_pow_diff(A: float, B: float, dt: float, q: float) -> float:
    if B <= 0.0:
        return A**q
    r = dt / B
    if r < STABLE_RATIO:
        return B**q * math.expm1(q * math.log1p(r))
    return A**q - B**q


def weight_a(j: int, k: int, mesh: TemporalMesh, alpha: float) -> float:
    """Weight of the history value at t_{k-1} in step j."""
    A, B, dt = _bases(j, k, mesh)
    if B == 0.0:
        return alpha * A**alpha / gamma_fn(alpha + 2.0)
    q = alpha + 1.0
    D = _stable_pow_diff(A, B, dt, q) / (q * dt)
    return (A**alpha - D) / gamma_fn(q)


def weight_b(j: int, k: int, mesh: TemporalMesh, alpha: float) -> float:
    """Weight of the history value at t_k in step j; b(j,j) = dt_j^a/Gamma(a+2)."""
    A, B, dt = _bases(j, k, mesh)
    if B == 0.0:
        return A**alpha / gamma_fn(alpha + 2.0)
    q = alpha + 1.0
    D = _stable_pow_diff(A, B, dt, q) / (q * dt)
    return (D - B**alpha) / gamma_fn(q)


@dataclass(frozen=True)
class QuadWeights:
    """Quadrature weight table for a fixed temporal mesh and order."""

    mesh: TemporalMesh
    alpha: float

    def a(self, j: int, k: int) -> float:
        return weight_a(j, k, self.mesh, self.alpha)

    def b(self, j: int, k: int) -> float:
        return weight_b(j, k, self.mesh, self.alpha)


@dataclass
class SolutionGrid:
    """Space-major (M+1) x (N+1) grids of the remainder V and solution U.

    V is None for schemes that compute U directly without the split.
    """

    V: Optional[np.ndarray]
    U: np.ndarray
    tmesh: TemporalMesh
    smesh: SpatialMesh


@dataclass
class RhsCache:
    """Sampled sources and per-level history rows f^k - L^M V^k (time-major)."""

    f_grid: np.ndarray
    G_grid: np.ndarray
    P: np.ndarray


def sample_grids(decomposed: DecomposedProblem, tmesh: TemporalMesh):
    """Sample f and G on the full space-time grid, one time level per row."""
    x = decomposed.spatial.nodes
    N = tmesh.N
    f_grid = np.empty((N + 1, x.shape[0]))
    G_grid = np.empty((N + 1, x.shape[0]))
    for j, tj in enumerate(tmesh.nodes):
        f_grid[j] = decomposed.spec.f(x, float(tj))
        G_grid[j] = G_row(decomposed, float(tj))
    return f_grid, G_grid


def make_rhs_cache(decomposed: DecomposedProblem, tmesh: TemporalMesh) -> RhsCache:
    f_grid, G_grid = sample_grids(decomposed, tmesh)
    P = np.zeros_like(f_grid)
    P[0] = f_grid[0]  # L^M V^0 = 0
    return RhsCache(f_grid=f_grid, G_grid=G_grid, P=P)


def new_solution_grid(tmesh: TemporalMesh, smesh: SpatialMesh) -> SolutionGrid:
    shape = (smesh.M + 1, tmesh.N + 1)
    return SolutionGrid(V=np.zeros(shape), U=np.zeros(shape), tmesh=tmesh, smesh=smesh)


def step(
    j: int,
    state: SolutionGrid,
    weights: QuadWeights,
    op: DiscreteOperator,
    cache: RhsCache,
) -> SolutionGrid:
    """Advance the scheme to level j (reference path, one tridiagonal solve).

    Levels 0..j-1 of state.V and cache.P must already be filled.
    """
    b_jj = weights.b(j, j)
    rhs = cache.G_grid[j] + b_jj * cache.f_grid[j] + state.V[:, 0]
    for k in range(1, j + 1):
        rhs = rhs + weights.a(j, k) * cache.P[k - 1]
        if k < j:
            rhs = rhs + weights.b(j, k) * cache.P[k]
    rhs[0] = 0.0
    rhs[-1] = 0.0
    row = solve_shifted(op, 1.0, b_jj, rhs)
    state.V[:, j] = row
    cache.P[j] = cache.f_grid[j] - apply_discrete_operator(op, row)
    return state


def reconstruct_u(
    V_time_major: np.ndarray, decomposed: DecomposedProblem, tmesh: TemporalMesh
) -> np.ndarray:
    """U_i^j = z(x_i) t_j^a + phi(x_i) + V_i^j, space-major output."""
    spec = decomposed.spec
    x = decomposed.spatial.nodes
    ta = tmesh.nodes**spec.alpha
    phi_vals = np.asarray(spec.phi(x), dtype=float)
    return decomposed.z_vals[:, None] * ta[None, :] + phi_vals[:, None] + V_time_major.T


def _check_consistent(decomposed: DecomposedProblem, tmesh: TemporalMesh, smesh: SpatialMesh):
    spec = decomposed.spec
    if abs(tmesh.T - spec.T) > 1e-12 * max(1.0, spec.T):
        raise InvalidArgumentError(f"temporal mesh horizon {tmesh.T} != problem T {spec.T}")
    if abs(smesh.l - spec.l) > 1e-12 * max(1.0, spec.l):
        raise InvalidArgumentError(f"spatial mesh length {smesh.l} != problem l {spec.l}")
    if decomposed.spatial is not smesh and not np.array_equal(decomposed.spatial.nodes, smesh.nodes):
        raise InvalidArgumentError("decomposition was sampled on a different spatial mesh")


def solve(
    spec,
    decomposed: DecomposedProblem,
    tmesh: TemporalMesh,
    smesh: SpatialMesh,
) -> SolutionGrid:
    """Run all N steps on the active backend and reconstruct U.

    History sums make the total work O(N^2 M).
    """
    _check_consistent(decomposed, tmesh, smesh)
    f_grid, G_grid = sample_grids(decomposed, tmesh)
    kern = backend.kernels()
    V_tm = kern.solve_product_integration(
        np.ascontiguousarray(tmesh.nodes),
        np.ascontiguousarray(f_grid),
        np.ascontiguousarray(G_grid),
        float(spec.p),
        np.ascontiguousarray(decomposed.c_vals),
        float(smesh.h),
        float(spec.alpha),
    )
    if not np.all(np.isfinite(V_tm)):
        raise SolverError("non-finite values in the computed remainder grid")
    U = reconstruct_u(V_tm, decomposed, tmesh)
    return SolutionGrid(V=np.ascontiguousarray(V_tm.T), U=U, tmesh=tmesh, smesh=smesh)
