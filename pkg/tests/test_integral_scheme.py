import math

import numpy as np
import pytest

from subdiff import backend
from subdiff.errors import SolverError
from subdiff.harness import max_error
from subdiff.integral_scheme import (
    QuadWeights,
    make_rhs_cache,
    new_solution_grid,
    sample_grids,
    solve,
    step,
)
from subdiff.meshes import build_spatial_mesh, build_three_piece_mesh
from subdiff.operators import DiscreteOperator, apply_discrete_operator, solve_shifted
from subdiff.problems import ProblemSpec, decompose, example_problem


def _zeros(x):
    return np.zeros_like(np.asarray(x, dtype=float))


def zero_problem(alpha=0.5):
    return ProblemSpec(alpha=alpha, p=1.0, c=_zeros, f=lambda x, t: _zeros(x),
                       f0=_zeros, phi=_zeros, phi_dd=_zeros, l=1.0, T=1.0)


def make_operator(M, p=1.0, c=None, l=np.pi):
    smesh = build_spatial_mesh(l, M)
    c_vals = np.zeros(M + 1) if c is None else c
    return DiscreteOperator(p=p, c_vals=c_vals, h=smesh.h, M=M), smesh


def test_apply_operator_zero_and_linear():
    op, smesh = make_operator(8, l=1.0)
    assert np.all(apply_discrete_operator(op, np.zeros(9)) == 0.0)
    row = 2.5 * smesh.nodes
    out = apply_discrete_operator(op, row)
    assert np.allclose(out[1:-1], 0.0, atol=1e-12)
    assert out[0] == 0.0 and out[-1] == 0.0


def test_apply_operator_sin_second_order():
    errs = []
    for M in (16, 32, 64):
        op, smesh = make_operator(M)
        out = apply_discrete_operator(op, np.sin(smesh.nodes))
        errs.append(np.max(np.abs(out[1:-1] - np.sin(smesh.nodes[1:-1]))))
    assert math.log2(errs[0] / errs[1]) == pytest.approx(2.0, abs=0.1)
    assert math.log2(errs[1] / errs[2]) == pytest.approx(2.0, abs=0.1)


def test_solve_shifted_matches_dense_oracle():
    rng = np.random.default_rng(3)
    for M in (4, 8, 16):
        c_vals = rng.uniform(0.0, 2.0, size=M + 1)
        op, _ = make_operator(M, p=0.9, c=c_vals, l=1.0)
        lam = op.p / op.h**2
        n = M - 1
        for beta in (1e-4, 0.2, 3.0):
            A = (np.diag(1.0 + beta * (2.0 * lam + c_vals[1:-1]))
                 + np.diag([-beta * lam] * (n - 1), 1)
                 + np.diag([-beta * lam] * (n - 1), -1))
            w = rng.uniform(-1.0, 1.0, size=M + 1)
            w[0] = w[-1] = 0.0
            y = solve_shifted(op, 1.0, beta, w)
            ref = np.linalg.solve(A, w[1:-1])
            assert np.allclose(y[1:-1], ref, rtol=1e-12, atol=1e-15)
            assert y[0] == 0.0 and y[-1] == 0.0


def test_solve_shifted_rejects_bad_shift():
    op, _ = make_operator(8, l=1.0)
    with pytest.raises(SolverError):
        solve_shifted(op, 1.0, -0.5, np.zeros(9))


def test_discrete_maximum_principle():
    rng = np.random.default_rng(19)
    M = 32
    op, _ = make_operator(M, c=rng.uniform(0.0, 1.0, size=M + 1), l=1.0)
    for beta in (1e-5, 1e-2, 1.0, 50.0):
        for _ in range(25):
            w = rng.uniform(-1.0, 1.0, size=M + 1)
            w[0] = w[-1] = 0.0
            y = solve_shifted(op, 1.0, beta, w)
            assert np.max(np.abs(y)) <= np.max(np.abs(w)) + 1e-14


def test_zero_data_propagates_zero():
    spec = zero_problem()
    smesh = build_spatial_mesh(spec.l, 8)
    tmesh = build_three_piece_mesh(spec.alpha, spec.T, 8)
    dec = decompose(spec, smesh)
    grid = solve(spec, dec, tmesh, smesh)
    assert np.all(grid.V == 0.0)
    assert np.all(grid.U == 0.0)


def test_solution_at_t0_is_initial_condition():
    spec, _ = example_problem(0.4)
    smesh = build_spatial_mesh(spec.l, 16)
    tmesh = build_three_piece_mesh(0.4, spec.T, 8)
    grid = solve(spec, decompose(spec, smesh), tmesh, smesh)
    assert np.array_equal(grid.U[:, 0], spec.phi(smesh.nodes))
    assert np.all(grid.V[:, 0] == 0.0)
    assert np.all(grid.V[0, :] == 0.0) and np.all(grid.V[-1, :] == 0.0)


def test_first_step_matches_dense_oracle():
    # j=1 on the coarse example: one 3x3 system solved two independent ways
    alpha = 0.5
    spec, _ = example_problem(alpha)
    M = N = 4
    smesh = build_spatial_mesh(spec.l, M)
    tmesh = build_three_piece_mesh(alpha, spec.T, N)
    dec = decompose(spec, smesh)
    f_grid, G_grid = sample_grids(dec, tmesh)
    w = QuadWeights(mesh=tmesh, alpha=alpha)
    b11 = w.b(1, 1)
    rhs = G_grid[1] + b11 * f_grid[1] + w.a(1, 1) * f_grid[0]
    lam = spec.p / smesh.h**2
    A = (np.diag(1.0 + b11 * 2.0 * lam * np.ones(M - 1))
         + np.diag([-b11 * lam] * (M - 2), 1)
         + np.diag([-b11 * lam] * (M - 2), -1))
    v1_dense = np.linalg.solve(A, rhs[1:-1])
    grid = solve(spec, dec, tmesh, smesh)
    assert np.allclose(grid.V[1:-1, 1], v1_dense, rtol=1e-12)


def test_step_sequence_matches_fused_solve():
    alpha = 0.6
    spec, _ = example_problem(alpha)
    M, N = 12, 10
    smesh = build_spatial_mesh(spec.l, M)
    tmesh = build_three_piece_mesh(alpha, spec.T, N)
    dec = decompose(spec, smesh)
    op = DiscreteOperator(p=spec.p, c_vals=dec.c_vals, h=smesh.h, M=M)
    weights = QuadWeights(mesh=tmesh, alpha=alpha)
    cache = make_rhs_cache(dec, tmesh)
    state = new_solution_grid(tmesh, smesh)
    for j in range(1, N + 1):
        state = step(j, state, weights, op, cache)
    fused = solve(spec, dec, tmesh, smesh)
    assert np.allclose(state.V, fused.V, rtol=1e-11, atol=1e-14)


def test_backends_agree():
    if not backend.HAS_NUMBA:
        pytest.skip("numba unavailable")
    alpha = 0.3
    spec, _ = example_problem(alpha)
    smesh = build_spatial_mesh(spec.l, 24)
    tmesh = build_three_piece_mesh(alpha, spec.T, 24)
    dec = decompose(spec, smesh)
    prev = backend.get_backend()
    try:
        backend.set_backend("numpy")
        g_np = solve(spec, dec, tmesh, smesh)
        backend.set_backend("numba")
        g_nb = solve(spec, dec, tmesh, smesh)
    finally:
        backend.set_backend(prev)
    assert np.allclose(g_np.V, g_nb.V, rtol=1e-12, atol=1e-15)
    assert np.allclose(g_np.U, g_nb.U, rtol=1e-12, atol=1e-15)


@pytest.mark.parametrize("alpha,MN,expected", [
    (0.6, 64, 2.7573e-4),
    (0.2, 64, 1.0185e-3),
    (0.8, 128, 4.4962e-5),
])
def test_reference_table_spot_values(alpha, MN, expected):
    spec, exact = example_problem(alpha)
    smesh = build_spatial_mesh(spec.l, MN)
    tmesh = build_three_piece_mesh(alpha, spec.T, MN)
    grid = solve(spec, decompose(spec, smesh), tmesh, smesh)
    assert max_error(grid, exact) == pytest.approx(expected, rel=5e-3)


def test_error_quarters_under_doubling():
    alpha = 0.4
    spec, exact = example_problem(alpha)
    errs = []
    for MN in (64, 128):
        smesh = build_spatial_mesh(spec.l, MN)
        tmesh = build_three_piece_mesh(alpha, spec.T, MN)
        errs.append(max_error(solve(spec, decompose(spec, smesh), tmesh, smesh), exact))
    assert math.log2(errs[0] / errs[1]) == pytest.approx(2.0, abs=0.1)
