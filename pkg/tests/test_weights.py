"""Product-integration weights: closed forms vs quadrature, exactness sums."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from subdiff._kernels_numpy import l1_rows, weight_rows
from subdiff.errors import DomainError, InvalidArgumentError
from subdiff.integral_scheme import QuadWeights, weight_a, weight_b
from subdiff.l1 import l1_coefficients
from subdiff.meshes import TemporalMesh, build_power_mesh, build_three_piece_mesh
from subdiff.special import gamma_fn


def quad_weight(t, j, k, alpha, which):
    """Adaptive quadrature of (1/Gamma(a)) int (t_j-s)^(a-1) hat(s) ds."""
    lo, hi = t[k - 1], t[k]
    dt = hi - lo
    hat = (lambda s: (hi - s) / dt) if which == "a" else (lambda s: (s - lo) / dt)
    if k == j:
        val, _ = quad(hat, lo, hi, weight="alg", wvar=(0.0, alpha - 1.0),
                      epsabs=1e-13, epsrel=1e-12, limit=400)
    else:
        val, _ = quad(lambda s: (t[j] - s) ** (alpha - 1.0) * hat(s), lo, hi,
                      epsabs=1e-13, epsrel=1e-12, limit=400)
    return val / gamma_fn(alpha)


def quad_l1(t, j, k, alpha):
    lo, hi = t[k - 1], t[k]
    if k == j:
        val, _ = quad(lambda s: 1.0, lo, hi, weight="alg", wvar=(0.0, -alpha),
                      epsabs=1e-13, epsrel=1e-12, limit=400)
    else:
        val, _ = quad(lambda s: (t[j] - s) ** (-alpha), lo, hi,
                      epsabs=1e-13, epsrel=1e-12, limit=400)
    return val / (gamma_fn(1.0 - alpha) * (hi - lo))


def test_first_step_weight_closed_form():
    for alpha in (0.2, 0.5, 0.8):
        mesh = build_three_piece_mesh(alpha, 1.0, 4)
        t1 = mesh.nodes[1]
        assert weight_a(1, 1, mesh, alpha) == pytest.approx(
            alpha * t1**alpha / gamma_fn(alpha + 2.0), rel=1e-14)


def test_diagonal_weight_closed_form_exact():
    for alpha in (0.3, 0.6):
        mesh = build_three_piece_mesh(alpha, 1.0, 8)
        for j in range(1, 9):
            dt = mesh.steps[j - 1]
            assert weight_b(j, j, mesh, alpha) == dt**alpha / gamma_fn(alpha + 2.0)


def test_trapezoid_limit_at_alpha_near_one():
    # kernel -> 1, weights -> trapezoid halves: a(j,j)+b(j,j) = dt_j
    alpha = 1.0 - 1e-12
    mesh = build_power_mesh(1.0, 8, 1.0, alpha)
    for j in (1, 4, 8):
        s = weight_a(j, j, mesh, alpha) + weight_b(j, j, mesh, alpha)
        assert s == pytest.approx(mesh.steps[j - 1], abs=1e-6)


@pytest.mark.parametrize("alpha", [0.2, 0.5, 0.8])
@pytest.mark.parametrize("N", [4, 8])
def test_weights_match_quadrature_oracle(alpha, N):
    mesh = build_three_piece_mesh(alpha, 1.0, N)
    for j in range(1, N + 1):
        for k in range(1, j + 1):
            assert weight_a(j, k, mesh, alpha) == pytest.approx(
                quad_weight(mesh.nodes, j, k, alpha, "a"), abs=1e-10)
            assert weight_b(j, k, mesh, alpha) == pytest.approx(
                quad_weight(mesh.nodes, j, k, alpha, "b"), abs=1e-10)


def test_specific_weight_against_oracle():
    # (j=2, k=1) on the alpha=1/2, N=4 mesh
    mesh = build_three_piece_mesh(0.5, 1.0, 4)
    assert weight_a(2, 1, mesh, 0.5) == pytest.approx(
        quad_weight(mesh.nodes, 2, 1, 0.5, "a"), abs=1e-10)


@pytest.mark.parametrize("alpha,r", [(0.2, 9.0), (0.5, 3.0), (0.8, 1.5), (0.8, 0.75)])
@pytest.mark.parametrize("N", [4, 8])
def test_l1_coefficients_match_quadrature_oracle(alpha, r, N):
    mesh = build_power_mesh(1.0, N, r, alpha)
    for j in range(1, N + 1):
        d = l1_coefficients(j, mesh, alpha)
        for k in range(1, j + 1):
            assert d[k - 1] == pytest.approx(quad_l1(mesh.nodes, j, k, alpha), abs=1e-10)


def test_l1_diagonal_and_euler_limit():
    alpha = 0.4
    mesh = build_power_mesh(1.0, 8, 2.0, alpha)
    for j in (1, 5, 8):
        d = l1_coefficients(j, mesh, alpha)
        assert d[-1] == pytest.approx(
            mesh.steps[j - 1] ** (-alpha) / gamma_fn(2.0 - alpha), rel=1e-15)
    # alpha -> 1 on a uniform mesh: d(j,j) -> 1/dt (backward Euler)
    near_one = 1.0 - 1e-10
    uniform = build_power_mesh(1.0, 8, 1.0, near_one)
    d = l1_coefficients(4, uniform, near_one)
    assert d[-1] == pytest.approx(8.0, rel=1e-6)


def test_l1_constant_annihilation():
    mesh = build_power_mesh(1.0, 8, 3.0, 0.5)
    d = l1_coefficients(8, mesh, 0.5)
    const = np.full(9, 3.7)
    assert float(d @ (const[1:] - const[:-1])) == 0.0


@pytest.mark.parametrize("alpha", [0.2, 0.5, 0.8])
@pytest.mark.parametrize("N", [8, 64, 512])
def test_weight_sum_exactness(alpha, N):
    mesh = build_three_piece_mesh(alpha, 1.0, N)
    t = mesh.nodes
    for j in range(1, N + 1):
        a, b = weight_rows(t, j, alpha)
        ref_c = t[j] ** alpha / gamma_fn(alpha + 1.0)
        assert abs(a.sum() + b.sum() - ref_c) <= 1e-12 * ref_c
        ref_l = t[j] ** (alpha + 1.0) / gamma_fn(alpha + 2.0)
        assert abs(a @ t[:j] + b @ t[1 : j + 1] - ref_l) <= 1e-12 * ref_l


@pytest.mark.parametrize("alpha", [0.2, 0.5, 0.8])
@pytest.mark.parametrize("N", [4, 8, 16])
def test_weight_positivity(alpha, N):
    # beyond N ~ 16 the smallest true weights at small alpha drop below the
    # float64 evaluation floor, so strict positivity is asserted here only
    mesh = build_three_piece_mesh(alpha, 1.0, N)
    for j in range(1, N + 1):
        a, b = weight_rows(mesh.nodes, j, alpha)
        assert np.all(a > 0.0)
        assert np.all(b > 0.0)


def test_l1_positivity_large_meshes():
    for alpha, r in ((0.2, 9.0), (0.5, 3.0), (0.8, 1.5)):
        mesh = build_power_mesh(1.0, 256, r, alpha)
        for j in (1, 17, 128, 256):
            assert np.all(l1_coefficients(j, mesh, alpha) > 0.0)


def test_scalar_and_row_weights_agree():
    alpha = 0.45
    mesh = build_three_piece_mesh(alpha, 1.0, 12)
    for j in (1, 5, 12):
        a, b = weight_rows(mesh.nodes, j, alpha)
        w = QuadWeights(mesh=mesh, alpha=alpha)
        # agreement between the scalar and vectorized paths is bounded in
        # absolute terms (~eps * t_j^alpha); near-cancelling weights may
        # differ by more in relative terms
        for k in range(1, j + 1):
            assert w.a(j, k) == pytest.approx(a[k - 1], rel=1e-12, abs=1e-16)
            assert w.b(j, k) == pytest.approx(b[k - 1], rel=1e-12, abs=1e-16)


def test_weight_index_validation():
    mesh = build_three_piece_mesh(0.5, 1.0, 8)
    with pytest.raises(InvalidArgumentError):
        weight_a(0, 1, mesh, 0.5)
    with pytest.raises(InvalidArgumentError):
        weight_b(4, 5, mesh, 0.5)
    with pytest.raises(InvalidArgumentError):
        l1_coefficients(9, mesh, 0.5)


def test_corrupted_mesh_detected():
    nodes = np.array([0.0, 0.2, 0.5, 1.0])
    mesh = TemporalMesh(nodes=nodes, alpha=0.5, T=1.0, kind="power", r=1.0)
    # forge a corrupted copy with a decreasing interior node
    object.__setattr__(mesh, "nodes", np.array([0.0, 0.5, 0.2, 1.0]))
    with pytest.raises(DomainError):
        weight_a(2, 1, mesh, 0.5)
