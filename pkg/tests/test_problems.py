import math

import numpy as np
import pytest

from subdiff.errors import InvalidArgumentError, ProviderMismatchError
from subdiff.meshes import build_spatial_mesh
from subdiff.problems import (
    G_term,
    ProblemSpec,
    compute_z,
    compute_z_dd,
    custom_problem,
    decompose,
    example_problem,
    g_term,
)
from subdiff.special import gamma_fn


def _zeros(x):
    return np.zeros_like(np.asarray(x, dtype=float))


def make_plain_spec(alpha=0.5, phi=None, phi_dd=None, f0=None, c=None, z_provider=None,
                    z_dd_provider=None, l=1.0):
    phi = phi or _zeros
    return ProblemSpec(
        alpha=alpha, p=1.0,
        c=c or _zeros,
        f=lambda x, t: _zeros(x),
        f0=f0 or _zeros,
        phi=phi, phi_dd=phi_dd or _zeros,
        l=l, T=1.0,
        z_provider=z_provider, z_dd_provider=z_dd_provider,
    )


def test_compatibility_checked_at_corners():
    with pytest.raises(InvalidArgumentError):
        make_plain_spec(phi=lambda x: np.cos(x))  # phi(0) = 1
    with pytest.raises(InvalidArgumentError):
        make_plain_spec(f0=lambda x: np.asarray(x) * 0.0 + 1e-6)


def test_reaction_coefficient_must_be_nonnegative():
    spec = make_plain_spec(c=lambda x: -np.ones_like(np.asarray(x, dtype=float)))
    with pytest.raises(InvalidArgumentError):
        decompose(spec, build_spatial_mesh(1.0, 8))


def test_compute_z_example_closed_form():
    alpha = 0.4
    spec, _ = example_problem(alpha)
    smesh = build_spatial_mesh(spec.l, 32)
    z = compute_z(spec, smesh)
    expected = -np.sin(smesh.nodes) / gamma_fn(alpha + 1.0)
    assert np.allclose(z, expected, atol=1e-14)
    assert abs(z[0]) <= 1e-10 and abs(z[-1]) <= 1e-10


def test_compute_z_zero_data():
    spec = make_plain_spec()
    z = compute_z(spec, build_spatial_mesh(1.0, 8))
    assert np.all(z == 0.0)


def test_z_provider_mismatch_detected():
    spec = make_plain_spec(
        phi=lambda x: np.sin(np.pi * np.asarray(x, dtype=float)),
        phi_dd=lambda x: -np.pi**2 * np.sin(np.pi * np.asarray(x, dtype=float)),
        z_provider=lambda x: np.ones_like(np.asarray(x, dtype=float)),
    )
    with pytest.raises(ProviderMismatchError):
        compute_z(spec, build_spatial_mesh(1.0, 16))


def test_compute_z_dd_fallback_is_second_order():
    # quartic z: central differences should converge at rate 2
    l = 1.0
    z_fn = lambda x: x**2 * (l - x) ** 2
    z_dd_fn = lambda x: 2 * (l - x) ** 2 - 8 * x * (l - x) + 2 * x**2
    spec = make_plain_spec()
    errs = []
    for M in (16, 32, 64):
        smesh = build_spatial_mesh(l, M)
        approx = compute_z_dd(spec, smesh, z_fn(smesh.nodes))
        errs.append(np.max(np.abs(approx - z_dd_fn(smesh.nodes))))
    assert math.log2(errs[0] / errs[1]) == pytest.approx(2.0, abs=0.2)
    assert math.log2(errs[1] / errs[2]) == pytest.approx(2.0, abs=0.2)


def test_compute_z_dd_exact_for_linear():
    spec = make_plain_spec()
    smesh = build_spatial_mesh(1.0, 16)
    z = 3.0 * smesh.nodes
    assert np.allclose(compute_z_dd(spec, smesh, z), 0.0, atol=1e-11)


def test_g_and_G_example_simplified_forms():
    rng = np.random.default_rng(11)
    for alpha in (0.25, 0.5, 0.75):
        spec, _ = example_problem(alpha)
        smesh = build_spatial_mesh(spec.l, 40)
        dec = decompose(spec, smesh)
        for _ in range(10):
            i = int(rng.integers(0, smesh.M + 1))
            t = float(rng.uniform(0.0, spec.T))
            xi = smesh.nodes[i]
            g_simple = t**alpha * math.sin(xi) / gamma_fn(alpha + 1.0)
            G_simple = t ** (2 * alpha) * math.sin(xi) / gamma_fn(2 * alpha + 1.0)
            assert g_term(dec, i, t) == pytest.approx(g_simple, abs=1e-12)
            assert G_term(dec, i, t) == pytest.approx(G_simple, abs=1e-12)


def test_g_and_G_trivial_cases():
    spec = make_plain_spec()
    dec = decompose(spec, build_spatial_mesh(1.0, 8))
    assert g_term(dec, 3, 0.5) == 0.0
    assert G_term(dec, 3, 0.5) == 0.0
    spec2, _ = example_problem(0.5)
    dec2 = decompose(spec2, build_spatial_mesh(spec2.l, 8))
    assert g_term(dec2, 4, 0.0) == pytest.approx(0.0, abs=1e-15)  # f(.,0) = 0
    assert G_term(dec2, 4, 0.0) == 0.0


def test_example_problem_source_term_value():
    # f(pi/2, 1) = 6/Gamma(3.5) + 1, Gamma(3.5) = 15 sqrt(pi)/8
    spec, _ = example_problem(0.5)
    g35 = 15.0 * math.sqrt(math.pi) / 8.0
    got = spec.f(np.array([math.pi / 2.0]), 1.0)[0]
    assert got == pytest.approx(6.0 / g35 + 1.0, rel=1e-13)
    # the quoted 6-digit decimal is a loose rounding of 2.8054067
    assert got == pytest.approx(2.805404, abs=5e-6)


def test_example_problem_initial_and_boundary():
    spec, exact = example_problem(0.3)
    x = np.linspace(0.0, spec.l, 33)
    assert np.allclose(exact.u(x, 0.0), np.sin(x), atol=1e-14)
    for t in np.linspace(0.0, 1.0, 7):
        vals = exact.u(np.array([0.0, spec.l]), float(t))
        assert np.max(np.abs(vals)) <= 1e-12


def test_example_remainder_vanishes_at_t0():
    # u(x,0) - z(x)*0^a - phi(x) = 0: the remainder problem starts from zero
    spec, exact = example_problem(0.7)
    x = np.linspace(0.0, spec.l, 17)
    assert np.allclose(exact.u(x, 0.0) - spec.phi(x), 0.0, atol=1e-14)


def test_custom_problem_validation():
    with pytest.raises(InvalidArgumentError):
        custom_problem(alpha=0.5, mode=0)
    with pytest.raises(InvalidArgumentError):
        custom_problem(alpha=0.5, c0=-1.0)
    with pytest.raises(InvalidArgumentError):
        custom_problem(alpha=0.5, t_power=0.5)
    with pytest.raises(InvalidArgumentError):
        custom_problem(alpha=0.5, mode=3)  # lam = 9 > supported range
    with pytest.raises(InvalidArgumentError):
        custom_problem(alpha=0.4, mode=2, c0=0.5)  # series cancellation floor


def test_custom_problem_provider_consistency():
    spec, _ = custom_problem(alpha=0.6, p=0.8, c0=0.3, mode=1, t_power=2.0, amp=1.5)
    smesh = build_spatial_mesh(spec.l, 24)
    z = compute_z(spec, smesh)  # raises on provider/formula mismatch
    dec = decompose(spec, smesh)
    assert np.allclose(dec.z_dd_vals, -(1.0 * np.pi / spec.l) ** 2 * z, atol=1e-12)
