"""Runtime property suite: every module invariant, with printed margins.

Each check reports a margin = worst observed / allowed (or an equivalent
normalized measure), so a pass prints how much headroom it had.  The same
checks back the pytest suite; this module makes them runnable from the
CLI (exit status for CI) without pytest.

The quadrature oracles here are deliberately independent of the closed
forms they verify: scipy's adaptive QUADPACK routines integrate the
defining kernel-times-hat-function integrals directly, with the
algebraic-weight variant handling the singular diagonal panel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from . import backend
from ._kernels_numpy import l1_rows, weight_rows
from .harness import (
    SweepConfig,
    read_report_csv,
    report_without_walltime,
    run_sweep,
    to_csv,
)
from .integral_scheme import weight_a, weight_b
from .meshes import build_power_mesh, build_spatial_mesh, build_three_piece_mesh
from .operators import DiscreteOperator, solve_shifted
from .problems import G_term, decompose, example_problem, g_term
from .special import DEFAULT_TOL, gamma_fn, mittag_leffler


@dataclass
class PropertyResult:
    name: str
    passed: bool
    margin: float
    detail: str

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.name:<28s} margin={self.margin:9.3e}  {self.detail}"


@dataclass
class PropertyReport:
    results: list[PropertyResult]

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.results)


def check_gamma_recurrence() -> PropertyResult:
    worst = 0.0
    for x in np.arange(0.1, 3.01, 0.1):
        lhs = gamma_fn(x + 1.0)
        worst = max(worst, abs(lhs - x * gamma_fn(x)) / lhs)
    return PropertyResult("gamma_recurrence", worst <= 1e-12, worst / 1e-12,
                          f"max relative defect {worst:.2e} (allowed 1e-12)")


def check_ml_bounds_monotonic() -> PropertyResult:
    ok = True
    detail = ""
    for alpha in (0.2, 0.5, 0.8, 1.0):
        zs = np.linspace(-1.0, 0.0, 41)
        vals = [mittag_leffler(alpha, float(z)) for z in zs]
        if not all(0.0 < v <= 1.0 for v in vals):
            ok = False
            detail = f"range violation at alpha={alpha}"
            break
        if not all(vals[i] < vals[i + 1] for i in range(len(vals) - 1)):
            ok = False
            detail = f"monotonicity violation at alpha={alpha}"
            break
    return PropertyResult("ml_bounds_monotonic", ok, 0.0 if ok else 1.0,
                          detail or "0 < E_a(z) <= 1 and increasing on [-1, 0]")


def _ml_series_extended(alpha: float, z: float, extra: int) -> tuple[float, float]:
    """Series value at the stock stopping point and with `extra` more terms."""
    log_abs_z = math.log(-z)
    total = 1.0
    k = 1
    while True:
        mag = math.exp(k * log_abs_z - math.lgamma(alpha * k + 1.0))
        if mag < DEFAULT_TOL:
            break
        total += mag if k % 2 == 0 else -mag
        k += 1
    stopped = total
    for k2 in range(k, k + extra):
        mag = math.exp(k2 * log_abs_z - math.lgamma(alpha * k2 + 1.0))
        total += mag if k2 % 2 == 0 else -mag
    return stopped, total


def check_ml_truncation() -> PropertyResult:
    worst = 0.0
    for alpha in (0.2, 0.5, 0.8, 1.0):
        for z in (-1.0, -0.5, -0.1):
            stopped, extended = _ml_series_extended(alpha, z, 10)
            worst = max(worst, abs(extended - stopped))
    return PropertyResult("ml_truncation", worst < DEFAULT_TOL, worst / DEFAULT_TOL,
                          f"10 extra terms move the sum by {worst:.2e} (< tol {DEFAULT_TOL})")


def check_mesh_structure() -> PropertyResult:
    worst = 0.0
    detail = "three-piece and power meshes over alpha x N grid"
    for alpha in (0.2, 0.4, 0.6, 0.8):
        for N in (4, 8, 64, 256):
            for mesh in (
                build_three_piece_mesh(alpha, 1.0, N),
                build_power_mesh(1.0, N, (2.0 - alpha) / alpha, alpha),
                build_power_mesh(2.0, N, 1.0, alpha),
            ):
                if np.any(mesh.steps <= 0.0):
                    return PropertyResult("mesh_structure", False, 1.0,
                                          f"non-monotone mesh at alpha={alpha}, N={N}")
                worst = max(worst, abs(mesh.steps.sum() - mesh.T) / (1e-14 * mesh.T))
            tp = build_three_piece_mesh(alpha, 1.0, N)
            if tp.nodes[1] != 1.0 * N ** (-2.0 / alpha):
                return PropertyResult("mesh_structure", False, 1.0,
                                      f"t_1 formula violated at alpha={alpha}, N={N}")
            if not (tp.steps[1] > tp.steps[0] > 0.0):
                return PropertyResult("mesh_structure", False, 1.0,
                                      f"initial step ordering violated at alpha={alpha}, N={N}")
    return PropertyResult("mesh_structure", worst <= 1.0, worst, detail)


def check_decomposition_t0(rng: np.random.Generator) -> PropertyResult:
    worst = 0.0
    for alpha in (0.3, 0.6):
        spec, exact = example_problem(alpha)
        smesh = build_spatial_mesh(spec.l, 32)
        x = smesh.nodes
        # remainder at t=0 is u(x,0) - phi(x), must vanish identically
        worst = max(worst, float(np.max(np.abs(exact.u(x, 0.0) - spec.phi(x)))))
        dec = decompose(spec, smesh)
        worst_bnd = max(abs(dec.z_vals[0]), abs(dec.z_vals[-1])) / 1e-10
        worst = max(worst, worst_bnd * 1e-12)  # boundary z scaled to shared 1e-12 margin
    return PropertyResult("decomposition_t0", worst <= 1e-12, worst / 1e-12,
                          "v(x,0)=0 identity and z boundary zeros")


def check_example_g_G_forms(rng: np.random.Generator) -> PropertyResult:
    worst = 0.0
    for alpha in (0.25, 0.5, 0.75):
        spec, _ = example_problem(alpha)
        smesh = build_spatial_mesh(spec.l, 48)
        dec = decompose(spec, smesh)
        ga1 = gamma_fn(alpha + 1.0)
        ga2 = gamma_fn(2.0 * alpha + 1.0)
        for _ in range(10):
            i = int(rng.integers(0, smesh.M + 1))
            t = float(rng.uniform(0.0, spec.T))
            xi = smesh.nodes[i]
            worst = max(worst, abs(g_term(dec, i, t) - t**alpha * math.sin(xi) / ga1))
            worst = max(worst, abs(G_term(dec, i, t) - t ** (2 * alpha) * math.sin(xi) / ga2))
    return PropertyResult("example_g_G_forms", worst <= 1e-12, worst / 1e-12,
                          f"generic vs simplified forms differ by {worst:.2e}")


def _weight_sum_margins(alphas=(0.2, 0.5, 0.8), Ns=(8, 64, 512)):
    worst_const = 0.0
    worst_lin = 0.0
    for alpha in alphas:
        for N in Ns:
            mesh = build_three_piece_mesh(alpha, 1.0, N)
            t = mesh.nodes
            for j in range(1, N + 1):
                a, b = weight_rows(t, j, alpha)
                s_const = np.sum(a) + np.sum(b)
                ref_const = t[j] ** alpha / gamma_fn(alpha + 1.0)
                worst_const = max(worst_const, abs(s_const - ref_const) / ref_const)
                s_lin = float(a @ t[:j] + b @ t[1 : j + 1])
                ref_lin = t[j] ** (alpha + 1.0) / gamma_fn(alpha + 2.0)
                worst_lin = max(worst_lin, abs(s_lin - ref_lin) / ref_lin)
    return worst_const, worst_lin


def check_weight_sum_constant() -> PropertyResult:
    worst, _ = _weight_sum_margins()
    return PropertyResult("weight_sum_constant", worst <= 1e-12, worst / 1e-12,
                          f"sum(a+b) vs t_j^a/Gamma(a+1), worst rel {worst:.2e}")


def check_weight_sum_linear() -> PropertyResult:
    _, worst = _weight_sum_margins()
    return PropertyResult("weight_sum_linear", worst <= 1e-12, worst / 1e-12,
                          f"sum(a t_(k-1) + b t_k) vs t_j^(a+1)/Gamma(a+2), worst rel {worst:.2e}")


def check_weight_positivity() -> PropertyResult:
    # N capped at 16: beyond that the smallest true weights at small alpha
    # sink below the absolute floor of float64 evaluation
    smallest = math.inf
    for alpha in (0.2, 0.5, 0.8):
        for N in (4, 8, 16):
            mesh = build_three_piece_mesh(alpha, 1.0, N)
            for j in range(1, N + 1):
                a, b = weight_rows(mesh.nodes, j, alpha)
                smallest = min(smallest, float(np.min(a)), float(np.min(b)))
    ok = smallest > 0.0
    return PropertyResult("weight_positivity", ok, 0.0 if ok else 1.0,
                          f"smallest weight {smallest:.3e} (must be > 0)")


def _oracle_weight(t, j, k, alpha, which):
    """Adaptive quadrature of the defining integral of a(j,k) / b(j,k)."""
    lo, hi = t[k - 1], t[k]
    dt = hi - lo
    if which == "a":
        hat = lambda s: (hi - s) / dt
    else:
        hat = lambda s: (s - lo) / dt
    if k == j:
        val, _ = quad(hat, lo, hi, weight="alg", wvar=(0.0, alpha - 1.0),
                      epsabs=1e-13, epsrel=1e-12, limit=400)
    else:
        val, _ = quad(lambda s: (t[j] - s) ** (alpha - 1.0) * hat(s), lo, hi,
                      epsabs=1e-13, epsrel=1e-12, limit=400)
    return val / gamma_fn(alpha)


def _oracle_l1(t, j, k, alpha):
    lo, hi = t[k - 1], t[k]
    dt = hi - lo
    if k == j:
        val, _ = quad(lambda s: 1.0, lo, hi, weight="alg", wvar=(0.0, -alpha),
                      epsabs=1e-13, epsrel=1e-12, limit=400)
    else:
        val, _ = quad(lambda s: (t[j] - s) ** (-alpha), lo, hi,
                      epsabs=1e-13, epsrel=1e-12, limit=400)
    return val / (gamma_fn(1.0 - alpha) * dt)


def check_weight_oracle() -> PropertyResult:
    worst = 0.0
    for alpha in (0.2, 0.5, 0.8):
        for N in (4, 8):
            mesh = build_three_piece_mesh(alpha, 1.0, N)
            for j in range(1, N + 1):
                for k in range(1, j + 1):
                    worst = max(worst, abs(
                        weight_a(j, k, mesh, alpha) - _oracle_weight(mesh.nodes, j, k, alpha, "a")))
                    worst = max(worst, abs(
                        weight_b(j, k, mesh, alpha) - _oracle_weight(mesh.nodes, j, k, alpha, "b")))
    return PropertyResult("weight_oracle", worst <= 1e-10, worst / 1e-10,
                          f"worst |closed form - quadrature| {worst:.2e} (allowed 1e-10)")


def check_l1_oracle() -> PropertyResult:
    worst = 0.0
    for alpha, r in ((0.2, 9.0), (0.5, 3.0), (0.8, 1.5), (0.8, 0.75)):
        for N in (4, 8):
            mesh = build_power_mesh(1.0, N, r, alpha)
            for j in range(1, N + 1):
                d = l1_rows(mesh.nodes, j, alpha)
                for k in range(1, j + 1):
                    worst = max(worst, abs(d[k - 1] - _oracle_l1(mesh.nodes, j, k, alpha)))
    return PropertyResult("l1_oracle", worst <= 1e-10, worst / 1e-10,
                          f"worst |coefficient - quadrature| {worst:.2e} (allowed 1e-10)")


def check_l1_positivity() -> PropertyResult:
    smallest = math.inf
    for alpha, r in ((0.2, 9.0), (0.5, 3.0), (0.8, 1.5)):
        for N in (8, 64, 256):
            mesh = build_power_mesh(1.0, N, r, alpha)
            for j in range(1, N + 1):
                smallest = min(smallest, float(np.min(l1_rows(mesh.nodes, j, alpha))))
    ok = smallest > 0.0
    return PropertyResult("l1_positivity", ok, 0.0 if ok else 1.0,
                          f"smallest coefficient {smallest:.3e} (must be > 0)")


def check_max_principle(rng: np.random.Generator) -> PropertyResult:
    M = 32
    smesh = build_spatial_mesh(1.0, M)
    worst = -math.inf
    for c_scale in (0.0, 1.0):
        c_vals = c_scale * rng.uniform(0.0, 2.0, size=M + 1)
        op = DiscreteOperator(p=1.0, c_vals=c_vals, h=smesh.h, M=M)
        for beta in (1e-6, 1e-3, 0.1, 1.0, 10.0):
            for _ in range(50):
                w = rng.uniform(-1.0, 1.0, size=M + 1)
                w[0] = w[-1] = 0.0
                y = solve_shifted(op, 1.0, beta, w)
                worst = max(worst, float(np.max(np.abs(y)) - np.max(np.abs(w))))
    return PropertyResult("max_principle", worst <= 1e-14, worst / 1e-14,
                          f"max ||y||-||w|| = {worst:.2e} over 500 random systems")


def check_tridiag_dense_oracle(rng: np.random.Generator) -> PropertyResult:
    worst = 0.0
    for M in (4, 8, 16):
        smesh = build_spatial_mesh(1.0, M)
        c_vals = rng.uniform(0.0, 3.0, size=M + 1)
        op = DiscreteOperator(p=0.7, c_vals=c_vals, h=smesh.h, M=M)
        for beta in (1e-3, 0.3, 2.0):
            lam = op.p / op.h**2
            n = M - 1
            A = np.diag(1.0 + beta * (2.0 * lam + c_vals[1:-1]))
            A += np.diag([-beta * lam] * (n - 1), 1) + np.diag([-beta * lam] * (n - 1), -1)
            for _ in range(5):
                w = rng.uniform(-1.0, 1.0, size=M + 1)
                w[0] = w[-1] = 0.0
                y = solve_shifted(op, 1.0, beta, w)
                y_ref = np.linalg.solve(A, w[1:-1])
                worst = max(worst, float(np.max(np.abs(y[1:-1] - y_ref))
                                         / max(1e-300, np.max(np.abs(y_ref)))))
    return PropertyResult("tridiag_dense_oracle", worst <= 1e-12, worst / 1e-12,
                          f"worst relative gap to dense solve {worst:.2e}")


def check_integral_convergence() -> PropertyResult:
    cfg = SweepConfig(alphas=(0.4,), levels=((64, 64), (128, 128)),
                      scheme="integral", output_path=None)
    report = run_sweep(cfg)
    r = report.rows[0].rate
    ok = r is not None and abs(r - 2.0) <= 0.1
    return PropertyResult("integral_convergence", ok, abs((r or 0.0) - 2.0) / 0.1,
                          f"64->128 rate {r:.3f} (want 2 +- 0.1)")


def check_l1_theory_rates() -> PropertyResult:
    worst = 0.0
    detail = []
    for scheme, factor in (("l1", 1.0), ("pl1", 2.0)):
        alpha = 0.6
        from .l1 import optimal_grading

        r_mesh = optimal_grading(alpha, scheme)
        cfg = SweepConfig(alphas=(alpha,), levels=((64, 64), (128, 128), (256, 256)),
                          scheme=scheme, output_path=None)
        report = run_sweep(cfg)
        observed = report.rows[1].rate
        theory = min(2.0 - alpha, factor * r_mesh * alpha)
        worst = max(worst, abs(observed - theory))
        detail.append(f"{scheme}: {observed:.3f} vs {theory:.3f}")
    return PropertyResult("l1_theory_rates", worst <= 0.1, worst / 0.1, "; ".join(detail))


def check_report_determinism(tmpdir: str | None = None) -> PropertyResult:
    cfg = SweepConfig(alphas=(0.5,), levels=((8, 8), (16, 16)), scheme="integral",
                      output_path=None)
    r1 = run_sweep(cfg)
    r2 = run_sweep(cfg)
    same = report_without_walltime(r1) == report_without_walltime(r2)
    return PropertyResult("report_determinism", same, 0.0 if same else 1.0,
                          "two identical sweeps agree on every non-timing field")


def check_csv_roundtrip(tmpdir: str) -> PropertyResult:
    import os

    cfg = SweepConfig(alphas=(0.5,), levels=((8, 8), (16, 16)), scheme="pl1",
                      output_path=os.path.join(tmpdir, "roundtrip.csv"))
    report = run_sweep(cfg)
    recs = read_report_csv(cfg.output_path)
    ok = len(recs) == len(report.rows)
    for rec, row in zip(recs, report.rows):
        ok = ok and rec["max_error"] == row.max_error
        ok = ok and (rec["rate"] == row.rate or (rec["rate"] is None and row.rate is None))
        ok = ok and rec["alpha"] == row.alpha and rec["M"] == row.M and rec["N"] == row.N
    return PropertyResult("csv_roundtrip", ok, 0.0 if ok else 1.0,
                          "emitted CSV reparses to identical numeric fields")


def run_property_suite(seed: int = 0) -> PropertyReport:
    """Execute every spec invariant; prints one margin line per check."""
    import tempfile

    rng = np.random.default_rng(seed)
    results = [
        check_gamma_recurrence(),
        check_ml_bounds_monotonic(),
        check_ml_truncation(),
        check_mesh_structure(),
        check_decomposition_t0(rng),
        check_example_g_G_forms(rng),
        check_weight_sum_constant(),
        check_weight_sum_linear(),
        check_weight_positivity(),
        check_weight_oracle(),
        check_l1_oracle(),
        check_l1_positivity(),
        check_max_principle(rng),
        check_tridiag_dense_oracle(rng),
        check_integral_convergence(),
        check_l1_theory_rates(),
        check_report_determinism(),
    ]
    with tempfile.TemporaryDirectory() as tmpdir:
        results.append(check_csv_roundtrip(tmpdir))
    for res in results:
        print(res.line())
    report = PropertyReport(results=results)
    status = "all passed" if report.all_passed else "FAILURES PRESENT"
    print(f"property suite ({backend.get_backend()} backend, seed={seed}): "
          f"{sum(r.passed for r in results)}/{len(results)} {status}")
    return report
