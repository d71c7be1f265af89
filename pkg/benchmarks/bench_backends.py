"""Time the numba and numpy backends on the same solves.

Usage: python benchmarks/bench_backends.py [--alpha 0.6] [--sizes 128,256,512]
The first numba call includes JIT compilation and is reported separately.
"""

import argparse
import time

import numpy as np

from subdiff import backend
from subdiff.harness import max_error
from subdiff.integral_scheme import solve
from subdiff.l1 import STANDARD, l1_solve, make_l1_config
from subdiff.meshes import build_spatial_mesh, build_three_piece_mesh
from subdiff.problems import decompose, example_problem


def run_integral(alpha, MN):
    spec, exact = example_problem(alpha)
    smesh = build_spatial_mesh(spec.l, MN)
    tmesh = build_three_piece_mesh(alpha, spec.T, MN)
    decomposed = decompose(spec, smesh)
    t0 = time.perf_counter()
    grid = solve(spec, decomposed, tmesh, smesh)
    return time.perf_counter() - t0, max_error(grid, exact)


def run_l1(alpha, MN):
    spec, exact = example_problem(alpha)
    t0 = time.perf_counter()
    grid = l1_solve(make_l1_config(spec, STANDARD, MN, MN))
    return time.perf_counter() - t0, max_error(grid, exact)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--alpha", type=float, default=0.6)
    ap.add_argument("--sizes", default="128,256,512")
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    if backend.HAS_NUMBA:
        backend.set_backend("numba")
        t_jit, _ = run_integral(args.alpha, 16)
        print(f"numba JIT warmup (integral + l1, M=N=16): ", end="")
        t_jit += run_l1(args.alpha, 16)[0]
        print(f"{t_jit:.2f}s")
    else:
        print("numba not available; benchmarking numpy only")

    print(f"{'case':>18s} {'M=N':>6s} {'numpy[s]':>10s} {'numba[s]':>10s} {'speedup':>8s} {'max err':>11s}")
    for name, fn in (("integral scheme", run_integral), ("standard L1", run_l1)):
        for MN in sizes:
            backend.set_backend("numpy")
            t_np, err_np = fn(args.alpha, MN)
            if backend.HAS_NUMBA:
                backend.set_backend("numba")
                t_nb, err_nb = fn(args.alpha, MN)
                if not np.isclose(err_np, err_nb, rtol=1e-10):
                    raise SystemExit(f"backend mismatch: {err_np} vs {err_nb}")
                print(f"{name:>18s} {MN:>6d} {t_np:>10.3f} {t_nb:>10.3f} "
                      f"{t_np / t_nb:>7.1f}x {err_nb:>11.3e}")
            else:
                print(f"{name:>18s} {MN:>6d} {t_np:>10.3f} {'-':>10s} {'-':>8s} {err_np:>11.3e}")


if __name__ == "__main__":
    main()
