"""Benchmark: numba-compiled trajectory kernels vs the batched-numpy fallback.

Runs the linearized log-ratio accumulation and the full nonlinear trajectory
on a case-study-sized problem with both backends in this process (the numba
path is skipped when the library is unavailable or disabled via
IDESHIFT_DISABLE_NUMBA=1).

Usage:  python benchmarks/bench_accel.py [--grid-points N] [--horizon T]
        [--replicates M] [--repeats K]
"""

import argparse
import time

import numpy as np

from ideshift import _accel
from ideshift.environment import butterfly_model
from ideshift.growth import FAMILY_CODES, GrowthFamily
from ideshift.habitat import Suitability, build_grid
from ideshift.kernels import gaussian
from ideshift.operator import build_matrix


def build_problem(grid_points, horizon, replicates, seed=0):
    env = butterfly_model()
    hab = build_grid(Suitability((-5.0, 5.0)), env, grid_points)
    a = build_matrix(gaussian(25.0), hab, env.c)
    g0_cols = np.ascontiguousarray(
        np.array([hab.g0_column(s) for s in env.sigmas]))
    atom_idx = np.empty((replicates, horizon), dtype=np.int64)
    for k in range(replicates):
        atom_idx[k] = env.stream(seed, k).sample_indices(horizon)
    atom_sr = np.column_stack([env.sigmas, env.rates])
    u0 = np.full(hab.n, 1.0)
    return env, hab, a, g0_cols, atom_idx, atom_sr, u0


def time_call(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--grid-points", type=int, default=256)
    parser.add_argument("--horizon", type=int, default=2000)
    parser.add_argument("--replicates", type=int, default=30)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    env, hab, a, g0_cols, atom_idx, atom_sr, u0 = build_problem(
        args.grid_points, args.horizon, args.replicates)
    print(f"problem: N={hab.n}, T={args.horizon}, replicates={args.replicates}, "
          f"active backend={_accel.backend()}")

    cases = {
        "linear log-ratios / numpy": lambda: _accel.linear_log_ratios_numpy(
            a.matrix, g0_cols, atom_idx, env.rates, u0, hab.h),
    }
    snap = np.empty(0, dtype=np.int64)
    code = FAMILY_CODES[GrowthFamily.BEVERTON_HOLT]
    cases["nonlinear trajectory / numpy"] = lambda: _accel.nonlinear_trajectory_numpy(
        a.matrix, g0_cols, atom_idx[0], atom_sr, u0, hab.h, code, 1.0, snap)
    if _accel.NUMBA_AVAILABLE:
        cases["linear log-ratios / numba"] = lambda: _accel.linear_log_ratios_numba(
            a.matrix, g0_cols, atom_idx, env.rates, u0, hab.h)
        cases["nonlinear trajectory / numba"] = lambda: _accel.nonlinear_trajectory_numba(
            a.matrix, g0_cols, atom_idx[0], atom_sr, u0, hab.h, code, 1.0, snap)
        # trigger JIT compilation outside the timed region
        cases["linear log-ratios / numba"]()
        cases["nonlinear trajectory / numba"]()
    else:
        print("numba backend unavailable; timing the numpy path only")

    results = {}
    for label, fn in cases.items():
        best, out = time_call(fn, args.repeats)
        results[label] = (best, out)
        print(f"{label:35s} {best * 1e3:10.1f} ms")

    for task in ("linear log-ratios", "nonlinear trajectory"):
        np_label, nb_label = f"{task} / numpy", f"{task} / numba"
        if nb_label in results:
            t_np, out_np = results[np_label]
            t_nb, out_nb = results[nb_label]
            ref = out_np if isinstance(out_np, np.ndarray) else out_np[0]
            new = out_nb if isinstance(out_nb, np.ndarray) else out_nb[0]
            agree = np.allclose(ref, new, rtol=1e-12, atol=1e-13)
            print(f"{task}: numba speedup x{t_np / t_nb:.1f}, "
                  f"results agree={agree}")


if __name__ == "__main__":
    main()
