#!/usr/bin/env python3
"""Benchmark the numba kernels against the numpy/scipy fallback paths.

The package selects the fallback automatically when numba is missing or
CONDENSATE_LAB_NO_NUMBA=1 is set.  This script times both implementations
of each hot kernel directly in one process, on problem sizes representative
of the acceptance workloads.

Usage:
    python benchmarks/bench_kernels.py [--repeats 5]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from condensate_lab import _kernels as K


def timeit(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_rk4(repeats):
    nsteps, nk = 4000, 512
    rng = np.random.default_rng(0)
    q = rng.uniform(0.0, 2.0, 2 * nsteps + 1)
    k2 = rng.uniform(0.01, 64.0, nk)
    u0 = np.zeros(nk)
    up0 = np.ones(nk)
    out = np.empty((nsteps + 1, nk))

    def run_py():
        K._rk4_radial_py(q, k2, 0.005, u0, up0, out)

    t_py = timeit(run_py, repeats)
    t_nb = None
    if K.HAVE_NUMBA:
        K.rk4_radial_batch(q, k2, 0.005, u0, up0)  # warm
        t_nb = timeit(lambda: K.rk4_radial_batch(q, k2, 0.005, u0, up0), repeats)
    return "radial RK4 batch (4000 steps x 512 k)", t_py, t_nb


def bench_cn(repeats):
    m, nsteps = 40000, 200
    rng = np.random.default_rng(1)
    q = rng.uniform(0.0, 50.0, m)
    u = (rng.normal(size=m) + 1j * rng.normal(size=m)) * np.hanning(m)

    t_py = timeit(lambda: K._cn_evolve_py(u, q, 5e-4, 1e-3, nsteps), repeats)
    t_nb = None
    if K.HAVE_NUMBA:
        K._cn_evolve_nb(u, q, 5e-4, 1e-3, 2)  # warm
        t_nb = timeit(lambda: K._cn_evolve_nb(u, q, 5e-4, 1e-3, nsteps), repeats)
    return "Crank-Nicolson (40k points x 200 steps)", t_py, t_nb


def bench_pairs(repeats):
    rng = np.random.default_rng(2)
    pos = rng.normal(size=(400, 3))

    def run_py():
        for _ in range(50):
            K._pair_rows_py(pos, 0.4)

    t_py = timeit(run_py, repeats)
    t_nb = None
    if K.HAVE_NUMBA:
        K._pair_rows_nb(pos, 0.4)  # warm

        def run_nb():
            for _ in range(50):
                K._pair_rows_nb(pos, 0.4)

        t_nb = timeit(run_nb, repeats)
    return "pair cutoff sums (400 particles x 50 configs)", t_py, t_nb


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()
    print(f"numba available: {K.HAVE_NUMBA}")
    rows = [bench_rk4(args.repeats), bench_cn(args.repeats), bench_pairs(args.repeats)]
    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  {'fallback':>10}  {'numba':>10}  {'speedup':>8}")
    for name, t_py, t_nb in rows:
        if t_nb is None:
            print(f"{name:<{width}}  {t_py:9.4f}s  {'-':>10}  {'-':>8}")
        else:
            print(f"{name:<{width}}  {t_py:9.4f}s  {t_nb:9.4f}s  {t_py / t_nb:7.1f}x")


if __name__ == "__main__":
    main()
