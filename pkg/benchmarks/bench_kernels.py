#!/usr/bin/env python3
"""Benchmark the compiled secular-equation kernel against the pure-Python twin.

Usage: python benchmarks/bench_kernels.py [--reps 2000] [--taus 2,5,10,50]
The solver spends its non-LAPACK time in this kernel, so the speedup here is
the per-iteration interpreter overhead saved at small subspace sizes.
"""

import argparse
import time

import numpy as np

from sscn._secular import secular_solve as py_solve

try:
    from sscn._secular_cy import secular_solve as cy_solve
except ImportError:
    cy_solve = None


def make_instances(tau, reps, seed=0):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(reps):
        lam = np.sort(rng.normal(size=tau) * 3.0)
        g = rng.normal(size=tau)
        M = float(rng.uniform(0.1, 10.0))
        out.append((lam, g, M))
    return out


def time_kernel(solve, instances):
    t0 = time.perf_counter()
    for lam, g, M in instances:
        solve(lam, g, M)
    return (time.perf_counter() - t0) / len(instances)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--reps", type=int, default=2000)
    parser.add_argument("--taus", default="2,5,10,50")
    args = parser.parse_args()
    taus = [int(t) for t in args.taus.split(",")]

    print(f"{'tau':>5} {'python (us)':>12} {'cython (us)':>12} {'speedup':>8}")
    for tau in taus:
        instances = make_instances(tau, args.reps)
        t_py = time_kernel(py_solve, instances) * 1e6
        if cy_solve is None:
            print(f"{tau:>5} {t_py:>12.2f} {'n/a':>12} {'n/a':>8}")
            continue
        t_cy = time_kernel(cy_solve, instances) * 1e6
        # sanity: the twins must agree on what they compute
        lam, g, M = instances[0]
        r1, h1, hc1, _ = py_solve(lam, g, M)
        r2, h2, hc2, _ = cy_solve(lam, g, M)
        assert hc1 == hc2 and abs(r1 - r2) <= 1e-12 * (1 + abs(r1))
        print(f"{tau:>5} {t_py:>12.2f} {t_cy:>12.2f} {t_py / t_cy:>7.1f}x")


if __name__ == "__main__":
    main()
