"""Benchmark the compiled row-update kernel against the numpy fallback.

Usage: python benchmarks/bench_kernels.py [--n 200] [--runs 50] [--epochs 50]
"""

import argparse
import importlib
import time

import numpy as np

from sgdreg import _kernels_py
from sgdreg.solvers import StepSchedule
from sgdreg.testproblems import make_problem, row_norm_constant


def bench(impl, a, y, x1, sched, runs, epochs, seed=0):
    n, m = a.shape
    total = epochs * n
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, n, size=(runs, total))
    X = np.ascontiguousarray(np.tile(x1, (runs, 1)))
    t0 = time.perf_counter()
    impl.sgd_sweep(a, y, X, idx, sched.c0, sched.alpha, 1)
    dt = time.perf_counter() - t0
    return dt, runs * total / dt, X


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=200)
    ap.add_argument("--runs", type=int, default=50)
    ap.add_argument("--epochs", type=int, default=50)
    args = ap.parse_args()

    prob = make_problem("gravity", args.n)
    a = np.ascontiguousarray(prob.A)
    x_dag = prob.x_e / np.max(np.abs(prob.x_e))
    y = a @ x_dag
    x1 = np.zeros(args.n)
    sched = StepSchedule(row_norm_constant(a) / args.n, 0.0)

    impls = [("python", _kernels_py)]
    try:
        impls.insert(0, ("cython", importlib.import_module("sgdreg._kernels")))
    except ImportError:
        print("compiled kernel unavailable; benchmarking fallback only")

    results = {}
    for name, impl in impls:
        dt, rate, X = bench(impl, a, y, x1, sched, args.runs, args.epochs)
        results[name] = (dt, rate, X)
        print(f"{name:>7}: {dt:8.3f} s  ({rate:12.3e} row updates/s)")
    if len(results) == 2:
        ratio = results["python"][0] / results["cython"][0]
        drift = float(np.max(np.abs(results["python"][2] - results["cython"][2])))
        print(f"speedup: {ratio:.2f}x   max state drift: {drift:.3e}")


if __name__ == "__main__":
    main()
