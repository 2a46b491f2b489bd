#!/usr/bin/env python3
"""Benchmark the compiled integrator kernel against the pure-Python twin.

Runs the chaotic reference orbit and a section sweep with both kernels and
reports steps/second plus the speedup.  The Python twin is exercised on a
shorter span so the whole script stays around a minute.

Usage: python3 benchmarks/bench_integrator.py [--t-end 200] [--crossings 100]
"""

import argparse
import time

import numpy as np

from rabichaos import _kernel_py
from rabichaos.model import NAMED_POINTS

try:
    from rabichaos import _kernel_cy
except ImportError:
    _kernel_cy = None

ARGS = (18.0, 1.0, 4.0)
C1 = np.asarray(NAMED_POINTS["C1"], dtype=float)


def bench_path(kernel, t_end, tol):
    t0 = time.perf_counter()
    _, info = kernel.integrate_path(C1, 0.0, t_end, tol, tol, *ARGS,
                                    np.array([t_end]))
    wall = time.perf_counter() - t0
    return wall, info["n_steps"]


def bench_section(kernel, crossings, tol):
    t0 = time.perf_counter()
    rows, info = kernel.section_crossings(C1, 0.0, tol, tol, *ARGS,
                                          crossings, 1e5)
    wall = time.perf_counter() - t0
    return wall, info["n_steps"], len(rows)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--t-end", type=float, default=200.0,
                        help="span for the integrate benchmark")
    parser.add_argument("--crossings", type=int, default=100,
                        help="crossings for the section benchmark")
    parser.add_argument("--tol", type=float, default=1e-10)
    args = parser.parse_args()

    print(f"chaotic reference orbit, tol = {args.tol:g}")
    results = {}
    for name, kernel, scale in (("compiled", _kernel_cy, 1.0),
                                ("python", _kernel_py, 0.05)):
        if kernel is None:
            print("  compiled kernel not built; skipping")
            continue
        span = args.t_end * scale
        wall, steps = bench_path(kernel, span, args.tol)
        rate = steps / wall
        results[name] = rate
        print(f"  {name:>8}: t_end = {span:g}: {steps} steps in "
              f"{wall:.2f}s  ({rate:,.0f} steps/s)")
    if len(results) == 2:
        print(f"  integrate speedup: {results['compiled'] / results['python']:.0f}x")

    print(f"section sweep to {args.crossings} crossings")
    results = {}
    for name, kernel, scale in (("compiled", _kernel_cy, 1.0),
                                ("python", _kernel_py, 0.05)):
        if kernel is None:
            continue
        n = max(2, int(args.crossings * scale))
        wall, steps, found = bench_section(kernel, n, args.tol)
        rate = steps / wall
        results[name] = rate
        print(f"  {name:>8}: {found} crossings, {steps} steps in "
              f"{wall:.2f}s  ({rate:,.0f} steps/s)")
    if len(results) == 2:
        print(f"  section speedup: {results['compiled'] / results['python']:.0f}x")


if __name__ == "__main__":
    main()
