"""Benchmark the accelerated kernels against the pure-numpy fallback.

The first call of each kernel is a warmup, so numba JIT compilation is
excluded from the timings.  When numba is unavailable (or disabled via
HERMULT_NO_NUMBA=1) both columns time the same numpy implementation.

Usage: python3 benchmarks/bench_backends.py [--points N] [--repeats R]
"""

import argparse
import statistics
import time

import numpy as np

from hermult._accel import (
    BACKEND,
    phi_row,
    phi_row_numpy,
    phi_table,
    phi_table_numpy,
    weighted_abs_power_sum,
    weighted_abs_power_sum_numpy,
)


def median_ms(fn, args, repeats):
    fn(*args)
    samples = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        samples.append((time.perf_counter() - start) * 1e3)
    return statistics.median(samples)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--points", type=int, default=20_000,
                        help="grid points for phi_row (default 20000)")
    parser.add_argument("--degree", type=int, default=800,
                        help="degree for phi_row (default 800)")
    parser.add_argument("--table-points", type=int, default=1_500,
                        help="grid points for phi_table (default 1500)")
    parser.add_argument("--table-degree", type=int, default=400,
                        help="max degree for phi_table (default 400)")
    parser.add_argument("--repeats", type=int, default=5,
                        help="timed repetitions per kernel (default 5)")
    args = parser.parse_args(argv)

    x_small = np.linspace(-12.0, 12.0, 200)
    x_row = np.linspace(-15.0, 15.0, args.points)
    x_table_small = np.linspace(-12.0, 12.0, 201)
    x_table = np.linspace(-15.0, 15.0, args.table_points)
    vals, logs = phi_row_numpy(x_row, args.degree)
    weights = np.full(x_row.shape, 30.0 / max(args.points - 1, 1))

    cases = (
        ("phi_row", "200 pts, degree 100 (quadrature-sized)",
         phi_row, phi_row_numpy, (x_small, 100)),
        ("phi_row", f"{args.points} pts, degree {args.degree}",
         phi_row, phi_row_numpy, (x_row, args.degree)),
        ("phi_table", "201 pts, degrees 0..200 (quadrature-sized)",
         phi_table, phi_table_numpy, (x_table_small, 200)),
        ("phi_table", f"{args.table_points} pts, degrees 0..{args.table_degree}",
         phi_table, phi_table_numpy, (x_table, args.table_degree)),
        ("weighted_abs_power_sum", f"{args.points} pts, p = 4",
         weighted_abs_power_sum, weighted_abs_power_sum_numpy,
         (vals, logs, weights, 4.0)),
    )

    print(f"active backend: {BACKEND}")
    if BACKEND == "numpy":
        print("note: numba unavailable or disabled; both columns run numpy")
    header = f"{'kernel':<24} {'workload':<40} {'active ms':>10} {'numpy ms':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for name, workload, fast, plain, call_args in cases:
        t_fast = median_ms(fast, call_args, args.repeats)
        t_plain = median_ms(plain, call_args, args.repeats)
        print(f"{name:<24} {workload:<40} {t_fast:>10.3f} {t_plain:>10.3f} "
              f"{t_plain / t_fast:>8.2f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
