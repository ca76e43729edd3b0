"""Throughput comparison of the stencil backends (numba loops vs np.roll).

Times diff1/diff2/diff_cross on square periodic grids for both backends and
prints a table with the speedup.  The jitted kernels are warmed before timing
so compilation never lands inside a measurement.

    python3 benchmarks/bench_kernels.py --sizes 64 256 1024 --repeats 50
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from pmcflow.kernels import get_backend


def time_call(fn, args, repeats: int) -> float:
    """Best-of-repeats wall time in seconds (min filters scheduler noise)."""
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench(sizes, repeats):
    rng = np.random.default_rng(1234)
    numba_be = get_backend("numba")
    numpy_be = get_backend("numpy")
    if hasattr(numba_be, "warmup"):
        numba_be.warmup()

    header = f"{'kernel':12s} {'grid':>12s} {'numpy':>12s} {'numba':>12s} {'speedup':>9s}"
    print(header)
    print("-" * len(header))
    for m in sizes:
        u = rng.standard_normal((m, m))
        h = 2.0 * np.pi / m
        cases = [
            ("diff1", (u, h, 0)),
            ("diff2", (u, h, 0)),
            ("diff_cross", (u, h, h)),
        ]
        for name, args in cases:
            t_np = time_call(getattr(numpy_be, name), args, repeats)
            t_nb = time_call(getattr(numba_be, name), args, repeats)
            out_np = getattr(numpy_be, name)(*args)
            out_nb = getattr(numba_be, name)(*args)
            assert np.array_equal(out_np, out_nb), f"{name} backends disagree"
            print(f"{name:12s} {m:>5d}x{m:<6d} {t_np * 1e6:>10.1f}us "
                  f"{t_nb * 1e6:>10.1f}us {t_np / t_nb:>8.2f}x")


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+",
                        default=[64, 256, 1024])
    parser.add_argument("--repeats", type=int, default=50)
    args = parser.parse_args(argv)
    bench(args.sizes, args.repeats)


if __name__ == "__main__":
    main()
