#!/usr/bin/env python3
"""Compare the jitted and pure-numpy kernels on realistic shapes.

Training touches (rows=98, features=200 or 600, hidden=10); detection runs
thousands of 200-sample windows through the forward pass. Each cell is the
best wall time over --repeats runs; the last column checks the two paths
agree numerically.

Usage:
    python3 benchmarks/bench_kernels.py [--repeats N]
    SMOKEWATCH_NO_NUMBA=1 python3 benchmarks/bench_kernels.py   # numpy only
"""

import argparse
from time import perf_counter

import numpy as np

from smokewatch import kernels

SHAPES = [
    ("train X/Y/Z/AVG", 98, 200, 10),
    ("train XYZ", 98, 600, 10),
    ("detect 1k windows", 1000, 200, 10),
    ("detect 4k windows", 4000, 200, 10),
]


def best_time(fn, args, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = perf_counter()
        fn(*args)
        best = min(best, perf_counter() - t0)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=7)
    args = parser.parse_args()

    if not kernels.USING_NUMBA:
        print("numba path unavailable (disabled or not installed); "
              "timing the numpy fallback only\n")

    rng = np.random.default_rng(0)
    header = (f"{'case':<22} {'kernel':<9} {'numpy':>10} "
              f"{'numba':>10} {'speedup':>8} {'max|diff|':>10}")
    print(header)
    print("-" * len(header))
    for name, m, p, h in SHAPES:
        w1 = rng.uniform(-0.5, 0.5, size=(h, p))
        b1 = rng.uniform(-0.5, 0.5, size=h)
        w2 = rng.uniform(-0.5, 0.5, size=h)
        b2 = 0.1
        xn = rng.uniform(-1, 1, size=(m, p))
        weights = (w1, b1, w2, b2, xn)

        cases = [("forward", kernels.batch_forward_numpy,
                  kernels.batch_forward_numba if kernels.USING_NUMBA else None)]
        if "detect" not in name:
            cases.append(("jacobian", kernels.batch_jacobian_numpy,
                          kernels.batch_jacobian_numba
                          if kernels.USING_NUMBA else None))
        for kind, np_fn, nb_fn in cases:
            t_np = best_time(np_fn, weights, args.repeats)
            if nb_fn is None:
                print(f"{name:<22} {kind:<9} {t_np * 1e3:>8.3f}ms "
                      f"{'-':>10} {'-':>8} {'-':>10}")
                continue
            nb_fn(*weights)  # compile before timing
            t_nb = best_time(nb_fn, weights, args.repeats)
            ref = np_fn(*weights)
            got = nb_fn(*weights)
            if kind == "jacobian":
                diff = max(np.max(np.abs(ref[0] - got[0])),
                           np.max(np.abs(ref[1] - got[1])))
            else:
                diff = np.max(np.abs(ref - got))
            print(f"{name:<22} {kind:<9} {t_np * 1e3:>8.3f}ms "
                  f"{t_nb * 1e3:>8.3f}ms {t_np / t_nb:>7.1f}x {diff:>10.1e}")


if __name__ == "__main__":
    main()
