"""Benchmark the numba kernels against the pure-numpy fallback.

Run:  python benchmarks/bench_kernels.py [--n 2000] [--m 3000] [--r 8] [--k 5]

Each kernel is timed on the same inputs under both backends; outputs are also
compared, which doubles as an equivalence check at benchmark scale.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from disjoint_link import _kernels


def time_call(fn, *args, repeats=3, **kwargs):
    best = float("inf")
    result = None
    for _ in range(repeats):
        start = time.perf_counter()
        result = fn(*args, **kwargs)
        best = min(best, time.perf_counter() - start)
    return best, result


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=2000, help="rows in the first dataset")
    parser.add_argument("--m", type=int, default=3000, help="rows in the second dataset")
    parser.add_argument("--r", type=int, default=8, help="reduced dimension")
    parser.add_argument("--k", type=int, default=5, help="neighbors per row")
    parser.add_argument("--features", type=int, default=10, help="columns to aggregate")
    args = parser.parse_args()

    if not _kernels._HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    rng = np.random.default_rng(0)
    a = rng.normal(size=(args.n, args.r))
    b = rng.normal(size=(args.m, args.r))
    features = rng.normal(size=(args.m, args.features))

    print(f"inputs: a={a.shape} b={b.shape} k={args.k} features={features.shape}")
    print(f"{'kernel':<22} {'numpy':>10} {'numba':>10} {'speedup':>8}  equal")

    # warm up JIT compilation outside the timed region
    _kernels.pairwise_euclidean(a[:4], b[:4], backend="numba")

    t_np, d_np = time_call(_kernels.pairwise_euclidean, a, b, backend="numpy")
    t_nb, d_nb = time_call(_kernels.pairwise_euclidean, a, b, backend="numba")
    print(f"{'pairwise_euclidean':<22} {t_np:>9.4f}s {t_nb:>9.4f}s {t_np / t_nb:>7.1f}x  "
          f"{np.array_equal(d_np, d_nb)}")

    _kernels.k_smallest(d_np[:4, :4], 2, backend="numba")
    t_np, (i_np, v_np) = time_call(_kernels.k_smallest, d_np, args.k, backend="numpy")
    t_nb, (i_nb, v_nb) = time_call(_kernels.k_smallest, d_np, args.k, backend="numba")
    print(f"{'k_smallest':<22} {t_np:>9.4f}s {t_nb:>9.4f}s {t_np / t_nb:>7.1f}x  "
          f"{np.array_equal(i_np, i_nb) and np.array_equal(v_np, v_nb)}")

    _kernels.median_over_rows(features, i_np[:4], backend="numba")
    t_np, m_np = time_call(_kernels.median_over_rows, features, i_np, backend="numpy")
    t_nb, m_nb = time_call(_kernels.median_over_rows, features, i_np, backend="numba")
    print(f"{'median_over_rows':<22} {t_np:>9.4f}s {t_nb:>9.4f}s {t_np / t_nb:>7.1f}x  "
          f"{np.array_equal(m_np, m_nb)}")


if __name__ == "__main__":
    main()
