"""Compare the compiled kernel backend against the NumPy fallback.

Run:  python benchmarks/bench_kernels.py [--sizes 1024,4096] [--reps 3]

The compiled path must win by a wide margin for the acceptance-suite budgets
(the Z-functional run alone is ~8e10 pair evaluations); this script reports
the ratio on this machine and cross-checks that both backends agree.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

import importlib

from renewlm.kernels import reference

try:
    _core = importlib.import_module("renewlm.kernels._core")
except ImportError:
    _core = None


def _time(fn, *args, reps=3):
    best = float("inf")
    out = None
    for _ in range(reps):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return out, best


def bench_pairwise_pow(n, reps):
    x = np.cumsum(np.random.default_rng(0).random(n) + 1e-3)
    pairs = (n - 2) * (n - 1) / 2
    rows = []
    ref_val, ref_t = _time(reference.pairwise_pow_sum, x, -0.4, 2, reps=reps)
    rows.append(("numpy", ref_t, pairs / ref_t / 1e6, 0.0))
    if _core is not None:
        val, t = _time(_core.pairwise_pow_sum, x, -0.4, 2, reps=reps)
        rows.append(("compiled", t, pairs / t / 1e6, abs(val - ref_val) / abs(ref_val)))
    return rows


def bench_acov(n, reps):
    rng = np.random.default_rng(1)
    t_arr = np.cumsum(rng.integers(1, 64, n)).astype(np.float64)
    table = np.abs(rng.random(4096)) + 0.1
    pairs = n * (n - 1) / 2
    rows = []
    ref_val, ref_t = _time(reference.pairwise_acov_sum, t_arr, table, 0.8, -0.4, reps=reps)
    rows.append(("numpy", ref_t, pairs / ref_t / 1e6, 0.0))
    if _core is not None:
        val, t = _time(_core.pairwise_acov_sum, t_arr, table, 0.8, -0.4, reps=reps)
        rows.append(("compiled", t, pairs / t / 1e6, abs(val - ref_val) / abs(ref_val)))
    return rows


def bench_scatter(n, reps):
    rng = np.random.default_rng(2)
    pos = np.cumsum(rng.integers(1, 4, n)).astype(np.int64)
    a_rev = rng.random(4 * n + 1)
    base = int(pos[0]) - a_rev.size + 1
    size = int(pos[-1]) - base + 1
    adds = n * a_rev.size
    rows = []

    def run(fn):
        out = np.zeros(size)
        fn(out, pos, a_rev, base)
        return out

    ref_out, ref_t = _time(run, reference.scatter_add_reversed, reps=reps)
    rows.append(("numpy", ref_t, adds / ref_t / 1e6, 0.0))
    if _core is not None:
        out, t = _time(run, _core.scatter_add_reversed, reps=reps)
        err = float(np.max(np.abs(out - ref_out)))
        rows.append(("compiled", t, adds / t / 1e6, err))
    return rows


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="1024,4096")
    ap.add_argument("--reps", type=int, default=3)
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    print(f"compiled backend available: {_core is not None}")
    for n in sizes:
        print(f"\n== n = {n}")
        for title, rows, unit in (
            ("pairwise_pow_sum", bench_pairwise_pow(n, args.reps), "Mpairs/s"),
            ("pairwise_acov_sum", bench_acov(n, args.reps), "Mpairs/s"),
            ("scatter_add_reversed", bench_scatter(n, args.reps), "Madds/s"),
        ):
            for backend, t, rate, err in rows:
                print(f"{title:22s} {backend:9s} {t * 1e3:9.2f} ms  "
                      f"{rate:10.1f} {unit}  err={err:.2e}")


if __name__ == "__main__":
    main()
