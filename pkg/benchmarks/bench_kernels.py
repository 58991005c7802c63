"""Benchmark the kernel backends against each other on the three hot paths.

Runs each kernel on a representative workload with both the pure numpy
backend and (when built) the compiled extension, asserts the results are
bit-identical, and prints a timing table.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

import numpy as np

from convdual._kernels import _pure

try:
    from convdual._kernels import _fast
except ImportError:
    _fast = None


def _time(fn, *args, repeat=3):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def bench_grid_sup(repeat):
    rng = np.random.default_rng(0)
    a = np.sort(rng.uniform(-3, 3, 8))
    b = rng.uniform(-2, 2, 8)
    xs = np.linspace(-5, 5, 100_001)
    vs = rng.uniform(-3, 3, 64)
    args = (a, b, -np.inf, np.inf, xs, vs)
    return "grid_sup (100k grid x 64 targets)", args, repeat


def bench_node_lp(repeat):
    rng = np.random.default_rng(1)
    n = 200_000
    c = rng.uniform(-2, 2, n)
    lo = np.zeros(n)
    hi = np.ones(n)
    term_ptr = np.arange(n + 1, dtype=np.int64)
    term_w = rng.uniform(0.1, 1.0, n)
    piece_ptr = (4 * np.arange(n + 1)).astype(np.int64)
    pa = np.tile(np.array([-2.0, -0.5, 0.5, 2.0]), n)
    pb = rng.uniform(-1, 1, 4 * n)
    args = (c, lo, hi, term_ptr, term_w, piece_ptr, pa, pb)
    return "node_lp (200k nodes, 4-piece epigraphs)", args, repeat


def bench_product_max(repeat):
    rng = np.random.default_rng(2)
    sizes = [21] * 5
    ptr = np.cumsum([0] + sizes).astype(np.int64)
    vals = rng.uniform(-3, 3, sum(sizes))
    args = (ptr, vals)
    return "product_max (21^5 = 4.08M tuples)", args, repeat


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    opts = ap.parse_args()

    jobs = [
        (bench_grid_sup, "maxaffine_grid_sup"),
        (bench_node_lp, "node_lp_batch"),
        (bench_product_max, "product_table_max"),
    ]
    print(f"{'workload':<42} {'pure':>10} {'compiled':>10} {'speedup':>9}")
    for make, name in jobs:
        label, args, repeat = make(opts.repeat)
        t_pure, r_pure = _time(getattr(_pure, name), *args, repeat=repeat)
        if _fast is None:
            print(f"{label:<42} {t_pure*1e3:>8.1f}ms {'n/a':>10} {'n/a':>9}")
            continue
        t_fast, r_fast = _time(getattr(_fast, name), *args, repeat=repeat)
        if isinstance(r_pure, tuple):
            same = all(np.array_equal(x, y, equal_nan=True) for x, y in zip(r_pure, r_fast))
        else:
            same = np.array_equal(np.asarray(r_pure), np.asarray(r_fast), equal_nan=True)
        assert same, f"backend results differ on {name}"
        print(
            f"{label:<42} {t_pure*1e3:>8.1f}ms {t_fast*1e3:>8.1f}ms "
            f"{t_pure / t_fast:>8.1f}x"
        )
    if _fast is None:
        print("compiled extension not built; showing pure timings only")


if __name__ == "__main__":
    main()
