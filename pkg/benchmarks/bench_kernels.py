"""Time the jitted kernels against their numpy / pure-Python fallbacks.

    python benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import itertools
import random
from timeit import default_timer as timer

import numpy as np

from holefree import kernels
from holefree.holes import largest_empty_convex_polygon_2d


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = timer()
        fn()
        times.append(timer() - t0)
    return min(times)


def orientation_table(P):
    n = len(P)
    T = np.zeros((n, n, n), dtype=np.int8)
    for i, j, k in itertools.product(range(n), repeat=3):
        a, b, c = P[i], P[j], P[k]
        v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        T[i, j, k] = (v > 0) - (v < 0)
    return T


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = random.Random(0)

    P = [(rng.randint(-10 ** 6, 10 ** 6), rng.randint(-10 ** 6, 10 ** 6)) for _ in range(120)]
    tri = np.array(list(itertools.combinations(range(len(P)), 3)), dtype=np.int64)
    kernels.orient_batch(P, tri[:10], use_numba=True)  # compile
    rows = [
        ("orient_batch numba", best_of(lambda: kernels.orient_batch(P, tri, use_numba=True), args.repeat)),
        ("orient_batch numpy", best_of(lambda: kernels.orient_batch(P, tri, use_numba=False), args.repeat)),
        ("orient_batch exact", best_of(lambda: kernels._orient_exact(P, tri), 1)),
    ]

    Q = [(rng.randint(0, 30), rng.randint(0, 30)) for _ in range(14)]
    T = orientation_table(Q)
    kernels.largest_empty_masks(T)
    py = getattr(kernels._largest_empty_masks, "py_func", kernels._largest_empty_masks)
    rows += [
        ("largest_empty_masks numba (n=14)", best_of(lambda: kernels.largest_empty_masks(T), args.repeat)),
        ("largest_empty_masks python (n=14)", best_of(lambda: py(T), 1)),
    ]

    grid = [(x, y) for x in range(16) for y in range(16)]
    rows.append(("DP largest hole, 16x16 grid", best_of(lambda: largest_empty_convex_polygon_2d(grid), 1)))

    width = max(len(r[0]) for r in rows)
    for name, t in rows:
        print(f"{name:<{width}}  {t * 1e3:10.2f} ms")


if __name__ == "__main__":
    main()
