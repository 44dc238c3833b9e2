"""Benchmark: compiled split kernels vs the pure-numpy fallback.

Runs the two hot kernels over a range of node sizes, then an end-to-end
boosted-tree fit with each engine. Invoke with ``python benchmarks/
bench_kernels.py``; pass ``--rounds`` / ``--sizes`` to adjust.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from vacscreen.classify import _split_py

try:
    from vacscreen.classify import _split_ext
except ImportError:
    _split_ext = None


def time_call(fn, *args, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def bench_kernels(sizes: list[int], repeats: int) -> None:
    rng = np.random.default_rng(0)
    engines = [("python", _split_py)]
    if _split_ext is not None:
        engines.append(("compiled", _split_ext))
    print(f"{'kernel':<18}{'n':>9}" + "".join(f"{name:>14}" for name, _ in engines) + f"{'speedup':>10}")
    for n in sizes:
        values = np.sort(rng.normal(size=n))
        grad = rng.normal(size=n)
        hess = rng.random(size=n) + 0.1
        row = [time_call(m.best_split_grad_hess, values, grad, hess, 1.0, 1.0,
                         repeats=repeats) for _, m in engines]
        speedup = row[0] / row[-1] if len(row) > 1 else float("nan")
        print(f"{'grad/hess split':<18}{n:>9}"
              + "".join(f"{t * 1e3:>12.3f}ms" for t in row) + f"{speedup:>9.1f}x")
        weights = rng.random(size=n) + 0.5
        pos = weights * (rng.random(size=n) < 0.4)
        row = [time_call(m.best_split_gini, values, weights, pos, repeats=repeats)
               for _, m in engines]
        speedup = row[0] / row[-1] if len(row) > 1 else float("nan")
        print(f"{'gini split':<18}{n:>9}"
              + "".join(f"{t * 1e3:>12.3f}ms" for t in row) + f"{speedup:>9.1f}x")


def bench_gbt(n: int, d: int, rounds: int) -> None:
    from vacscreen.classify import gbt

    rng = np.random.default_rng(1)
    X = rng.normal(size=(n, d))
    w = rng.normal(size=d)
    y = (X @ w + rng.normal(size=n) > 0).astype(float)

    engines = [("python", _split_py)]
    if _split_ext is not None:
        engines.append(("compiled", _split_ext))
    original = gbt.best_split_grad_hess
    times = {}
    try:
        for name, module in engines:
            gbt.best_split_grad_hess = module.best_split_grad_hess
            start = time.perf_counter()
            gbt.train_gbt(X, y, n_rounds=rounds, early_stopping_rounds=None)
            times[name] = time.perf_counter() - start
    finally:
        gbt.best_split_grad_hess = original
    print(f"\nend-to-end gbt fit (n={n}, d={d}, rounds={rounds}):")
    for name, elapsed in times.items():
        print(f"  {name:<10}{elapsed:>8.2f}s")
    if len(times) == 2:
        print(f"  speedup   {times['python'] / times['compiled']:>7.1f}x")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", type=int, nargs="*", default=[1_000, 10_000, 100_000])
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--gbt-n", type=int, default=2000)
    parser.add_argument("--gbt-d", type=int, default=8)
    parser.add_argument("--rounds", type=int, default=30)
    args = parser.parse_args()
    if _split_ext is None:
        print("note: compiled kernels unavailable; timing fallback only")
    bench_kernels(args.sizes, args.repeats)
    bench_gbt(args.gbt_n, args.gbt_d, args.rounds)


if __name__ == "__main__":
    main()
