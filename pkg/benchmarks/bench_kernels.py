"""Compare the compiled quadrature kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5] [--grid 16]

Prints per-kernel best-of-N timings, the speedup and the largest relative
difference between the two backends.  The end-to-end row times one full
nt_report on the Fubini-Study chart with each backend swapped in.
"""
from __future__ import annotations

import argparse
import timeit
from itertools import combinations

import numpy as np

from folcalc import kernels
from folcalc.expr import Expression
from folcalc.fields import Chart, HermitianField
from folcalc.lab import nt_report

try:
    from folcalc import _kernels as fast
except ImportError:  # pragma: no cover - extension not built
    fast = None
slow = kernels.python_backend()


def _samples(n: int, count: int, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    B = rng.normal(size=(count, n, n)) + 1j * rng.normal(size=(count, n, n))
    return np.ascontiguousarray(B @ np.conj(np.transpose(B, (0, 2, 1))))


def _pair_arrays(n: int, size: int):
    S = list(combinations(range(n), size))
    rows = np.array([I for I in S for _ in S], dtype=np.intp)
    cols = np.array([J for _ in S for J in S], dtype=np.intp)
    return rows, cols, np.ones(len(rows))


def _best(fn, repeat: int) -> float:
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def _fs_report(grid: int) -> None:
    vars = ("z1", "z2")
    H = HermitianField.from_entries(
        2, {(1, 1): Expression.parse("eps", vars), (2, 2): Expression.parse("1/(1+abs2(z2))^2 + eps", vars)},
        (0.1, 0.05, 0.025))
    nt_report(H, Chart((0, 0, 0, 0), 1.0, grid), 2, 1)


def _swap(module) -> None:
    kernels.pairwise_sum = module.pairwise_sum
    kernels.minor_values = module.minor_values
    kernels.minor_abs_sums = module.minor_abs_sums


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--grid", type=int, default=16, help="chart grid for the end-to-end row")
    args = ap.parse_args(argv)
    if fast is None:
        raise SystemExit("compiled extension not available; run `pip install -e . --no-build-isolation` first")

    values = np.random.default_rng(1).normal(size=1 << 20)
    cases = [("pairwise_sum 2^20", lambda m: m.pairwise_sum(values))]
    for n, size, count in ((2, 1, 65536), (3, 2, 32768), (4, 2, 16384)):
        H = _samples(n, count)
        rows, cols, scales = _pair_arrays(n, size)
        cases.append((f"minor_abs_sums n={n} m={size} N={count}",
                      lambda m, H=H, r=rows, c=cols, s=scales: m.minor_abs_sums(H, r, c, s)))

    print(f"{'kernel':<34}{'python [ms]':>13}{'cython [ms]':>13}{'speedup':>9}{'max rel diff':>14}")
    for name, call in cases:
        t_py = _best(lambda: call(slow), args.repeat)
        t_cy = _best(lambda: call(fast), args.repeat)
        a, b = np.asarray(call(slow), dtype=float), np.asarray(call(fast), dtype=float)
        diff = float(np.max(np.abs(a - b) / np.maximum(np.abs(a), 1e-300)))
        print(f"{name:<34}{t_py * 1e3:>13.2f}{t_cy * 1e3:>13.2f}{t_py / t_cy:>9.1f}{diff:>14.2e}")

    original = (kernels.pairwise_sum, kernels.minor_values, kernels.minor_abs_sums)
    try:
        _swap(slow)
        t_py = _best(lambda: _fs_report(args.grid), max(1, args.repeat // 2))
        _swap(fast)
        t_cy = _best(lambda: _fs_report(args.grid), max(1, args.repeat // 2))
    finally:
        kernels.pairwise_sum, kernels.minor_values, kernels.minor_abs_sums = original
    name = f"nt_report FS grid={args.grid}"
    print(f"{name:<34}{t_py * 1e3:>13.2f}{t_cy * 1e3:>13.2f}{t_py / t_cy:>9.1f}{'':>14}")


if __name__ == "__main__":
    main()
