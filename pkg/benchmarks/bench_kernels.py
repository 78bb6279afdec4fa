"""Time the compiled kernels against the pure-Python fallback.

Runs family_stats (per-mask collision counts, entropies, image sizes)
and pair_stats (Hamming-shell pair counts) on random function tables
and prints one row per (field order, dimension, kernel).

Usage: python3 benchmarks/bench_kernels.py [--repeats 5]
"""

import argparse
import time

from maskent import _kernels_py
from maskent._rng import SplitMix64
from maskent.family import _coords_matrix
from maskent.gf import field_for_order
from maskent.verify import random_table

try:
    from maskent import _kernels
except ImportError:
    _kernels = None

CASES = [(8, 2), (9, 2), (4, 3), (16, 1), (3, 4)]


def _best_of(repeats, fn, *args):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5, help="timings per case (best kept)")
    args = parser.parse_args()

    backends = [("python", _kernels_py)]
    if _kernels is not None:
        backends.append(("cython", _kernels))
    else:
        print("compiled extension not available; timing the fallback only")

    header = f"{'q':>3} {'n':>2} {'N':>5} {'kernel':>12} {'backend':>8} {'best (ms)':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for q, n in CASES:
        spec = field_for_order(q)
        f = random_table(spec, n, SplitMix64(q * 100 + n))
        coords = _coords_matrix(q, n)
        size = q**n
        for kernel_name, runner in (
            ("family_stats", lambda mod: mod.family_stats(
                f.codes, coords, spec.add_table, spec.mul_table, q, n)),
            ("pair_stats", lambda mod: mod.pair_stats(f.codes, coords, q, n)),
        ):
            times = {}
            for backend_name, mod in backends:
                times[backend_name] = _best_of(args.repeats, runner, mod)
            for backend_name, _ in backends:
                t = times[backend_name]
                speedup = ""
                if backend_name == "cython":
                    speedup = f"{times['python'] / t:7.1f}x"
                print(
                    f"{q:>3} {n:>2} {size:>5} {kernel_name:>12} {backend_name:>8} "
                    f"{t * 1e3:>10.3f} {speedup:>8}"
                )


if __name__ == "__main__":
    main()
