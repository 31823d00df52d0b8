"""Compare the compiled kernels against the numpy fallback.

Usage::

    python3 benchmarks/bench_kernels.py [--steps 20000] [--reps 256] [--dp-n 2000]

Prints ns/step for the simulation kernel and wall time for the exact DP,
and checks that both backends return identical arrays.
"""
import argparse
import time

import numpy as np

from trendlab import _fallback
from trendlab.rng import SeedSpec

try:
    from trendlab import _kernels
except ImportError:  # extension not built
    _kernels = None


def _best_of(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench(module, args):
    keys = SeedSpec(1729).keys(0, args.reps)
    grid = np.array([args.steps // 4, args.steps // 2, args.steps], dtype=np.int64)
    sim_t, counts = _best_of(
        lambda: module.simulate_counts(keys, 0.3, 0.2, 0.6, 0.7, 1, 1, args.steps, grid), args.repeat
    )
    dp_t, pmf = _best_of(lambda: module.exact_pmf(0.3, 0.1, 1, 1, args.dp_n), args.repeat)
    return {
        "ns_per_step": 1e9 * sim_t / (args.steps * args.reps),
        "dp_seconds": dp_t,
        "counts": counts,
        "pmf": pmf,
    }


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--steps", type=int, default=20000)
    parser.add_argument("--reps", type=int, default=256)
    parser.add_argument("--dp-n", type=int, default=2000)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)

    results = {"numpy": bench(_fallback, args)}
    if _kernels is not None:
        results["cython"] = bench(_kernels, args)
    else:
        print("compiled extension not built; numpy fallback only")

    print(f"{'backend':<8} {'sim ns/step':>12} {'dp seconds':>11}")
    for name, r in results.items():
        print(f"{name:<8} {r['ns_per_step']:>12.2f} {r['dp_seconds']:>11.4f}")
    if "cython" in results:
        c, f = results["cython"], results["numpy"]
        same = np.array_equal(c["counts"], f["counts"]) and np.array_equal(c["pmf"], f["pmf"])
        print(f"speedup  sim x{f['ns_per_step'] / c['ns_per_step']:.1f}, dp x{f['dp_seconds'] / c['dp_seconds']:.1f}")
        print(f"identical output: {same}")


if __name__ == "__main__":
    main()
