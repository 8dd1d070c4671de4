"""Benchmark the compiled contraction kernel against the numpy fallback.

Run directly: python benchmarks/bench_kernels.py
"""
import argparse
import time

import numpy as np

from chancrit import _kernels
from chancrit._kernels import _fallback

CASES = [
    # (n replicas, chi, repeats)
    (1, 32, 200),
    (2, 16, 100),
    (2, 32, 30),
    (2, 48, 10),
    (3, 12, 20),
    (3, 16, 6),
]


def time_backend(module, n, chi, repeats, rng):
    env = rng.normal(size=(chi,) * (2 * n)) + 0j
    a = rng.normal(size=(chi, 2, chi)) + 0j
    op = rng.normal(size=(2**n, 2**n)) + 0j
    module.apply_site(env, a, op, n)  # warm up
    t0 = time.perf_counter()
    for _ in range(repeats):
        module.apply_site(env, a, op, n)
    return (time.perf_counter() - t0) / repeats


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    backends = [("numpy", _fallback)]
    if "compiled" in _kernels.available_backends():
        from chancrit._kernels import _core

        backends.append(("compiled", _core))
    else:
        print("compiled kernel unavailable; timing numpy only")

    rng = np.random.default_rng(args.seed)
    print(f"{'n':>3} {'chi':>5}" + "".join(f" {name:>12}" for name, _ in backends)
          + ("      speedup" if len(backends) == 2 else ""))
    for n, chi, repeats in CASES:
        times = [time_backend(mod, n, chi, repeats, rng) for _, mod in backends]
        row = f"{n:>3} {chi:>5}" + "".join(f" {t * 1e3:>10.2f}ms" for t in times)
        if len(times) == 2:
            row += f" {times[0] / times[1]:>11.2f}x"
        print(row)


if __name__ == "__main__":
    main()
