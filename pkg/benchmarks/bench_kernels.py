"""Time the hot kernels and a full construction under each backend.

    python3 benchmarks/bench_kernels.py [--b 3] [--m 8] [--s 20] [--repeat 3]

The first numba call of each kernel compiles (or loads the on-disk cache),
so every timing is taken after one warm-up call.
"""

import argparse
import time

import numpy as np

from latgen import kernels
from latgen.cbc import ExclusionPolicy, construct
from latgen.fast import fold_products
from latgen.korobov import LatticeParams, omega_table
from latgen.reduction import parse_schedule, reduced_space


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--b", type=int, default=3)
    ap.add_argument("--m", type=int, default=8)
    ap.add_argument("--s", type=int, default=20)
    ap.add_argument("--naive-m", type=int, default=5, help="smaller exponent for the O(s^2 N^2) naive engine")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    b, m, s = args.b, args.m, args.s
    N = b**m
    om = omega_table(N, 2.0)
    rng = np.random.default_rng(0)
    P = rng.uniform(0.5, 2.0, N)
    space = reduced_space(b, m, 1)
    Q = fold_products(P, space.modulus)
    gamma = tuple(j**-2.0 for j in range(1, s + 1))
    params = LatticeParams(b, m, s, 2.0, gamma)
    small = LatticeParams(b, args.naive_m, s, 2.0, gamma)
    sched = parse_schedule("log", s, b)
    nr = ExclusionPolicy("no-repeat")

    cases = {
        f"update_products N={N}": lambda: kernels.update_products(P, 17, 0.5, om),
        f"kernel_mean N={N}": lambda: kernels.kernel_mean(P, 17, om),
        f"sweep_direct M={space.modulus}": lambda: kernels.sweep_direct(Q, om, space.candidates, b),
        f"naive_errors N={N} d=4": lambda: kernels.naive_errors(
            np.array([1, 5, 7, 11]), np.array(gamma[:5]), om, space.candidates[:256], 0.0
        ),
        f"construct fast N={N} s={s}": lambda: construct(params, sched, nr, "fast"),
        f"construct naive N={small.N} s={s}": lambda: construct(small, sched, nr, "naive"),
    }

    backends = kernels.available_backends()
    rows = {name: {} for name in cases}
    for be in backends:
        prev = kernels.use_backend(be)
        try:
            for name, fn in cases.items():
                rows[name][be] = best_of(fn, args.repeat)
        finally:
            kernels.use_backend(prev)

    print(f"{'case':<36}" + "".join(f"{be:>12}" for be in backends) + ("     speedup" if len(backends) > 1 else ""))
    for name, t in rows.items():
        line = f"{name:<36}" + "".join(f"{t[be] * 1e3:10.2f}ms" for be in backends)
        if len(backends) > 1:
            line += f"{t['numpy'] / t['numba']:11.1f}x"
        print(line)


if __name__ == "__main__":
    main()
