#!/usr/bin/env python3
"""Benchmark the compiled kernel lane against the pure-Python fallback.

Workloads are the ones that dominate real runs: sparse term-map
products sized like the Witt addition tables, dense Eisenstein
reduction at machine and big-integer moduli, and the flattened
structure-constant product used by nested towers.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import random
import time

from wittlab import _kernels_py as pure
from wittlab import wittcore

try:
    from wittlab import _kernels as compiled
except ImportError:
    compiled = None


def timeit(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def sparse_workload():
    phi3 = wittcore.ctx_for(3, 3).addition[2].terms
    phi4 = wittcore.ctx_for(3, 4).addition[3].terms
    return [
        ("sparse_mul phi3*phi3 (p=3)", "sparse_mul", (phi3, phi3)),
        ("sparse_mul phi4*phi3 (p=3)", "sparse_mul", (phi4, phi3)),
        ("sparse_pow phi3^3 (p=3)", "sparse_pow", (phi3, 3)),
    ]


def dense_workload():
    rng = random.Random(0)
    cases = []
    for label, mod, d in (
        ("zmod_poly_mulmod d=2 machine", 2**24, 2),
        ("zmod_poly_mulmod d=3 bigint", 3**45, 3),
    ):
        rows = tuple(tuple(rng.randrange(mod) for _ in range(d)) for _ in range(d - 1))
        a = tuple(rng.randrange(mod) for _ in range(d))
        b = tuple(rng.randrange(mod) for _ in range(d))
        cases.append((label + " x20000", "zmod_poly_mulmod", (a, b, rows, mod), 20000))
    rank = 3
    mod = 3**23
    struct = tuple(
        tuple(tuple(rng.randrange(mod) for _ in range(rank)) for _ in range(rank))
        for _ in range(rank)
    )
    a = tuple(rng.randrange(mod) for _ in range(rank))
    b = tuple(rng.randrange(mod) for _ in range(rank))
    cases.append(("flat_mul rank=3 x20000", "flat_mul", (a, b, struct, mod), 20000))
    return cases


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    if compiled is None:
        print("compiled lane not built; showing pure-Python timings only")

    rows = []
    for label, fname, fargs in sparse_workload():
        t_pure = timeit(lambda: getattr(pure, fname)(*fargs), args.repeat)
        t_comp = (
            timeit(lambda: getattr(compiled, fname)(*fargs), args.repeat)
            if compiled
            else None
        )
        rows.append((label, t_pure, t_comp))
    for label, fname, fargs, loops in dense_workload():
        def run(mod):
            fn = getattr(mod, fname)
            for _ in range(loops):
                fn(*fargs)

        t_pure = timeit(lambda: run(pure), args.repeat)
        t_comp = timeit(lambda: run(compiled), args.repeat) if compiled else None
        rows.append((label, t_pure, t_comp))

    agree = True
    if compiled:
        for label, fname, fargs in sparse_workload():
            agree &= getattr(pure, fname)(*fargs) == getattr(compiled, fname)(*fargs)
        for label, fname, fargs, _ in dense_workload():
            agree &= getattr(pure, fname)(*fargs) == getattr(compiled, fname)(*fargs)

    width = max(len(r[0]) for r in rows) + 2
    print(f"{'workload'.ljust(width)}{'pure (ms)':>12}{'cython (ms)':>13}{'speedup':>9}")
    for label, t_pure, t_comp in rows:
        if t_comp is None:
            print(f"{label.ljust(width)}{t_pure * 1e3:>12.2f}{'-':>13}{'-':>9}")
        else:
            print(
                f"{label.ljust(width)}{t_pure * 1e3:>12.2f}{t_comp * 1e3:>13.2f}"
                f"{t_pure / t_comp:>8.1f}x"
            )
    if compiled:
        print(f"lanes agree on all workloads: {agree}")


if __name__ == "__main__":
    main()
