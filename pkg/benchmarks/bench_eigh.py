#!/usr/bin/env python3
"""Benchmark the eigensolver backends.

Times the compiled Cython kernel against the pure NumPy fallback (and
numpy.linalg.eigh as an external reference) on stacks of small Hermitian
matrices, which is the shape the inequality campaigns hit: many independent
eigenproblems of dimension <= 16.

Usage:
    python benchmarks/bench_eigh.py [--count 2000] [--sizes 2,4,8,16]
"""

import argparse
import time

import numpy as np

from traceminmax._kernel import available_backends, eigh_stack, eigvalsh_stack


def make_stack(count, n, seed=0):
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((count, n, n)) + 1j * rng.standard_normal((count, n, n))
    return (g + np.conj(np.transpose(g, (0, 2, 1)))) / 2.0


def time_call(fn, *args, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--count", type=int, default=2000,
                        help="matrices per stack")
    parser.add_argument("--sizes", default="2,4,8,16",
                        help="comma separated matrix dimensions")
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    backends = available_backends()
    print(f"backends available: {', '.join(backends)}")
    print(f"stack of {args.count} matrices per timing, best of 3\n")

    header = f"{'n':>4} {'mode':>10}"
    for b in backends:
        header += f" {b + ' (us/mat)':>20}"
    header += f" {'numpy (us/mat)':>16}"
    print(header)
    for n in sizes:
        stack = make_stack(args.count, n)
        for mode, ours, ref in (
            ("values", eigvalsh_stack, np.linalg.eigvalsh),
            ("vectors", eigh_stack, np.linalg.eigh),
        ):
            row = f"{n:>4} {mode:>10}"
            for b in backends:
                dt = time_call(lambda: ours(stack, impl=b))
                row += f" {dt / args.count * 1e6:>20.2f}"
            dt = time_call(lambda: ref(stack))
            row += f" {dt / args.count * 1e6:>16.2f}"
            print(row)

    # campaign shape: one small stack (the four quadruple members) per call,
    # so per-call overhead matters as much as the factorization itself
    print("\ncampaign shape: 500 calls on stacks of 4 (n = 8, eigenvalues only)")
    stacks = [make_stack(4, 8, seed=i) for i in range(500)]
    for b in backends:
        dt = time_call(lambda: [eigvalsh_stack(s, impl=b) for s in stacks],
                       repeats=2)
        print(f"  {b:>10}: {dt / 500 * 1e6:8.1f} us/call")
    dt = time_call(lambda: [np.linalg.eigvalsh(s) for s in stacks], repeats=2)
    print(f"  {'numpy':>10}: {dt / 500 * 1e6:8.1f} us/call")

    # agreement check while we are at it
    stack = make_stack(64, 8, seed=1)
    ref = np.linalg.eigvalsh(stack)
    for b in backends:
        got = eigvalsh_stack(stack, impl=b)
        print(f"\nmax |eig - numpy| for {b}: {np.abs(got - ref).max():.3e}")


if __name__ == "__main__":
    main()
