#!/usr/bin/env python3
"""Benchmark the compiled simulation kernel against the numpy fallback.

Runs the batch path sampler on a small birth-death chain, the strictly
skip-free 3-state fixture, and a larger random skip-free generator, at
several path counts, and reports throughput plus speedup. Also re-checks
that both backends produce identical discrete output (visit counts,
terminals, jump counts) on every workload.

Usage: python benchmarks/bench_kernels.py [--paths 200000] [--repeat 3]
"""

import argparse
import time

import numpy as np

from occutime import simulate as sim
from occutime import validate_generator
from occutime.kernels import available_backends

FIX_BD = [[-1.0, 1.0], [0.5, -1.5]]
FIX_SF = [[-1.0, 1.0, 0.0], [0.5, -1.5, 1.0], [0.4, 0.1, -1.5]]


def make_big(n=12, seed=0):
    rng = np.random.default_rng(seed)
    q = np.zeros((n, n))
    for i in range(n - 1):
        q[i, i + 1] = rng.uniform(0.5, 2.0)
    for i in range(1, n):
        for j in range(i):
            if rng.random() < 0.4:
                q[i, j] = rng.uniform(0.1, 0.8)
    diag = -q.sum(axis=1)
    diag[n - 1] -= 1.0
    np.fill_diagonal(q, diag)
    return validate_generator(q)


def run_once(mod, g, d, num_paths, seed):
    sizes, offsets = sim._batch_layout(num_paths, 100)
    keys = sim._path_keys(seed, sizes, offsets)
    tables = sim._tables(g, d)
    occ = np.zeros((num_paths, g.n))
    visits = np.zeros((num_paths, g.n), np.int64)
    status = np.full(num_paths, -1, np.int8)
    jumps = np.zeros(num_paths, np.int64)
    t0 = time.perf_counter()
    mod.simulate_paths(keys, 0, *tables, 10**7, occ, visits, status, jumps)
    elapsed = time.perf_counter() - t0
    return elapsed, occ, visits, status, jumps


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--paths", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    backends = available_backends()
    print(f"available backends: {', '.join(backends)}")
    if "compiled" not in backends:
        print("compiled kernel not built; timing the fallback only")

    workloads = [
        ("birth-death n=2", validate_generator(FIX_BD), np.array([1.0, 1.0])),
        ("skip-free n=3", validate_generator(FIX_SF), np.array([1.0, 1.0, 1.0])),
        ("skip-free n=12", make_big(), np.full(12, 0.5)),
    ]

    header = f"{'workload':<18} {'paths':>9} {'backend':>9} {'time [s]':>10} " \
             f"{'paths/s':>12} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for label, g, d in workloads:
        times = {}
        outputs = {}
        for name, mod in backends.items():
            best = np.inf
            for r in range(args.repeat):
                elapsed, occ, visits, status, jumps = run_once(
                    mod, g, d, args.paths, seed=1234)
                best = min(best, elapsed)
            times[name] = best
            outputs[name] = (visits, status, jumps, occ)
        base = times.get("python", np.nan)
        for name in backends:
            speed = base / times[name] if times[name] else float("nan")
            print(f"{label:<18} {args.paths:>9} {name:>9} {times[name]:>10.4f} "
                  f"{args.paths / times[name]:>12.0f} {speed:>7.1f}x")
        if len(outputs) == 2:
            v1, s1, j1, o1 = outputs["compiled"]
            v2, s2, j2, o2 = outputs["python"]
            ok = (np.array_equal(v1, v2) and np.array_equal(s1, s2)
                  and np.array_equal(j1, j2)
                  and np.allclose(o1, o2, rtol=1e-12, atol=1e-14))
            print(f"{'':<18} agreement: discrete outputs identical, "
                  f"occupations within 1e-12 -> {'OK' if ok else 'MISMATCH'}")
    print("\nnote: estimates built from these outputs are bit-reproducible "
          "per backend (seeded, thread-invariant); across backends the only "
          "divergence is the last ulp of log() in holding times.")


if __name__ == "__main__":
    main()
