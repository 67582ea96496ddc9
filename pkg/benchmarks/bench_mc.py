#!/usr/bin/env python3
"""Benchmark: compiled Monte-Carlo kernel vs the numpy fallback.

Both backends implement the identical replicate stream, so the p-values
must match bit for bit; the benchmark verifies that while timing them.

    python benchmarks/bench_mc.py [--iterations 9999]
"""
import argparse
import time

import numpy as np

import ctokit.stats as stats
from ctokit.stats import monte_carlo_p, table_from_matrix


def synthetic_table(n: int, rows: int, cols: int, seed: int):
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(n, np.ones(rows * cols) / (rows * cols)).reshape(rows, cols)
    counts += 1  # keep every marginal positive
    return table_from_matrix(counts.tolist())


def time_backend(table, iterations: int, backend: str) -> tuple[float, float]:
    started = time.perf_counter()
    p = monte_carlo_p(table, iterations=iterations, seed=42, backend=backend)
    return p, time.perf_counter() - started


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--iterations", type=int, default=9999)
    args = parser.parse_args()

    backends = stats.available_backends()
    print(f"available backends: {', '.join(backends)} (default: {stats.mc_backend_name()})")
    if "cython" not in backends:
        print("compiled kernel not built; run pip install -e . to build it")
        return

    # (label, table, iteration cap): the fallback pays one vectorized pass per
    # shuffle step, so large-n cases run fewer replicates to stay comparable.
    cases = [
        ("2x2, n=20", synthetic_table(16, 2, 2, 1), args.iterations),
        ("2x2, n=1000", synthetic_table(996, 2, 2, 2), args.iterations),
        ("4x5, n=1000", synthetic_table(980, 4, 5, 3), args.iterations),
        ("2x2, n=20000", synthetic_table(19_996, 2, 2, 4), min(args.iterations, 1999)),
        ("10x8, n=20000", synthetic_table(19_920, 10, 8, 5), min(args.iterations, 1999)),
    ]

    header = f"{'case':>16} {'n':>7} {'iters':>7} {'cython':>10} {'python':>10} {'speedup':>8}  p identical"
    print(header)
    print("-" * len(header))
    for name, table, iterations in cases:
        p_c, t_c = time_backend(table, iterations, "cython")
        p_p, t_p = time_backend(table, iterations, "python")
        print(
            f"{name:>16} {table.n:>7} {iterations:>7} {t_c:>9.3f}s {t_p:>9.3f}s {t_p / t_c:>7.1f}x  {p_c == p_p}"
        )
        assert p_c == p_p, f"backend mismatch on {name}: {p_c} != {p_p}"


if __name__ == "__main__":
    main()
