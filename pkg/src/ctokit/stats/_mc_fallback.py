"""Pure-numpy Monte-Carlo permutation kernel.

Implements exactly the same replicate stream as the compiled kernel in
``_mc_kernel.pyx``: replicate ``r`` draws from a splitmix64 stream seeded
with ``mix64(seed + (r+1)*GAMMA)`` and shuffles the row labels with a
Fisher-Yates pass whose k-th draw is ``mix64(base + (k+1)*GAMMA) % (i+1)``.
Per-replicate chi-squared accumulates over cells in row-major order, so the
exceedance count is bit-identical across both backends and independent of
chunking.
"""
from __future__ import annotations

import numpy as np

GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_U64 = np.uint64


def _mix64(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> _U64(30))) * _U64(_M1)
    z = (z ^ (z >> _U64(27))) * _U64(_M2)
    return z ^ (z >> _U64(31))


def count_exceedances(
    row_labels: np.ndarray,
    col_labels: np.ndarray,
    expected: np.ndarray,
    threshold: float,
    iterations: int,
    seed: int,
    n_rows: int,
    n_cols: int,
) -> tuple[int, float]:
    """Count replicates with chi2 >= threshold; also returns the chi2 sum."""
    n = int(row_labels.shape[0])
    cells = n_rows * n_cols
    rows = row_labels.astype(np.int64)
    cols = col_labels.astype(np.int64)
    seed_u = _U64(seed & 0xFFFFFFFFFFFFFFFF)

    chunk = max(1, min(iterations, 8_000_000 // max(n, 1)))
    exceed = 0
    chi2_sum = 0.0

    with np.errstate(over="ignore"):
        for start in range(0, iterations, chunk):
            stop = min(start + chunk, iterations)
            reps = np.arange(start, stop, dtype=np.uint64)
            batch = reps.shape[0]
            base = _mix64(seed_u + (reps + _U64(1)) * _U64(GAMMA))

            perm = np.tile(np.arange(n, dtype=np.int64), (batch, 1))
            batch_rows = np.arange(batch)
            for k in range(n - 1):
                i = n - 1 - k
                x = _mix64(base + _U64(k + 1) * _U64(GAMMA))
                j = (x % _U64(i + 1)).astype(np.int64)
                p_i = perm[batch_rows, i].copy()
                p_j = perm[batch_rows, j]
                perm[batch_rows, j] = p_i
                perm[batch_rows, i] = p_j

            code = rows[perm] * n_cols + cols[np.newaxis, :]
            offsets = batch_rows[:, np.newaxis] * cells + code
            counts = np.bincount(offsets.ravel(), minlength=batch * cells).reshape(
                batch, cells
            ).astype(np.float64)

            chi2 = np.zeros(batch, dtype=np.float64)
            for c in range(cells):
                d = counts[:, c] - expected[c]
                chi2 += d * d / expected[c]

            exceed += int(np.count_nonzero(chi2 >= threshold))
            chi2_sum += float(chi2.sum())

    return exceed, chi2_sum
