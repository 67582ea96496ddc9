"""Pearson chi-squared, Monte-Carlo permutation p-values and Cramér's V.

The Monte-Carlo p-value replicates independence by randomly permuting the
row variable's labels against the column labels, which preserves both
marginals exactly; p = (1 + #{chi2_replicate >= chi2_observed}) /
(iterations + 1).  Replicate streams are counter-based per replicate index,
so results are deterministic for a seed and independent of chunking or
thread count.

Cramér's V is computed from the observed chi-squared statistic by default;
``v_source="replicate_mean"`` switches to the mean replicate statistic as a
sensitivity check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import chi2 as _chi2_dist

from ..errors import StatsDomainError, ValidationError
from .tables import ContingencyTable

EFFECT_LABELS = ("negligible", "small", "medium", "large")

MIN_ITERATIONS = 999

# Relative tie tolerance when comparing replicate statistics against the
# observed one; absorbs last-ulp differences between equal-valued tables.
_TIE_RELATIVE_EPS = 1e-12


def expected_counts(table: ContingencyTable) -> np.ndarray:
    row_totals = np.array(table.row_totals(), dtype=np.float64)
    col_totals = np.array(table.col_totals(), dtype=np.float64)
    if np.any(row_totals == 0) or np.any(col_totals == 0):
        raise StatsDomainError("expected count of zero: drop empty rows/columns first")
    return np.outer(row_totals, col_totals) / float(table.n)


def pearson_chi2(table: ContingencyTable) -> tuple[float, int]:
    """Observed statistic and degrees of freedom; cells accumulate in row-major order."""
    expected = expected_counts(table).ravel()
    observed = table.matrix().astype(np.float64).ravel()
    statistic = 0.0
    for c in range(expected.shape[0]):
        d = observed[c] - expected[c]
        statistic = statistic + d * d / expected[c]
    rows, cols = table.shape
    return statistic, (rows - 1) * (cols - 1)


def _label_arrays(table: ContingencyTable) -> tuple[np.ndarray, np.ndarray]:
    rows, cols = [], []
    for i, row in enumerate(table.counts):
        for j, count in enumerate(row):
            rows.extend([i] * count)
            cols.extend([j] * count)
    return np.array(rows, dtype=np.int32), np.array(cols, dtype=np.int32)


def monte_carlo_p(
    table: ContingencyTable,
    iterations: int = 9999,
    seed: int = 0,
    backend: str | None = None,
) -> float:
    statistic, _ = pearson_chi2(table)
    count, _ = _run_kernel(table, statistic, iterations, seed, backend)
    return (1 + count) / (iterations + 1)


def _run_kernel(
    table: ContingencyTable,
    statistic: float,
    iterations: int,
    seed: int,
    backend: str | None,
) -> tuple[int, float]:
    from . import get_backend  # late import: backend chosen at package import

    if iterations < MIN_ITERATIONS:
        raise ValidationError(f"iterations must be >= {MIN_ITERATIONS}, got {iterations}")
    impl = get_backend(backend)
    row_labels, col_labels = _label_arrays(table)
    expected = expected_counts(table).ravel()
    threshold = statistic * (1.0 - _TIE_RELATIVE_EPS)
    rows, cols = table.shape
    return impl.count_exceedances(
        row_labels,
        col_labels,
        np.ascontiguousarray(expected, dtype=np.float64),
        threshold,
        int(iterations),
        seed & 0xFFFFFFFFFFFFFFFF,
        rows,
        cols,
    )


def cramers_v(chi2: float, n: int, rows: int, cols: int) -> float:
    if n <= 0:
        raise StatsDomainError("n must be positive")
    if min(rows, cols) < 2:
        raise StatsDomainError("need at least a 2x2 table for Cramér's V")
    if chi2 < 0:
        raise StatsDomainError("chi-squared statistic must be non-negative")
    return math.sqrt((chi2 / n) / (min(rows, cols) - 1))


def effect_label(v: float) -> str:
    if not 0.0 <= v <= 1.0:
        raise StatsDomainError(f"Cramér's V outside [0, 1]: {v}")
    if v < 0.1:
        return "negligible"
    if v < 0.3:
        return "small"
    if v < 0.5:
        return "medium"
    return "large"


@dataclass(frozen=True)
class AssociationResult:
    row_variable: str
    col_variable: str
    chi2: float
    df: int
    p_value: float
    iterations: int
    seed: int
    cramers_v: float
    effect: str
    n: int
    p_asymptotic: float  # diagnostic only; the Monte-Carlo p is the primary value


def associate(
    table: ContingencyTable,
    iterations: int = 9999,
    seed: int = 0,
    v_source: str = "observed",
    backend: str | None = None,
) -> AssociationResult:
    """Full battery for one variable pair."""
    if v_source not in ("observed", "replicate_mean"):
        raise ValidationError(f"v_source must be observed or replicate_mean, got {v_source!r}")
    statistic, df = pearson_chi2(table)
    count, chi2_sum = _run_kernel(table, statistic, iterations, seed, backend)
    p_value = (1 + count) / (iterations + 1)
    rows, cols = table.shape
    v_basis = statistic if v_source == "observed" else chi2_sum / iterations
    v = min(cramers_v(v_basis, table.n, rows, cols), 1.0)
    return AssociationResult(
        row_variable=table.row_variable,
        col_variable=table.col_variable,
        chi2=statistic,
        df=df,
        p_value=p_value,
        iterations=iterations,
        seed=seed,
        cramers_v=v,
        effect=effect_label(v),
        n=table.n,
        p_asymptotic=float(_chi2_dist.sf(statistic, df)),
    )


def association_record(result: AssociationResult) -> dict:
    return {
        "var_a": result.row_variable,
        "var_b": result.col_variable,
        "chi2": result.chi2,
        "df": result.df,
        "p_value": result.p_value,
        "iterations": result.iterations,
        "seed": result.seed,
        "cramers_v": result.cramers_v,
        "effect": result.effect,
        "n": result.n,
        "p_asymptotic": result.p_asymptotic,
    }
