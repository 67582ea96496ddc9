"""Contingency tables over analysis records.

Records are plain mappings; a record enters a table only when it carries a
non-None value for both selected variables, so tables over person-level
variables automatically restrict themselves to disambiguated events.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from ..errors import DegenerateTableError


def _label_sort_key(label: str):
    try:
        return (0, int(label), "")
    except ValueError:
        return (1, 0, label)


@dataclass(frozen=True)
class ContingencyTable:
    row_variable: str
    col_variable: str
    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]
    counts: tuple[tuple[int, ...], ...]
    n: int

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.row_labels), len(self.col_labels))

    def matrix(self) -> np.ndarray:
        return np.array(self.counts, dtype=np.int64)

    def row_totals(self) -> tuple[int, ...]:
        return tuple(sum(row) for row in self.counts)

    def col_totals(self) -> tuple[int, ...]:
        return tuple(sum(col) for col in zip(*self.counts))


def table_from_matrix(
    matrix: Sequence[Sequence[int]],
    row_variable: str = "rows",
    col_variable: str = "cols",
    row_labels: Sequence[str] | None = None,
    col_labels: Sequence[str] | None = None,
) -> ContingencyTable:
    """Build a table from explicit counts, dropping all-zero rows and columns."""
    counts = [[int(c) for c in row] for row in matrix]
    if any(c < 0 for row in counts for c in row):
        raise DegenerateTableError("cell counts must be non-negative")
    r_labels = [str(i) for i in range(len(counts))] if row_labels is None else [str(l) for l in row_labels]
    c_labels = (
        [str(j) for j in range(len(counts[0]) if counts else 0)]
        if col_labels is None
        else [str(l) for l in col_labels]
    )

    keep_rows = [i for i, row in enumerate(counts) if sum(row) > 0]
    keep_cols = [j for j in range(len(c_labels)) if sum(row[j] for row in counts) > 0]
    if len(keep_rows) < 2 or len(keep_cols) < 2:
        raise DegenerateTableError(
            f"{row_variable} x {col_variable}: need at least 2 non-empty labels per axis"
        )
    trimmed = tuple(tuple(counts[i][j] for j in keep_cols) for i in keep_rows)
    return ContingencyTable(
        row_variable=row_variable,
        col_variable=col_variable,
        row_labels=tuple(r_labels[i] for i in keep_rows),
        col_labels=tuple(c_labels[j] for j in keep_cols),
        counts=trimmed,
        n=int(sum(sum(row) for row in trimmed)),
    )


def build_table(
    records: Iterable[Mapping], var_a: str, var_b: str
) -> ContingencyTable:
    """Cross-tabulate two variables over the records that carry both."""
    pairs = []
    for record in records:
        a, b = record.get(var_a), record.get(var_b)
        if a is None or b is None:
            continue
        pairs.append((str(a), str(b)))
    if not pairs:
        raise DegenerateTableError(f"{var_a} x {var_b}: no records carry both variables")

    row_labels = sorted({a for a, _ in pairs}, key=_label_sort_key)
    col_labels = sorted({b for _, b in pairs}, key=_label_sort_key)
    if len(row_labels) < 2 or len(col_labels) < 2:
        raise DegenerateTableError(
            f"{var_a} x {var_b}: need at least 2 distinct labels per axis"
        )
    row_index = {label: i for i, label in enumerate(row_labels)}
    col_index = {label: j for j, label in enumerate(col_labels)}
    counts = [[0] * len(col_labels) for _ in row_labels]
    for a, b in pairs:
        counts[row_index[a]][col_index[b]] += 1
    return ContingencyTable(
        row_variable=var_a,
        col_variable=var_b,
        row_labels=tuple(row_labels),
        col_labels=tuple(col_labels),
        counts=tuple(tuple(row) for row in counts),
        n=len(pairs),
    )
