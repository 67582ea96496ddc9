"""Grouped descriptive statistics: per-group totals, median and spread.

The standard deviation is the population form over the group values
(divisor = number of groups), which keeps table reproduction well-defined.
"""
from __future__ import annotations

import statistics
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from ..errors import EmptyStatsError


@dataclass(frozen=True)
class DescriptiveStats:
    group_variable: str
    per_group_values: dict[str, float]
    median: float
    std_dev: float
    total: float


def describe_values(group_variable: str, per_group: Mapping[str, float]) -> DescriptiveStats:
    if not per_group:
        raise EmptyStatsError(f"no groups for {group_variable}")
    values = [per_group[g] for g in sorted(per_group)]
    return DescriptiveStats(
        group_variable=group_variable,
        per_group_values=dict(sorted(per_group.items())),
        median=float(statistics.median(values)),
        std_dev=float(statistics.pstdev(values)),
        total=float(sum(values)),
    )


def group_descriptives(
    records: Iterable[Mapping],
    group_by: str,
    value: Callable[[Mapping], float] | None = None,
    groups: Sequence[str] | None = None,
) -> DescriptiveStats:
    """Aggregate records per group; each record contributes 1 unless ``value`` is given.

    ``groups`` fixes the group universe (absent groups count as zero), e.g.
    every legislative period present in the corpus.
    """
    per_group: dict[str, float] = {str(g): 0.0 for g in groups} if groups else {}
    seen_any = False
    for record in records:
        key = record.get(group_by)
        if key is None:
            continue
        seen_any = True
        per_group[str(key)] = per_group.get(str(key), 0.0) + (1.0 if value is None else value(record))
    if not seen_any and not per_group:
        raise EmptyStatsError(f"empty record set for {group_by}")
    return describe_values(group_by, per_group)
