"""Statistics engine: contingency tables, Monte-Carlo chi-squared, Cramér's V.

The Monte-Carlo replicate loop is the hot kernel.  A compiled Cython
implementation is used when the extension built; otherwise the numpy
fallback takes over.  Both produce bit-identical exceedance counts for the
same seed, so results do not depend on which backend ran.
"""
from __future__ import annotations

from ..errors import ValidationError
from . import _mc_fallback

try:
    from . import _mc_kernel  # type: ignore[attr-defined]

    _DEFAULT_BACKEND = "cython"
except ImportError:  # extension not built: pure-Python install
    _mc_kernel = None  # type: ignore[assignment]
    _DEFAULT_BACKEND = "python"

from .association import (
    AssociationResult,
    associate,
    association_record,
    cramers_v,
    effect_label,
    expected_counts,
    monte_carlo_p,
    pearson_chi2,
)
from .descriptives import DescriptiveStats, describe_values, group_descriptives
from .tables import ContingencyTable, build_table, table_from_matrix

__all__ = [
    "AssociationResult",
    "ContingencyTable",
    "DescriptiveStats",
    "associate",
    "association_record",
    "available_backends",
    "build_table",
    "cramers_v",
    "describe_values",
    "effect_label",
    "expected_counts",
    "get_backend",
    "group_descriptives",
    "mc_backend_name",
    "monte_carlo_p",
    "pearson_chi2",
    "table_from_matrix",
]


def mc_backend_name() -> str:
    """Name of the kernel selected at import time."""
    return _DEFAULT_BACKEND


def available_backends() -> tuple[str, ...]:
    return ("cython", "python") if _mc_kernel is not None else ("python",)


def get_backend(name: str | None = None):
    if name is None:
        name = _DEFAULT_BACKEND
    if name == "python":
        return _mc_fallback
    if name == "cython":
        if _mc_kernel is None:
            raise ValidationError("compiled kernel not available; build the extension")
        return _mc_kernel
    raise ValidationError(f"unknown Monte-Carlo backend: {name!r}")
