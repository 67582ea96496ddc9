"""Toolkit for calls to order (Ordnungsrufe) in German parliamentary protocols.

Pipeline: parse protocol XML into sentence-segmented speech contributions,
detect calls to order in presidency actions with two auditable text rules,
extract and disambiguate the person called to order against a member
registry, collect human annotations for causes and unresolved persons, and
compute the categorical association battery (Monte-Carlo chi-squared,
Cramer's V, grouped descriptives) as reproducible CSV/JSON reports.
"""

__version__ = "0.1.0"
