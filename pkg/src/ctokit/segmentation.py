"""Abbreviation-aware sentence segmentation for German parliamentary text.

Splits at sentence-final punctuation (. ! ? :) followed by whitespace and a
capital letter, unless the boundary falls inside a known abbreviation.
Deterministic and dependency-free so that downstream rule matching stays
reproducible.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

DEFAULT_ABBREVIATIONS: tuple[str, ...] = (
    "Abg.",
    "Dr.",
    "Hr.",
    "Fr.",
    "Nr.",
    "z. B.",
    "bzw.",
    "Prof.",
    "Abs.",
    "Art.",
    "usw.",
    "d. h.",
    "u. a.",
    "ca.",
    "vgl.",
    "sog.",
    "ggf.",
)

_BOUNDARY = re.compile(r"[.!?:](?=\s+[A-ZÄÖÜ])")
_WS = re.compile(r"\s+")


@dataclass(frozen=True)
class Sentence:
    """One sentence with its character span into the source text."""

    index: int
    text: str
    start: int
    end: int


def _abbreviation_pattern(abbreviation: str) -> re.Pattern[str]:
    # Internal single spaces match any whitespace run ("z. B." also covers "z.  B.").
    body = re.escape(abbreviation).replace(r"\ ", r"\s+")
    return re.compile(r"(?<!\w)" + body)


def _protected_spans(text: str, abbreviations: Sequence[str]) -> list[tuple[int, int]]:
    spans = []
    for abbreviation in abbreviations:
        for match in _abbreviation_pattern(abbreviation).finditer(text):
            spans.append(match.span())
    return spans


def segment_sentences(
    text: str, abbreviations: Iterable[str] = DEFAULT_ABBREVIATIONS
) -> list[Sentence]:
    """Split ``text`` into sentences; total over any input, empty list for blank text."""
    if not text or not text.strip():
        return []

    abbreviations = tuple(abbreviations)
    protected = _protected_spans(text, abbreviations)
    cut_positions = []
    for match in _BOUNDARY.finditer(text):
        p = match.start()
        if any(s <= p < e for s, e in protected):
            continue
        cut_positions.append(p + 1)

    sentences: list[Sentence] = []
    cursor = 0
    for cut in [*cut_positions, len(text)]:
        chunk = text[cursor:cut]
        stripped = chunk.strip()
        if stripped:
            start = cursor + len(chunk) - len(chunk.lstrip())
            end = start + len(stripped)
            sentences.append(Sentence(index=len(sentences), text=stripped, start=start, end=end))
        cursor = cut
    return sentences


def normalize_whitespace(text: str) -> str:
    return _WS.sub(" ", text).strip()
