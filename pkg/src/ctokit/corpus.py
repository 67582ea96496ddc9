"""Corpus data model: protocol XML parsing and the normalized JSONL format.

One protocol XML file per parliamentary session.  Documented schema subset::

    <protocol lp="5" session="20" date="1966-11-30">
      <speech speaker="Eugen Gerstenmaier" role="president">...</speech>
      <speech speaker="Herbert Wehner" party="SPD" role="member" agenda="3">...</speech>
    </protocol>

* ``lp``, ``session`` and ``date`` (ISO) are mandatory on the root element.
* ``speaker`` is mandatory on every speech; ``party`` and ``agenda`` are
  optional.  ``role`` takes ``president`` / ``member`` / ``other`` (aliases
  ``presidency`` and ``mp`` are accepted; missing defaults to ``member``;
  anything else maps to ``other``).
* Speech body text is the concatenated text content of the element.

The normalized corpus is line-delimited JSON, one record per speech
contribution, with the field names produced by :func:`contribution_record`.
"""
from __future__ import annotations

import datetime as dt
import json
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import ProtocolParseError, ProtocolSchemaError, ValidationError
from .segmentation import DEFAULT_ABBREVIATIONS, Sentence, segment_sentences

ROLES = ("president", "member", "other")

CANONICAL_PARTIES = ("CDU/CSU", "SPD", "FDP", "GRÜNE", "LINKE/PDS", "AfD", "other")

# Alias table mapping party strings as they appear in transcripts and
# registries onto the canonical codes.  Extendable via load_party_aliases().
DEFAULT_PARTY_ALIASES: dict[str, str] = {
    "cdu": "CDU/CSU",
    "csu": "CDU/CSU",
    "cdu/csu": "CDU/CSU",
    "union": "CDU/CSU",
    "spd": "SPD",
    "fdp": "FDP",
    "f.d.p.": "FDP",
    "grüne": "GRÜNE",
    "die grünen": "GRÜNE",
    "bündnis 90/die grünen": "GRÜNE",
    "b90/grüne": "GRÜNE",
    "bündnis 90": "GRÜNE",
    "pds": "LINKE/PDS",
    "die linke": "LINKE/PDS",
    "linke": "LINKE/PDS",
    "linke/pds": "LINKE/PDS",
    "pds/linke liste": "LINKE/PDS",
    "linkspartei": "LINKE/PDS",
    "afd": "AfD",
    "dp": "other",
    "z": "other",
    "zentrum": "other",
    "kpd": "other",
    "gb/bhe": "other",
    "bhe": "other",
    "bp": "other",
    "wav": "other",
    "drp": "other",
    "nr": "other",
    "fraktionslos": "other",
    "parteilos": "other",
    "other": "other",
}

# Governing coalition per legislative period, over canonical party codes.
# LPs 5 and 9 changed government mid-term; the set reflects the longer span.
COALITIONS_BY_LP: dict[int, frozenset[str]] = {
    1: frozenset({"CDU/CSU", "FDP"}),
    2: frozenset({"CDU/CSU", "FDP"}),
    3: frozenset({"CDU/CSU"}),
    4: frozenset({"CDU/CSU", "FDP"}),
    5: frozenset({"CDU/CSU", "SPD"}),
    6: frozenset({"SPD", "FDP"}),
    7: frozenset({"SPD", "FDP"}),
    8: frozenset({"SPD", "FDP"}),
    9: frozenset({"SPD", "FDP"}),
    10: frozenset({"CDU/CSU", "FDP"}),
    11: frozenset({"CDU/CSU", "FDP"}),
    12: frozenset({"CDU/CSU", "FDP"}),
    13: frozenset({"CDU/CSU", "FDP"}),
    14: frozenset({"SPD", "GRÜNE"}),
    15: frozenset({"SPD", "GRÜNE"}),
    16: frozenset({"CDU/CSU", "SPD"}),
    17: frozenset({"CDU/CSU", "FDP"}),
    18: frozenset({"CDU/CSU", "SPD"}),
    19: frozenset({"CDU/CSU", "SPD"}),
}

_ROLE_ALIASES = {
    "president": "president",
    "presidency": "president",
    "member": "member",
    "mp": "member",
}


@dataclass(frozen=True)
class SpeechContribution:
    """One transcribed contribution with speaker metadata and sentences."""

    index: int
    speaker_name: str
    speaker_party: str | None
    role: str
    agenda_position: int
    raw_text: str
    sentences: tuple[Sentence, ...]

    def __post_init__(self) -> None:
        if self.role not in ROLES:
            raise ValidationError(f"unknown role: {self.role!r}")
        if self.agenda_position < 0:
            raise ValidationError("agenda_position must be non-negative")


@dataclass(frozen=True)
class Protocol:
    """One session protocol in document order."""

    legislative_period: int
    session_number: int
    date: dt.date
    contributions: tuple[SpeechContribution, ...]

    def __post_init__(self) -> None:
        if self.legislative_period < 1:
            raise ValidationError("legislative_period must be positive")
        if self.session_number < 1:
            raise ValidationError("session_number must be positive")


def normalize_party(
    raw: str | None, aliases: Mapping[str, str] | None = None
) -> str | None:
    """Map a raw party string to its canonical code; unknown strings map to None."""
    if raw is None:
        return None
    key = raw.strip().casefold()
    if not key:
        return None
    table = DEFAULT_PARTY_ALIASES if aliases is None else aliases
    return table.get(key)


def load_party_aliases(path: str | Path) -> dict[str, str]:
    """Read an ``alias = canonical`` table; merged over the built-in defaults."""
    table = dict(DEFAULT_PARTY_ALIASES)
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValidationError(f"party alias line without '=': {line!r}")
        alias, _, canonical = line.partition("=")
        canonical = canonical.strip()
        if canonical not in CANONICAL_PARTIES:
            raise ValidationError(f"unknown canonical party: {canonical!r}")
        table[alias.strip().casefold()] = canonical
    return table


def party_affiliation(party: str | None, lp: int) -> str | None:
    """Coalition/opposition status of a canonical party in a legislative period."""
    if party is None:
        return None
    coalition = COALITIONS_BY_LP.get(lp)
    if coalition is None:
        return None
    return "coalition" if party in coalition else "opposition"


def _require_attr(element: ET.Element, name: str) -> str:
    value = element.get(name)
    if value is None or not value.strip():
        raise ProtocolSchemaError(name)
    return value.strip()


def parse_protocol(
    source: str | bytes,
    abbreviations: Sequence[str] = DEFAULT_ABBREVIATIONS,
    party_aliases: Mapping[str, str] | None = None,
) -> Protocol:
    """Parse one protocol XML document into a Protocol value."""
    try:
        root = ET.fromstring(source)
    except ET.ParseError as exc:
        line, column = exc.position if exc.position else (None, None)
        raise ProtocolParseError(f"malformed protocol XML: {exc.msg}", line, column) from exc

    if root.tag != "protocol":
        raise ProtocolSchemaError("protocol", f"root element is <{root.tag}>")

    lp_raw = _require_attr(root, "lp")
    session_raw = _require_attr(root, "session")
    date_raw = _require_attr(root, "date")
    try:
        lp = int(lp_raw)
        session = int(session_raw)
    except ValueError as exc:
        raise ProtocolSchemaError("lp/session", "must be integers") from exc
    try:
        date = dt.date.fromisoformat(date_raw)
    except ValueError as exc:
        raise ProtocolSchemaError("date", f"not an ISO date: {date_raw!r}") from exc

    contributions = []
    for index, speech in enumerate(root.iter("speech")):
        speaker = _require_attr(speech, "speaker")
        role = _ROLE_ALIASES.get((speech.get("role") or "member").strip().casefold(), "other")
        party = normalize_party(speech.get("party"), party_aliases)
        agenda_raw = speech.get("agenda")
        if agenda_raw is None:
            agenda_position = index
        else:
            try:
                agenda_position = int(agenda_raw)
            except ValueError as exc:
                raise ProtocolSchemaError("agenda", f"not an integer: {agenda_raw!r}") from exc
        raw_text = " ".join("".join(speech.itertext()).split())
        contributions.append(
            SpeechContribution(
                index=index,
                speaker_name=speaker,
                speaker_party=party,
                role=role,
                agenda_position=agenda_position,
                raw_text=raw_text,
                sentences=tuple(segment_sentences(raw_text, abbreviations)),
            )
        )

    return Protocol(
        legislative_period=lp,
        session_number=session,
        date=date,
        contributions=tuple(contributions),
    )


def parse_protocol_file(
    path: str | Path,
    abbreviations: Sequence[str] = DEFAULT_ABBREVIATIONS,
    party_aliases: Mapping[str, str] | None = None,
) -> Protocol:
    return parse_protocol(Path(path).read_bytes(), abbreviations, party_aliases)


def contribution_record(protocol: Protocol, contribution: SpeechContribution) -> dict:
    """Normalized corpus record for one speech contribution (stable field names)."""
    return {
        "lp": protocol.legislative_period,
        "session": protocol.session_number,
        "date": protocol.date.isoformat(),
        "index": contribution.index,
        "speaker": contribution.speaker_name,
        "party": contribution.speaker_party,
        "role": contribution.role,
        "agenda_position": contribution.agenda_position,
        "text": contribution.raw_text,
        "sentences": [
            {"index": s.index, "text": s.text, "start": s.start, "end": s.end}
            for s in contribution.sentences
        ],
    }


def write_corpus(protocols: Iterable[Protocol], path: str | Path) -> int:
    """Write protocols as line-delimited JSON records; returns the record count."""
    count = 0
    with open(path, "w", encoding="utf-8") as handle:
        for protocol in protocols:
            for contribution in protocol.contributions:
                handle.write(json.dumps(contribution_record(protocol, contribution), ensure_ascii=False, sort_keys=True))
                handle.write("\n")
                count += 1
    return count


def read_corpus_records(path: str | Path) -> Iterator[dict]:
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                yield json.loads(line)


def protocols_from_records(records: Iterable[Mapping]) -> list[Protocol]:
    """Regroup normalized corpus records into Protocol values (inverse of write_corpus)."""
    grouped: dict[tuple[int, int], list[Mapping]] = {}
    dates: dict[tuple[int, int], str] = {}
    for record in records:
        key = (record["lp"], record["session"])
        grouped.setdefault(key, []).append(record)
        dates[key] = record["date"]

    protocols = []
    for key in sorted(grouped):
        rows = sorted(grouped[key], key=lambda r: r["index"])
        contributions = tuple(
            SpeechContribution(
                index=row["index"],
                speaker_name=row["speaker"],
                speaker_party=row["party"],
                role=row["role"],
                agenda_position=row["agenda_position"],
                raw_text=row["text"],
                sentences=tuple(
                    Sentence(index=s["index"], text=s["text"], start=s["start"], end=s["end"])
                    for s in row["sentences"]
                ),
            )
            for row in rows
        )
        protocols.append(
            Protocol(
                legislative_period=key[0],
                session_number=key[1],
                date=dt.date.fromisoformat(dates[key]),
                contributions=contributions,
            )
        )
    return protocols
