"""Member-of-parliament registry and rule-based person disambiguation.

Normalized registry format: CSV with columns
``member_id,surname,first_name,gender,party,lp_from,lp_to`` — one row per
party/LP stint, several rows per member.  ``import-registry`` converts the
official Bundestag open-data XML into this format.

Disambiguation: candidates are members serving the event's legislative
period under the same normalized surname; the candidate set is then
filtered in order by party hint, first-name evidence from the surface, and
honorific gender.  Filters only ever shrink the set.
"""
from __future__ import annotations

import csv
import re
import unicodedata
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from .corpus import normalize_party
from .errors import RegistryLoadError
from .mentions import PersonMention

REGISTRY_COLUMNS = ("member_id", "surname", "first_name", "gender", "party", "lp_from", "lp_to")

GENDERS = ("male", "female")

_NOBILIARY = frozenset({"von", "zu", "van", "de", "der", "vom", "zur", "und"})

_HONORIFIC_GENDER = {"Herr": "male", "Frau": "female"}


def strip_diacritics(text: str) -> str:
    decomposed = unicodedata.normalize("NFKD", text)
    return "".join(ch for ch in decomposed if not unicodedata.combining(ch))


def normalize_name(text: str) -> str:
    """Case- and diacritic-insensitive key with nobiliary particles dropped."""
    folded = strip_diacritics(text).casefold().replace("ß", "ss")
    tokens = [t for t in re.split(r"[\s\-]+", folded) if t and t not in _NOBILIARY]
    return " ".join(tokens)


def name_tokens(text: str) -> list[str]:
    return normalize_name(text).split()


@dataclass(frozen=True)
class MemberRecord:
    member_id: str
    surname: str
    first_name: str
    gender: str
    parties: tuple[tuple[str, int, int], ...]  # (party, lp_from, lp_to) stints
    lps_served: frozenset[int]

    def party_at(self, lp: int) -> str | None:
        for party, lp_from, lp_to in self.parties:
            if lp_from <= lp <= lp_to:
                return party
        return None

    def display_name(self) -> str:
        return f"{self.first_name} {self.surname}".strip()


@dataclass
class MemberRegistry:
    members: dict[str, MemberRecord] = field(default_factory=dict)
    _by_surname: dict[str, list[str]] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.members)

    def add(self, record: MemberRecord) -> None:
        self.members[record.member_id] = record
        key = normalize_name(record.surname)
        bucket = self._by_surname.setdefault(key, [])
        if record.member_id not in bucket:
            bucket.append(record.member_id)
            bucket.sort()

    def lookup(self, surname: str, lp: int) -> list[MemberRecord]:
        """Members serving ``lp`` whose normalized surname matches."""
        ids = self._by_surname.get(normalize_name(surname), [])
        return [self.members[i] for i in ids if lp in self.members[i].lps_served]

    def gender_totals(self) -> dict[str, int]:
        totals = {g: 0 for g in GENDERS}
        for record in self.members.values():
            totals[record.gender] += 1
        return totals


def load_registry(path: str | Path) -> MemberRegistry:
    """Load the normalized CSV registry; row-numbered errors on malformed input."""
    identities: dict[str, tuple[str, str, str]] = {}
    stints: dict[str, list[tuple[str, int, int]]] = {}

    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None or tuple(reader.fieldnames) != REGISTRY_COLUMNS:
            raise RegistryLoadError(
                f"registry header must be {','.join(REGISTRY_COLUMNS)}, got {reader.fieldnames}"
            )
        for row_number, row in enumerate(reader, 2):  # 1-based, counting the header
            values = {k: (row.get(k) or "").strip() for k in REGISTRY_COLUMNS}
            missing = [k for k in REGISTRY_COLUMNS if not values[k]]
            if missing:
                raise RegistryLoadError(f"row {row_number}: missing {', '.join(missing)}")
            if values["gender"] not in GENDERS:
                raise RegistryLoadError(
                    f"row {row_number}: gender must be male or female, got {values['gender']!r}"
                )
            try:
                lp_from, lp_to = int(values["lp_from"]), int(values["lp_to"])
            except ValueError:
                raise RegistryLoadError(f"row {row_number}: lp_from/lp_to must be integers")
            if not (1 <= lp_from <= lp_to):
                raise RegistryLoadError(f"row {row_number}: need 1 <= lp_from <= lp_to")

            member_id = values["member_id"]
            identity = (values["surname"], values["first_name"], values["gender"])
            if member_id in identities and identities[member_id] != identity:
                raise RegistryLoadError(
                    f"row {row_number}: duplicate member_id {member_id!r} with conflicting identity"
                )
            identities[member_id] = identity
            stint = (values["party"], lp_from, lp_to)
            if stint in stints.get(member_id, []):
                raise RegistryLoadError(f"row {row_number}: duplicate stint for {member_id!r}")
            stints.setdefault(member_id, []).append(stint)

    registry = MemberRegistry()
    for member_id, (surname, first_name, gender) in identities.items():
        member_stints = tuple(sorted(stints[member_id], key=lambda s: (s[1], s[2], s[0])))
        lps = frozenset(
            lp for _, lp_from, lp_to in member_stints for lp in range(lp_from, lp_to + 1)
        )
        registry.add(
            MemberRecord(
                member_id=member_id,
                surname=surname,
                first_name=first_name,
                gender=gender,
                parties=member_stints,
                lps_served=lps,
            )
        )
    return registry


@dataclass(frozen=True)
class Resolution:
    event_id: str
    outcome: str  # resolved | ambiguous | unmatched
    member_id: str | None = None
    candidates: tuple[str, ...] = ()
    method: str = "auto"


def disambiguate(
    mention: PersonMention,
    lp: int,
    registry: MemberRegistry,
    event_id: str = "",
    party_aliases: Mapping[str, str] | None = None,
) -> Resolution:
    """Resolve a single-person mention against the registry for one LP."""
    surface_tokens = name_tokens(mention.surface)
    if not surface_tokens:
        return Resolution(event_id=event_id, outcome="unmatched")
    surname = surface_tokens[-1]
    candidates = registry.lookup(surname, lp)

    hint = normalize_party(mention.party_hint, party_aliases)
    if hint is not None:
        candidates = [
            c for c in candidates if normalize_party(c.party_at(lp), party_aliases) == hint
        ]

    first_name_evidence = set(surface_tokens[:-1])
    if first_name_evidence:
        candidates = [
            c for c in candidates if first_name_evidence & set(name_tokens(c.first_name))
        ]

    gender = _HONORIFIC_GENDER.get(mention.honorific or "")
    if gender is not None:
        candidates = [c for c in candidates if c.gender == gender]

    if len(candidates) == 1:
        return Resolution(event_id=event_id, outcome="resolved", member_id=candidates[0].member_id)
    if candidates:
        return Resolution(
            event_id=event_id,
            outcome="ambiguous",
            candidates=tuple(sorted(c.member_id for c in candidates)),
        )
    return Resolution(event_id=event_id, outcome="unmatched")


def resolution_record(resolution: Resolution) -> dict:
    return {
        "event_id": resolution.event_id,
        "outcome": resolution.outcome,
        "member_id": resolution.member_id,
        "candidates": list(resolution.candidates),
        "method": resolution.method,
    }


def resolution_from_record(record: dict) -> Resolution:
    return Resolution(
        event_id=record["event_id"],
        outcome=record["outcome"],
        member_id=record.get("member_id"),
        candidates=tuple(record.get("candidates", ())),
        method=record.get("method", "auto"),
    )


_OFFICIAL_GENDERS = {"männlich": "male", "weiblich": "female", "male": "male", "female": "female"}


def _compress_lps(lps: Iterable[int]) -> list[tuple[int, int]]:
    ranges: list[tuple[int, int]] = []
    for lp in sorted(set(lps)):
        if ranges and lp == ranges[-1][1] + 1:
            ranges[-1] = (ranges[-1][0], lp)
        else:
            ranges.append((lp, lp))
    return ranges


def import_official_registry(xml_path: str | Path, csv_path: str | Path) -> dict:
    """Convert Bundestag open-data master XML (MDB_STAMMDATEN shape) to the CSV format.

    Reads DOCUMENT/MDB entries: ID, first NAMEN/NAME (NACHNAME, VORNAME),
    BIOGRAFISCHE_ANGABEN (GESCHLECHT, PARTEI_KURZ) and WAHLPERIODEN/WP.
    Incomplete entries are skipped and counted.
    """
    try:
        tree = ET.parse(xml_path)
    except ET.ParseError as exc:
        raise RegistryLoadError(f"malformed registry XML: {exc}") from exc

    rows = []
    skipped = 0
    for mdb in tree.getroot().iter("MDB"):
        member_id = (mdb.findtext("ID") or "").strip()
        surname = (mdb.findtext("./NAMEN/NAME/NACHNAME") or "").strip()
        first_name = (mdb.findtext("./NAMEN/NAME/VORNAME") or "").strip()
        gender_raw = (mdb.findtext("./BIOGRAFISCHE_ANGABEN/GESCHLECHT") or "").strip()
        party = (mdb.findtext("./BIOGRAFISCHE_ANGABEN/PARTEI_KURZ") or "").strip()
        gender = _OFFICIAL_GENDERS.get(gender_raw.casefold())
        lps = []
        for wp in mdb.iter("WP"):
            try:
                lps.append(int((wp.text or "").strip()))
            except ValueError:
                continue
        if not (member_id and surname and first_name and gender and lps):
            skipped += 1
            continue
        canonical = normalize_party(party) or "other"
        for lp_from, lp_to in _compress_lps(lps):
            rows.append((member_id, surname, first_name, gender, canonical, lp_from, lp_to))

    rows.sort(key=lambda r: (r[0], r[5]))
    with open(csv_path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(REGISTRY_COLUMNS)
        writer.writerows(rows)
    return {"members": len({r[0] for r in rows}), "rows": len(rows), "skipped": skipped}
