"""Person mention extraction from call-to-order sentences.

The primary extractor is an ordered pattern list over the formulaic CtO
phrasing; an HTTP client for an external NER service implements the same
outcome contract.  External contract: POST a JSON object ``{"text": ...}``,
response is a JSON list of ``{"start": int, "end": int, "label": str}``
spans; only label ``"PER"`` is consumed.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

import httpx

from .detector import CtoEvent
from .errors import ContractError, TransportError

# Words that may appear capitalized inside an address but are never names.
NON_NAME_TOKENS = frozenset(
    {
        "Abgeordnete",
        "Abgeordneten",
        "Abgeordneter",
        "Abgeordnetem",
        "Kollege",
        "Kollegen",
        "Kollegin",
        "Herr",
        "Herrn",
        "Frau",
        "Dr",
        "Dr.",
        "Prof",
        "Prof.",
        "Sie",
        "Ihnen",
        "Ihr",
        "Präsident",
        "Präsidentin",
        "Minister",
        "Ministerin",
        "Staatssekretär",
        "Bundeskanzler",
        "Bundeskanzlerin",
        "Ordnung",
        "Ordnungsruf",
        "Haus",
        "Hause",
    }
)

_PARTICLES = ("von", "zu", "van", "de", "der", "vom", "zur")

_NAME_TOKEN = r"[A-ZÄÖÜ][\w'’-]*"
_PARTICLE = r"(?:%s)" % "|".join(_PARTICLES)
_NAME_SEQ = rf"(?:{_PARTICLE}\s+)*{_NAME_TOKEN}(?:\s+(?:{_PARTICLE}\s+)*{_NAME_TOKEN}){{0,2}}"
_HONORIFIC = r"(?:Herrn?|Frau|Dr\.|Prof\.)"
_PARTY_HINT = r"(?:\s*\[(?P<party>[^\]]+)\])?"

_PATTERN_ABGEORDNETE = re.compile(
    rf"\bAbgeordnete[nmr]?\s+(?:(?P<hon>{_HONORIFIC})\s+)*(?P<name>{_NAME_SEQ}){_PARTY_HINT}"
)
_PATTERN_ADDRESS = re.compile(
    rf"\b(?P<hon>Herrn?|Frau)\s+(?:(?P<hon2>Dr\.|Prof\.)\s+)*(?P<name>{_NAME_SEQ}){_PARTY_HINT}"
)
_NAME_RUN = re.compile(rf"(?P<name>{_NAME_SEQ}){_PARTY_HINT}")

_RUFE_TOKEN = re.compile(r"\b[Rr]ufe\w*\b")
_ZUR_ORDNUNG = re.compile(r"\bzur\s+Ordnung\b", re.IGNORECASE)


@dataclass(frozen=True)
class PersonMention:
    """A person reference as written in the sentence."""

    surface: str
    honorific: str | None
    party_hint: str | None
    start: int
    end: int
    source: str = "pattern"


@dataclass(frozen=True)
class ExtractionOutcome:
    event_id: str
    mentions: tuple[PersonMention, ...]

    @property
    def disposition(self) -> str:
        if len(self.mentions) == 1:
            return "single"
        return "none" if not self.mentions else "multiple"


@dataclass(frozen=True)
class _Candidate:
    priority: int
    claim: tuple[int, int]  # full pattern span, used for overlap suppression
    mention: PersonMention


def _normalize_honorific(*raw: str | None) -> str | None:
    for value in raw:
        if not value:
            continue
        value = value.rstrip(".")
        if value in ("Herr", "Herrn"):
            return "Herr"
        if value in ("Frau", "Dr", "Prof"):
            return value
    return None


def _trim_name(sentence: str, start: int, end: int) -> tuple[int, int] | None:
    """Drop address words from both ends of a candidate span; None if nothing is left."""
    tokens = [
        (m.start() + start, m.end() + start) for m in re.finditer(r"\S+", sentence[start:end])
    ]
    while tokens and sentence[tokens[0][0] : tokens[0][1]] in NON_NAME_TOKENS:
        tokens.pop(0)
    while tokens and (
        sentence[tokens[-1][0] : tokens[-1][1]] in NON_NAME_TOKENS
        or sentence[tokens[-1][0] : tokens[-1][1]] in _PARTICLES
    ):
        tokens.pop()
    if not tokens:
        return None
    return tokens[0][0], tokens[-1][1]


def _candidates_from_patterns(sentence: str) -> list[_Candidate]:
    candidates: list[_Candidate] = []

    def add(priority: int, match: re.Match, honorific: str | None) -> None:
        span = _trim_name(sentence, match.start("name"), match.end("name"))
        if span is None:
            return
        candidates.append(
            _Candidate(
                priority=priority,
                claim=match.span(),
                mention=PersonMention(
                    surface=sentence[span[0] : span[1]],
                    honorific=honorific,
                    party_hint=match.group("party"),
                    start=span[0],
                    end=span[1],
                ),
            )
        )

    for match in _PATTERN_ABGEORDNETE.finditer(sentence):
        add(0, match, _normalize_honorific(match.group("hon")))
    for match in _PATTERN_ADDRESS.finditer(sentence):
        add(1, match, _normalize_honorific(match.group("hon"), match.group("hon2")))

    # Capitalized runs between the "rufe..." token and the "zur Ordnung" phrase.
    rufe = _RUFE_TOKEN.search(sentence)
    ordnung = _ZUR_ORDNUNG.search(sentence)
    if rufe and ordnung and rufe.end() <= ordnung.start():
        for match in _NAME_RUN.finditer(sentence, rufe.end(), ordnung.start()):
            add(2, match, None)

    return candidates


def _merge_overlapping(candidates: list[_Candidate]) -> tuple[PersonMention, ...]:
    kept: list[_Candidate] = []
    order = sorted(candidates, key=lambda c: (c.priority, c.claim[0], -c.claim[1]))
    for candidate in order:
        if any(k.claim[0] < candidate.claim[1] and candidate.claim[0] < k.claim[1] for k in kept):
            continue
        kept.append(candidate)
    return tuple(sorted((c.mention for c in kept), key=lambda m: m.start))


def extract_mentions(event: CtoEvent) -> ExtractionOutcome:
    """Apply the ordered pattern list to the matched sentence."""
    candidates = _candidates_from_patterns(event.matched_sentence)
    return ExtractionOutcome(event_id=event.event_id, mentions=_merge_overlapping(candidates))


def _party_hint_after(sentence: str, end: int) -> str | None:
    match = re.match(r"\s*\[([^\]]+)\]", sentence[end:])
    return match.group(1) if match else None


def extract_via_external(
    event: CtoEvent,
    endpoint: str,
    client: httpx.Client | None = None,
    timeout: float = 10.0,
) -> ExtractionOutcome:
    """Query the external NER endpoint; fall back to patterns when it finds nobody."""
    sentence = event.matched_sentence
    own_client = client is None
    client = client or httpx.Client(timeout=timeout)
    try:
        response = client.post(endpoint, json={"text": sentence})
    except httpx.HTTPError as exc:
        raise TransportError(f"NER endpoint unreachable: {exc}", ref=event.event_id) from exc
    finally:
        if own_client:
            client.close()

    if response.status_code != 200:
        raise ContractError(
            f"NER endpoint returned status {response.status_code}", ref=event.event_id
        )
    try:
        payload = response.json()
    except ValueError as exc:
        raise ContractError("NER response is not JSON", ref=event.event_id) from exc
    if not isinstance(payload, list):
        raise ContractError("NER response is not a JSON list", ref=event.event_id)

    mentions = []
    for span in payload:
        if not isinstance(span, dict) or not {"start", "end", "label"} <= span.keys():
            raise ContractError("NER span missing start/end/label", ref=event.event_id)
        if span["label"] != "PER":
            continue
        start, end = span["start"], span["end"]
        if not (isinstance(start, int) and isinstance(end, int) and 0 <= start < end <= len(sentence)):
            raise ContractError("NER span offsets out of range", ref=event.event_id)
        mentions.append(
            PersonMention(
                surface=sentence[start:end],
                honorific=None,
                party_hint=_party_hint_after(sentence, end),
                start=start,
                end=end,
                source="external_ner",
            )
        )

    if not mentions:
        return extract_mentions(event)
    return ExtractionOutcome(event_id=event.event_id, mentions=tuple(mentions))


def outcome_record(outcome: ExtractionOutcome) -> dict:
    return {
        "event_id": outcome.event_id,
        "disposition": outcome.disposition,
        "mentions": [
            {
                "surface": m.surface,
                "honorific": m.honorific,
                "party_hint": m.party_hint,
                "start": m.start,
                "end": m.end,
                "source": m.source,
            }
            for m in outcome.mentions
        ],
    }


def outcome_from_record(record: dict) -> ExtractionOutcome:
    return ExtractionOutcome(
        event_id=record["event_id"],
        mentions=tuple(
            PersonMention(
                surface=m["surface"],
                honorific=m["honorific"],
                party_hint=m["party_hint"],
                start=m["start"],
                end=m["end"],
                source=m.get("source", "pattern"),
            )
            for m in record["mentions"]
        ),
    )
