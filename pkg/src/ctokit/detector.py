"""Rule-based detection of calls to order in presidency actions.

Rule 1 fires on "ordnungsruf" co-occurring with "erteile"/"erteilen" unless
the keyword is immediately preceded by "kein"/"keinen" or the sentence
carries "erteilten" or "nicht" anywhere.  Rule 2 fires on the phrase
"zur ordnung" together with a token starting in "rufe", unless the phrase is
immediately preceded by "gesetz"/"gesetzes".  Matching is case-folded on
whitespace tokens with punctuation stripped from token edges.

All rule parameters live in RuleConfig and can be loaded from a plain-text
key=value file so the rules stay auditable.
"""
from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, fields
from pathlib import Path

from .corpus import Protocol
from .errors import ValidationError
from .segmentation import DEFAULT_ABBREVIATIONS

_EDGE_PUNCT = ".,;:!?()[]{}\"'«»„“”‚’–—-…/"


def tokenize(sentence: str) -> list[str]:
    """Case-folded whitespace tokens with punctuation stripped from the edges."""
    tokens = []
    for raw in sentence.casefold().split():
        token = raw.strip(_EDGE_PUNCT)
        if token:
            tokens.append(token)
    return tokens


@dataclass(frozen=True)
class RuleConfig:
    rule1_keyword: str = "ordnungsruf"
    rule1_require_any: tuple[str, ...] = ("erteile", "erteilen")
    rule1_preceding_guards: tuple[str, ...] = ("kein", "keinen")
    rule1_exclude_tokens: tuple[str, ...] = ("erteilten", "nicht")
    rule2_phrase: str = "zur ordnung"
    rule2_require_prefix: str = "rufe"
    rule2_preceding_guards: tuple[str, ...] = ("gesetz", "gesetzes")
    abbreviations: tuple[str, ...] = DEFAULT_ABBREVIATIONS

    @classmethod
    def from_file(cls, path: str | Path) -> "RuleConfig":
        """Load rule parameters from a plain-text file, one ``key = a, b, c`` per line."""
        known = {f.name: f.type for f in fields(cls)}
        overrides: dict[str, object] = {}
        for number, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValidationError(f"rule config line {number} has no '=': {line!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            if key not in known:
                raise ValidationError(f"unknown rule config key: {key!r}")
            if key in ("rule1_keyword", "rule2_phrase", "rule2_require_prefix"):
                overrides[key] = value.strip()
            else:
                overrides[key] = tuple(part.strip() for part in value.split(",") if part.strip())
        return cls(**overrides)  # type: ignore[arg-type]


DEFAULT_RULES = RuleConfig()


def match_rule1(sentence: str, config: RuleConfig = DEFAULT_RULES) -> bool:
    tokens = tokenize(sentence)
    keyword_positions = [i for i, t in enumerate(tokens) if config.rule1_keyword in t]
    if not keyword_positions:
        return False
    if not any(req in t for t in tokens for req in config.rule1_require_any):
        return False
    if any(t in config.rule1_exclude_tokens for t in tokens):
        return False
    for i in keyword_positions:
        if i > 0 and tokens[i - 1] in config.rule1_preceding_guards:
            return False
    return True


def match_rule2(sentence: str, config: RuleConfig = DEFAULT_RULES) -> bool:
    tokens = tokenize(sentence)
    phrase = tuple(config.rule2_phrase.split())
    width = len(phrase)
    phrase_positions = [
        i for i in range(len(tokens) - width + 1) if tuple(tokens[i : i + width]) == phrase
    ]
    if not phrase_positions:
        return False
    if not any(t.startswith(config.rule2_require_prefix) for t in tokens):
        return False
    for i in phrase_positions:
        if i > 0 and tokens[i - 1] in config.rule2_preceding_guards:
            return False
    return True


@dataclass(frozen=True)
class CtoEvent:
    """A detected call to order, tied to its protocol coordinates."""

    lp: int
    session: int
    date: dt.date
    contribution_index: int
    sentence_index: int
    matched_rule: str
    matched_sentence: str
    trigger_contribution_index: int | None
    status: str = "auto"

    @property
    def event_id(self) -> str:
        return f"{self.lp}-{self.session}-{self.contribution_index}-{self.sentence_index}"


def detect(protocol: Protocol, config: RuleConfig = DEFAULT_RULES) -> list[CtoEvent]:
    """Scan presidency actions; one event per matching sentence, rule1 wins on overlap."""
    events: list[CtoEvent] = []
    last_non_president: int | None = None
    for contribution in protocol.contributions:
        if contribution.role != "president":
            last_non_president = contribution.index
            continue
        for sentence in contribution.sentences:
            if match_rule1(sentence.text, config):
                rule = "rule1"
            elif match_rule2(sentence.text, config):
                rule = "rule2"
            else:
                continue
            events.append(
                CtoEvent(
                    lp=protocol.legislative_period,
                    session=protocol.session_number,
                    date=protocol.date,
                    contribution_index=contribution.index,
                    sentence_index=sentence.index,
                    matched_rule=rule,
                    matched_sentence=sentence.text,
                    trigger_contribution_index=last_non_president,
                )
            )
    return events


def event_record(event: CtoEvent) -> dict:
    return {
        "lp": event.lp,
        "session": event.session,
        "date": event.date.isoformat(),
        "contribution_index": event.contribution_index,
        "sentence_index": event.sentence_index,
        "rule": event.matched_rule,
        "sentence": event.matched_sentence,
        "trigger_contribution_index": event.trigger_contribution_index,
        "status": event.status,
        "event_id": event.event_id,
    }


def event_from_record(record: dict) -> CtoEvent:
    return CtoEvent(
        lp=record["lp"],
        session=record["session"],
        date=dt.date.fromisoformat(record["date"]),
        contribution_index=record["contribution_index"],
        sentence_index=record["sentence_index"],
        matched_rule=record["rule"],
        matched_sentence=record["sentence"],
        trigger_contribution_index=record["trigger_contribution_index"],
        status=record.get("status", "auto"),
    )
