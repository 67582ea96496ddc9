"""Speech topic assignment: keyword baseline plus external-classifier client.

The label set is closed: 21 policy topic codes (major-topic scheme of the
comparative agendas tradition) plus ``presidency_action`` for president
speeches and ``unknown`` for baseline non-matches.  Classification always
takes the whole speech text, never single sentences.

External contract: POST ``{"text": ...}`` -> ``{"topic": <one of the 21
codes>}``.  President speeches short-circuit without calling the endpoint.
"""
from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

import httpx

from .corpus import SpeechContribution
from .errors import ContractError, LexiconError, TransportError

# Fixed order; ties in the baseline break toward the earlier code.
TOPIC_CODES: tuple[str, ...] = (
    "macroeconomics",
    "civil_rights",
    "health",
    "agriculture",
    "labor",
    "education",
    "environment",
    "energy",
    "immigration",
    "transportation",
    "law_and_crime",
    "social_welfare",
    "housing",
    "domestic_commerce",
    "defense",
    "technology",
    "foreign_trade",
    "international_affairs",
    "government_operations",
    "public_lands",
    "culture",
)

PRESIDENCY_ACTION = "presidency_action"
UNKNOWN = "unknown"

ALL_LABELS: tuple[str, ...] = TOPIC_CODES + (PRESIDENCY_ACTION, UNKNOWN)


def load_lexicon(path: str | Path) -> dict[str, tuple[str, ...]]:
    """Read a lexicon file: one ``code<TAB>kw1, kw2, ...`` line per topic, all 21 required."""
    lexicon: dict[str, tuple[str, ...]] = {}
    for number, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "\t" not in line:
            raise LexiconError(f"lexicon line {number} has no tab separator")
        code, _, keywords = line.partition("\t")
        code = code.strip()
        if code not in TOPIC_CODES:
            raise LexiconError(f"lexicon line {number}: unknown topic code {code!r}")
        if code in lexicon:
            raise LexiconError(f"lexicon line {number}: duplicate topic code {code!r}")
        words = tuple(w.strip().casefold() for w in keywords.split(",") if w.strip())
        if not words:
            raise LexiconError(f"lexicon line {number}: no keywords for {code!r}")
        lexicon[code] = words
    missing = [code for code in TOPIC_CODES if code not in lexicon]
    if missing:
        raise LexiconError(f"lexicon misses topics: {', '.join(missing)}")
    return lexicon


def classify_baseline(
    contribution: SpeechContribution, lexicon: Mapping[str, Sequence[str]]
) -> str:
    """Keyword-count vote over the whole speech text."""
    if contribution.role == "president":
        return PRESIDENCY_ACTION
    text = contribution.raw_text.casefold()
    best_code = UNKNOWN
    best_hits = 0
    for code in TOPIC_CODES:
        hits = sum(text.count(keyword) for keyword in lexicon[code])
        if hits > best_hits:
            best_code, best_hits = code, hits
    return best_code


def classify_external(
    contribution: SpeechContribution,
    endpoint: str,
    client: httpx.Client | None = None,
    timeout: float = 10.0,
) -> str:
    """Ask the external classifier; president speeches never reach the endpoint."""
    if contribution.role == "president":
        return PRESIDENCY_ACTION
    own_client = client is None
    client = client or httpx.Client(timeout=timeout)
    try:
        response = client.post(endpoint, json={"text": contribution.raw_text})
    except httpx.HTTPError as exc:
        raise TransportError(f"topic endpoint unreachable: {exc}") from exc
    finally:
        if own_client:
            client.close()

    if response.status_code != 200:
        raise ContractError(f"topic endpoint returned status {response.status_code}")
    try:
        payload = response.json()
    except ValueError as exc:
        raise ContractError("topic response is not JSON") from exc
    topic = payload.get("topic") if isinstance(payload, dict) else None
    if topic not in TOPIC_CODES:
        raise ContractError(f"topic outside the closed label set: {topic!r}")
    return topic
