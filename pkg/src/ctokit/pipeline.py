"""Stage orchestration: every stage reads line-delimited artifacts and
writes the next one, so intermediates stay diffable and runs are resumable.

Artifacts in ``output_dir``::

    corpus.jsonl        one record per speech contribution
    events.jsonl        one record per detected CtO event
    extractions.jsonl   one record per event: person mentions + disposition
    resolutions.jsonl   one record per single-mention event
    topics.jsonl        one record per speech contribution
    associations.jsonl  one record per variable pair
    reports/            CSV tables and series plus trace.jsonl
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

from . import corpus as corpus_mod
from . import reports as reports_mod
from .annotations import AnnotationStore, QueueContext
from .config import PipelineConfig
from .detector import DEFAULT_RULES, RuleConfig, detect, event_from_record, event_record
from .errors import ConfigError, DegenerateTableError, DependencyError, StatsDomainError
from .mentions import (
    extract_mentions,
    extract_via_external,
    outcome_from_record,
    outcome_record,
)
from .registry import (
    MemberRegistry,
    disambiguate,
    load_registry,
    name_tokens,
    resolution_from_record,
    resolution_record,
)
from .stats import associate, association_record, build_table
from .topics import classify_baseline, classify_external, load_lexicon

STAGES = ("ingest", "detect", "extract", "disambiguate", "classify", "serve", "stats", "report")

# Published GermaParl counts for the delta column of the corpus report.
REFERENCE_COUNTS = {
    "total_speech_contributions": 958_098,
    "presidency_actions": 399_807,
    "cto_containing_contributions": 558,
}

# Variable pairs of the association battery, in report order.
EVENT_PAIRS = (
    ("president_name", "pco_name"),
    ("president_name", "pco_gender"),
    ("president_name", "pco_party"),
    ("president_name", "cause"),
    ("president_name", "pco_affiliation"),
    ("president_gender", "pco_gender"),
    ("president_gender", "pco_party"),
    ("president_gender", "cause"),
    ("president_gender", "pco_affiliation"),
    ("president_party", "pco_party"),
    ("pco_name", "cause"),
    ("pco_gender", "cause"),
    ("pco_gender", "lp"),
    ("pco_party", "cause"),
)
SPEECH_PAIRS = (
    ("has_cto", "date"),
    ("has_cto", "lp"),
    ("has_cto", "session_number"),
    ("has_cto", "agenda_position"),
    ("has_cto", "topic"),
    ("has_cto", "year"),
)

_ROLE_WORDS = {
    "präsident",
    "präsidentin",
    "vizepräsident",
    "vizepräsidentin",
    "alterspräsident",
    "alterspräsidentin",
    "dr",
    "prof",
    "herr",
    "frau",
}


@dataclass(frozen=True)
class Artifacts:
    out: Path

    @property
    def corpus(self) -> Path:
        return self.out / "corpus.jsonl"

    @property
    def events(self) -> Path:
        return self.out / "events.jsonl"

    @property
    def extractions(self) -> Path:
        return self.out / "extractions.jsonl"

    @property
    def resolutions(self) -> Path:
        return self.out / "resolutions.jsonl"

    @property
    def topics(self) -> Path:
        return self.out / "topics.jsonl"

    @property
    def associations(self) -> Path:
        return self.out / "associations.jsonl"

    @property
    def reports_dir(self) -> Path:
        return self.out / "reports"


def _require(path: Path, producer: str) -> Path:
    if not path.exists():
        raise DependencyError(str(path), producer)
    return path


def _write_jsonl(path: Path, records: Iterable[Mapping]) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")
            count += 1
    return count


def _read_jsonl(path: Path) -> list[dict]:
    rows = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                rows.append(json.loads(line))
    return rows


def _rules(config: PipelineConfig) -> RuleConfig:
    if config.rules_path is not None:
        return RuleConfig.from_file(config.rules_path)
    return DEFAULT_RULES


def _default_lexicon_path() -> Path:
    return Path(__file__).parent / "data" / "topic_lexicon.txt"


# -- stages -------------------------------------------------------------------


def run_ingest(config: PipelineConfig) -> dict:
    config.validate_paths(("corpus_path",))
    artifacts = Artifacts(config.output_dir)
    source = Path(config.corpus_path)
    files = sorted(source.glob("*.xml")) if source.is_dir() else [source]
    if not files:
        raise ConfigError(f"no protocol XML files under {source}")
    rules = _rules(config)
    protocols = [
        corpus_mod.parse_protocol_file(f, abbreviations=rules.abbreviations) for f in files
    ]
    protocols.sort(key=lambda p: (p.legislative_period, p.session_number))
    count = corpus_mod.write_corpus(protocols, artifacts.corpus)
    return {"stage": "ingest", "protocols": len(protocols), "contributions": count}


def run_detect(config: PipelineConfig) -> dict:
    config.validate_paths(())
    artifacts = Artifacts(config.output_dir)
    records = corpus_mod.read_corpus_records(_require(artifacts.corpus, "ingest"))
    protocols = corpus_mod.protocols_from_records(records)
    rules = _rules(config)
    events = [event for protocol in protocols for event in detect(protocol, rules)]
    count = _write_jsonl(artifacts.events, (event_record(e) for e in events))
    by_rule = {"rule1": 0, "rule2": 0}
    for event in events:
        by_rule[event.matched_rule] += 1
    return {"stage": "detect", "events": count, **by_rule}


def run_extract(config: PipelineConfig) -> dict:
    config.validate_paths(())
    artifacts = Artifacts(config.output_dir)
    events = [event_from_record(r) for r in _read_jsonl(_require(artifacts.events, "detect"))]
    outcomes = []
    for event in events:
        if config.ner_endpoint:
            outcomes.append(extract_via_external(event, config.ner_endpoint))
        else:
            outcomes.append(extract_mentions(event))
    count = _write_jsonl(artifacts.extractions, (outcome_record(o) for o in outcomes))
    dispositions = {"single": 0, "none": 0, "multiple": 0}
    for outcome in outcomes:
        dispositions[outcome.disposition] += 1
    return {"stage": "extract", "extractions": count, **dispositions}


def run_disambiguate(config: PipelineConfig) -> dict:
    config.validate_paths(("registry_path",))
    artifacts = Artifacts(config.output_dir)
    registry = load_registry(config.registry_path)
    outcomes = [
        outcome_from_record(r)
        for r in _read_jsonl(_require(artifacts.extractions, "extract"))
    ]
    events = {
        r["event_id"]: r for r in _read_jsonl(_require(artifacts.events, "detect"))
    }
    resolutions = []
    for outcome in outcomes:
        if outcome.disposition != "single":
            continue
        lp = events[outcome.event_id]["lp"]
        resolutions.append(
            disambiguate(outcome.mentions[0], lp, registry, event_id=outcome.event_id)
        )
    count = _write_jsonl(artifacts.resolutions, (resolution_record(r) for r in resolutions))
    tally = {"resolved": 0, "ambiguous": 0, "unmatched": 0}
    for resolution in resolutions:
        tally[resolution.outcome] += 1
    return {"stage": "disambiguate", "resolutions": count, **tally}


def run_classify(config: PipelineConfig) -> dict:
    config.validate_paths(("lexicon_path",))
    artifacts = Artifacts(config.output_dir)
    records = corpus_mod.read_corpus_records(_require(artifacts.corpus, "ingest"))
    protocols = corpus_mod.protocols_from_records(records)
    lexicon = load_lexicon(config.lexicon_path or _default_lexicon_path())
    rows = []
    for protocol in protocols:
        for contribution in protocol.contributions:
            if config.topic_endpoint:
                topic = classify_external(contribution, config.topic_endpoint)
            else:
                topic = classify_baseline(contribution, lexicon)
            rows.append(
                {
                    "lp": protocol.legislative_period,
                    "session": protocol.session_number,
                    "index": contribution.index,
                    "topic": topic,
                }
            )
    count = _write_jsonl(artifacts.topics, rows)
    return {"stage": "classify", "classified": count}


def resolve_president(
    speaker_name: str, lp: int, registry: MemberRegistry
) -> tuple[str | None, str | None]:
    """Best-effort (gender, party) of a presiding speaker via the registry."""
    tokens = [t for t in name_tokens(speaker_name) if t not in _ROLE_WORDS]
    if not tokens:
        return None, None
    candidates = registry.lookup(tokens[-1], lp)
    evidence = set(tokens[:-1])
    if evidence:
        narrowed = [c for c in candidates if evidence & set(name_tokens(c.first_name))]
        candidates = narrowed or candidates
    if len(candidates) == 1:
        member = candidates[0]
        return member.gender, member.party_at(lp)
    return None, None


def build_annotation_store(config: PipelineConfig) -> AnnotationStore:
    """Assemble the store from the pipeline artifacts plus the annotation log."""
    artifacts = Artifacts(config.output_dir)
    registry = load_registry(config.registry_path)
    corpus_records = {
        (r["lp"], r["session"], r["index"]): r
        for r in corpus_mod.read_corpus_records(_require(artifacts.corpus, "ingest"))
    }
    events = [event_from_record(r) for r in _read_jsonl(_require(artifacts.events, "detect"))]
    extractions = {
        o.event_id: o
        for o in map(outcome_from_record, _read_jsonl(_require(artifacts.extractions, "extract")))
    }
    resolutions = {
        r.event_id: r
        for r in map(
            resolution_from_record, _read_jsonl(_require(artifacts.resolutions, "disambiguate"))
        )
    }

    store = AnnotationStore(log_path=config.annotation_log_path)
    for event in events:
        extraction = extractions[event.event_id]
        resolution = resolutions.get(event.event_id)
        trigger_text = None
        if event.trigger_contribution_index is not None:
            trigger = corpus_records.get((event.lp, event.session, event.trigger_contribution_index))
            trigger_text = trigger["text"] if trigger else None

        candidate_ids: list[str] = []
        if resolution is not None and resolution.outcome == "ambiguous":
            candidate_ids = list(resolution.candidates)
        elif extraction.disposition in ("none", "multiple") or (
            resolution is not None and resolution.outcome == "unmatched"
        ):
            seen = set()
            for mention in extraction.mentions:
                tokens = name_tokens(mention.surface)
                if not tokens:
                    continue
                for member in registry.lookup(tokens[-1], event.lp):
                    if member.member_id not in seen:
                        seen.add(member.member_id)
                        candidate_ids.append(member.member_id)
            candidate_ids.sort()
        candidates = tuple(registry.members[i] for i in candidate_ids if i in registry.members)

        store.register_event(
            event,
            extraction,
            resolution,
            QueueContext(
                cto_sentence=event.matched_sentence,
                trigger_text=trigger_text,
                candidates=candidates,
            ),
        )
    return store


def analysis_records(
    config: PipelineConfig,
) -> tuple[list[dict], list[dict], dict]:
    """Event-level and speech-level records for the association battery.

    Returns (event_records, speech_records, info); rejected events are
    dropped, events without a cause label stay in with cause=None so tables
    over cause exclude them mechanically.
    """
    artifacts = Artifacts(config.output_dir)
    registry = load_registry(config.registry_path)
    store = build_annotation_store(config)
    events = [event_from_record(r) for r in _read_jsonl(artifacts.events)]
    topics = {
        (r["lp"], r["session"], r["index"]): r["topic"]
        for r in _read_jsonl(_require(artifacts.topics, "classify"))
    }
    corpus_records = list(corpus_mod.read_corpus_records(artifacts.corpus))
    by_coords = {(r["lp"], r["session"], r["index"]): r for r in corpus_records}

    event_rows = []
    cto_speech_coords = set()
    unannotated = 0
    for event in events:
        if store.is_rejected(event.event_id):
            continue
        cause = store.effective_cause(event.event_id)
        if cause is None:
            unannotated += 1
        member_id = store.effective_member(event.event_id)
        member = registry.members.get(member_id) if member_id else None

        president = by_coords.get((event.lp, event.session, event.contribution_index))
        president_name = president["speaker"] if president else None
        president_gender, president_party = (
            resolve_president(president_name, event.lp, registry)
            if president_name
            else (None, None)
        )
        if president_party is None and president is not None:
            president_party = president.get("party")

        attributed_index = (
            event.trigger_contribution_index
            if event.trigger_contribution_index is not None
            else event.contribution_index
        )
        attributed = by_coords.get((event.lp, event.session, attributed_index))
        cto_speech_coords.add((event.lp, event.session, attributed_index))
        topic = topics.get((event.lp, event.session, attributed_index))

        pco_party = member.party_at(event.lp) if member else None
        event_rows.append(
            {
                "event_id": event.event_id,
                "president_name": president_name,
                "president_gender": president_gender,
                "president_party": president_party,
                "pco_name": member.display_name() if member else None,
                "pco_gender": member.gender if member else None,
                "pco_party": pco_party,
                "pco_affiliation": corpus_mod.party_affiliation(pco_party, event.lp),
                "pco_member_id": member.member_id if member else None,
                "cause": cause,
                "lp": event.lp,
                "session_number": event.session,
                "date": event.date.isoformat(),
                "year": event.date.year,
                "agenda_position": attributed["agenda_position"] if attributed else None,
                # "unknown" baseline non-matches stay out of association tables
                # but are still counted in the topic series.
                "topic": None if topic == "unknown" else topic,
                "topic_counted": topic,
            }
        )

    speech_rows = []
    for record in corpus_records:
        coords = (record["lp"], record["session"], record["index"])
        topic = topics.get(coords)
        speech_rows.append(
            {
                "has_cto": "yes" if coords in cto_speech_coords else "no",
                "topic": None if topic == "unknown" else topic,
                "lp": record["lp"],
                "session_number": record["session"],
                "date": record["date"],
                "year": int(record["date"][:4]),
                "agenda_position": record["agenda_position"],
            }
        )

    info = {"events": len(event_rows), "excluded_unannotated": unannotated}
    return event_rows, speech_rows, info


def run_stats(config: PipelineConfig) -> dict:
    config.validate_paths(("registry_path",))
    artifacts = Artifacts(config.output_dir)
    _require(artifacts.events, "detect")
    _require(artifacts.resolutions, "disambiguate")
    event_rows, speech_rows, info = analysis_records(config)

    results = []
    pair_index = 0
    for rows, pairs in ((event_rows, EVENT_PAIRS), (speech_rows, SPEECH_PAIRS)):
        for var_a, var_b in pairs:
            pair_seed = config.seed + pair_index
            pair_index += 1
            try:
                table = build_table(rows, var_a, var_b)
                result = associate(table, iterations=config.iterations, seed=pair_seed)
                results.append(association_record(result))
            except (DegenerateTableError, StatsDomainError) as exc:
                results.append({"var_a": var_a, "var_b": var_b, "skipped": str(exc)})
    _write_jsonl(artifacts.associations, results)

    summary = {
        "stage": "stats",
        "pairs": len(results),
        "computed": sum(1 for r in results if "skipped" not in r),
        "skipped": sum(1 for r in results if "skipped" in r),
        **info,
    }
    if info["excluded_unannotated"]:
        summary["warning"] = (
            f"{info['excluded_unannotated']} events lack a cause label and are "
            "excluded from cause tables"
        )
    return summary


def run_report(config: PipelineConfig) -> dict:
    config.validate_paths(("registry_path",))
    artifacts = Artifacts(config.output_dir)
    _require(artifacts.associations, "stats")
    return reports_mod.emit_reports(config, artifacts)


def run_serve(config: PipelineConfig, host: str = "127.0.0.1", port: int = 8000) -> dict:
    import uvicorn

    from .api import create_app

    config.validate_paths(("registry_path",))
    store = build_annotation_store(config)
    static_dir = _frontend_dist()
    app = create_app(store, static_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")
    return {"stage": "serve", "host": host, "port": port}


def _frontend_dist() -> Path | None:
    for candidate in (
        Path(__file__).resolve().parents[2] / "frontend" / "dist",
        Path.cwd() / "frontend" / "dist",
    ):
        if candidate.is_dir():
            return candidate
    return None


def run_stage(stage: str, config: PipelineConfig, **kwargs) -> dict:
    runners = {
        "ingest": run_ingest,
        "detect": run_detect,
        "extract": run_extract,
        "disambiguate": run_disambiguate,
        "classify": run_classify,
        "serve": run_serve,
        "stats": run_stats,
        "report": run_report,
    }
    if stage not in runners:
        raise ConfigError(f"unknown stage {stage!r}; expected one of {', '.join(STAGES)}")
    return runners[stage](config, **kwargs)
