"""Append-only annotation store with a derived review queue.

Human decisions (cause labels, manual person resolutions, confirm/reject
overrides) are appended to a log; the current state of every event is a
pure fold over that log.  Queue membership is recomputed from the fold, so
an item leaves the queue exactly when all of its reasons are addressed.

Log file format: line-delimited JSON.  First line is a header record
``{"format": "cto-annotations", "version": 1}``; every further line is one
annotation record with the fields of :func:`annotation_record`.
"""
from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Mapping

from .detector import CtoEvent
from .errors import AnnotationFormatError, AnnotationValidationError, UnknownItemError
from .mentions import ExtractionOutcome
from .registry import MemberRecord, Resolution

CAUSE_LABELS = ("ITO", "GI", "NV", "NDV", "MISC")
STATUS_OVERRIDES = ("confirmed", "rejected")
QUEUE_REASONS = ("needs_cause", "needs_person", "multiple_persons", "review_false_positive")

LOG_FORMAT = "cto-annotations"
LOG_VERSION = 1


@dataclass(frozen=True)
class AnnotationRecord:
    """One human decision attached to a CtO event."""

    event_id: str
    annotator: str
    timestamp: str
    cause: str | None = None
    resolved_member: str | None = None
    status_override: str | None = None
    note: str | None = None


def validate_record(record: AnnotationRecord) -> None:
    """Raise AnnotationValidationError naming the violated rule."""
    if not record.event_id:
        raise AnnotationValidationError("missing_event_id")
    if not record.annotator:
        raise AnnotationValidationError("missing_annotator")
    if record.cause is None and record.resolved_member is None and record.status_override is None:
        raise AnnotationValidationError(
            "empty_record", "one of cause, resolved_member, status_override is required"
        )
    if record.cause is not None and record.cause not in CAUSE_LABELS:
        raise AnnotationValidationError("unknown_cause", repr(record.cause))
    if record.status_override is not None and record.status_override not in STATUS_OVERRIDES:
        raise AnnotationValidationError("unknown_status_override", repr(record.status_override))
    if record.cause is not None and record.status_override == "rejected":
        raise AnnotationValidationError(
            "cause_on_rejected", "a rejected event must not carry a cause label"
        )


@dataclass
class EventState:
    """Folded current state of one event."""

    cause: str | None = None
    resolved_member: str | None = None
    status: str = "auto"  # auto | confirmed | rejected


@dataclass(frozen=True)
class QueueContext:
    cto_sentence: str
    trigger_text: str | None
    candidates: tuple[MemberRecord, ...] = ()


@dataclass(frozen=True)
class QueueItem:
    event_id: str
    reasons: frozenset[str]
    event: CtoEvent
    context: QueueContext


def _now_iso() -> str:
    return dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds")


class AnnotationStore:
    """Single-writer store: events registered once, annotations appended forever."""

    def __init__(self, log_path: str | Path | None = None):
        self.log_path = Path(log_path) if log_path is not None else None
        self.log: list[AnnotationRecord] = []
        self.states: dict[str, EventState] = {}
        self._events: dict[str, CtoEvent] = {}
        self._dispositions: dict[str, str] = {}
        self._resolutions: dict[str, Resolution] = {}
        self._contexts: dict[str, QueueContext] = {}
        self._flagged: set[str] = set()
        if self.log_path is not None and self.log_path.exists():
            for record in read_annotation_log(self.log_path):
                self._fold(record)

    # -- event registration -------------------------------------------------

    def register_event(
        self,
        event: CtoEvent,
        extraction: ExtractionOutcome,
        resolution: Resolution | None = None,
        context: QueueContext | None = None,
    ) -> QueueItem | None:
        """Register a detected event; idempotent; returns its queue item if pending."""
        event_id = event.event_id
        if event_id not in self._events:
            self._events[event_id] = event
            self._dispositions[event_id] = extraction.disposition
            if resolution is not None:
                self._resolutions[event_id] = resolution
            self._contexts[event_id] = context or QueueContext(
                cto_sentence=event.matched_sentence, trigger_text=None
            )
            self.states.setdefault(event_id, EventState())
        return self.get_item(event_id)

    def flag_for_review(self, event_id: str) -> None:
        """Mark an event for false-positive review (session-level, not logged)."""
        if event_id not in self._events:
            raise UnknownItemError(event_id)
        self._flagged.add(event_id)

    # -- queue derivation ----------------------------------------------------

    def reasons_for(self, event_id: str) -> frozenset[str]:
        state = self.states.get(event_id, EventState())
        if state.status == "rejected":
            return frozenset()
        reasons = set()
        if state.cause is None:
            reasons.add("needs_cause")
        if state.resolved_member is None:
            disposition = self._dispositions.get(event_id)
            resolution = self._resolutions.get(event_id)
            if disposition == "none":
                reasons.add("needs_person")
            elif disposition == "multiple":
                reasons.add("multiple_persons")
            elif resolution is not None and resolution.outcome in ("ambiguous", "unmatched"):
                reasons.add("needs_person")
        if event_id in self._flagged and state.status == "auto":
            reasons.add("review_false_positive")
        return frozenset(reasons)

    def get_item(self, event_id: str) -> QueueItem | None:
        if event_id not in self._events:
            raise UnknownItemError(event_id)
        reasons = self.reasons_for(event_id)
        if not reasons:
            return None
        return QueueItem(
            event_id=event_id,
            reasons=reasons,
            event=self._events[event_id],
            context=self._contexts[event_id],
        )

    def pending_items(self) -> list[QueueItem]:
        items = []
        for event_id, event in self._events.items():
            reasons = self.reasons_for(event_id)
            if reasons:
                items.append(
                    QueueItem(
                        event_id=event_id,
                        reasons=reasons,
                        event=event,
                        context=self._contexts[event_id],
                    )
                )
        items.sort(
            key=lambda i: (i.event.lp, i.event.session, i.event.contribution_index, i.event.sentence_index)
        )
        return items

    def progress(self) -> dict[str, int]:
        pending = rejected = resolved = 0
        for event_id in self._events:
            state = self.states.get(event_id, EventState())
            if state.status == "rejected":
                rejected += 1
            elif self.reasons_for(event_id):
                pending += 1
            else:
                resolved += 1
        return {"pending": pending, "resolved": resolved, "rejected": rejected}

    # -- mutation ------------------------------------------------------------

    def apply(self, event_id: str, record: AnnotationRecord) -> QueueItem | None:
        """Validate and append one record; returns the item if still pending."""
        if event_id not in self._events:
            raise UnknownItemError(event_id)
        if record.event_id != event_id:
            raise AnnotationValidationError("event_id_mismatch")
        if not record.timestamp:
            record = replace(record, timestamp=_now_iso())
        self._fold(record)
        if self.log_path is not None:
            new_file = not self.log_path.exists()
            with open(self.log_path, "a", encoding="utf-8") as handle:
                if new_file:
                    handle.write(json.dumps({"format": LOG_FORMAT, "version": LOG_VERSION}) + "\n")
                handle.write(json.dumps(annotation_record(record), ensure_ascii=False, sort_keys=True) + "\n")
        return self.get_item(event_id)

    def _fold(self, record: AnnotationRecord) -> None:
        validate_record(record)
        state = self.states.setdefault(record.event_id, EventState())
        if record.cause is not None and state.status == "rejected":
            raise AnnotationValidationError(
                "cause_on_rejected", "a rejected event must not carry a cause label"
            )
        if record.status_override is not None:
            state.status = record.status_override
            if record.status_override == "rejected":
                state.cause = None
        if record.cause is not None:
            state.cause = record.cause
        if record.resolved_member is not None:
            state.resolved_member = record.resolved_member
        self.log.append(record)

    # -- persistence ----------------------------------------------------------

    def export_annotations(self, path: str | Path) -> int:
        """Write header plus the full log; returns number of records written."""
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(json.dumps({"format": LOG_FORMAT, "version": LOG_VERSION}) + "\n")
            for record in self.log:
                handle.write(
                    json.dumps(annotation_record(record), ensure_ascii=False, sort_keys=True) + "\n"
                )
        return len(self.log)

    def import_annotations(self, path: str | Path) -> int:
        """Replay a log file through full validation; returns records imported."""
        count = 0
        for record in read_annotation_log(path):
            self._fold(record)
            count += 1
        return count

    # -- state readers ---------------------------------------------------------

    def effective_cause(self, event_id: str) -> str | None:
        state = self.states.get(event_id)
        if state is None or state.status == "rejected":
            return None
        return state.cause

    def is_rejected(self, event_id: str) -> bool:
        state = self.states.get(event_id)
        return state is not None and state.status == "rejected"

    def effective_member(self, event_id: str) -> str | None:
        """Manual resolution wins over the automatic one."""
        state = self.states.get(event_id)
        if state is not None and state.resolved_member is not None:
            return state.resolved_member
        resolution = self._resolutions.get(event_id)
        if resolution is not None and resolution.outcome == "resolved":
            return resolution.member_id
        return None


def annotation_record(record: AnnotationRecord) -> dict:
    return {
        "event_id": record.event_id,
        "annotator": record.annotator,
        "timestamp": record.timestamp,
        "cause": record.cause,
        "resolved_member": record.resolved_member,
        "status_override": record.status_override,
        "note": record.note,
    }


def record_from_mapping(data: Mapping) -> AnnotationRecord:
    return AnnotationRecord(
        event_id=data.get("event_id", ""),
        annotator=data.get("annotator", ""),
        timestamp=data.get("timestamp", ""),
        cause=data.get("cause"),
        resolved_member=data.get("resolved_member"),
        status_override=data.get("status_override"),
        note=data.get("note"),
    )


def read_annotation_log(path: str | Path) -> Iterable[AnnotationRecord]:
    """Parse and validate a log file; raises with the failing record index."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise AnnotationFormatError("annotation log is empty (missing header)")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise AnnotationFormatError(f"malformed header: {exc}", record_index=0) from exc
    if not isinstance(header, dict) or header.get("format") != LOG_FORMAT:
        raise AnnotationFormatError("not an annotation log (bad format marker)", record_index=0)
    if header.get("version") != LOG_VERSION:
        raise AnnotationFormatError(
            f"unsupported log version {header.get('version')!r}, expected {LOG_VERSION}",
            record_index=0,
        )

    records = []
    for index, line in enumerate(lines[1:], 1):
        if not line.strip():
            continue
        try:
            data = json.loads(line)
        except json.JSONDecodeError as exc:
            raise AnnotationFormatError(f"malformed record: {exc}", record_index=index) from exc
        record = record_from_mapping(data)
        try:
            validate_record(record)
        except AnnotationValidationError as exc:
            raise AnnotationFormatError(str(exc), record_index=index) from exc
        records.append(record)
    return records
