"""Local HTTP API backing the annotation console.

Endpoints (all JSON):
  GET  /api/queue              -> list of queue item summaries
  GET  /api/item/{id}          -> full item with context and candidate members
  POST /api/item/{id}/annotate -> apply one annotation record (200/404/422)
  GET  /api/progress           -> {"pending": n, "resolved": n, "rejected": n}

Writes are serialized behind a lock (single-writer store contract); reads
see the folded state as of the last completed write.
"""
from __future__ import annotations

import threading
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .annotations import AnnotationStore, QueueItem, record_from_mapping
from .errors import AnnotationValidationError, UnknownItemError
from .registry import MemberRecord


class AnnotateBody(BaseModel):
    cause: str | None = None
    resolved_member: str | None = None
    status_override: str | None = None
    annotator: str = ""
    note: str | None = None
    timestamp: str = ""


def _candidate_payload(member: MemberRecord, lp: int) -> dict:
    return {
        "member_id": member.member_id,
        "name": member.display_name(),
        "party": member.party_at(lp),
        "gender": member.gender,
        "lps_served": sorted(member.lps_served),
    }


def _summary_payload(item: QueueItem) -> dict:
    return {
        "id": item.event_id,
        "lp": item.event.lp,
        "session": item.event.session,
        "date": item.event.date.isoformat(),
        "rule": item.event.matched_rule,
        "sentence": item.event.matched_sentence,
        "reasons": sorted(item.reasons),
    }


def _item_payload(item: QueueItem, store: AnnotationStore) -> dict:
    state = store.states[item.event_id]
    return {
        **_summary_payload(item),
        "trigger_text": item.context.trigger_text,
        "candidates": [
            _candidate_payload(member, item.event.lp) for member in item.context.candidates
        ],
        "state": {
            "cause": state.cause,
            "resolved_member": state.resolved_member,
            "status": state.status,
        },
    }


def create_app(store: AnnotationStore, static_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="cto annotation api")
    write_lock = threading.Lock()

    @app.get("/api/queue")
    def queue() -> list[dict]:
        return [_summary_payload(item) for item in store.pending_items()]

    @app.get("/api/item/{item_id}")
    def item(item_id: str) -> dict:
        try:
            pending = store.get_item(item_id)
        except UnknownItemError:
            raise HTTPException(status_code=404, detail=f"unknown item: {item_id}")
        if pending is None:
            raise HTTPException(status_code=404, detail=f"item no longer pending: {item_id}")
        return _item_payload(pending, store)

    @app.post("/api/item/{item_id}/annotate")
    def annotate(item_id: str, body: AnnotateBody) -> dict:
        record = record_from_mapping({"event_id": item_id, **body.model_dump()})
        with write_lock:
            try:
                still_pending = store.apply(item_id, record)
            except UnknownItemError:
                raise HTTPException(status_code=404, detail=f"unknown item: {item_id}")
            except AnnotationValidationError as exc:
                raise HTTPException(status_code=422, detail=str(exc))
            return {
                "ok": True,
                "item": None if still_pending is None else _item_payload(still_pending, store),
                "progress": store.progress(),
            }

    @app.get("/api/progress")
    def progress() -> dict:
        return store.progress()

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
