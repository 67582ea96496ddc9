import json
from pathlib import Path

import pytest

from conftest import ALL_BATCH_STAGES, run_stages
from ctokit import pipeline
from ctokit.errors import DependencyError
from ctokit.pipeline import Artifacts


def read_jsonl(path: Path) -> list[dict]:
    return [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines() if line]


def test_stage_order_enforced(fixture_config):
    with pytest.raises(DependencyError) as err:
        pipeline.run_stage("stats", fixture_config)
    assert "ingest" in str(err.value) or "detect" in str(err.value)


def test_detect_before_ingest_names_stage(fixture_config):
    with pytest.raises(DependencyError) as err:
        pipeline.run_stage("detect", fixture_config)
    assert err.value.run_first == "ingest"


def test_fixture_ground_truth(fixture_config):
    summaries = run_stages(fixture_config, *ALL_BATCH_STAGES)
    assert summaries["ingest"] == {"stage": "ingest", "protocols": 10, "contributions": 32}
    assert summaries["detect"]["events"] == 7
    assert summaries["detect"]["rule1"] == 2
    assert summaries["detect"]["rule2"] == 5
    assert summaries["extract"]["single"] == 5
    assert summaries["extract"]["none"] == 2
    assert summaries["disambiguate"]["resolved"] == 5
    assert summaries["stats"]["excluded_unannotated"] == 2
    assert "warning" in summaries["stats"]

    artifacts = Artifacts(fixture_config.output_dir)
    events = read_jsonl(artifacts.events)
    assert [e["event_id"] for e in events] == [
        "5-20-2-1",
        "5-21-2-1",
        "7-40-0-1",
        "10-30-2-1",
        "11-60-2-1",
        "14-50-2-1",
        "14-51-2-1",
    ]
    resolutions = {r["event_id"]: r["member_id"] for r in read_jsonl(artifacts.resolutions)}
    assert resolutions == {
        "5-20-2-1": "m001",
        "5-21-2-1": "m006",
        "10-30-2-1": "m002",
        "14-50-2-1": "m004",
        "14-51-2-1": "m005",
    }


def test_fixture_queue_state(completed_pipeline):
    store = pipeline.build_annotation_store(completed_pipeline)
    pending = store.pending_items()
    assert [item.event_id for item in pending] == ["7-40-0-1", "11-60-2-1"]
    assert all(item.reasons == {"needs_cause", "needs_person"} for item in pending)
    assert store.progress() == {"pending": 2, "resolved": 5, "rejected": 0}

    false_positive = store.get_item("11-60-2-1")
    assert "Zwischenrufe" in false_positive.context.cto_sentence
    assert false_positive.context.trigger_text is not None


def test_trigger_context_present(completed_pipeline):
    store = pipeline.build_annotation_store(completed_pipeline)
    item = store.get_item("7-40-0-1")
    assert item.context.trigger_text is None  # no preceding non-president speech


def test_rejecting_false_positive_excludes_it_from_stats(completed_pipeline):
    from ctokit.annotations import AnnotationRecord

    store = pipeline.build_annotation_store(completed_pipeline)
    store.apply(
        "11-60-2-1",
        AnnotationRecord(
            event_id="11-60-2-1",
            annotator="reviewer",
            timestamp="2025-06-02T00:00:00+00:00",
            status_override="rejected",
        ),
    )
    event_rows, speech_rows, _ = pipeline.analysis_records(completed_pipeline)
    assert "11-60-2-1" not in {r["event_id"] for r in event_rows}
    lp11 = [r for r in speech_rows if r["lp"] == 11]
    assert all(r["has_cto"] == "no" for r in lp11)


def test_analysis_records_fields(completed_pipeline):
    event_rows, speech_rows, info = pipeline.analysis_records(completed_pipeline)
    assert info == {"events": 7, "excluded_unannotated": 2}
    complete = {r["event_id"]: r for r in event_rows if r["cause"] is not None}
    assert set(complete) == {"5-20-2-1", "5-21-2-1", "10-30-2-1", "14-50-2-1", "14-51-2-1"}

    wehner = complete["5-20-2-1"]
    assert wehner["pco_name"] == "Herbert Wehner"
    assert wehner["pco_gender"] == "male"
    assert wehner["pco_party"] == "SPD"
    assert wehner["pco_affiliation"] == "coalition"  # grand coalition in LP 5
    assert wehner["president_name"] == "Eugen Gerstenmaier"
    assert wehner["president_gender"] == "male"
    assert wehner["president_party"] == "CDU/CSU"
    assert wehner["topic"] == "government_operations"
    assert wehner["year"] == 1966

    meyer = complete["14-50-2-1"]
    assert meyer["president_gender"] == "female"
    assert meyer["pco_affiliation"] == "coalition"

    karl = complete["14-51-2-1"]
    assert karl["pco_affiliation"] == "opposition"

    # the president-opening CtO without trigger attributes to the presidency action
    untriggered = {r["event_id"]: r for r in event_rows}["7-40-0-1"]
    assert untriggered["topic"] == "presidency_action"

    yes = [r for r in speech_rows if r["has_cto"] == "yes"]
    assert len(yes) == 7


def test_stats_artifact_deterministic(completed_pipeline):
    artifacts = Artifacts(completed_pipeline.output_dir)
    first = artifacts.associations.read_bytes()
    pipeline.run_stage("stats", completed_pipeline)
    assert artifacts.associations.read_bytes() == first


def test_event_pairs_present_in_associations(completed_pipeline):
    artifacts = Artifacts(completed_pipeline.output_dir)
    rows = read_jsonl(artifacts.associations)
    pairs = {(r["var_a"], r["var_b"]) for r in rows}
    assert ("president_name", "pco_name") in pairs
    assert ("has_cto", "topic") in pairs
    assert len(rows) == len(pipeline.EVENT_PAIRS) + len(pipeline.SPEECH_PAIRS)
    for row in rows:
        if "skipped" not in row:
            assert set(row) == {
                "var_a",
                "var_b",
                "chi2",
                "df",
                "p_value",
                "iterations",
                "seed",
                "cramers_v",
                "effect",
                "n",
                "p_asymptotic",
            }


def test_unknown_topic_excluded_from_tables_but_counted(tmp_path):
    corpus = tmp_path / "corpus"
    corpus.mkdir()
    (corpus / "s.xml").write_text(
        """<protocol lp="5" session="9" date="1966-01-01">
        <speech speaker="P" role="president">Die Sitzung ist eröffnet.</speech>
        <speech speaker="Herbert Wehner" party="SPD" role="member">Xyzzy plugh foo.</speech>
        <speech speaker="P" role="president">Ich rufe den Abgeordneten Wehner zur Ordnung.</speech>
        </protocol>""",
        encoding="utf-8",
    )
    from conftest import FIXTURE_DIR
    from ctokit.config import PipelineConfig

    config = PipelineConfig(
        corpus_path=corpus,
        registry_path=FIXTURE_DIR / "registry.csv",
        output_dir=tmp_path / "out",
        seed=1,
        iterations=999,
    )
    run_stages(config, "ingest", "detect", "extract", "disambiguate", "classify")
    event_rows, speech_rows, _ = pipeline.analysis_records(config)
    assert event_rows[0]["topic"] is None
    assert event_rows[0]["topic_counted"] == "unknown"
    trigger_row = [r for r in speech_rows if r["has_cto"] == "yes"][0]
    assert trigger_row["topic"] is None


def test_rules_path_overrides_detection(tmp_path):
    corpus = tmp_path / "corpus"
    corpus.mkdir()
    (corpus / "s.xml").write_text(
        """<protocol lp="5" session="9" date="1966-01-01">
        <speech speaker="P" role="president">Ich ermahne den Abgeordneten Wehner scharf.</speech>
        </protocol>""",
        encoding="utf-8",
    )
    rules = tmp_path / "rules.cfg"
    rules.write_text("rule2_phrase = ermahne den\nrule2_require_prefix = ich\n", encoding="utf-8")
    from conftest import FIXTURE_DIR
    from ctokit.config import PipelineConfig

    config = PipelineConfig(
        corpus_path=corpus,
        registry_path=FIXTURE_DIR / "registry.csv",
        output_dir=tmp_path / "out",
        rules_path=rules,
        seed=1,
        iterations=999,
    )
    run_stages(config, "ingest", "detect")
    events = read_jsonl(Artifacts(config.output_dir).events)
    assert len(events) == 1
    assert events[0]["rule"] == "rule2"


def test_full_annotation_gives_every_surviving_event_one_cause(completed_pipeline):
    from ctokit.annotations import AnnotationRecord

    store = pipeline.build_annotation_store(completed_pipeline)
    store.apply(
        "7-40-0-1",
        AnnotationRecord(
            event_id="7-40-0-1",
            annotator="reviewer",
            timestamp="2025-06-02T00:00:00+00:00",
            cause="NDV",
            resolved_member="m001",
        ),
    )
    store.apply(
        "11-60-2-1",
        AnnotationRecord(
            event_id="11-60-2-1",
            annotator="reviewer",
            timestamp="2025-06-02T00:01:00+00:00",
            status_override="rejected",
        ),
    )
    assert store.pending_items() == []
    assert store.progress() == {"pending": 0, "resolved": 6, "rejected": 1}
    for event_id in store._events:
        if not store.is_rejected(event_id):
            assert store.effective_cause(event_id) in ("ITO", "GI", "NV", "NDV", "MISC")
