"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines and timings.
"""
import json
import os
import random
import time
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path

import pytest

import ctokit.stats as stats
from conftest import ALL_BATCH_STAGES, FIXTURE_DIR, run_stages
from ctokit.annotations import AnnotationStore, CAUSE_LABELS
from ctokit.config import PipelineConfig
from ctokit.detector import match_rule1, match_rule2
from ctokit.errors import AnnotationValidationError
from ctokit.pipeline import Artifacts, build_annotation_store
from ctokit.stats import cramers_v, effect_label, monte_carlo_p, pearson_chi2, table_from_matrix

from oracle import exact_permutation_p, generate_2x2_family
from test_annotations import make_event, record, recomputed_pending, register

SENTENCES_PATH = Path(__file__).parent / "data" / "rule_sentences.json"
FALSE_POSITIVE = "Ich kann nur wegen der Zwischenrufe zur Ordnung rufen, die ich selber höre."


@contextmanager
def criterion(name: str):
    started = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"\nACCEPTANCE {name}: FAIL ({time.perf_counter() - started:.2f}s)", flush=True)
        raise
    else:
        print(f"\nACCEPTANCE {name}: PASS ({time.perf_counter() - started:.2f}s)", flush=True)


def test_rule_fidelity():
    with criterion("rule-fidelity"):
        started = time.perf_counter()
        entries = json.loads(SENTENCES_PATH.read_text(encoding="utf-8"))
        assert len(entries) >= 50

        sentences = {e["sentence"] for e in entries}
        assert FALSE_POSITIVE in sentences
        # guard categories are represented and must not match
        guards = {
            "kein(en)": "Ich erteile Ihnen keinen Ordnungsruf.",
            "erteilten": "Er hat die erteilten Ordnungsrufe im Protokoll vermerkt und will weitere erteilen.",
            "nicht": "Einen Ordnungsruf erteile ich Ihnen nicht.",
            "Gesetz(es)": "Ich rufe das Gesetz zur Ordnung des Kreditwesens auf.",
        }
        assert set(guards.values()) <= sentences

        failures = []
        for entry in entries:
            if match_rule1(entry["sentence"]) is not entry["rule1"]:
                failures.append(("rule1", entry["sentence"]))
            if match_rule2(entry["sentence"]) is not entry["rule2"]:
                failures.append(("rule2", entry["sentence"]))
        assert failures == []

        fp = next(e for e in entries if e["sentence"] == FALSE_POSITIVE)
        assert fp["rule2"] is True and match_rule2(FALSE_POSITIVE)
        for sentence in guards.values():
            assert not match_rule1(sentence) and not match_rule2(sentence)

        assert time.perf_counter() - started < 1.0


def test_monte_carlo_agrees_with_exhaustive_oracle():
    with criterion("monte-carlo-vs-oracle"):
        started = time.perf_counter()
        family = [t for t in generate_2x2_family(10) if sum(map(sum, t)) in (6, 8, 10)]
        tables = family[:: max(1, len(family) // 24)]
        assert len(tables) >= 20

        worst = 0.0
        for index, matrix in enumerate(tables):
            table = table_from_matrix([list(row) for row in matrix])
            exact = float(exact_permutation_p(matrix))
            p = monte_carlo_p(table, iterations=99_999, seed=20210907 + index)
            worst = max(worst, abs(p - exact))
            assert abs(p - exact) <= 0.01, (matrix, p, exact)

        elapsed = time.perf_counter() - started
        print(f"\n  {len(tables)} tables, worst |p - exact| = {worst:.5f}, {elapsed:.2f}s")
        assert elapsed < 120.0


def test_chi2_and_cramers_v_oracle():
    with criterion("chi2-v-oracle"):
        uniform = table_from_matrix([[10, 10], [10, 10]])
        chi2, _ = pearson_chi2(uniform)
        assert chi2 == 0.0
        assert cramers_v(chi2, uniform.n, 2, 2) == 0.0

        perfect = table_from_matrix([[10, 0], [0, 10]])
        chi2, _ = pearson_chi2(perfect)
        assert chi2 == 20.0
        assert cramers_v(chi2, perfect.n, 2, 2) == 1.0

        diagonal = table_from_matrix([[3, 1], [1, 3]])
        chi2, _ = pearson_chi2(diagonal)
        assert chi2 == 2.0
        assert cramers_v(chi2, diagonal.n, 2, 2) == 0.5


def test_effect_label_reproduces_marked_association_table():
    with criterion("effect-labels"):
        expected = {
            "large": (0.795, 0.713, 0.524),
            "medium": (0.464, 0.462, 0.400, 0.326),
            "small": (0.280, 0.267, 0.130, 0.109),
            "negligible": (0.035, 0.028, 0.020, 0.038),
        }
        checked = 0
        for label, values in expected.items():
            for v in values:
                assert effect_label(v) == label, (v, label)
                checked += 1
        assert checked == 15


def _fixture_config(tmp_path: Path, name: str) -> PipelineConfig:
    import shutil

    log_copy = tmp_path / f"annotations_{name}.jsonl"
    shutil.copy(FIXTURE_DIR / "annotations.jsonl", log_copy)
    return PipelineConfig(
        corpus_path=FIXTURE_DIR,
        registry_path=FIXTURE_DIR / "registry.csv",
        output_dir=tmp_path / name,
        annotation_log_path=log_copy,
        seed=20210907,
        iterations=999,
    )


def _artifact_bytes(out_dir: Path) -> dict[str, bytes]:
    payload = {}
    for path in sorted(out_dir.rglob("*")):
        if path.is_file():
            payload[str(path.relative_to(out_dir))] = path.read_bytes()
    return payload


def test_end_to_end_fixture_run(tmp_path):
    with criterion("end-to-end-fixture"):
        started = time.perf_counter()

        first = _fixture_config(tmp_path, "run1")
        run_stages(first, *ALL_BATCH_STAGES)

        events = [
            json.loads(line)
            for line in Artifacts(first.output_dir).events.read_text().splitlines()
        ]
        assert len(events) == 7
        resolutions = [
            json.loads(line)
            for line in Artifacts(first.output_dir).resolutions.read_text().splitlines()
        ]
        resolved = {r["event_id"]: r["member_id"] for r in resolutions if r["outcome"] == "resolved"}
        assert resolved == {
            "5-20-2-1": "m001",
            "5-21-2-1": "m006",
            "10-30-2-1": "m002",
            "14-50-2-1": "m004",
            "14-51-2-1": "m005",
        }
        store = build_annotation_store(first)
        assert [i.event_id for i in store.pending_items()] == ["7-40-0-1", "11-60-2-1"]
        assert store.progress() == {"pending": 2, "resolved": 5, "rejected": 0}

        second = _fixture_config(tmp_path, "run2")
        run_stages(second, *ALL_BATCH_STAGES)
        assert _artifact_bytes(first.output_dir) == _artifact_bytes(second.output_dir)

        assert time.perf_counter() - started < 5.0


def test_real_corpus_counts_informational(tmp_path):
    corpus = os.environ.get("CTOKIT_GERMAPARL_CORPUS")
    registry = os.environ.get("CTOKIT_GERMAPARL_REGISTRY")
    if not corpus or not registry:
        pytest.skip(
            "informational criterion: set CTOKIT_GERMAPARL_CORPUS and "
            "CTOKIT_GERMAPARL_REGISTRY to report deltas against the published counts"
        )
    with criterion("real-corpus-counts"):
        config = PipelineConfig(
            corpus_path=Path(corpus),
            registry_path=Path(registry),
            output_dir=tmp_path / "germaparl",
            seed=20210907,
            iterations=999,
        )
        run_stages(config, "ingest", "detect", "extract", "disambiguate", "classify", "stats", "report")
        counts = (Artifacts(config.output_dir).reports_dir / "corpus_counts.csv").read_text()
        print("\n" + counts)  # deltas against 958,098 / 399,807 / 558 are in the report


def test_statistics_path_rests_on_oracle_suites():
    # Paper-scale totals (e.g. an ITO total of 344 or V=0.795 for the
    # president/PCO pair) need the licensed corpus plus full manual
    # annotation; they are intentionally not asserted.  The statistics path
    # is accepted through the exact oracles and the permutation-test
    # comparison above, re-checked here in miniature.
    with criterion("statistics-oracle-basis"):
        assert pearson_chi2(table_from_matrix([[3, 1], [1, 3]]))[0] == 2.0
        assert effect_label(0.795) == "large"
        exact = exact_permutation_p(((3, 1), (1, 3)))
        assert exact == Fraction(34, 70)
        p = monte_carlo_p(table_from_matrix([[3, 1], [1, 3]]), iterations=9_999, seed=3)
        assert abs(p - float(exact)) <= 0.03


def test_annotation_round_trip_and_queue_property():
    with criterion("annotation-round-trip"):
        rng = random.Random(987654321)

        # 100-record random log: export -> import -> identical derived state
        store = AnnotationStore()
        events = [make_event(i) for i in range(30)]
        for event in events:
            register(store, event, n_mentions=rng.choice([0, 1, 2]))
        applied = 0
        while applied < 100:
            event = rng.choice(events)
            kwargs = rng.choice(
                [
                    {"cause": rng.choice(CAUSE_LABELS)},
                    {"resolved_member": f"m{rng.randint(1, 9)}"},
                    {"status_override": rng.choice(["confirmed", "rejected"])},
                    {"cause": rng.choice(CAUSE_LABELS), "resolved_member": "m1"},
                ]
            )
            try:
                store.apply(event.event_id, record(event.event_id, **kwargs))
                applied += 1
            except AnnotationValidationError:
                continue
        assert len(store.log) == 100

        import tempfile

        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "log.jsonl"
            store.export_annotations(path)
            restored = AnnotationStore()
            for event in events:
                register(restored, event, n_mentions=1)
            restored.import_annotations(path)
            assert restored.states == store.states

        # queue size == recomputed pending over 1,000 random operation sequences
        for _ in range(1000):
            seq_store = AnnotationStore()
            seq_events = [make_event(i) for i in range(rng.randint(1, 4))]
            for event in seq_events:
                register(seq_store, event, n_mentions=rng.choice([0, 1, 2]))
            for _ in range(rng.randint(0, 6)):
                event = rng.choice(seq_events)
                try:
                    seq_store.apply(
                        event.event_id,
                        record(
                            event.event_id,
                            **rng.choice(
                                [
                                    {"cause": rng.choice(CAUSE_LABELS)},
                                    {"resolved_member": "mX"},
                                    {"status_override": rng.choice(["confirmed", "rejected"])},
                                ]
                            ),
                        ),
                    )
                except AnnotationValidationError:
                    pass
                assert len(seq_store.pending_items()) == recomputed_pending(seq_store)
