"""Deterministic CSV/JSON reports over the pipeline artifacts.

Emitted into ``output_dir/reports``:

    corpus_counts.csv           contribution totals with published reference deltas
    cause_totals.csv            per-cause totals, median per LP, population std dev
    affiliation_totals.csv      coalition/opposition totals and per-LP spread
    gender_breakdown.csv        PCO counts and shares by gender
    resolution_summary.csv      CtO speeches with/without a disambiguated person
    associations.csv            the chi-squared / Cramér's V battery
    series_cause_by_lp.csv      cause distribution per legislative period
    series_gender_by_lp.csv     PCO gender distribution per legislative period
    series_affiliation_by_lp.csv  coalition/opposition distribution per LP
    series_top_topics_by_lp.csv top-10 CtO topics per legislative period
    trace.jsonl                 row-by-row record identifiers for audit

Reports are bit-identical for identical inputs and seed: all orders are
fixed, no timestamps are embedded.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable, Sequence

from . import pipeline as pipeline_mod
from .annotations import CAUSE_LABELS
from .config import PipelineConfig
from .corpus import read_corpus_records
from .registry import load_registry
from .stats import describe_values


def _write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        writer.writerows(rows)


def _fmt(value: float) -> str:
    return f"{value:.4f}"


def emit_reports(config: PipelineConfig, artifacts) -> dict:
    reports_dir = artifacts.reports_dir
    reports_dir.mkdir(parents=True, exist_ok=True)
    trace: list[dict] = []

    corpus_records = list(read_corpus_records(artifacts.corpus))
    registry = load_registry(config.registry_path)
    event_rows, speech_rows, info = pipeline_mod.analysis_records(config)
    lps = sorted({r["lp"] for r in corpus_records})
    lp_labels = [str(lp) for lp in lps]

    # --- corpus counts (with published reference deltas) ---------------------
    cto_contributions = {tuple(map(int, r["event_id"].split("-")[:3])) for r in event_rows}
    counts = {
        "total_speech_contributions": len(corpus_records),
        "presidency_actions": sum(1 for r in corpus_records if r["role"] == "president"),
        "cto_containing_contributions": len(cto_contributions),
    }
    _write_csv(
        reports_dir / "corpus_counts.csv",
        ("metric", "count", "reference_count", "delta"),
        [
            (
                metric,
                counts[metric],
                pipeline_mod.REFERENCE_COUNTS[metric],
                counts[metric] - pipeline_mod.REFERENCE_COUNTS[metric],
            )
            for metric in counts
        ],
    )

    # --- cause totals with per-LP median and spread ---------------------------
    cause_rows = []
    for cause in CAUSE_LABELS:
        events = [r for r in event_rows if r["cause"] == cause]
        if not events:
            continue
        per_lp = {label: 0.0 for label in lp_labels}
        for r in events:
            per_lp[str(r["lp"])] += 1
        stats = describe_values("lp", per_lp)
        cause_rows.append(
            (cause, len(events), _fmt(stats.median), _fmt(stats.std_dev), events)
        )
    cause_rows.sort(key=lambda row: (-row[1], row[0]))
    _write_csv(
        reports_dir / "cause_totals.csv",
        ("cause", "total", "median_per_lp", "std_dev"),
        [row[:4] for row in cause_rows],
    )
    for cause, total, _, _, events in cause_rows:
        trace.append(
            {
                "report": "cause_totals.csv",
                "row": cause,
                "event_ids": sorted(r["event_id"] for r in events),
            }
        )

    # --- coalition/opposition totals -----------------------------------------
    affiliation_rows = []
    for affiliation in ("opposition", "coalition"):
        events = [r for r in event_rows if r["pco_affiliation"] == affiliation]
        if not events:
            continue
        per_lp = {label: 0.0 for label in lp_labels}
        for r in events:
            per_lp[str(r["lp"])] += 1
        stats = describe_values("lp", per_lp)
        affiliation_rows.append((affiliation, len(events), _fmt(stats.median), _fmt(stats.std_dev)))
        trace.append(
            {
                "report": "affiliation_totals.csv",
                "row": affiliation,
                "event_ids": sorted(r["event_id"] for r in events),
            }
        )
    _write_csv(
        reports_dir / "affiliation_totals.csv",
        ("affiliation", "total", "median_per_lp", "std_dev"),
        affiliation_rows,
    )

    # --- gender breakdown ------------------------------------------------------
    member_totals = registry.gender_totals()
    gender_rows = []
    for gender in ("male", "female"):
        events = [r for r in event_rows if r["pco_gender"] == gender]
        pco_members = {r["pco_member_id"] for r in events}
        per_lp_members: dict[str, set] = {label: set() for label in lp_labels}
        for r in events:
            per_lp_members[str(r["lp"])].add(r["pco_member_id"])
        per_lp_counts = {label: float(len(ids)) for label, ids in per_lp_members.items()}
        count_stats = describe_values("lp", per_lp_counts)
        serving = {
            label: sum(
                1
                for m in registry.members.values()
                if int(label) in m.lps_served and m.gender == gender
            )
            for label in lp_labels
        }
        per_lp_pct = {
            label: (100.0 * per_lp_counts[label] / serving[label]) if serving[label] else 0.0
            for label in lp_labels
        }
        pct_stats = describe_values("lp", per_lp_pct)
        total_members = member_totals.get(gender, 0)
        share = 100.0 * len(pco_members) / total_members if total_members else 0.0
        gender_rows.append(
            (
                gender,
                len(pco_members),
                _fmt(share),
                total_members,
                _fmt(count_stats.median),
                _fmt(count_stats.std_dev),
                _fmt(pct_stats.median),
                _fmt(pct_stats.std_dev),
            )
        )
        trace.append(
            {
                "report": "gender_breakdown.csv",
                "row": gender,
                "event_ids": sorted(r["event_id"] for r in events),
            }
        )
    _write_csv(
        reports_dir / "gender_breakdown.csv",
        (
            "gender",
            "pco_members",
            "pct_of_members",
            "members_total",
            "median_pco_per_lp",
            "std_dev",
            "median_pct_per_lp",
            "std_dev_pct",
        ),
        gender_rows,
    )

    # --- resolution summary ------------------------------------------------------
    speeches: dict[tuple, list[bool]] = {}
    for r in event_rows:
        coords = tuple(map(int, r["event_id"].split("-")[:3]))
        speeches.setdefault(coords, []).append(r["pco_member_id"] is not None)
    resolved = sum(1 for flags in speeches.values() if all(flags))
    unresolved = len(speeches) - resolved
    fraction = resolved / len(speeches) if speeches else 0.0
    _write_csv(
        reports_dir / "resolution_summary.csv",
        ("metric", "value"),
        [
            ("cto_speeches_resolved", resolved),
            ("cto_speeches_unresolved", unresolved),
            ("resolved_fraction", _fmt(fraction)),
        ],
    )

    # --- association battery -------------------------------------------------------
    association_rows = []
    for record in pipeline_mod._read_jsonl(artifacts.associations):
        if "skipped" in record:
            association_rows.append(
                (record["var_a"], record["var_b"], "", "", "", "", "", "", "", "", "", record["skipped"])
            )
            continue
        association_rows.append(
            (
                record["var_a"],
                record["var_b"],
                record["n"],
                _fmt(record["chi2"]),
                record["df"],
                _fmt(record["p_value"]),
                _fmt(record["p_asymptotic"]),
                _fmt(record["cramers_v"]),
                record["effect"],
                record["iterations"],
                record["seed"],
                "",
            )
        )
    _write_csv(
        reports_dir / "associations.csv",
        (
            "var_a",
            "var_b",
            "n",
            "chi2",
            "df",
            "p_value",
            "p_asymptotic",
            "cramers_v",
            "effect",
            "iterations",
            "seed",
            "skipped",
        ),
        association_rows,
    )
    trace.append(
        {
            "report": "associations.csv",
            "row": "*",
            "source": "events.jsonl + corpus.jsonl",
            "event_ids": sorted(r["event_id"] for r in event_rows),
        }
    )

    # --- per-LP series ------------------------------------------------------------
    def series(path: str, columns: Sequence[str], key: str) -> None:
        rows = []
        for lp in lps:
            row = [lp]
            for column in columns:
                row.append(sum(1 for r in event_rows if r["lp"] == lp and r[key] == column))
            rows.append(row)
        _write_csv(reports_dir / path, ("lp", *columns), rows)

    series("series_cause_by_lp.csv", list(CAUSE_LABELS), "cause")
    series("series_gender_by_lp.csv", ["male", "female"], "pco_gender")
    series("series_affiliation_by_lp.csv", ["coalition", "opposition"], "pco_affiliation")

    topic_totals: dict[str, int] = {}
    for r in event_rows:
        if r["topic_counted"] is not None:
            topic_totals[r["topic_counted"]] = topic_totals.get(r["topic_counted"], 0) + 1
    top_topics = [
        t for t, _ in sorted(topic_totals.items(), key=lambda kv: (-kv[1], kv[0]))[:10]
    ]
    series("series_top_topics_by_lp.csv", top_topics, "topic_counted")

    with open(reports_dir / "trace.jsonl", "w", encoding="utf-8") as handle:
        for entry in trace:
            handle.write(json.dumps(entry, ensure_ascii=False, sort_keys=True) + "\n")

    return {
        "stage": "report",
        "reports_dir": str(reports_dir),
        **counts,
        "cto_speeches_resolved": resolved,
        "cto_speeches_unresolved": unresolved,
        **info,
    }
