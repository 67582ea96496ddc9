import shutil
from pathlib import Path

import pytest

from ctokit.config import PipelineConfig
from ctokit import pipeline

FIXTURE_DIR = Path(__file__).resolve().parents[1] / "src" / "ctokit" / "fixture"


@pytest.fixture(scope="session")
def fixture_dir() -> Path:
    return FIXTURE_DIR


@pytest.fixture()
def fixture_config(tmp_path: Path) -> PipelineConfig:
    """Pipeline config over the bundled corpus, writing into a temp dir."""
    log_copy = tmp_path / "annotations.jsonl"
    shutil.copy(FIXTURE_DIR / "annotations.jsonl", log_copy)
    return PipelineConfig(
        corpus_path=FIXTURE_DIR,
        registry_path=FIXTURE_DIR / "registry.csv",
        output_dir=tmp_path / "out",
        annotation_log_path=log_copy,
        seed=20210907,
        iterations=999,
    )


def run_stages(config: PipelineConfig, *stages: str) -> dict:
    summaries = {}
    for stage in stages:
        summaries[stage] = pipeline.run_stage(stage, config)
    return summaries


ALL_BATCH_STAGES = ("ingest", "detect", "extract", "disambiguate", "classify", "stats", "report")


@pytest.fixture()
def completed_pipeline(fixture_config):
    run_stages(fixture_config, *ALL_BATCH_STAGES)
    return fixture_config
