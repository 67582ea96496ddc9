"""Pipeline configuration: plain key=value files.

Documented keys (all paths relative to the config file's directory unless
absolute)::

    corpus_path         = fixture/sessions          # XML file or directory
    registry_path       = fixture/registry.csv
    annotation_log_path = out/annotations.jsonl
    lexicon_path        = lexicon.txt               # optional, bundled default
    rules_path          = rules.cfg                 # optional rule overrides
    ner_endpoint        = http://127.0.0.1:9001/ner # optional
    topic_endpoint      = http://127.0.0.1:9002/cls # optional
    seed                = 20210907
    iterations          = 9999
    output_dir          = out
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError

_KNOWN_KEYS = {
    "corpus_path",
    "registry_path",
    "annotation_log_path",
    "lexicon_path",
    "rules_path",
    "ner_endpoint",
    "topic_endpoint",
    "seed",
    "iterations",
    "output_dir",
}


def parse_kv_file(path: str | Path) -> dict[str, str]:
    """Parse a plain ``key = value`` file; # starts a comment line."""
    values: dict[str, str] = {}
    for number, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {number} has no '=': {line!r}")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


@dataclass
class PipelineConfig:
    corpus_path: Path
    registry_path: Path
    output_dir: Path
    annotation_log_path: Path | None = None
    lexicon_path: Path | None = None
    rules_path: Path | None = None
    ner_endpoint: str | None = None
    topic_endpoint: str | None = None
    seed: int = 20210907
    iterations: int = 9999

    @classmethod
    def from_file(cls, path: str | Path) -> "PipelineConfig":
        path = Path(path)
        raw = parse_kv_file(path)
        unknown = set(raw) - _KNOWN_KEYS
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        for key in ("corpus_path", "registry_path", "output_dir"):
            if key not in raw:
                raise ConfigError(f"missing config key: {key}")

        base = path.parent

        def as_path(key: str) -> Path | None:
            if key not in raw or not raw[key]:
                return None
            p = Path(raw[key])
            return p if p.is_absolute() else base / p

        try:
            seed = int(raw.get("seed", cls.seed))
            iterations = int(raw.get("iterations", cls.iterations))
        except ValueError as exc:
            raise ConfigError(f"seed and iterations must be integers: {exc}") from exc

        return cls(
            corpus_path=as_path("corpus_path"),  # type: ignore[arg-type]
            registry_path=as_path("registry_path"),  # type: ignore[arg-type]
            output_dir=as_path("output_dir"),  # type: ignore[arg-type]
            annotation_log_path=as_path("annotation_log_path"),
            lexicon_path=as_path("lexicon_path"),
            rules_path=as_path("rules_path"),
            ner_endpoint=raw.get("ner_endpoint") or None,
            topic_endpoint=raw.get("topic_endpoint") or None,
            seed=seed,
            iterations=iterations,
        )

    def validate_paths(self, need: tuple[str, ...]) -> None:
        """Check that the inputs a stage depends on exist before it runs."""
        checks = {
            "corpus_path": self.corpus_path,
            "registry_path": self.registry_path,
            "lexicon_path": self.lexicon_path,
            "rules_path": self.rules_path,
            "annotation_log_path": self.annotation_log_path,
        }
        for key in need:
            value = checks.get(key)
            if value is not None and not Path(value).exists():
                raise ConfigError(f"{key} does not exist: {value}")
        self.output_dir.mkdir(parents=True, exist_ok=True)
