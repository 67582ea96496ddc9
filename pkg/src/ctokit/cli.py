"""ctoctl: pipeline stages as subcommands.

    ctoctl <stage> --config pipeline.cfg [--seed N] [--iterations N] [--endpoint URL]
    ctoctl import-registry official.xml registry.csv

Exit codes: 0 ok, 2 validation error, 3 missing stage dependency, 4 I/O error.
"""
from __future__ import annotations

import argparse
import json
import sys

from .config import PipelineConfig
from .errors import DependencyError, ValidationError
from .pipeline import STAGES, run_stage
from .registry import import_official_registry

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_DEPENDENCY = 3
EXIT_IO = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ctoctl", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    for stage in STAGES:
        stage_parser = sub.add_parser(stage, help=f"run the {stage} stage")
        stage_parser.add_argument("--config", required=True, help="pipeline config file")
        stage_parser.add_argument("--seed", type=int, help="override the configured seed")
        stage_parser.add_argument(
            "--iterations", type=int, help="override the Monte-Carlo iteration count"
        )
        stage_parser.add_argument(
            "--endpoint", help="override the external endpoint used by this stage"
        )
        if stage == "serve":
            stage_parser.add_argument("--host", default="127.0.0.1")
            stage_parser.add_argument("--port", type=int, default=8000)

    importer = sub.add_parser(
        "import-registry", help="convert official open-data member XML to registry CSV"
    )
    importer.add_argument("xml_path")
    importer.add_argument("csv_path")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)

    try:
        if args.command == "import-registry":
            summary = import_official_registry(args.xml_path, args.csv_path)
            print(json.dumps({"stage": "import-registry", **summary}, sort_keys=True))
            return EXIT_OK

        config = PipelineConfig.from_file(args.config)
        if args.seed is not None:
            config.seed = args.seed
        if args.iterations is not None:
            config.iterations = args.iterations
        if args.endpoint is not None:
            if args.command == "classify":
                config.topic_endpoint = args.endpoint
            else:
                config.ner_endpoint = args.endpoint

        kwargs = {}
        if args.command == "serve":
            kwargs = {"host": args.host, "port": args.port}
        summary = run_stage(args.command, config, **kwargs)
        print(json.dumps(summary, ensure_ascii=False, sort_keys=True))
        return EXIT_OK
    except DependencyError as exc:
        print(f"ctoctl: {exc}", file=sys.stderr)
        return EXIT_DEPENDENCY
    except ValidationError as exc:
        print(f"ctoctl: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"ctoctl: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    raise SystemExit(main())
