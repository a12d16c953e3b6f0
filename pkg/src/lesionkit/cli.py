"""Command-line entry point.

Verbs mirror the pipeline stages (extract, select, fit, evaluate,
compare), plus export for nomogram documents and serve for the scoring
service. Exit codes: 0 success, 1 input validation failure, 2 runtime
error. Errors go to stderr as one JSON object per failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .dataset import PipelineConfig, load_cohort
from .errors import LesionKitError, ValidationFailure
from .nomogram import paper_fixture_nomogram, to_document
from .pipeline import dump_json, run_pipeline


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lesionkit",
        description="lesion morphometrics, nomogram fitting, evaluation and serving",
    )
    parser.add_argument("--config", type=Path, help="pipeline config file (key = value lines)")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument("--out-dir", type=Path, default=Path("artifacts"), help="artifact directory")
    parser.add_argument("--task", choices=["biopsy", "malignancy"], help="override the config task")
    sub = parser.add_subparsers(dest="verb", required=True)

    def add_data_verb(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--birads", type=Path, required=True, help="lexicon record table (CSV)")
        p.add_argument("--contours", type=Path, required=True, help="contour records (JSON lines)")
        return p

    add_data_verb("extract", "compute morphometric features for every contour")
    add_data_verb("select", "run the reproducibility / collinearity / sparsity selection")
    add_data_verb("fit", "fit the three models and export their nomograms")
    add_data_verb("evaluate", "evaluate fitted models per partition and pooled")
    add_data_verb("compare", "pairwise correlated-AUC comparisons of the models")

    export = sub.add_parser("export", help="write nomogram documents")
    export.add_argument("--birads", type=Path, help="lexicon record table (CSV)")
    export.add_argument("--contours", type=Path, help="contour records (JSON lines)")
    export.add_argument(
        "--fixture", choices=["biopsy", "malignancy"],
        help="export the published-coefficients fixture instead of fitting",
    )

    serve = sub.add_parser("serve", help="serve exported nomograms over HTTP")
    serve.add_argument("--artifact-dir", type=Path, required=True)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8080)
    return parser


def resolve_config(args) -> PipelineConfig:
    config = PipelineConfig.from_file(args.config) if args.config else PipelineConfig()
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.task is not None:
        overrides["task"] = args.task
    return dataclasses.replace(config, **overrides) if overrides else config


def _emit_error(exc: Exception) -> None:
    payload = {"error": type(exc).__name__, "message": str(exc)}
    print(json.dumps(payload), file=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = resolve_config(args)
        if args.verb == "serve":
            import uvicorn

            from .service import create_app

            uvicorn.run(create_app(args.artifact_dir), host=args.host, port=args.port)
            return 0
        if args.verb == "export" and args.fixture:
            args.out_dir.mkdir(parents=True, exist_ok=True)
            doc = to_document(paper_fixture_nomogram(args.fixture), f"{args.fixture}-fixture")
            path = args.out_dir / f"nomogram_{args.fixture}-fixture.json"
            path.write_text(dump_json(doc))
            print(path)
            return 0
        if args.verb == "export":
            if not (args.birads and args.contours):
                raise ValidationFailure("export needs --fixture or both --birads and --contours")
            dataset = load_cohort(args.birads, args.contours, config)
            art = run_pipeline(dataset, config, out_dir=args.out_dir, until="fit")
            for doc_id in sorted(art.nomogram_docs):
                print(args.out_dir / f"nomogram_{doc_id}.json")
            return 0
        dataset = load_cohort(args.birads, args.contours, config)
        run_pipeline(dataset, config, out_dir=args.out_dir, until=args.verb)
        print(args.out_dir / "manifest.json")
        return 0
    except ValidationFailure as exc:
        _emit_error(exc)
        return 1
    except (LesionKitError, OSError, ValueError, KeyError) as exc:
        _emit_error(exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
