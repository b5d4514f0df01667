"""groupoidal command-line entrypoint."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from groupoidal import __version__
from groupoidal.cli.utils import render_document_errors, render_text
from groupoidal.core.constants import ExitCode, SuiteName
from groupoidal.core.errors import DocumentError
from groupoidal.core.settings import settings
from groupoidal.services import metrics
from groupoidal.services.documents import (
    canonical_json,
    corpus_names,
    json_schema,
    load_corpus,
    load_workbench,
    parse_model,
)
from groupoidal.services.groupoids.base import Window
from groupoidal.services.suites import run_suites

logger = logging.getLogger(__name__)


def _read(source: str) -> bytes:
    """A path, ``-`` for stdin, or ``example:<name>`` for a shipped document."""
    if source == "-":
        return sys.stdin.buffer.read()
    if source.startswith("example:"):
        return load_corpus(source.removeprefix("example:"))
    return Path(source).read_bytes()


def _cmd_validate(args: argparse.Namespace) -> int:
    doc = parse_model(_read(args.file))
    if args.canonical:
        print(canonical_json(doc))
    else:
        print(f"{args.file}: valid ({doc.groupoid.kind})")
    return ExitCode.OK


def _cmd_run(args: argparse.Namespace) -> int:
    raw = _read(args.file)
    bench = load_workbench(raw)
    overrides = {}
    if args.window is not None:
        overrides["window"] = Window(args.window)
    if args.tol is not None:
        overrides["tolerance"] = args.tol
    if args.seed is not None:
        overrides["seed"] = args.seed
    if overrides:
        bench = replace(bench, **overrides)
    suites = [args.suite] if args.suite else list(bench.document.suites)
    report = run_suites(bench, suites, max_workers=args.workers)
    if args.format == "json":
        print(json.dumps(report.model_dump(mode="json"), indent=2, sort_keys=True))
    else:
        print(render_text(report, verbose=args.verbose))
    metrics_file = args.metrics_file or settings.metrics_textfile
    if metrics_file:
        metrics.write_metrics(metrics_file)
    logger.info("%s: %d checks, exit %d", bench.name, report.summary.total, report.exit_code)
    return report.exit_code


def _cmd_schema(args: argparse.Namespace) -> int:
    print(json.dumps(json_schema(args.kind), indent=2, sort_keys=True))
    return ExitCode.OK


def _cmd_examples(args: argparse.Namespace) -> int:
    if args.name is None:
        for name in corpus_names():
            print(name)
        return ExitCode.OK
    sys.stdout.write(load_corpus(args.name).decode("utf-8"))
    return ExitCode.OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="groupoidal",
        description="Executable checks for groupoid convolution algebras, cocycles and index pairings.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=None, help="overrides GROUPOIDAL_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)

    validate = sub.add_parser("validate", help="schema-check a model document")
    validate.add_argument("file", help="path, '-' for stdin, or example:<name>")
    validate.add_argument("--canonical", action="store_true", help="print the canonical serialization")
    validate.set_defaults(handler=_cmd_validate)

    run = sub.add_parser("run", help="run a verification suite against a model document")
    run.add_argument("file", help="path, '-' for stdin, or example:<name>")
    run.add_argument("--suite", choices=[s.value for s in SuiteName], default=None)
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--window", type=int, default=None, help="truncation window M")
    run.add_argument("--tol", type=float, default=None, help="float comparison tolerance")
    run.add_argument("--format", choices=["json", "text"], default="json")
    run.add_argument("--workers", type=int, default=None, help="threads for running checks")
    run.add_argument("--metrics-file", default=None, help="write Prometheus text exposition here")
    run.add_argument("-v", "--verbose", action="store_true", help="show check values in text output")
    run.set_defaults(handler=_cmd_run)

    schema = sub.add_parser("schema", help="print a JSON Schema")
    schema.add_argument("kind", choices=["model", "report"])
    schema.set_defaults(handler=_cmd_schema)

    examples = sub.add_parser("examples", help="list or print the shipped example documents")
    examples.add_argument("name", nargs="?", default=None)
    examples.set_defaults(handler=_cmd_examples)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=(args.log_level or settings.log_level).upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    if getattr(args, "window", None) is not None and args.window < 0:
        parser.error("--window must be >= 0")
    try:
        return int(args.handler(args))
    except DocumentError as exc:
        print(render_document_errors(exc.errors), file=sys.stderr)
        return ExitCode.SCHEMA_ERROR
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ExitCode.SCHEMA_ERROR
