"""Text rendering for the CLI."""

from __future__ import annotations

import json
from typing import Any

from groupoidal.core.constants import CheckStatus
from groupoidal.models.report import SuiteReport

_MARKS = {
    CheckStatus.PASS: "ok",
    CheckStatus.FAIL: "FAIL",
    CheckStatus.INDETERMINATE: "??",
}


def _short(value: Any, limit: int = 60) -> str:
    text = json.dumps(value, sort_keys=True, separators=(",", ":"))
    return text if len(text) <= limit else text[: limit - 3] + "..."


def render_text(report: SuiteReport, *, verbose: bool = False) -> str:
    lines = [
        f"suite {report.suite}  seed={report.seed}  M={report.window}  tol={report.tolerance:g}",
        f"input {report.input_digest[:16]}  version {report.artifact_version}",
        "",
    ]
    width = max((len(r.name) for r in report.records), default=0)
    for record in report.records:
        line = f"  {_MARKS[record.status]:<4} {record.name:<{width}}  {record.seconds:7.3f}s"
        if record.witness:
            line += f"  {record.witness}"
        lines.append(line)
        if verbose:
            for key, value in sorted(record.values.items()):
                lines.append(f"         {key} = {_short(value)}")
    s = report.summary
    lines += ["", f"{s.passed} passed, {s.failed} failed, {s.indeterminate} indeterminate"]
    return "\n".join(lines)


def render_document_errors(errors: list[tuple[str, str]]) -> str:
    return "\n".join(f"{path or '<document>'}: {message}" for path, message in errors)
