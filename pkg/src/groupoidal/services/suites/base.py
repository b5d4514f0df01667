"""Check registry and the suite runner."""

from __future__ import annotations

import logging
import time
import zlib
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from groupoidal.core.constants import CheckStatus, SuiteName
from groupoidal.core.errors import GroupoidalError
from groupoidal.core.scalars import dump_scalar
from groupoidal.core.settings import settings
from groupoidal.models.report import CheckRecord, SuiteReport, SuiteSummary
from groupoidal.services import metrics
from groupoidal.services.documents import Workbench

logger = logging.getLogger(__name__)

SUITE_ORDER = (
    SuiteName.AXIOMS,
    SuiteName.ALGEBRA,
    SuiteName.COCYCLE,
    SuiteName.BIMODULE,
    SuiteName.KMS,
    SuiteName.INDEX,
)


@dataclass
class Outcome:
    status: CheckStatus
    witness: str | None = None
    values: dict[str, Any] = field(default_factory=dict)


def passed(**values: Any) -> Outcome:
    return Outcome(CheckStatus.PASS, None, values)


def failed(witness: str, /, **values: Any) -> Outcome:
    return Outcome(CheckStatus.FAIL, witness, values)


def indeterminate(detail: str, /, **values: Any) -> Outcome:
    return Outcome(CheckStatus.INDETERMINATE, detail, values)


def verdict(ok: bool, witness: str | None, /, **values: Any) -> Outcome:
    return passed(**values) if ok else failed(witness or "check failed", **values)


CheckFn = Callable[[Workbench, np.random.Generator], Outcome]
Applies = Callable[[Workbench], bool]


@dataclass(frozen=True)
class Check:
    name: str
    suite: SuiteName
    fn: CheckFn
    applies: Applies


_REGISTRY: dict[SuiteName, list[Check]] = {suite: [] for suite in SUITE_ORDER}


def check(suite: SuiteName, name: str, applies: Applies | None = None) -> Callable[[CheckFn], CheckFn]:
    """Register ``fn`` as check ``suite.name``; ``applies`` filters models it makes sense for."""

    def decorator(fn: CheckFn) -> CheckFn:
        _REGISTRY[suite].append(
            Check(name=f"{suite.value}.{name}", suite=suite, fn=fn, applies=applies or (lambda _: True))
        )
        return fn

    return decorator


def checks_for(suite: SuiteName | str) -> list[Check]:
    name = SuiteName(suite)
    suites = SUITE_ORDER if name is SuiteName.ALL else (name,)
    return [c for s in suites for c in _REGISTRY[s]]


def jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.generic):
        return jsonable(value.item())
    if isinstance(value, (bool, str)) or value is None:
        return value
    if isinstance(value, (int, float, complex, Fraction)):
        return dump_scalar(value)
    return str(value)


def check_rng(seed: int, name: str) -> np.random.Generator:
    """Independent of execution order: seeded from the run seed and the check name."""
    return np.random.default_rng([seed, zlib.crc32(name.encode("utf-8"))])


def _execute(bench: Workbench, item: Check, seed: int) -> CheckRecord:
    started = time.perf_counter()
    try:
        outcome = item.fn(bench, check_rng(seed, item.name))
    except GroupoidalError as exc:
        outcome = failed(f"{type(exc).__name__}: {exc}")
    except Exception as exc:  # noqa: BLE001
        logger.exception("Check %s raised unexpectedly", item.name)
        outcome = failed(f"{type(exc).__name__}: {exc}")
    seconds = time.perf_counter() - started
    metrics.observe_check(item.suite.value, outcome.status, seconds)
    logger.info("%s: %s (%.3fs)", item.name, outcome.status.value, seconds)
    return CheckRecord(
        name=item.name,
        status=outcome.status,
        witness=outcome.witness,
        values=jsonable(outcome.values),
        seconds=seconds,
    )


def run_suite(
    bench: Workbench,
    suite: SuiteName | str,
    seed: int | None = None,
    *,
    max_workers: int | None = None,
) -> SuiteReport:
    """Run every applicable check of ``suite`` (or of all suites) and assemble the report."""
    name = SuiteName(suite)
    run_seed = bench.seed if seed is None else seed
    workers = settings.max_workers if max_workers is None else max_workers
    selected = [c for c in checks_for(name) if c.applies(bench)]
    logger.debug("running %d checks of suite %s on %s", len(selected), name.value, bench.name)
    if workers > 1 and len(selected) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(lambda c: _execute(bench, c, run_seed), selected))
    else:
        records = [_execute(bench, c, run_seed) for c in selected]
    records.sort(key=lambda r: r.name)
    summary = SuiteSummary(
        passed=sum(r.status is CheckStatus.PASS for r in records),
        failed=sum(r.status is CheckStatus.FAIL for r in records),
        indeterminate=sum(r.status is CheckStatus.INDETERMINATE for r in records),
    )
    return SuiteReport(
        suite=name.value,
        seed=run_seed,
        window=bench.window.M,
        tolerance=bench.tolerance,
        input_digest=bench.digest,
        records=records,
        summary=summary,
    )


def run_suites(
    bench: Workbench,
    suites: list[SuiteName | str],
    seed: int | None = None,
    *,
    max_workers: int | None = None,
) -> SuiteReport:
    """Run several suites as one report; ``all`` anywhere in the list wins."""
    names = [SuiteName(s) for s in suites] or [SuiteName.ALL]
    if SuiteName.ALL in names or len(names) == 1:
        single = SuiteName.ALL if SuiteName.ALL in names else names[0]
        return run_suite(bench, single, seed, max_workers=max_workers)
    ordered = [s for s in SUITE_ORDER if s in names]
    reports = [run_suite(bench, s, seed, max_workers=max_workers) for s in ordered]
    records = sorted((r for report in reports for r in report.records), key=lambda r: r.name)
    summary = SuiteSummary(
        passed=sum(report.summary.passed for report in reports),
        failed=sum(report.summary.failed for report in reports),
        indeterminate=sum(report.summary.indeterminate for report in reports),
    )
    return reports[0].model_copy(
        update={"suite": ",".join(s.value for s in ordered), "records": records, "summary": summary}
    )
