from __future__ import annotations

from typing import Any

from pydantic import BaseModel, Field

from groupoidal.core.constants import (
    ARTIFACT_VERSION,
    REPORT_SCHEMA_VERSION,
    CheckStatus,
    ExitCode,
)


class Violation(BaseModel):
    """One failed law, with the morphisms that witness the failure."""

    axiom: str
    witness: list[str] = Field(default_factory=list)
    detail: str = ""


class ValidationReport(BaseModel):
    valid: bool
    structural_errors: list[str] = Field(default_factory=list)
    violations: list[Violation] = Field(default_factory=list)
    violation_count: int = 0
    checked: int = 0
    exhaustive: bool = True

    def first_witness(self) -> Violation | None:
        return self.violations[0] if self.violations else None


class CheckRecord(BaseModel):
    name: str
    status: CheckStatus
    witness: str | None = None
    values: dict[str, Any] = Field(default_factory=dict)
    seconds: float = 0.0


class SuiteSummary(BaseModel):
    passed: int = 0
    failed: int = 0
    indeterminate: int = 0

    @property
    def total(self) -> int:
        return self.passed + self.failed + self.indeterminate


class SuiteReport(BaseModel):
    """Machine-readable outcome of ``groupoidal run``."""

    schema_version: str = REPORT_SCHEMA_VERSION
    artifact_version: str = ARTIFACT_VERSION
    suite: str
    seed: int
    window: int
    tolerance: float
    input_digest: str
    records: list[CheckRecord] = Field(default_factory=list)
    summary: SuiteSummary = Field(default_factory=SuiteSummary)

    @property
    def exit_code(self) -> ExitCode:
        if self.summary.failed:
            return ExitCode.CHECK_FAILED
        if self.summary.indeterminate:
            return ExitCode.INDETERMINATE
        return ExitCode.OK

    def without_timing(self) -> dict[str, Any]:
        data = self.model_dump(mode="json")
        for record in data["records"]:
            record.pop("seconds", None)
        return data
