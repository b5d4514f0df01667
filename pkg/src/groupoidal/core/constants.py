"""Report statuses, suite names and process exit codes."""

from __future__ import annotations

from enum import Enum, IntEnum

ARTIFACT_VERSION = "0.1.0"
MODEL_SCHEMA_VERSION = "1"
REPORT_SCHEMA_VERSION = "1"


class CheckStatus(str, Enum):
    """Outcome of a single check inside a suite run."""

    PASS = "pass"
    FAIL = "fail"
    INDETERMINATE = "indeterminate"


class SuiteName(str, Enum):
    AXIOMS = "axioms"
    ALGEBRA = "algebra"
    COCYCLE = "cocycle"
    BIMODULE = "bimodule"
    KMS = "kms"
    INDEX = "index"
    ALL = "all"


class ExitCode(IntEnum):
    OK = 0
    CHECK_FAILED = 1
    SCHEMA_ERROR = 2
    INDETERMINATE = 3


class TransformKind(str, Enum):
    """Functional-calculus symbols applied pointwise to the cocycle values."""

    RESOLVENT = "resolvent"
    BOUNDED = "bounded"
    CAYLEY = "cayley"
    RESOLVENT_SQUARED = "resolvent_squared"


class IndexMethod(str, Enum):
    COMPRESSION = "compression"
    SPECTRAL_FLOW = "spectral_flow"
