"""Exception hierarchy.

Every error raised on purpose by the engines derives from ``GroupoidalError`` (itself a
``ValueError``). Negative outcomes that are part of normal operation, such as an
undefined composition, a failed check or a cocycle that is not a coboundary, are
returned as values instead.
"""

from __future__ import annotations

from typing import Any


class GroupoidalError(ValueError):
    """Base class for all domain errors."""


class StructuralError(GroupoidalError):
    """Malformed model data (indices out of range, wrong table shapes, bad weights)."""


class InvalidMorphismError(GroupoidalError):
    """A morphism encoding that does not belong to the groupoid."""


class ParentMismatchError(GroupoidalError):
    """Elements from different groupoids were combined."""


class WindowError(GroupoidalError):
    """The truncation window cannot hold the data it was asked to represent."""


class CocycleError(GroupoidalError):
    """The cocycle is unverified or of the wrong type for the requested operation."""


class UnsupportedModelError(GroupoidalError):
    """The operation is not decidable on this groupoid model."""


class PreconditionError(GroupoidalError):
    """A mathematical precondition of the operation does not hold."""


class NotUnimodularError(PreconditionError):
    def __init__(self, message: str, witness: Any) -> None:
        super().__init__(message)
        self.witness = witness


class NotUnitaryError(PreconditionError):
    """The matrix over the convolution algebra is not unitary."""


class DocumentError(GroupoidalError):
    def __init__(self, errors: list[tuple[str, str]]) -> None:
        self.errors = errors
        summary = "; ".join(f"{path or '<root>'}: {msg}" for path, msg in errors[:5])
        super().__init__(f"invalid model document ({len(errors)} error(s)): {summary}")
