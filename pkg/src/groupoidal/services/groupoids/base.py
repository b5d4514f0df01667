"""Abstract base for discrete groupoid models and their morphism encodings."""

from __future__ import annotations

from abc import ABC, abstractmethod
from collections.abc import Iterator
from dataclasses import dataclass
from typing import ClassVar, Union

from groupoidal.core.errors import InvalidMorphismError, WindowError


# -------------------------------------------------------------------------
# Morphism encodings
# -------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class Explicit:
    """Morphism of a finite groupoid, by index into its morphism list."""

    id: int

    def __str__(self) -> str:
        return f"#{self.id}"


@dataclass(frozen=True, order=True)
class Trans:
    """Morphism (x, n) of a transformation groupoid X x| Z."""

    x: int
    n: int

    def __str__(self) -> str:
        return f"({self.x},{self.n})"


@dataclass(frozen=True, order=True)
class Deaconu:
    """Morphism (x, n, y) of a Deaconu-Renault groupoid."""

    x: int
    n: int
    y: int

    def __str__(self) -> str:
        return f"({self.x},{self.n},{self.y})"


Morphism = Union[Explicit, Trans, Deaconu]


@dataclass(frozen=True)
class Window:
    """Truncation parameter M: enumerations and matrices only see |degree| <= M."""

    M: int

    def __post_init__(self) -> None:
        if self.M < 0:
            raise WindowError("window M must be >= 0")

    def widen(self, by: int) -> Window:
        return Window(self.M + by)

    def covers(self, degree: int) -> bool:
        return abs(degree) <= self.M


# -------------------------------------------------------------------------
# Groupoid interface
# -------------------------------------------------------------------------


class DiscreteGroupoid(ABC):
    """
    A groupoid with finite unit space {0, ..., unit_count - 1}.

    The Haar system is the counting measure on each fiber. Finite models enumerate all
    morphisms; infinite models enumerate them by degree inside a Window.
    """

    kind: ClassVar[str]
    morphism_type: ClassVar[type]

    @property
    @abstractmethod
    def unit_count(self) -> int: ...

    @property
    @abstractmethod
    def is_finite(self) -> bool: ...

    @abstractmethod
    def is_valid(self, a: Morphism) -> bool:
        """True when ``a`` is an encoding of a morphism of this groupoid."""
        ...

    @abstractmethod
    def r(self, a: Morphism) -> int: ...

    @abstractmethod
    def d(self, a: Morphism) -> int: ...

    @abstractmethod
    def compose(self, a: Morphism, b: Morphism) -> Morphism | None:
        """Return ab when d(a) = r(b), None otherwise."""
        ...

    @abstractmethod
    def invert(self, a: Morphism) -> Morphism: ...

    @abstractmethod
    def unit(self, x: int) -> Morphism: ...

    @abstractmethod
    def degree(self, a: Morphism) -> int:
        """Integer grading used for windowed enumeration (0 on finite models)."""
        ...

    @abstractmethod
    def _enumerate(self, window: Window | None) -> Iterator[Morphism]: ...

    @abstractmethod
    def signature(self) -> tuple:
        """Hashable data that determines the model; equal signatures mean the same groupoid."""
        ...

    # ---------------------------------------------------------------------
    # Shared behaviour
    # ---------------------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, DiscreteGroupoid):
            return NotImplemented
        return type(self) is type(other) and self.signature() == other.signature()

    def __hash__(self) -> int:
        return hash((type(self).__name__, self.signature()))

    @property
    def ambient(self) -> DiscreteGroupoid:
        """The groupoid that algebra elements over this one live in."""
        return self

    def units(self) -> list[Morphism]:
        return [self.unit(x) for x in range(self.unit_count)]

    def is_unit(self, a: Morphism) -> bool:
        return self.is_valid(a) and a == self.unit(self.r(a))

    def check(self, a: Morphism) -> Morphism:
        if not self.is_valid(a):
            raise InvalidMorphismError(f"{a!s} is not a morphism of this {self.kind} groupoid")
        return a

    def require_window(self, window: Window | None) -> Window | None:
        if window is None and not self.is_finite:
            raise WindowError(f"{self.kind} groupoid has infinitely many morphisms; pass a Window")
        return window

    def morphisms(self, window: Window | None = None) -> list[Morphism]:
        return sorted(self._enumerate(self.require_window(window)))

    def range_fiber(self, u: int, window: Window | None = None) -> list[Morphism]:
        return [a for a in self.morphisms(window) if self.r(a) == u]

    def source_fiber(self, u: int, window: Window | None = None) -> list[Morphism]:
        return [a for a in self.morphisms(window) if self.d(a) == u]

    def composable(self, a: Morphism, b: Morphism) -> bool:
        return self.d(a) == self.r(b)
