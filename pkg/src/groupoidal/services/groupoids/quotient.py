"""The class space G/ker c, identified with the pairs (r(a), c(a))."""

from __future__ import annotations

from dataclasses import dataclass

from groupoidal.core.settings import settings
from groupoidal.services.cocycles import ClassKey, Cocycle, coset_partition, ensure_verified
from groupoidal.services.groupoids.base import DiscreteGroupoid, Morphism, Window


@dataclass(frozen=True)
class QuotientModel:
    groupoid: DiscreteGroupoid
    cocycle: Cocycle
    classes: tuple[ClassKey, ...]
    cosets: tuple[tuple[Morphism, ...], ...]
    constant_on_cosets: bool
    injective: bool
    witness: tuple[str, ...] = ()
    window: Window | None = None

    def class_of(self, a: Morphism) -> ClassKey:
        return self.cocycle.class_of(a)

    @property
    def size(self) -> int:
        return len(self.classes)

    @property
    def bijective(self) -> bool:
        """True when every coset is a single morphism, i.e. ker c is the unit space."""
        return self.injective and all(len(coset) == 1 for coset in self.cosets)

    @property
    def well_defined(self) -> bool:
        return self.constant_on_cosets and self.injective


def quotient_by_kernel(
    g: DiscreteGroupoid, c: Cocycle, window: Window | None = None, tol: float | None = None
) -> QuotientModel:
    """Classes of G/ker c with the class map a -> (r(a), c(a)), checked on the windowed morphisms."""
    ensure_verified(g, c)
    win = None if g.is_finite else (window or Window(settings.default_window))
    partition = coset_partition(g, c, win, tol)
    return QuotientModel(
        groupoid=g,
        cocycle=c,
        classes=tuple(partition.classes),
        cosets=tuple(tuple(coset) for coset in partition.cosets),
        constant_on_cosets=partition.constant,
        injective=partition.injective,
        witness=tuple(partition.witness),
        window=win,
    )
