"""Finite groupoids given by explicit tables, plus the pair-groupoid and cyclic-group builders."""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from typing import ClassVar

from groupoidal.core.errors import InvalidMorphismError, StructuralError
from groupoidal.services.groupoids.base import DiscreteGroupoid, Explicit, Morphism, Window


@dataclass(frozen=True, eq=False)
class FiniteExplicitGroupoid(DiscreteGroupoid):
    """
    Morphisms are ``Explicit(i)`` for i in range(len(ranges)).

    The tables are taken as given: out-of-range indices are not rejected here so that
    :func:`groupoidal.services.groupoids.validation.validate_axioms` can report them as
    structural errors.
    """

    kind: ClassVar[str] = "finite"
    morphism_type: ClassVar[type] = Explicit

    units_total: int
    ranges: tuple[int, ...]
    sources: tuple[int, ...]
    unit_ids: tuple[int, ...]
    inverses: tuple[int, ...]
    table: Mapping[tuple[int, int], int] = field(default_factory=dict)
    labels: tuple[str, ...] = ()

    @property
    def unit_count(self) -> int:
        return self.units_total

    @property
    def morphism_count(self) -> int:
        return len(self.ranges)

    @property
    def is_finite(self) -> bool:
        return True

    def label(self, a: Morphism) -> str:
        if isinstance(a, Explicit) and 0 <= a.id < len(self.labels):
            return self.labels[a.id]
        return str(a)

    def structural_problems(self) -> list[str]:
        problems: list[str] = []
        count = self.morphism_count
        if self.units_total < 1:
            problems.append("unit space is empty")
        for name, seq in (("sources", self.sources), ("inverses", self.inverses)):
            if len(seq) != count:
                problems.append(f"{name} has {len(seq)} entries, expected {count}")
        if len(self.unit_ids) != self.units_total:
            problems.append(f"unit_ids has {len(self.unit_ids)} entries, expected {self.units_total}")
        for i, u in enumerate(self.ranges):
            if not 0 <= u < self.units_total:
                problems.append(f"range of #{i} is {u}, outside 0..{self.units_total - 1}")
        for i, u in enumerate(self.sources):
            if not 0 <= u < self.units_total:
                problems.append(f"source of #{i} is {u}, outside 0..{self.units_total - 1}")
        for x, m in enumerate(self.unit_ids):
            if not 0 <= m < count:
                problems.append(f"unit of {x} is #{m}, outside the morphism list")
        for i, m in enumerate(self.inverses):
            if not 0 <= m < count:
                problems.append(f"inverse of #{i} is #{m}, outside the morphism list")
        for (a, b), c in sorted(self.table.items()):
            if not (0 <= a < count and 0 <= b < count and 0 <= c < count):
                problems.append(f"table entry #{a}*#{b}=#{c} references a missing morphism")
        return problems

    def signature(self) -> tuple:
        # labels are cosmetic
        return (
            self.units_total,
            self.ranges,
            self.sources,
            self.unit_ids,
            self.inverses,
            tuple(sorted(self.table.items())),
        )

    def is_valid(self, a: Morphism) -> bool:
        return isinstance(a, Explicit) and 0 <= a.id < self.morphism_count

    def _require(self, a: Morphism) -> int:
        if not self.is_valid(a):
            raise InvalidMorphismError(f"{a!s} is not one of the {self.morphism_count} morphisms")
        return a.id  # type: ignore[union-attr]

    def r(self, a: Morphism) -> int:
        return self.ranges[self._require(a)]

    def d(self, a: Morphism) -> int:
        return self.sources[self._require(a)]

    def compose(self, a: Morphism, b: Morphism) -> Morphism | None:
        ia, ib = self._require(a), self._require(b)
        if self.sources[ia] != self.ranges[ib]:
            return None
        result = self.table.get((ia, ib))
        return None if result is None else Explicit(result)

    def invert(self, a: Morphism) -> Morphism:
        return Explicit(self.inverses[self._require(a)])

    def unit(self, x: int) -> Morphism:
        if not 0 <= x < self.units_total:
            raise InvalidMorphismError(f"unit {x} outside 0..{self.units_total - 1}")
        return Explicit(self.unit_ids[x])

    def degree(self, a: Morphism) -> int:
        self._require(a)
        return 0

    def _enumerate(self, window: Window | None) -> Iterator[Morphism]:
        return (Explicit(i) for i in range(self.morphism_count))

    def with_table(self, table: Mapping[tuple[int, int], int]) -> FiniteExplicitGroupoid:
        return FiniteExplicitGroupoid(
            units_total=self.units_total,
            ranges=self.ranges,
            sources=self.sources,
            unit_ids=self.unit_ids,
            inverses=self.inverses,
            table=dict(table),
            labels=self.labels,
        )


def build_finite_groupoid(
    units: int,
    ranges: Sequence[int],
    sources: Sequence[int],
    unit_ids: Sequence[int],
    inverses: Sequence[int],
    table: Iterable[tuple[int, int, int]],
    labels: Sequence[str] = (),
) -> FiniteExplicitGroupoid:
    """Assemble a finite model from flat tables. Duplicate table keys are structural errors."""
    if len(ranges) == 0:
        raise StructuralError("a finite groupoid needs at least one morphism")
    lookup: dict[tuple[int, int], int] = {}
    for a, b, c in table:
        if (a, b) in lookup:
            raise StructuralError(f"composition #{a}*#{b} is listed twice")
        lookup[(a, b)] = c
    return FiniteExplicitGroupoid(
        units_total=units,
        ranges=tuple(ranges),
        sources=tuple(sources),
        unit_ids=tuple(unit_ids),
        inverses=tuple(inverses),
        table=lookup,
        labels=tuple(labels),
    )


def build_pair_groupoid(n: int, group_order: int = 1) -> FiniteExplicitGroupoid:
    """
    Pair groupoid on n units times the cyclic group Z/m (m = group_order).

    Morphism (i, j, g) has id (i*n + j)*m + g, range i and source j; composition is
    (i, j, g)(j, k, h) = (i, k, g + h mod m). n = 2, m = 3 gives 12 morphisms.
    """
    if n < 1 or group_order < 1:
        raise StructuralError("pair groupoid needs n >= 1 and group_order >= 1")
    m = group_order

    def mid(i: int, j: int, g: int) -> int:
        return (i * n + j) * m + g % m

    ranges: list[int] = []
    sources: list[int] = []
    inverses: list[int] = []
    labels: list[str] = []
    for i in range(n):
        for j in range(n):
            for g in range(m):
                ranges.append(i)
                sources.append(j)
                inverses.append(mid(j, i, -g))
                labels.append(f"({i},{j})" if m == 1 else f"({i},{j};{g})")
    table = [
        (mid(i, j, g), mid(j, k, h), mid(i, k, g + h))
        for i in range(n)
        for j in range(n)
        for k in range(n)
        for g in range(m)
        for h in range(m)
    ]
    return build_finite_groupoid(
        units=n,
        ranges=ranges,
        sources=sources,
        unit_ids=[mid(x, x, 0) for x in range(n)],
        inverses=inverses,
        table=table,
        labels=labels,
    )


def build_cyclic_group(m: int) -> FiniteExplicitGroupoid:
    """Z/m as a one-unit groupoid; morphism #g is the residue g."""
    return build_pair_groupoid(1, m)
