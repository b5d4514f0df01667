"""Transformation groupoid X x| Z of a permutation of a finite set."""

from __future__ import annotations

import logging
from collections.abc import Iterator, Sequence
from typing import ClassVar

from groupoidal.core.errors import InvalidMorphismError, StructuralError
from groupoidal.services.groupoids.base import DiscreteGroupoid, Morphism, Trans, Window

logger = logging.getLogger(__name__)


class TransformationGroupoid(DiscreteGroupoid):
    """
    Units X = {0..size-1}; morphisms (x, n) for every integer n.

    r(x, n) = x and d(x, n) = x.n := act^n(x). Powers of ``act`` are read off its cycle
    decomposition, so any n costs O(1).
    """

    kind: ClassVar[str] = "transformation"
    morphism_type: ClassVar[type] = Trans

    def __init__(self, act: Sequence[int], *, label: str = "transformation") -> None:
        size = len(act)
        if size == 0:
            raise StructuralError("transformation groupoid needs at least one unit")
        if sorted(act) != list(range(size)):
            raise StructuralError("act must be a bijection of {0..size-1}")
        self.act: tuple[int, ...] = tuple(act)
        self.label = label
        self._cycle_of: list[tuple[int, ...]] = [()] * size
        self._position: list[int] = [0] * size
        seen: set[int] = set()
        for start in range(size):
            if start in seen:
                continue
            cycle = [start]
            seen.add(start)
            nxt = self.act[start]
            while nxt != start:
                cycle.append(nxt)
                seen.add(nxt)
                nxt = self.act[nxt]
            frozen = tuple(cycle)
            for pos, point in enumerate(frozen):
                self._cycle_of[point] = frozen
                self._position[point] = pos

    def __repr__(self) -> str:
        return f"TransformationGroupoid(act={list(self.act)!r})"

    def signature(self) -> tuple:
        return (self.act,)

    @property
    def unit_count(self) -> int:
        return len(self.act)

    @property
    def is_finite(self) -> bool:
        return False

    def period(self, x: int) -> int:
        """Length of the orbit of x, i.e. the smallest n > 0 with x.n = x."""
        return len(self._cycle_of[x])

    def act_power(self, x: int, n: int) -> int:
        cycle = self._cycle_of[x]
        return cycle[(self._position[x] + n) % len(cycle)]

    def is_valid(self, a: Morphism) -> bool:
        return isinstance(a, Trans) and 0 <= a.x < self.unit_count

    def _require(self, a: Morphism) -> Trans:
        if not self.is_valid(a):
            raise InvalidMorphismError(f"{a!s} is not a morphism of {self!r}")
        return a  # type: ignore[return-value]

    def r(self, a: Morphism) -> int:
        return self._require(a).x

    def d(self, a: Morphism) -> int:
        t = self._require(a)
        return self.act_power(t.x, t.n)

    def compose(self, a: Morphism, b: Morphism) -> Morphism | None:
        ta, tb = self._require(a), self._require(b)
        if self.act_power(ta.x, ta.n) != tb.x:
            return None
        return Trans(ta.x, ta.n + tb.n)

    def invert(self, a: Morphism) -> Morphism:
        t = self._require(a)
        return Trans(self.act_power(t.x, t.n), -t.n)

    def unit(self, x: int) -> Morphism:
        return Trans(x, 0)

    def degree(self, a: Morphism) -> int:
        return self._require(a).n

    def _enumerate(self, window: Window | None) -> Iterator[Morphism]:
        assert window is not None
        for x in range(self.unit_count):
            for n in range(-window.M, window.M + 1):
                yield Trans(x, n)

    def range_fiber(self, u: int, window: Window | None = None) -> list[Morphism]:
        w = self.require_window(window)
        assert w is not None
        return [Trans(u, n) for n in range(-w.M, w.M + 1)]

    def source_fiber(self, u: int, window: Window | None = None) -> list[Morphism]:
        w = self.require_window(window)
        assert w is not None
        return [Trans(self.act_power(u, -n), n) for n in range(-w.M, w.M + 1)]


def build_transformation_groupoid(x_size: int, act: Sequence[int]) -> TransformationGroupoid:
    if len(act) != x_size:
        raise StructuralError(f"act has {len(act)} entries, expected {x_size}")
    return TransformationGroupoid(act)


def build_rotation_groupoid(n: int, step: int = 1) -> TransformationGroupoid:
    """Z/n with the cyclic shift x -> x + step: a finite stand-in for the rotation algebra."""
    if n < 1:
        raise StructuralError("rotation groupoid needs n >= 1")
    logger.debug("building rotation groupoid n=%d step=%d", n, step)
    return TransformationGroupoid([(x + step) % n for x in range(n)], label="rotation")
