"""Deaconu-Renault groupoid of a partial self-map of a finite set."""

from __future__ import annotations

from collections.abc import Collection, Iterator, Sequence
from typing import ClassVar

from groupoidal.core.errors import InvalidMorphismError, StructuralError
from groupoidal.services.groupoids.base import Deaconu, DiscreteGroupoid, Morphism, Window


class DeaconuGroupoid(DiscreteGroupoid):
    """
    Triples (x, n, y) such that sigma^(k+n)(x) = sigma^k(y) for some k >= max(0, -n).

    ``sigma[x]`` is None where sigma is undefined. Every finite orbit is eventually
    periodic, so iterates are served from a cached (trajectory, cycle start) pair.
    """

    kind: ClassVar[str] = "deaconu"
    morphism_type: ClassVar[type] = Deaconu

    def __init__(self, sigma: Sequence[int | None]) -> None:
        size = len(sigma)
        for x, image in enumerate(sigma):
            if image is not None and not 0 <= image < size:
                raise StructuralError(f"sigma({x}) = {image} lies outside the unit range")
        self.sigma: tuple[int | None, ...] = tuple(sigma)
        self._orbits = [self._trajectory(x) for x in range(size)]

    def __repr__(self) -> str:
        return f"DeaconuGroupoid(sigma={list(self.sigma)!r})"

    def _trajectory(self, x: int) -> tuple[tuple[int, ...], int | None]:
        path = [x]
        seen = {x: 0}
        while True:
            nxt = self.sigma[path[-1]]
            if nxt is None:
                return tuple(path), None
            if nxt in seen:
                return tuple(path), seen[nxt]
            seen[nxt] = len(path)
            path.append(nxt)

    def signature(self) -> tuple:
        return (self.sigma,)

    @property
    def unit_count(self) -> int:
        return len(self.sigma)

    @property
    def is_finite(self) -> bool:
        return False

    @property
    def domain(self) -> frozenset[int]:
        return frozenset(x for x, image in enumerate(self.sigma) if image is not None)

    def iterate(self, x: int, k: int) -> int | None:
        """sigma^k(x), or None when the orbit leaves the domain first."""
        path, cycle_start = self._orbits[x]
        if k < len(path):
            return path[k]
        if cycle_start is None:
            return None
        period = len(path) - cycle_start
        return path[cycle_start + (k - cycle_start) % period]

    def search_bound(self, n: int) -> int:
        return 2 * self.unit_count + abs(n) + 1

    def witness(self, x: int, n: int, y: int) -> int | None:
        """Smallest k certifying (x, n, y), searched up to :meth:`search_bound`."""
        for k in range(max(0, -n), self.search_bound(n) + 1):
            left = self.iterate(x, k + n)
            if left is not None and left == self.iterate(y, k):
                return k
        return None

    def is_valid(self, a: Morphism) -> bool:
        if not isinstance(a, Deaconu):
            return False
        if not (0 <= a.x < self.unit_count and 0 <= a.y < self.unit_count):
            return False
        return self.witness(a.x, a.n, a.y) is not None

    def _require(self, a: Morphism) -> Deaconu:
        if not self.is_valid(a):
            raise InvalidMorphismError(f"{a!s} is not a morphism of {self!r}")
        assert isinstance(a, Deaconu)
        return a

    def r(self, a: Morphism) -> int:
        return self._require(a).x

    def d(self, a: Morphism) -> int:
        return self._require(a).y

    def compose(self, a: Morphism, b: Morphism) -> Morphism | None:
        da, db = self._require(a), self._require(b)
        if da.y != db.x:
            return None
        return Deaconu(da.x, da.n + db.n, db.y)

    def invert(self, a: Morphism) -> Morphism:
        t = self._require(a)
        return Deaconu(t.y, -t.n, t.x)

    def unit(self, x: int) -> Morphism:
        return Deaconu(x, 0, x)

    def degree(self, a: Morphism) -> int:
        return self._require(a).n

    def _enumerate(self, window: Window | None) -> Iterator[Morphism]:
        assert window is not None
        size = self.unit_count
        for x in range(size):
            for n in range(-window.M, window.M + 1):
                for y in range(size):
                    if self.witness(x, n, y) is not None:
                        yield Deaconu(x, n, y)

    def range_fiber(self, u: int, window: Window | None = None) -> list[Morphism]:
        w = self.require_window(window)
        assert w is not None
        return [
            Deaconu(u, n, y)
            for n in range(-w.M, w.M + 1)
            for y in range(self.unit_count)
            if self.witness(u, n, y) is not None
        ]

    def source_fiber(self, u: int, window: Window | None = None) -> list[Morphism]:
        w = self.require_window(window)
        assert w is not None
        return [
            Deaconu(x, n, u)
            for x in range(self.unit_count)
            for n in range(-w.M, w.M + 1)
            if self.witness(x, n, u) is not None
        ]


def build_deaconu_groupoid(
    x_size: int,
    sigma: Sequence[int | None] | dict[int, int],
    dom: Collection[int] | None = None,
) -> DeaconuGroupoid:
    """
    Build X x| sigma from a partial map.

    ``sigma`` is either a length-``x_size`` list (None marks undefined points) or a dict.
    When ``dom`` is given, sigma must be defined exactly there.
    """
    if isinstance(sigma, dict):
        table: list[int | None] = [sigma.get(x) for x in range(x_size)]
    else:
        if len(sigma) != x_size:
            raise StructuralError(f"sigma has {len(sigma)} entries, expected {x_size}")
        table = list(sigma)
    if dom is not None:
        defined = {x for x, image in enumerate(table) if image is not None}
        if defined != set(dom):
            raise StructuralError("sigma must be defined exactly on dom")
    return DeaconuGroupoid(table)
