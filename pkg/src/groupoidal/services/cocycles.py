"""Real-valued 1-cocycles: variants, verification, coboundaries, kernels, exactness and u_z."""

from __future__ import annotations

import cmath
import logging
import math
from abc import ABC, abstractmethod
from collections import defaultdict
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import ClassVar

import numpy as np

from groupoidal.core.constants import CheckStatus
from groupoidal.core.errors import (
    CocycleError,
    ParentMismatchError,
    StructuralError,
    UnsupportedModelError,
)
from groupoidal.core.scalars import Scalar, close, is_exact, is_integral
from groupoidal.core.settings import settings
from groupoidal.models.report import ValidationReport, Violation
from groupoidal.services.convolution import AlgebraElement
from groupoidal.services.groupoids.base import DiscreteGroupoid, Morphism, Window
from groupoidal.services.groupoids.deaconu import DeaconuGroupoid
from groupoidal.services.groupoids.finite import FiniteExplicitGroupoid
from groupoidal.services.groupoids.transformation import TransformationGroupoid

logger = logging.getLogger(__name__)

ClassKey = tuple[int, Scalar]


# -------------------------------------------------------------------------
# Cocycle variants
# -------------------------------------------------------------------------


class Cocycle(ABC):
    """A homomorphism c: G -> R, bound to the groupoid it is defined on."""

    kind: ClassVar[str]
    groupoid: DiscreteGroupoid

    @abstractmethod
    def value(self, a: Morphism) -> Scalar: ...

    @property
    @abstractmethod
    def integral(self) -> bool: ...

    def __call__(self, a: Morphism) -> Scalar:
        return self.value(a)

    def key(self, a: Morphism) -> Scalar:
        """Exact, hashable stand-in for c(a); classes of G/ker c are (r(a), key(a))."""
        return self.value(a)

    def class_of(self, a: Morphism) -> ClassKey:
        return (self.groupoid.r(a), self.key(a))

    def vanishes_at(self, a: Morphism, tol: float | None = None) -> bool:
        v = self.value(a)
        if is_exact(v):
            return v == 0
        return abs(v) <= (settings.tolerance if tol is None else tol)

    def additive_at(self, a: Morphism, b: Morphism, ab: Morphism, tol: float) -> bool:
        return close(self.value(ab), self.value(a) + self.value(b), tol)

    def exponential(self, a: Morphism, z: Scalar) -> Scalar:
        """e^{i z c(a)}; exactly 1 when z = 0 or c(a) = 0."""
        v = self.value(a)
        if z == 0 or v == 0:
            return 1
        return cmath.exp(1j * complex(z) * complex(v))

    @cached_property
    def verification(self) -> ValidationReport:
        return verify_cocycle(self.groupoid, self)


@dataclass(frozen=True, eq=False)
class DegreeCocycle(Cocycle):
    """c(x, n) = n and c(x, n, y) = n, read off the encoding."""

    kind: ClassVar[str] = "degree"
    groupoid: DiscreteGroupoid

    def __post_init__(self) -> None:
        if not isinstance(self.groupoid, (TransformationGroupoid, DeaconuGroupoid)):
            raise CocycleError("the degree cocycle needs a transformation or Deaconu groupoid")

    def value(self, a: Morphism) -> int:
        return self.groupoid.degree(a)

    @property
    def integral(self) -> bool:
        return True


@dataclass(frozen=True, eq=False)
class PotentialCocycle(Cocycle):
    """The coboundary c = f(r) - f(d) of a function f on the units."""

    kind: ClassVar[str] = "potential"
    groupoid: DiscreteGroupoid
    potential: tuple[Scalar, ...]

    def __post_init__(self) -> None:
        if len(self.potential) != self.groupoid.unit_count:
            raise StructuralError(
                f"potential has {len(self.potential)} values, expected {self.groupoid.unit_count}"
            )

    def value(self, a: Morphism) -> Scalar:
        return self.potential[self.groupoid.r(a)] - self.potential[self.groupoid.d(a)]

    @property
    def integral(self) -> bool:
        base = self.potential[0]
        return all(is_integral(p - base) for p in self.potential)


@dataclass(frozen=True, eq=False)
class ExplicitCocycle(Cocycle):
    """A value per morphism of a finite groupoid."""

    kind: ClassVar[str] = "explicit"
    groupoid: DiscreteGroupoid
    values: tuple[Scalar, ...]

    def __post_init__(self) -> None:
        if not isinstance(self.groupoid, FiniteExplicitGroupoid):
            raise CocycleError("explicit cocycle tables need a finite groupoid")
        if len(self.values) != self.groupoid.morphism_count:
            raise StructuralError(
                f"explicit cocycle has {len(self.values)} values, "
                f"expected {self.groupoid.morphism_count}"
            )

    def value(self, a: Morphism) -> Scalar:
        self.groupoid.check(a)
        return self.values[a.id]  # type: ignore[union-attr]

    @property
    def integral(self) -> bool:
        return all(is_integral(v) for v in self.values)


@dataclass(frozen=True, eq=False)
class LogModularCocycle(Cocycle):
    """c_mu = ln(mu(r) / mu(d)), the Radon-Nikodym cocycle of a unit measure."""

    kind: ClassVar[str] = "log_modular"
    groupoid: DiscreteGroupoid
    weights: tuple[Scalar, ...]

    def __post_init__(self) -> None:
        if len(self.weights) != self.groupoid.unit_count:
            raise StructuralError("one weight per unit is required")
        if any(w <= 0 for w in self.weights):
            raise StructuralError("weights must be strictly positive")

    def ratio(self, a: Morphism) -> Scalar:
        """Delta(a) = mu(r(a)) / mu(d(a)), exact for rational weights."""
        wr = self.weights[self.groupoid.r(a)]
        wd = self.weights[self.groupoid.d(a)]
        if is_exact(wr) and is_exact(wd):
            return Fraction(wr) / wd
        return float(wr) / float(wd)

    def value(self, a: Morphism) -> Scalar:
        q = self.ratio(a)
        return 0 if q == 1 else math.log(q)

    def key(self, a: Morphism) -> Scalar:
        return self.ratio(a)

    def vanishes_at(self, a: Morphism, tol: float | None = None) -> bool:
        q = self.ratio(a)
        if is_exact(q):
            return q == 1
        return abs(math.log(q)) <= (settings.tolerance if tol is None else tol)

    def additive_at(self, a: Morphism, b: Morphism, ab: Morphism, tol: float) -> bool:
        return close(self.ratio(ab), self.ratio(a) * self.ratio(b), tol)

    def exponential(self, a: Morphism, z: Scalar) -> Scalar:
        q = self.ratio(a)
        if z == 0 or q == 1:
            return 1
        w = 1j * complex(z)
        # e^{i z ln q} = q^{iz}; stays exact when iz is an integer.
        if w.imag == 0 and float(w.real).is_integer():
            return q ** int(w.real)
        return cmath.exp(w * math.log(q))

    @cached_property
    def integral(self) -> bool:  # type: ignore[override]
        g = self.groupoid
        window = None if g.is_finite else Window(2 * g.unit_count + 1)
        return all(self.ratio(a) == 1 for a in g.morphisms(window))


@dataclass(frozen=True, eq=False)
class ZeroCocycle(Cocycle):
    kind: ClassVar[str] = "zero"
    groupoid: DiscreteGroupoid

    def value(self, a: Morphism) -> int:
        self.groupoid.check(a)
        return 0

    @property
    def integral(self) -> bool:
        return True


def potential_cocycle(g: DiscreteGroupoid, f: Sequence[Scalar]) -> PotentialCocycle:
    return PotentialCocycle(g, tuple(f))


# -------------------------------------------------------------------------
# Verification
# -------------------------------------------------------------------------


def _pairs(
    g: DiscreteGroupoid, budget: int, rng: np.random.Generator, window: Window
) -> Iterator[tuple[Morphism, Morphism]]:
    if g.is_finite:
        morphs = g.morphisms()
        by_range: dict[int, list[Morphism]] = defaultdict(list)
        for b in morphs:
            by_range[g.r(b)].append(b)
        for a in morphs:
            for b in by_range[g.d(a)]:
                yield a, b
        return
    pool = g.morphisms(window)
    fibers = {u: g.range_fiber(u, window) for u in range(g.unit_count)}
    for _ in range(budget):
        a = pool[int(rng.integers(len(pool)))]
        fiber = fibers[g.d(a)]
        yield a, fiber[int(rng.integers(len(fiber)))]


def verify_cocycle(
    g: DiscreteGroupoid,
    c: Cocycle,
    sample_budget: int | None = None,
    *,
    rng: np.random.Generator | None = None,
    window: Window | None = None,
    tol: float | None = None,
) -> ValidationReport:
    """Additivity on composable pairs (all of them for finite models), c(unit) = 0, c(a^-1) = -c(a)."""
    if c.groupoid.ambient != g.ambient:
        raise ParentMismatchError("cocycle is defined on a different groupoid")
    budget = settings.sample_budget if sample_budget is None else sample_budget
    eps = settings.tolerance if tol is None else tol
    gen = rng if rng is not None else np.random.default_rng(settings.seed)
    win = window if window is not None else Window(settings.default_window)

    violations: list[Violation] = []
    count = 0

    def add(axiom: str, witness: list[str], detail: str) -> None:
        nonlocal count
        count += 1
        if len(violations) < 25:
            violations.append(Violation(axiom=axiom, witness=witness, detail=detail))

    for e in g.units():
        if not c.vanishes_at(e, eps):
            add("unit", [str(e)], f"c(unit) = {c.value(e)}")

    checked = 0
    seen_inverse: set[Morphism] = set()
    for a, b in _pairs(g, budget, gen, win):
        checked += 1
        ab = g.compose(a, b)
        if ab is None:
            add("closure", [str(a), str(b)], "composable pair has no product")
            continue
        if not c.additive_at(a, b, ab, eps):
            add(
                "additivity",
                [str(a), str(b)],
                f"c(ab)={c.value(ab)} but c(a)+c(b)={c.value(a) + c.value(b)}",
            )
        if a not in seen_inverse:
            seen_inverse.add(a)
            inv = g.invert(a)
            if not close(c.value(inv), -c.value(a), eps):
                add("inverse", [str(a)], f"c(a^-1)={c.value(inv)}, c(a)={c.value(a)}")

    return ValidationReport(
        valid=count == 0,
        violations=violations,
        violation_count=count,
        checked=checked,
        exhaustive=g.is_finite,
    )


def ensure_verified(g: DiscreteGroupoid, c: Cocycle) -> None:
    if c.groupoid.ambient != g.ambient:
        raise ParentMismatchError("cocycle is defined on a different groupoid")
    report = c.verification
    if not report.valid:
        first = report.first_witness()
        detail = f" ({first.axiom} at {', '.join(first.witness)})" if first else ""
        raise CocycleError(f"{c.kind} cocycle failed verification{detail}")


# -------------------------------------------------------------------------
# Coboundaries
# -------------------------------------------------------------------------


@dataclass(frozen=True)
class NotCoboundary:
    """Certificate that c is not a coboundary: a loop at ``base`` with nonzero value."""

    loop: Morphism
    value: Scalar
    via: Morphism
    base: int


def solve_coboundary(
    g: DiscreteGroupoid, c: Cocycle, *, tol: float | None = None
) -> PotentialCocycle | NotCoboundary:
    """
    Find f with c = f(r) - f(d), pinning f = 0 at one unit per orbit component.

    A spanning forest of the orbit graph carries, for every unit x, a morphism p_x from the
    component root to x; then f(x) = -c(p_x). Every morphism a is then checked; a failure
    yields the loop p_r(a) a p_d(a)^-1 at the root, whose cocycle value is nonzero.
    """
    if not g.is_finite:
        raise UnsupportedModelError("coboundary solving needs a finite morphism set")
    eps = settings.tolerance if tol is None else tol
    morphs = g.morphisms()
    touching: dict[int, list[Morphism]] = defaultdict(list)
    for a in morphs:
        touching[g.r(a)].append(a)
        touching[g.d(a)].append(a)

    path: dict[int, Morphism] = {}
    root_of: dict[int, int] = {}
    for root in range(g.unit_count):
        if root in path:
            continue
        path[root] = g.unit(root)
        root_of[root] = root
        queue = [root]
        while queue:
            x = queue.pop(0)
            for a in touching[x]:
                if g.r(a) == x and g.d(a) not in path:
                    y, step = g.d(a), a
                elif g.d(a) == x and g.r(a) not in path:
                    y, step = g.r(a), g.invert(a)
                else:
                    continue
                composite = g.compose(path[x], step)
                if composite is None:
                    raise StructuralError(f"tree path to {x} does not compose with {step}")
                path[y] = composite
                root_of[y] = root
                queue.append(y)

    potential = [-c.value(path[x]) for x in range(g.unit_count)]
    for a in morphs:
        expected = potential[g.r(a)] - potential[g.d(a)]
        if close(c.value(a), expected, eps):
            continue
        loop = g.compose(g.compose(path[g.r(a)], a), g.invert(path[g.d(a)]))  # type: ignore[arg-type]
        assert loop is not None
        logger.debug("cocycle is not a coboundary: loop %s via %s", loop, a)
        return NotCoboundary(
            loop=loop, value=c.value(loop), via=a, base=root_of[g.r(a)]
        )
    return PotentialCocycle(g, tuple(potential))


# -------------------------------------------------------------------------
# Kernel subgroupoid
# -------------------------------------------------------------------------


class KernelGroupoid(DiscreteGroupoid):
    """ker c = {a : c(a) = 0}: same units as the parent, counting-measure Haar system inherited."""

    morphism_type: ClassVar[type] = object

    def __init__(
        self,
        parent: DiscreteGroupoid,
        cocycle: Cocycle,
        *,
        tol: float | None = None,
        window: Window | None = None,
    ) -> None:
        if cocycle.groupoid.ambient != parent.ambient:
            raise ParentMismatchError("cocycle is defined on a different groupoid")
        self.parent = parent
        self.cocycle = cocycle
        self.tol = settings.tolerance if tol is None else tol
        self.kind = f"ker({cocycle.kind})"  # type: ignore[misc]
        scan = None if parent.is_finite else (window or Window(settings.default_window))
        self.regular = self._regular(parent.morphisms(scan))

    def _regular(self, morphs: list[Morphism]) -> bool:
        for a in morphs:
            v = self.cocycle.value(a)
            if not is_exact(v) and self.tol < abs(v) < settings.regularity_band:
                logger.warning("cocycle value %r at %s lies in the non-regular band", v, a)
                return False
        return True

    def __repr__(self) -> str:
        return f"KernelGroupoid({self.parent!r}, {self.cocycle.kind})"

    def signature(self) -> tuple:
        return (type(self.parent).__name__, self.parent.signature(), id(self.cocycle), self.tol)

    @property
    def ambient(self) -> DiscreteGroupoid:
        return self.parent.ambient

    @property
    def unit_count(self) -> int:
        return self.parent.unit_count

    @property
    def is_finite(self) -> bool:
        return self.parent.is_finite

    def contains(self, a: Morphism) -> bool:
        return self.parent.is_valid(a) and self.cocycle.vanishes_at(a, self.tol)

    def is_valid(self, a: Morphism) -> bool:
        return self.contains(a)

    def r(self, a: Morphism) -> int:
        return self.parent.r(a)

    def d(self, a: Morphism) -> int:
        return self.parent.d(a)

    def compose(self, a: Morphism, b: Morphism) -> Morphism | None:
        return self.parent.compose(a, b)

    def invert(self, a: Morphism) -> Morphism:
        return self.parent.invert(a)

    def unit(self, x: int) -> Morphism:
        return self.parent.unit(x)

    def degree(self, a: Morphism) -> int:
        return self.parent.degree(a)

    def _enumerate(self, window: Window | None) -> Iterator[Morphism]:
        return (a for a in self.parent.morphisms(window) if self.contains(a))

    def range_fiber(self, u: int, window: Window | None = None) -> list[Morphism]:
        return [a for a in self.parent.range_fiber(u, window) if self.contains(a)]

    def source_fiber(self, u: int, window: Window | None = None) -> list[Morphism]:
        return [a for a in self.parent.source_fiber(u, window) if self.contains(a)]

    @property
    def structure(self) -> str:
        """Coarse description: 'units', 'whole', 'degree-zero' or 'general'."""
        c = self.cocycle
        if isinstance(c, ZeroCocycle):
            return "whole"
        if isinstance(c, DegreeCocycle):
            return "units" if isinstance(self.parent, TransformationGroupoid) else "degree-zero"
        window = None if self.is_finite else Window(settings.default_window)
        morphs = self.parent.morphisms(window)
        members = [a for a in morphs if self.contains(a)]
        if len(members) == len(morphs):
            return "whole"
        if all(self.parent.is_unit(a) for a in members):
            return "units"
        return "general"

    def isotropy_periods(self) -> dict[int, int]:
        """Orbit length per unit on transformation groupoids (return degrees, not kernel elements)."""
        if isinstance(self.parent, TransformationGroupoid):
            return {x: self.parent.period(x) for x in range(self.unit_count)}
        return {}


def kernel_subgroupoid(
    g: DiscreteGroupoid, c: Cocycle, *, tol: float | None = None, window: Window | None = None
) -> KernelGroupoid:
    return KernelGroupoid(g, c, tol=tol, window=window)


# -------------------------------------------------------------------------
# Right cosets of the kernel and exactness
# -------------------------------------------------------------------------


@dataclass
class CosetPartition:
    """Right ker-c cosets of a (windowed) morphism set, with the class map checked on them."""

    cosets: list[list[Morphism]]
    classes: list[ClassKey]
    constant: bool = True
    injective: bool = True
    witness: list[str] = field(default_factory=list)


def coset_partition(
    g: DiscreteGroupoid, c: Cocycle, window: Window | None = None, tol: float | None = None
) -> CosetPartition:
    """
    Group morphisms into right ker-c cosets (a ~ ah, h in ker c) and check that
    a -> (r(a), c(a)) is constant on cosets and separates distinct cosets.
    """
    eps = settings.tolerance if tol is None else tol
    if g.is_finite:
        window, wide = None, None
    else:
        window = window or Window(settings.default_window)
        # a and ah both inside the window only need |degree(h)| <= 2M.
        wide = Window(2 * window.M)
    kernel = KernelGroupoid(g, c, tol=eps, window=window)
    morphs = g.morphisms(window)
    index = {a: i for i, a in enumerate(morphs)}
    kernel_by_range: dict[int, list[Morphism]] = defaultdict(list)
    for h in kernel.morphisms(wide):
        kernel_by_range[g.r(h)].append(h)

    parent = list(range(len(morphs)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for a, i in index.items():
        for h in kernel_by_range[g.d(a)]:
            j = index.get(g.compose(a, h))  # type: ignore[arg-type]
            if j is not None:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)

    groups: dict[int, list[Morphism]] = defaultdict(list)
    for a, i in index.items():
        groups[find(i)].append(a)
    cosets = [sorted(groups[k]) for k in sorted(groups)]

    result = CosetPartition(cosets=cosets, classes=[])
    for coset in cosets:
        rep = coset[0]
        result.classes.append(c.class_of(rep))
        for b in coset[1:]:
            if g.r(b) != g.r(rep) or not close(c.key(b), c.key(rep), eps):
                result.constant = False
                result.witness = [str(rep), str(b)]
    by_unit: dict[int, list[tuple[Scalar, Morphism]]] = defaultdict(list)
    for (u, key), coset in zip(result.classes, cosets):
        by_unit[u].append((key, coset[0]))
    for entries in by_unit.values():
        entries.sort(key=lambda item: float(item[0]))
        for (k1, a1), (k2, a2) in zip(entries, entries[1:]):
            if close(k1, k2, eps):
                result.injective = False
                result.witness = [str(a1), str(a2)]
    return result


@dataclass(frozen=True)
class ExactnessReport:
    status: CheckStatus
    exact: bool | None
    method: str
    classes: int = 0
    preimages: dict[str, int] = field(default_factory=dict)
    witness: list[str] = field(default_factory=list)
    detail: str = ""


def check_exactness(
    g: DiscreteGroupoid, c: Cocycle, window: Window | None = None, tol: float | None = None
) -> ExactnessReport:
    ensure_verified(g, c)
    win = None if g.is_finite else (window or Window(settings.default_window))
    kernel = KernelGroupoid(g, c, tol=tol, window=win)
    if not kernel.regular:
        return ExactnessReport(
            status=CheckStatus.INDETERMINATE,
            exact=None,
            method="regularity",
            detail="cocycle values in the non-regular band; kernel membership is undecidable",
        )
    if c.integral and not g.is_finite:
        # Integer-valued: each level set c^-1(n) is open, so r x c is a quotient map.
        counts: dict[str, int] = defaultdict(int)
        for a in g.morphisms(win):
            u, key = c.class_of(a)
            counts[f"{u}:{key}"] += 1
        return ExactnessReport(
            status=CheckStatus.PASS,
            exact=True,
            method="integral",
            classes=len(counts),
            preimages=dict(sorted(counts.items())),
        )
    partition = coset_partition(g, c, win, tol)
    exact = partition.constant and partition.injective
    return ExactnessReport(
        status=CheckStatus.PASS if exact else CheckStatus.FAIL,
        exact=exact,
        method="class-map",
        classes=len(partition.cosets),
        witness=partition.witness,
        detail="" if exact else "class map is not injective on G/ker c",
    )


# -------------------------------------------------------------------------
# One-parameter group
# -------------------------------------------------------------------------


def evolve(f: AlgebraElement, c: Cocycle, z: Scalar) -> AlgebraElement:
    """(u_z f)(a) = e^{i z c(a)} f(a); the automorphism group for real z, its extension otherwise."""
    if c.groupoid.ambient != f.parent:
        raise ParentMismatchError("cocycle and element live on different groupoids")
    if z == 0:
        return f
    return f.pointwise(lambda a: c.exponential(a, z))
