"""Groupoid axiom validation: exhaustive on finite tables, sampled on infinite models."""

from __future__ import annotations

import logging
from collections.abc import Sequence

import numpy as np

from groupoidal.core.errors import UnsupportedModelError
from groupoidal.core.settings import settings
from groupoidal.models.report import ValidationReport, Violation
from groupoidal.services.groupoids.base import DiscreteGroupoid, Morphism, Window
from groupoidal.services.groupoids.finite import FiniteExplicitGroupoid

logger = logging.getLogger(__name__)

_MAX_LISTED = 25


class _Violations:
    """Collects violations; lists the first few, counts all."""

    def __init__(self) -> None:
        self.items: list[Violation] = []
        self.count = 0

    def add(self, axiom: str, witness: Sequence[str], detail: str = "") -> None:
        self.count += 1
        if len(self.items) < _MAX_LISTED:
            self.items.append(Violation(axiom=axiom, witness=list(witness), detail=detail))


def validate_axioms(
    g: DiscreteGroupoid,
    sample_budget: int | None = None,
    *,
    rng: np.random.Generator | None = None,
    window: Window | None = None,
) -> ValidationReport:
    if isinstance(g, FiniteExplicitGroupoid):
        return _validate_finite(g)
    budget = settings.sample_budget if sample_budget is None else sample_budget
    return _validate_sampled(
        g,
        budget,
        rng if rng is not None else np.random.default_rng(settings.seed),
        window if window is not None else Window(settings.default_window),
    )


# -------------------------------------------------------------------------
# Finite tables
# -------------------------------------------------------------------------


def _validate_finite(g: FiniteExplicitGroupoid) -> ValidationReport:
    problems = g.structural_problems()
    if problems:
        logger.debug("finite groupoid has %d structural problems", len(problems))
        return ValidationReport(valid=False, structural_errors=problems)

    out = _Violations()
    count = g.morphism_count
    ranges, sources, units, table = g.ranges, g.sources, g.unit_ids, g.table

    def name(*ids: int) -> list[str]:
        return [g.labels[i] if i < len(g.labels) else f"#{i}" for i in ids]

    for x, u in enumerate(units):
        if ranges[u] != x or sources[u] != x:
            out.add("unit", name(u), f"unit of {x} has r={ranges[u]}, d={sources[u]}")

    checked = 0
    for a in range(count):
        for b in range(count):
            if sources[a] != ranges[b]:
                if (a, b) in table:
                    out.add("composability", name(a, b), "non-composable pair has a product")
                continue
            checked += 1
            ab = table.get((a, b))
            if ab is None:
                out.add("closure", name(a, b), "composable pair has no product")
                continue
            if ranges[ab] != ranges[a]:
                out.add("range", name(a, b, ab), "r(ab) != r(a)")
            if sources[ab] != sources[b]:
                out.add("source", name(a, b, ab), "d(ab) != d(b)")

    for a in range(count):
        if table.get((units[ranges[a]], a)) != a:
            out.add("identity", name(units[ranges[a]], a), "unit_r(a) * a != a")
        if table.get((a, units[sources[a]])) != a:
            out.add("identity", name(a, units[sources[a]]), "a * unit_d(a) != a")
        inv = g.inverses[a]
        if g.inverses[inv] != a:
            out.add("inverse", name(a, inv), "(a^-1)^-1 != a")
        if table.get((a, inv)) != units[ranges[a]]:
            out.add("inverse", name(a, inv), "a * a^-1 != unit_r(a)")
        if table.get((inv, a)) != units[sources[a]]:
            out.add("inverse", name(inv, a), "a^-1 * a != unit_d(a)")

    for (a, b), ab in table.items():
        for c in range(count):
            if sources[b] != ranges[c]:
                continue
            checked += 1
            bc = table.get((b, c))
            left = table.get((ab, c))
            right = None if bc is None else table.get((a, bc))
            if left is None or left != right:
                out.add("associativity", name(a, b, c), f"(ab)c={left}, a(bc)={right}")

    return ValidationReport(
        valid=out.count == 0,
        violations=out.items,
        violation_count=out.count,
        checked=checked,
        exhaustive=True,
    )


# -------------------------------------------------------------------------
# Infinite models
# -------------------------------------------------------------------------


def _validate_sampled(
    g: DiscreteGroupoid,
    budget: int,
    rng: np.random.Generator,
    window: Window,
) -> ValidationReport:
    out = _Violations()

    for x in range(g.unit_count):
        e = g.unit(x)
        if not g.is_valid(e) or g.r(e) != x or g.d(e) != x:
            out.add("unit", [str(e)], f"unit of {x} is not a loop at {x}")

    pool = g.morphisms(window)
    fibers: dict[int, list[Morphism]] = {
        u: g.range_fiber(u, window) for u in range(g.unit_count)
    }
    logger.debug("sampling %d triples from %d morphisms (M=%d)", budget, len(pool), window.M)

    def pick(items: list[Morphism]) -> Morphism:
        return items[int(rng.integers(len(items)))]

    for _ in range(budget):
        a = pick(pool)
        b = pick(fibers[g.d(a)])
        c = pick(fibers[g.d(b)])
        _check_triple(g, a, b, c, out)

    return ValidationReport(
        valid=out.count == 0,
        violations=out.items,
        violation_count=out.count,
        checked=budget,
        exhaustive=False,
    )


def _check_triple(
    g: DiscreteGroupoid, a: Morphism, b: Morphism, c: Morphism, out: _Violations
) -> None:
    ab = g.compose(a, b)
    bc = g.compose(b, c)
    if ab is None or bc is None:
        out.add("closure", [str(a), str(b), str(c)], "composable pair has no product")
        return
    # Deaconu validity must survive composition and inversion.
    if not g.is_valid(ab):
        out.add("closure", [str(a), str(b), str(ab)], "product is not a valid morphism")
        return
    if g.r(ab) != g.r(a):
        out.add("range", [str(a), str(b)], "r(ab) != r(a)")
    if g.d(ab) != g.d(b):
        out.add("source", [str(a), str(b)], "d(ab) != d(b)")
    left = g.compose(ab, c)
    right = g.compose(a, bc)
    if left is None or left != right:
        out.add("associativity", [str(a), str(b), str(c)], f"(ab)c={left}, a(bc)={right}")
    if g.compose(g.unit(g.r(a)), a) != a or g.compose(a, g.unit(g.d(a))) != a:
        out.add("identity", [str(a)], "units do not act as identities")
    inv = g.invert(a)
    if not g.is_valid(inv):
        out.add("inverse", [str(a), str(inv)], "inverse is not a valid morphism")
        return
    if g.invert(inv) != a:
        out.add("inverse", [str(a)], "(a^-1)^-1 != a")
    if g.compose(a, inv) != g.unit(g.r(a)) or g.compose(inv, a) != g.unit(g.d(a)):
        out.add("inverse", [str(a), str(inv)], "a a^-1 or a^-1 a is not a unit")


# -------------------------------------------------------------------------
# Mutation helper
# -------------------------------------------------------------------------


def mutate_composition_table(
    g: FiniteExplicitGroupoid, rng: np.random.Generator
) -> tuple[FiniteExplicitGroupoid, tuple[int, int]]:
    """Corrupt one composition-table entry; returns the mutant and the corrupted key."""
    if not isinstance(g, FiniteExplicitGroupoid):
        raise UnsupportedModelError("only explicit composition tables can be mutated")
    if g.morphism_count < 2 or not g.table:
        raise UnsupportedModelError("table too small to corrupt")
    keys = sorted(g.table)
    key = keys[int(rng.integers(len(keys)))]
    old = g.table[key]
    pick = int(rng.integers(g.morphism_count - 1))
    new = pick if pick < old else pick + 1
    table = dict(g.table)
    table[key] = new
    return g.with_table(table), key
