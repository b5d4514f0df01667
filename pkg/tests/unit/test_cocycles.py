from __future__ import annotations

import cmath
from fractions import Fraction

import numpy as np
import pytest

from groupoidal.core.constants import CheckStatus
from groupoidal.core.errors import CocycleError, StructuralError
from groupoidal.services.cocycles import (
    DegreeCocycle,
    ExplicitCocycle,
    LogModularCocycle,
    NotCoboundary,
    PotentialCocycle,
    ZeroCocycle,
    check_exactness,
    evolve,
    kernel_subgroupoid,
    potential_cocycle,
    solve_coboundary,
    verify_cocycle,
)
from groupoidal.services.convolution import AlgebraElement
from groupoidal.services.groupoids.base import Deaconu, Explicit, Trans, Window
from groupoidal.services.groupoids.deaconu import build_deaconu_groupoid
from groupoidal.services.groupoids.finite import build_cyclic_group, build_pair_groupoid
from groupoidal.services.groupoids.quotient import quotient_by_kernel
from groupoidal.services.groupoids.transformation import build_transformation_groupoid


def _cycle3():
    return build_transformation_groupoid(3, [1, 2, 0])


def test_degree_cocycle_reads_the_encoding() -> None:
    g = _cycle3()
    c = DegreeCocycle(g)
    assert c(Trans(2, -4)) == -4
    assert c.integral
    report = verify_cocycle(g, c, 200, rng=np.random.default_rng(0), window=Window(6))
    assert report.valid
    assert not report.exhaustive


def test_degree_cocycle_needs_a_graded_model() -> None:
    with pytest.raises(CocycleError):
        DegreeCocycle(build_pair_groupoid(2))


def test_potential_cocycle_is_exhaustively_valid() -> None:
    g = build_pair_groupoid(3)
    c = potential_cocycle(g, [0, 1, 5])
    report = verify_cocycle(g, c)
    assert report.valid
    assert report.exhaustive
    assert c(Explicit(2)) == -5  # (0,2)
    assert c.integral


def test_potential_length_is_checked() -> None:
    with pytest.raises(StructuralError):
        PotentialCocycle(build_pair_groupoid(3), (0, 1))


def test_broken_explicit_cocycle_is_caught() -> None:
    g = build_cyclic_group(2)
    c = ExplicitCocycle(g, (0, 1))
    report = verify_cocycle(g, c)
    assert not report.valid
    assert {v.axiom for v in report.violations} >= {"additivity"}


def test_solve_coboundary_recovers_a_potential() -> None:
    g = build_pair_groupoid(3)
    c = potential_cocycle(g, [Fraction(1, 2), 3, -2])
    solved = solve_coboundary(g, c)
    assert isinstance(solved, PotentialCocycle)
    for a in g.morphisms():
        assert solved(a) == c(a)


def test_solve_coboundary_returns_a_loop_certificate() -> None:
    g = build_cyclic_group(2)
    result = solve_coboundary(g, ExplicitCocycle(g, (0, 1)))
    assert isinstance(result, NotCoboundary)
    assert result.loop == Explicit(1)
    assert result.value == 1
    assert result.base == 0


def test_kernel_of_degree_cocycle() -> None:
    trans = kernel_subgroupoid(_cycle3(), DegreeCocycle(_cycle3()))
    assert trans.structure == "units"

    g = build_deaconu_groupoid(4, [1, 2, 0, 0])
    ker = kernel_subgroupoid(g, DegreeCocycle(g))
    assert ker.structure == "degree-zero"
    assert ker.contains(Deaconu(3, 0, 2))
    assert not ker.contains(Deaconu(3, 1, 0))
    assert Deaconu(3, 0, 2) in ker.range_fiber(3, Window(2))


def test_kernel_of_zero_cocycle_is_whole() -> None:
    g = build_pair_groupoid(2)
    assert kernel_subgroupoid(g, ZeroCocycle(g)).structure == "whole"


def test_kernel_of_potential_cocycle() -> None:
    g = build_pair_groupoid(3)
    injective = kernel_subgroupoid(g, potential_cocycle(g, [0, 1, 5]))
    assert injective.structure == "units"
    collapsed = kernel_subgroupoid(g, potential_cocycle(g, [0, 0, 5]))
    assert collapsed.structure == "general"
    assert collapsed.contains(Explicit(1))  # (0,1)


def test_log_modular_cocycle_is_exact_on_rational_weights() -> None:
    g = _cycle3()
    c = LogModularCocycle(g, (Fraction(1, 7), Fraction(2, 7), Fraction(4, 7)))
    a = Trans(0, 1)  # r = 0, d = 1
    assert c.ratio(a) == Fraction(1, 2)
    assert c.exponential(a, -1j) == Fraction(1, 2)
    assert c.exponential(g.unit(0), 5) == 1
    assert not c.integral
    assert LogModularCocycle(g, (1, 1, 1)).integral


def test_exactness_of_potential_cocycles() -> None:
    g = build_pair_groupoid(3)
    report = check_exactness(g, potential_cocycle(g, [0, 1, 5]))
    assert report.status is CheckStatus.PASS
    assert report.exact
    assert report.classes == 9

    quotient = quotient_by_kernel(g, potential_cocycle(g, [0, 1, 5]))
    assert quotient.bijective
    assert quotient.well_defined


def test_exactness_of_integral_cocycle_on_infinite_model() -> None:
    g = _cycle3()
    report = check_exactness(g, DegreeCocycle(g), Window(2))
    assert report.exact
    assert report.method == "integral"
    assert report.classes == 15


def test_evolve_multiplies_by_phases() -> None:
    g = _cycle3()
    c = DegreeCocycle(g)
    f = AlgebraElement(g, {Trans(0, 1): 1, Trans(1, 0): 2})
    assert evolve(f, c, 0) is f
    moved = evolve(f, c, 0.5)
    assert abs(moved[Trans(0, 1)] - cmath.exp(0.5j)) < 1e-15
    assert moved[Trans(1, 0)] == 2
    back = evolve(moved, c, -0.5)
    assert back.is_close(f)


def test_solve_coboundary_uses_the_given_tolerance() -> None:
    g = build_cyclic_group(2)
    c = ExplicitCocycle(g, (0.0, 1e-9))
    assert isinstance(solve_coboundary(g, c), NotCoboundary)
    assert isinstance(solve_coboundary(g, c, tol=1e-6), PotentialCocycle)
