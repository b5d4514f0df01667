from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from groupoidal.core.constants import TransformKind
from groupoidal.core.errors import CocycleError, PreconditionError
from groupoidal.services.bimodule import (
    OperatorD,
    act_left,
    act_right,
    apply_D,
    check_choice_independence,
    commutator,
    cutoff_approximant,
    inner_product_g,
    inner_product_h,
    operator_matrix,
    rho_by_quadrature,
    spectral_projection_rho,
    ssa_witness,
    symbol,
    transform_D,
)
from groupoidal.services.cocycles import DegreeCocycle, ZeroCocycle, evolve, potential_cocycle
from groupoidal.services.convolution import AlgebraElement, i_norm
from groupoidal.services.groupoids.base import Deaconu, Explicit, Trans, Window
from groupoidal.services.groupoids.deaconu import build_deaconu_groupoid
from groupoidal.services.groupoids.finite import build_pair_groupoid
from groupoidal.services.groupoids.transformation import build_transformation_groupoid
from groupoidal.services.sampling import random_element


def _integers():
    return build_transformation_groupoid(1, [0])


def _graded_models():
    return (
        _integers(),
        build_transformation_groupoid(3, [1, 2, 0]),
        build_deaconu_groupoid(4, [1, 2, 0, 0]),
    )


def test_derivation_identity_is_exact() -> None:
    """D(f Phi) = (D f) Phi + f (D Phi) on 100 random pairs per model."""
    rng = np.random.default_rng(7)
    for g in _graded_models():
        d = OperatorD(DegreeCocycle(g))
        for _ in range(100):
            f, phi = random_element(g, rng), random_element(g, rng)
            assert d(f * phi) == d(f) * phi + f * d(phi)
            assert d.commutator(f, phi) == d(f) * phi


def test_d_is_symmetric_for_the_h_inner_product() -> None:
    rng = np.random.default_rng(8)
    for g in _graded_models():
        c = DegreeCocycle(g)
        d = OperatorD(c)
        for _ in range(20):
            phi, psi = random_element(g, rng), random_element(g, rng)
            assert inner_product_h(d(phi), psi, c) == inner_product_h(phi, d(psi), c)


def test_operator_matrix_on_integers() -> None:
    g = _integers()
    mat = operator_matrix(OperatorD(DegreeCocycle(g)), 0, Window(5))
    assert np.array_equal(mat, np.diag(np.arange(-5, 6)))


def test_h_inner_product_of_deltas_on_integers() -> None:
    g = _integers()
    c = DegreeCocycle(g)
    one = AlgebraElement.identity(g)
    for p in range(-3, 4):
        for q in range(-3, 4):
            value = inner_product_h(AlgebraElement.delta(g, Trans(0, p)), AlgebraElement.delta(g, Trans(0, q)), c)
            assert value == (one if p == q else AlgebraElement.zero(g))


def test_h_inner_product_is_the_kernel_restriction_of_star_product() -> None:
    rng = np.random.default_rng(9)
    g = build_deaconu_groupoid(4, [1, 2, 0, 0])
    c = DegreeCocycle(g)
    for _ in range(30):
        phi, psi = random_element(g, rng), random_element(g, rng)
        expected = (phi.star() * psi).restrict(lambda a: c.value(a) == 0)
        assert inner_product_h(phi, psi, c) == expected
        assert check_choice_independence(phi, psi, c, Window(3)).independent


def test_right_action_needs_kernel_support() -> None:
    g = build_deaconu_groupoid(4, [1, 2, 0, 0])
    c = DegreeCocycle(g)
    d = OperatorD(c)
    phi = AlgebraElement(g, {Deaconu(0, 2, 2): 2, Deaconu(3, 3, 3): Fraction(1, 3)})
    h = AlgebraElement.delta(g, Deaconu(2, 0, 3))
    assert act_right(phi, h, c) == phi * h
    assert d(act_right(phi, h, c)) == act_right(d(phi), h, c)
    with pytest.raises(PreconditionError):
        act_right(phi, AlgebraElement.delta(g, Deaconu(3, 1, 0)), c)
    assert act_left(h, phi) == h * phi


def test_g_inner_product_on_a_pair_groupoid() -> None:
    g = build_pair_groupoid(3)
    c = ZeroCocycle(g)
    xi = Explicit(5)  # (1,2)
    value = inner_product_g(AlgebraElement.delta(g, xi), AlgebraElement.delta(g, xi), c)
    assert value == AlgebraElement.delta(g, g.unit(1))
    with pytest.raises(PreconditionError):
        inner_product_g(AlgebraElement.delta(g, xi), AlgebraElement.delta(g, xi), potential_cocycle(g, [0, 1, 2]))


def test_transforms_on_units() -> None:
    g = build_transformation_groupoid(3, [1, 2, 0])
    d = OperatorD(DegreeCocycle(g))
    one = AlgebraElement.identity(g)
    assert d.transform(one, TransformKind.RESOLVENT) == one
    assert d.transform(one, TransformKind.BOUNDED).is_zero()
    assert d.transform(one, TransformKind.CAYLEY) == -one


def test_symbols() -> None:
    assert symbol("resolvent_squared", 2) == Fraction(1, 5)
    assert abs(symbol("bounded", 1) - 2 ** -0.5) < 1e-15
    assert abs(abs(symbol("cayley", 3.5)) - 1) < 1e-15
    for v in (-4, -1, 1, 2, 7):
        b, r = symbol("bounded", v), symbol("resolvent", v)
        assert abs(b * b + r * r - 1) < 1e-14


def test_cayley_transform_preserves_the_h_inner_product() -> None:
    rng = np.random.default_rng(10)
    g = build_transformation_groupoid(3, [1, 2, 0])
    c = DegreeCocycle(g)
    d = OperatorD(c)
    for _ in range(30):
        phi, psi = random_element(g, rng), random_element(g, rng)
        lhs = inner_product_h(d.transform(phi, "cayley"), d.transform(psi, "cayley"), c)
        assert lhs.is_close(inner_product_h(phi, psi, c))


def test_bounded_and_resolvent_squares_add_up() -> None:
    rng = np.random.default_rng(11)
    g = _integers()
    d = OperatorD(DegreeCocycle(g))
    for _ in range(10):
        phi = random_element(g, rng, spread=4)
        b = d.transform(d.transform(phi, "bounded"), "bounded")
        r = d.transform(d.transform(phi, "resolvent"), "resolvent")
        assert (b + r).is_close(phi)


def test_evolution_commutes_with_d_and_is_multiplicative() -> None:
    rng = np.random.default_rng(12)
    g = build_transformation_groupoid(3, [1, 2, 0])
    c = DegreeCocycle(g)
    d = OperatorD(c)
    for t in (0.3, -1.7, 2.5):
        f, phi = random_element(g, rng), random_element(g, rng)
        assert d(evolve(phi, c, t)).is_close(evolve(d(phi), c, t))
        assert evolve(f * phi, c, t).is_close(evolve(f, c, t) * evolve(phi, c, t))


def test_cutoff_approximants_converge() -> None:
    """||k^n - k^m||_I <= ||f||_I / (1 + m^2) for 1 <= m < n <= 10."""
    rng = np.random.default_rng(13)
    g = build_transformation_groupoid(3, [1, 2, 0])
    c = DegreeCocycle(g)
    d = OperatorD(c)
    for _ in range(5):
        f = random_element(g, rng)
        kernels = {m: cutoff_approximant(f, d, m) for m in range(1, 11)}
        for m in range(1, 11):
            for n in range(m + 1, 11):
                assert (kernels[n] - kernels[m]).i_norm() <= Fraction(i_norm(f), 1 + m * m)


def test_cutoff_agrees_with_resolvent_once_it_covers_the_support() -> None:
    rng = np.random.default_rng(14)
    g = build_transformation_groupoid(3, [1, 2, 0])
    c = DegreeCocycle(g)
    d = OperatorD(c)
    for _ in range(10):
        f, psi = random_element(g, rng), random_element(g, rng)
        applied = cutoff_approximant(f, d, 2).apply(psi)
        assert applied == f * d.transform(psi, TransformKind.RESOLVENT_SQUARED)
    with pytest.raises(PreconditionError):
        cutoff_approximant(f, d, -1)


def test_spectral_subspaces() -> None:
    rng = np.random.default_rng(15)
    g = build_transformation_groupoid(3, [1, 2, 0])
    c = DegreeCocycle(g)
    for _ in range(20):
        f, psi = random_element(g, rng), random_element(g, rng)
        for k in range(-2, 3):
            projected = spectral_projection_rho(k, psi, c)
            assert ssa_witness(f, k, c, Window(4)).apply(psi) == f * projected
            assert rho_by_quadrature(k, psi, c, 64).is_close(projected, 1e-12)
        total = AlgebraElement.zero(g)
        for k in range(-2, 3):
            total = total + spectral_projection_rho(k, psi, c)
        assert total == psi


def test_spectral_projection_needs_an_integral_cocycle() -> None:
    g = build_pair_groupoid(2)
    c = potential_cocycle(g, [0, Fraction(1, 2)])
    with pytest.raises(CocycleError):
        spectral_projection_rho(0, AlgebraElement.identity(g), c)


def test_module_level_operations_delegate_to_d() -> None:
    g = _integers()
    d = OperatorD(DegreeCocycle(g))
    phi = AlgebraElement(g, {Trans(0, -2): 3, Trans(0, 0): 1, Trans(0, 1): Fraction(1, 2)})
    f = AlgebraElement.delta(g, Trans(0, 1))
    assert apply_D(d, phi) == AlgebraElement(g, {Trans(0, -2): -6, Trans(0, 1): Fraction(1, 2)})
    assert transform_D(d, phi, "resolvent_squared") == d.transform(phi, TransformKind.RESOLVENT_SQUARED)
    assert commutator(d, f, phi) == d(f * phi) - f * d(phi)
