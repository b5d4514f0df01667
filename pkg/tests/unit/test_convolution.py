from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from groupoidal.core.errors import InvalidMorphismError, ParentMismatchError, WindowError
from groupoidal.services.convolution import (
    AlgebraElement,
    i_norm,
    norms,
    truncated_regular_rep,
)
from groupoidal.services.groupoids.base import Explicit, Trans, Window
from groupoidal.services.groupoids.deaconu import build_deaconu_groupoid
from groupoidal.services.groupoids.finite import build_pair_groupoid
from groupoidal.services.groupoids.transformation import build_transformation_groupoid
from groupoidal.services.sampling import random_element


def _integers():
    return build_transformation_groupoid(1, [0])


def _laplacian(g):
    return AlgebraElement(g, {Trans(0, 1): 1, Trans(0, -1): 1})


def test_zero_entries_are_dropped() -> None:
    g = _integers()
    f = AlgebraElement(g, [(Trans(0, 1), 1), (Trans(0, 1), -1), (Trans(0, 2), 0)])
    assert f.is_zero()
    assert f == AlgebraElement.zero(g)


def test_unknown_morphisms_are_rejected() -> None:
    with pytest.raises(InvalidMorphismError):
        AlgebraElement(build_pair_groupoid(2), {Explicit(10): 1})


def test_convolution_on_integers_is_group_algebra_product() -> None:
    g = _integers()
    f = _laplacian(g)
    expected = AlgebraElement(g, {Trans(0, 2): 1, Trans(0, 0): 2, Trans(0, -2): 1})
    assert f * f == expected


def test_associativity_and_identity_on_random_elements() -> None:
    rng = np.random.default_rng(3)
    models = (
        build_transformation_groupoid(3, [1, 2, 0]),
        build_deaconu_groupoid(4, [1, 2, 0, 0]),
        build_pair_groupoid(2, 3),
    )
    for g in models:
        one = AlgebraElement.identity(g)
        for _ in range(20):
            f, h, k = (random_element(g, rng) for _ in range(3))
            assert (f * h) * k == f * (h * k)
            assert one * f == f
            assert f * one == f
            assert (f * h).star() == h.star() * f.star()
            assert f.star().star() == f


def test_star_conjugates_and_inverts() -> None:
    g = build_transformation_groupoid(3, [1, 2, 0])
    f = AlgebraElement(g, {Trans(0, 1): complex(1, 2)})
    assert f.star() == AlgebraElement(g, {Trans(1, -1): complex(1, -2)})


def test_exact_arithmetic_stays_exact() -> None:
    g = _integers()
    f = AlgebraElement(g, {Trans(0, 1): Fraction(1, 3)})
    product = f * f * 3
    assert product.is_exact()
    assert product[Trans(0, 2)] == Fraction(1, 3)


def test_is_close_tolerates_float_noise() -> None:
    g = _integers()
    f = AlgebraElement(g, {Trans(0, 1): 1.0})
    h = AlgebraElement(g, {Trans(0, 1): 1.0 + 1e-15, Trans(0, 2): 1e-16})
    assert f != h
    assert f.is_close(h)
    assert f.max_defect(h) < 1e-14


def test_mixing_groupoids_raises() -> None:
    f = _laplacian(_integers())
    h = _laplacian(build_transformation_groupoid(2, [1, 0]))
    with pytest.raises(ParentMismatchError):
        f + h
    with pytest.raises(ParentMismatchError):
        f * h


def test_groupoids_built_twice_share_one_algebra() -> None:
    f = _laplacian(_integers())
    h = _laplacian(_integers())
    assert f == h
    assert f * h == _laplacian(_integers()) * f
    assert (f - h).is_zero()


def test_norms_of_laplacian() -> None:
    """nu = nu_inv = 2 exactly; the truncated reduced norm 2 cos(pi / 130) sits just below 2."""
    f = _laplacian(_integers())
    report = norms(f, Window(64))
    assert report.nu == 2
    assert report.nu_inv == 2
    assert report.i_norm == 2
    assert 1.99 < report.reduced_lower <= 2 + 1e-12
    assert report.window_used == Window(64)


def test_i_norm_needs_no_window() -> None:
    g = build_transformation_groupoid(3, [1, 2, 0])
    f = AlgebraElement(g, {Trans(0, 1): 2, Trans(1, 1): -3, Trans(0, 5): Fraction(1, 2)})
    # range sums: unit 0 -> 5/2, unit 1 -> 3; source sums: d(0,1)=1 -> 2, d(1,1)=2 -> 3,
    # d(0,5)=2 -> 1/2, so unit 2 -> 7/2.
    assert i_norm(f) == Fraction(7, 2)


def test_norms_require_a_wide_enough_window() -> None:
    f = _laplacian(_integers())
    with pytest.raises(WindowError):
        norms(f)
    with pytest.raises(WindowError):
        norms(f, Window(0))


def test_regular_representation_on_matrix_units() -> None:
    g = build_pair_groupoid(2)
    # (0,1) is the matrix unit e_01; on the fiber d^-1(0) = {(0,0), (1,0)} it maps (1,0) to (0,0).
    f = AlgebraElement.delta(g, Explicit(1))
    mat = truncated_regular_rep(f, 0, None)
    assert mat.shape == (2, 2)
    assert np.allclose(mat, [[0, 1], [0, 0]])
    assert abs(norms(f).reduced_lower - 1.0) < 1e-12
