from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from groupoidal.core.constants import CheckStatus
from groupoidal.core.errors import NotUnimodularError, StructuralError
from groupoidal.services.cocycles import kernel_subgroupoid
from groupoidal.services.convolution import AlgebraElement
from groupoidal.services.documents import load_corpus, load_workbench
from groupoidal.services.groupoids.base import Trans, Window
from groupoidal.services.groupoids.transformation import build_transformation_groupoid
from groupoidal.services.measures import (
    UnitMeasure,
    check_kms,
    check_tau_positive,
    check_trace_unimodular,
    kms_function,
    modular_function,
    radon_nikodym_cocycle,
    require_unimodular,
    tau_functional,
)
from groupoidal.services.suites.kms import trace_full


def _cycle3():
    return build_transformation_groupoid(3, [1, 2, 0])


def _swap():
    return build_transformation_groupoid(2, [1, 0])


def test_unit_measure_validation_and_normalization() -> None:
    mu = UnitMeasure.of([1, 2, 4], normalize=True)
    assert mu.weights == (Fraction(1, 7), Fraction(2, 7), Fraction(4, 7))
    assert mu.total_mass == 1
    assert UnitMeasure.uniform(3).is_uniform()
    with pytest.raises(StructuralError):
        UnitMeasure.of([1, 0])
    with pytest.raises(StructuralError):
        UnitMeasure.of([])


def test_tau_reads_the_unit_diagonal() -> None:
    g = _cycle3()
    mu = UnitMeasure.of([1, 2, 4], normalize=True)
    assert tau_functional(AlgebraElement.identity(g), mu) == 1
    f = AlgebraElement(g, {Trans(1, 0): 3, Trans(0, 1): 5})
    assert tau_functional(f, mu) == Fraction(6, 7)


def test_modular_function_is_a_ratio_and_multiplicative() -> None:
    g = _cycle3()
    data = modular_function(g, UnitMeasure.of([1, 2, 4]))
    assert data.delta(Trans(0, 1)) == Fraction(1, 2)
    assert data.delta(Trans(2, 1)) == 4
    for a, b in ((Trans(0, 1), Trans(1, 1)), (Trans(2, -2), Trans(0, 5))):
        ab = g.compose(a, b)
        assert ab is not None
        assert data.delta(ab) == data.delta(a) * data.delta(b)


def test_kms_at_minus_one_is_exact_for_rational_weights() -> None:
    """tau(f * u_{-i}(g)) = tau(g * f) on 200 random pairs, with every value a rational."""
    g = _cycle3()
    mu = UnitMeasure.of([1, 2, 4], normalize=True)
    report = check_kms(g, mu, 200, rng=np.random.default_rng(0), window=Window(8))
    assert report.holds, report.witness
    assert report.exact
    assert report.pairs == 200
    assert report.max_defect == 0.0


def test_kms_function_on_the_swap() -> None:
    g = _swap()
    mu = UnitMeasure.of([1, 2])
    c = radon_nikodym_cocycle(g, mu)
    f = AlgebraElement.delta(g, Trans(0, 1))
    h = AlgebraElement.delta(g, Trans(1, -1))
    assert tau_functional(h * f, mu) == 2
    assert kms_function(f, h, c, mu, -1j) == 2
    assert kms_function(f, h, c, mu, 0) == tau_functional(f * h, mu) == 1
    # the other boundary line does not satisfy the condition on non-invariant weights
    assert kms_function(f, h, c, mu, 1j) == Fraction(1, 2)


def test_kms_fails_off_the_boundary_for_non_invariant_weights() -> None:
    report = check_kms(_swap(), UnitMeasure.of([1, 2]), 50, rng=np.random.default_rng(1), beta=1)
    assert not report.boundary_holds


def test_swap_is_not_unimodular() -> None:
    g = _swap()
    mu = UnitMeasure.of([1, 2])
    with pytest.raises(NotUnimodularError) as info:
        require_unimodular(g, mu, Window(4))
    assert info.value.witness == Trans(0, 1)
    delta_a = AlgebraElement.delta(g, Trans(0, 1))
    delta_inv = AlgebraElement.delta(g, g.invert(Trans(0, 1)))
    assert tau_functional(delta_a * delta_inv, mu) != tau_functional(delta_inv * delta_a, mu)


def test_unimodularity_is_decided_at_the_given_tolerance() -> None:
    g = _swap()
    mu = UnitMeasure.of([1.0, 1.0 + 1e-9])
    with pytest.raises(NotUnimodularError):
        require_unimodular(g, mu, Window(2))
    require_unimodular(g, mu, Window(2), tol=1e-6)


def test_trace_on_invariant_measures_and_kernels() -> None:
    g = _cycle3()
    rng = np.random.default_rng(2)
    uniform = check_trace_unimodular(g, UnitMeasure.uniform(3), 100, rng=rng, window=Window(4))
    assert uniform.holds
    assert uniform.exact

    mu = UnitMeasure.of([1, 2, 4], normalize=True)
    kernel = kernel_subgroupoid(g, radon_nikodym_cocycle(g, mu), window=Window(6))
    on_kernel = check_trace_unimodular(kernel, mu, 100, rng=rng, window=Window(6))
    assert on_kernel.holds
    with pytest.raises(NotUnimodularError):
        check_trace_unimodular(g, mu, 10, rng=rng, window=Window(4))


def test_tau_is_positive() -> None:
    ok, lowest = check_tau_positive(_cycle3(), UnitMeasure.of([1, 2, 4]), 100, rng=np.random.default_rng(3))
    assert ok
    assert lowest >= 0


def test_trace_check_on_a_non_unimodular_measure() -> None:
    bench = load_workbench(load_corpus("kms_swap"))
    outcome = trace_full(bench, np.random.default_rng(0))
    assert outcome.status is CheckStatus.PASS, outcome.witness
    assert outcome.values["unimodular"] is False
    assert outcome.values["morphism"] == "(0,1)"
    # delta_a * delta_a^-1 is the unit at 0, the reverse product the unit at 1
    assert outcome.values["lhs"] == 1
    assert outcome.values["rhs"] == 2


def test_trace_check_on_an_invariant_measure() -> None:
    bench = load_workbench(load_corpus("shift_x3"))
    outcome = trace_full(bench, np.random.default_rng(0))
    assert outcome.status is CheckStatus.PASS, outcome.witness
    assert outcome.values["unimodular"] is True
    assert outcome.values["exact"] is True
