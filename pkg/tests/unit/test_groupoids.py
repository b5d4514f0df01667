from __future__ import annotations

import numpy as np
import pytest

from groupoidal.core.errors import InvalidMorphismError, StructuralError, WindowError
from groupoidal.services.groupoids.base import Deaconu, Explicit, Trans, Window
from groupoidal.services.groupoids.deaconu import build_deaconu_groupoid
from groupoidal.services.groupoids.finite import (
    build_cyclic_group,
    build_finite_groupoid,
    build_pair_groupoid,
)
from groupoidal.services.groupoids.transformation import (
    build_rotation_groupoid,
    build_transformation_groupoid,
)
from groupoidal.services.groupoids.validation import mutate_composition_table, validate_axioms


def _cycle3():
    return build_transformation_groupoid(3, [1, 2, 0])


def test_pair_cyclic_table_is_a_groupoid() -> None:
    g = build_pair_groupoid(2, 3)
    report = validate_axioms(g)

    assert g.morphism_count == 12
    assert report.valid
    assert report.exhaustive
    assert report.violation_count == 0


def test_pair_groupoid_composition_and_inverse() -> None:
    g = build_pair_groupoid(2, 3)
    # (0,1;2) has id (0*2+1)*3+2 = 5, (1,0;2) has id (1*2+0)*3+2 = 8.
    a, b = Explicit(5), Explicit(8)
    assert (g.r(a), g.d(a)) == (0, 1)
    assert g.compose(a, b) == Explicit(1)  # (0,0;1)
    assert g.compose(a, a) is None
    assert g.invert(a) == Explicit(7)  # (1,0;1)
    assert g.label(a) == "(0,1;2)"


def test_every_single_entry_mutation_is_detected() -> None:
    """Each of 50 corrupted composition tables is rejected by the validator."""
    g = build_pair_groupoid(2, 3)
    rng = np.random.default_rng(0)
    for _ in range(50):
        mutant, key = mutate_composition_table(g, rng)
        assert mutant.table[key] != g.table[key]
        report = validate_axioms(mutant)
        assert not report.valid, f"mutation at {key} survived"
        assert report.first_witness() is not None


def test_cyclic_group_has_one_unit() -> None:
    g = build_cyclic_group(4)
    assert g.unit_count == 1
    assert g.morphism_count == 4
    assert g.compose(Explicit(3), Explicit(2)) == Explicit(1)
    assert validate_axioms(g).valid


def test_finite_structural_errors_are_reported() -> None:
    g = build_finite_groupoid(
        units=1, ranges=[0], sources=[0], unit_ids=[0], inverses=[5], table=[(0, 0, 0)]
    )
    report = validate_axioms(g)
    assert not report.valid
    assert any("inverse of #0" in problem for problem in report.structural_errors)


def test_duplicate_table_entries_are_rejected() -> None:
    with pytest.raises(StructuralError):
        build_finite_groupoid(
            units=1,
            ranges=[0],
            sources=[0],
            unit_ids=[0],
            inverses=[0],
            table=[(0, 0, 0), (0, 0, 0)],
        )


def test_transformation_groupoid_structure_maps() -> None:
    g = _cycle3()
    a = Trans(0, 1)
    assert g.r(a) == 0
    assert g.d(a) == 1
    assert g.compose(a, Trans(1, 1)) == Trans(0, 2)
    assert g.compose(a, a) is None
    assert g.invert(a) == Trans(1, -1)
    assert g.compose(a, g.invert(a)) == g.unit(0)
    assert g.period(0) == 3


def test_transformation_fibers_are_ordered_by_degree() -> None:
    g = _cycle3()
    fiber = g.source_fiber(0, Window(2))
    assert [t.n for t in fiber] == [-2, -1, 0, 1, 2]
    assert all(g.d(t) == 0 for t in fiber)
    assert len(g.morphisms(Window(2))) == 15


def test_infinite_models_need_a_window() -> None:
    with pytest.raises(WindowError):
        _cycle3().morphisms()
    with pytest.raises(WindowError):
        Window(-1)


def test_act_must_be_a_permutation() -> None:
    with pytest.raises(StructuralError):
        build_transformation_groupoid(3, [0, 0, 1])
    with pytest.raises(StructuralError):
        build_transformation_groupoid(2, [1, 0, 2])


def test_sampled_validation_on_infinite_models() -> None:
    rng = np.random.default_rng(1)
    for g in (_cycle3(), build_rotation_groupoid(8, 3), build_deaconu_groupoid(4, [1, 2, 0, 0])):
        report = validate_axioms(g, 200, rng=rng, window=Window(4))
        assert report.valid, report.first_witness()
        assert not report.exhaustive
        assert report.checked == 200


def test_deaconu_validity() -> None:
    g = build_deaconu_groupoid(4, [1, 2, 0, 0])
    assert g.is_valid(Deaconu(3, 0, 2))  # sigma(3) = sigma(2) = 0
    assert g.is_valid(Deaconu(3, 1, 0))
    assert g.is_valid(Deaconu(0, 3, 0))
    assert not g.is_valid(Deaconu(0, 1, 0))
    assert g.compose(Deaconu(3, 0, 2), Deaconu(2, 1, 0)) == Deaconu(3, 1, 0)
    assert g.invert(Deaconu(3, 1, 0)) == Deaconu(0, -1, 3)
    assert g.iterate(3, 4) == 0


def test_deaconu_partial_map() -> None:
    g = build_deaconu_groupoid(3, {0: 1, 1: 2})
    assert g.domain == frozenset({0, 1})
    assert g.iterate(0, 2) == 2
    assert g.iterate(0, 3) is None
    assert g.is_valid(Deaconu(0, 2, 2))
    assert not g.is_valid(Deaconu(2, 1, 2))
    with pytest.raises(StructuralError):
        build_deaconu_groupoid(3, {0: 1}, dom=[0, 1])


def test_invalid_morphisms_raise() -> None:
    with pytest.raises(InvalidMorphismError):
        _cycle3().r(Trans(5, 0))
    with pytest.raises(InvalidMorphismError):
        build_pair_groupoid(2).d(Explicit(9))


def test_deaconu_operations_reject_triples_outside_the_groupoid() -> None:
    g = build_deaconu_groupoid(2, [None, None])
    assert g.r(Deaconu(1, 0, 1)) == 1
    for op in (g.r, g.d, g.invert, g.degree):
        with pytest.raises(InvalidMorphismError):
            op(Deaconu(0, 1, 1))
    with pytest.raises(InvalidMorphismError):
        g.r(Deaconu(0, 5, 1))
    h = build_deaconu_groupoid(4, [1, 2, 0, 0])
    with pytest.raises(InvalidMorphismError):
        h.compose(Deaconu(0, 1, 0), Deaconu(0, 0, 0))


def test_groupoids_built_from_the_same_data_are_equal() -> None:
    assert _cycle3() == _cycle3()
    assert hash(_cycle3()) == hash(_cycle3())
    assert _cycle3() != build_transformation_groupoid(3, [2, 0, 1])
    assert build_pair_groupoid(2, group_order=3) == build_pair_groupoid(2, group_order=3)
    assert build_deaconu_groupoid(4, [1, 2, 0, 0]) == build_deaconu_groupoid(4, {0: 1, 1: 2, 2: 0, 3: 0})
    assert build_deaconu_groupoid(2, [1, 0]) != build_transformation_groupoid(2, [1, 0])
