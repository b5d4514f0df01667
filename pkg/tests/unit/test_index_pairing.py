from __future__ import annotations

import numpy as np
import pytest

from groupoidal.core.constants import CheckStatus, IndexMethod
from groupoidal.core.errors import (
    CocycleError,
    NotUnitaryError,
    PreconditionError,
    UnsupportedModelError,
    WindowError,
)
from groupoidal.services.cocycles import DegreeCocycle, LogModularCocycle, potential_cocycle
from groupoidal.services.convolution import AlgebraElement
from groupoidal.services.groupoids.base import Trans, Window
from groupoidal.services.groupoids.deaconu import build_deaconu_groupoid
from groupoidal.services.groupoids.finite import build_pair_groupoid
from groupoidal.services.groupoids.transformation import build_transformation_groupoid
from groupoidal.services.index_pairing import (
    UnitaryElement,
    _count_crossings,
    index_mu,
    positive_spectral_projection,
    spectral_flow,
    tau_index_compression,
)
from groupoidal.services.measures import UnitMeasure


def _setup():
    g = build_transformation_groupoid(3, [1, 2, 0])
    return g, DegreeCocycle(g), UnitMeasure.uniform(3, normalize=True)


def test_shift_has_index_minus_one() -> None:
    g, c, mu = _setup()
    u = UnitaryElement.shift(g)
    assert u.is_unitary()

    compression = tau_index_compression(u, c, mu, Window(8))
    assert compression.value == -1
    assert compression.stable
    assert compression.method is IndexMethod.COMPRESSION
    assert compression.per_unit[0] == {"dim": 9, "ker": 0, "coker": 1}

    flow = spectral_flow(u, c, mu, Window(8), steps=64)
    assert flow.value == -1
    assert flow.per_unit[2] == {"flow": -1, "up": 0, "down": 1}
    assert spectral_flow(u.adjoint(), c, mu, Window(8), steps=64).per_unit[0] == {"flow": 1, "up": 1, "down": 0}


def test_shift_index_does_not_depend_on_the_window() -> None:
    g, c, mu = _setup()
    u = UnitaryElement.shift(g)
    for m in range(4, 13):
        assert tau_index_compression(u, c, mu, Window(m)).value == -1


def test_powers_and_trivial_unitaries() -> None:
    g, c, mu = _setup()
    assert tau_index_compression(UnitaryElement.shift(g, 2), c, mu, Window(8)).value == -2
    assert tau_index_compression(UnitaryElement.shift(g, -1), c, mu, Window(8)).value == 1
    assert tau_index_compression(UnitaryElement.identity(g), c, mu, Window(8)).value == 0
    assert tau_index_compression(UnitaryElement.scalar_phase(g, 0.7), c, mu, Window(8)).value == 0


def test_index_is_additive() -> None:
    g, c, mu = _setup()
    u, v = UnitaryElement.shift(g), UnitaryElement.shift(g, 2)
    assert tau_index_compression(u @ v, c, mu, Window(8)).value == -3
    assert tau_index_compression(u.direct_sum(v), c, mu, Window(8)).value == -3
    assert tau_index_compression(u.adjoint(), c, mu, Window(8)).value == 1
    assert tau_index_compression(u.conjugate_by(v), c, mu, Window(8)).value == -1


def test_index_mu_cross_checks() -> None:
    g, c, mu = _setup()
    u = UnitaryElement.shift(g)
    partners = [UnitaryElement.shift(g, 2), UnitaryElement.identity(g)]
    report = index_mu(u, c, mu, Window(8), partners=partners)
    assert report.value == -1
    assert report.cross_check == -1
    assert report.agrees
    assert report.stable
    assert report.homomorphism
    assert report.status is CheckStatus.PASS


def test_measure_scales_the_index() -> None:
    g, c, _ = _setup()
    u = UnitaryElement.shift(g)
    assert tau_index_compression(u, c, UnitMeasure.uniform(3), Window(8)).value == -3


def test_finite_models_pair_with_integral_potentials() -> None:
    g = build_pair_groupoid(3)
    c = potential_cocycle(g, [0, 1, 5])
    report = tau_index_compression(UnitaryElement.identity(g), c, UnitMeasure.uniform(3))
    assert report.value == 0
    assert report.stable


def test_preconditions() -> None:
    g, c, mu = _setup()
    u = UnitaryElement.shift(g)
    with pytest.raises(WindowError):
        tau_index_compression(UnitaryElement.shift(g, 2), c, mu, Window(3))
    with pytest.raises(CocycleError):
        tau_index_compression(u, LogModularCocycle(g, (1, 2, 4)), mu, Window(8))
    with pytest.raises(NotUnitaryError):
        doubled = UnitaryElement.from_rows(g, [[AlgebraElement.identity(g).scale(2)]])
        tau_index_compression(doubled, c, mu, Window(8))
    with pytest.raises(PreconditionError):
        spectral_flow(u, c, mu, Window(8), steps=1)
    with pytest.raises(UnsupportedModelError):
        UnitaryElement.shift(build_deaconu_groupoid(2, [1, 0]))


def test_positive_spectral_projection() -> None:
    g, c, _ = _setup()
    phi = AlgebraElement(g, {Trans(0, -2): 1, Trans(1, 0): 2, Trans(2, 3): 5})
    assert positive_spectral_projection(c, phi) == AlgebraElement(g, {Trans(1, 0): 2, Trans(2, 3): 5})


def test_spectral_flow_follows_each_eigenvalue_branch() -> None:
    # the upper branch of diag(-1 + 2s, 2 - 5s) dips below zero near s = 3/7 and comes back
    d0 = np.diag([-1.0, 2.0]).astype(complex)
    d1 = np.diag([1.0, -3.0]).astype(complex)
    crossings = _count_crossings(d0, d1, 64)
    assert crossings is not None
    assert (crossings.up, crossings.down, crossings.flow) == (1, 1, 0)

    straight = _count_crossings(np.diag([0.5, 2.0]), np.diag([-0.5, 2.0]), 8)
    assert straight is not None
    assert (straight.up, straight.down) == (0, 1)
