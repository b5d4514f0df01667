from __future__ import annotations

from itertools import combinations

import numpy as np

from groupoidal.core.constants import CheckStatus, SuiteName
from groupoidal.core.scalars import Scalar, close, parse_scalar
from groupoidal.services.bimodule import OperatorD, inner_product_h, spectral_projection_rho
from groupoidal.services.cocycles import DegreeCocycle
from groupoidal.services.convolution import AlgebraElement
from groupoidal.services.documents import Workbench
from groupoidal.services.groupoids.base import Window
from groupoidal.services.index_pairing import (
    UnitaryElement,
    index_mu,
    positive_spectral_projection,
    tau_index_compression,
)
from groupoidal.services.sampling import random_element
from groupoidal.services.suites.base import Outcome, check, failed, indeterminate, passed

PROJECTION_SAMPLES = 100
STABILITY_MARGIN = 4
HOMOMORPHISM_PAIRS = 20


def _pairable(bench: Workbench) -> bool:
    c = bench.cocycle
    return c.integral and (bench.groupoid.is_finite or isinstance(c, DegreeCocycle))


def _has_unitaries(bench: Workbench) -> bool:
    return _pairable(bench) and bool(bench.unitaries)


def _has_spec(bench: Workbench) -> bool:
    return _has_unitaries(bench) and bench.document.index is not None


def _infinite_with_unitaries(bench: Workbench) -> bool:
    return _has_unitaries(bench) and not bench.groupoid.is_finite


def _window_for(bench: Workbench, *unitaries: UnitaryElement) -> Window:
    spread = max(u.cocycle_spread(bench.cocycle) for u in unitaries)
    return Window(max(bench.window.M, spread + 2))


def _index(bench: Workbench, u: UnitaryElement) -> Scalar:
    return tau_index_compression(u, bench.cocycle, bench.measure, _window_for(bench, u)).value


@check(SuiteName.INDEX, "value", applies=_has_spec)
def value(bench: Workbench, rng: np.random.Generator) -> Outcome:
    spec = bench.document.index
    assert spec is not None
    u = bench.unitaries[spec.unitary]
    partners = [bench.unitaries[name] for name in spec.partners]
    report = index_mu(
        u, bench.cocycle, bench.measure, bench.window, partners=partners, tol=bench.tolerance
    )
    values = {
        "unitary": spec.unitary,
        "value": report.value,
        "spectral_flow": report.cross_check,
        "agrees": report.agrees,
        "stable": report.stable,
        "homomorphism": report.homomorphism,
        "per_unit": report.per_unit,
        "steps": report.steps,
        "smallest_retained": report.smallest_retained,
        "largest_discarded": report.largest_discarded,
    }
    if report.status is CheckStatus.INDETERMINATE:
        return indeterminate(report.detail or "rank or eigenvalue decision inside the gap", **values)
    if not report.agrees:
        return failed(f"compression gives {report.value}, spectral flow gives {report.cross_check}", **values)
    if not report.stable:
        return failed(f"value changes between M={bench.window.M} and M={bench.window.M + 1}", **values)
    if report.homomorphism is False:
        return failed("Ind(u v) != Ind(u) + Ind(v) for a listed partner", **values)
    if spec.expected is not None:
        expected = parse_scalar(spec.expected)
        if not close(report.value, expected, bench.tolerance):  # type: ignore[arg-type]
            return failed(f"index {report.value} != expected {expected}", **values)
    return passed(**values)


@check(SuiteName.INDEX, "window_stability", applies=_infinite_with_unitaries)
def window_stability(bench: Workbench, rng: np.random.Generator) -> Outcome:
    """The compression value does not move once M exceeds the support spread by 2."""
    c, mu = bench.cocycle, bench.measure
    values: dict[str, dict[int, object]] = {}
    for name, u in sorted(bench.unitaries.items()):
        low = u.cocycle_spread(c) + 2
        series = {
            m: tau_index_compression(u, c, mu, Window(m)).value
            for m in range(low, bench.window.M + STABILITY_MARGIN + 1)
        }
        values[name] = series
        if len(set(series.values())) > 1:
            return failed(f"{name}: value depends on the window: {series}", windows=values)
    return passed(windows=values)


@check(SuiteName.INDEX, "homomorphism", applies=_has_unitaries)
def homomorphism(bench: Workbench, rng: np.random.Generator) -> Outcome:
    """Ind(u v) = Ind(u) + Ind(v) on sampled pairs of the named unitaries and their adjoints."""
    tol = bench.tolerance
    pool = []
    for name, u in sorted(bench.unitaries.items()):
        pool += [(name, u), (f"{name}*", u.adjoint())]
    cache = {label: _index(bench, u) for label, u in pool}
    sampled = 0
    for _ in range(HOMOMORPHISM_PAIRS):
        (a, u), (b, v) = (pool[int(i)] for i in rng.integers(len(pool), size=2))
        total = cache[a] + cache[b]
        if not close(_index(bench, u.direct_sum(v)), total, tol):
            return failed(f"Ind({a} + {b}) != Ind({a}) + Ind({b})")
        if u.size == v.size:
            if not close(_index(bench, u @ v), total, tol):
                return failed(f"Ind({a} {b}) = {_index(bench, u @ v)} != {total}")
            sampled += 1
    return passed(products=sampled, pairs=HOMOMORPHISM_PAIRS, indices=cache)


@check(SuiteName.INDEX, "conjugation", applies=_has_unitaries)
def conjugation(bench: Workbench, rng: np.random.Generator) -> Outcome:
    """Ind(w u w*) = Ind(u), and the identity and scalar phases have index 0."""
    tol = bench.tolerance
    g = bench.groupoid
    for n in sorted({u.size for u in bench.unitaries.values()}):
        for trivial in (UnitaryElement.identity(g, n), UnitaryElement.scalar_phase(g, 0.7, n)):
            if not close(_index(bench, trivial), 0, tol):
                return failed(f"a trivial unitary of size {n} has nonzero index")
    checked = 0
    for (a, u), (b, w) in combinations(sorted(bench.unitaries.items()), 2):
        if u.size != w.size:
            continue
        for target, name, by, by_name in ((u, a, w, b), (w, b, u, a)):
            if not close(_index(bench, target.conjugate_by(by)), _index(bench, target), tol):
                return failed(f"Ind({by_name} {name} {by_name}*) != Ind({name})")
            checked += 1
    return passed(conjugations=checked)


@check(SuiteName.INDEX, "positive_projection", applies=_pairable)
def positive_projection(bench: Workbench, rng: np.random.Generator) -> Outcome:
    """P = 1[c >= 0] is a selfadjoint idempotent commuting with D, and P = sum over k >= 0 of rho_k."""
    g, c, tol = bench.groupoid, bench.cocycle, bench.tolerance
    d = OperatorD(c)
    spread = min(2, bench.window.M)
    for _ in range(PROJECTION_SAMPLES):
        phi = random_element(g, rng, spread=spread)
        psi = random_element(g, rng, spread=spread)
        p_phi = positive_spectral_projection(c, phi)
        if positive_spectral_projection(c, p_phi) != p_phi:
            return failed(f"P is not idempotent on {phi!r}")
        if p_phi + (phi - p_phi) != phi or not (phi - p_phi).restrict(lambda a: c.value(a) >= 0).is_zero():
            return failed(f"P and 1 - P do not split {phi!r}")
        lhs = inner_product_h(p_phi, psi, c)
        if not lhs.is_close(inner_product_h(phi, positive_spectral_projection(c, psi), c), tol):
            return failed("P is not selfadjoint for <.,.>_H")
        if d(p_phi) != positive_spectral_projection(c, d(phi)):
            return failed(f"P does not commute with D on {phi!r}")
        total = AlgebraElement.zero(g)
        for level in {int(c.value(a)) for a in phi.support if c.value(a) >= 0}:
            total = total + spectral_projection_rho(level, phi, c)
        if total != p_phi:
            return failed(f"P != sum of rho_k over k >= 0 on {phi!r}")
    return passed(samples=PROJECTION_SAMPLES)
