"""
Measures on the unit space, the modular function, the functional tau and the KMS/trace checks.

With counting-measure Haar systems a unit measure mu induces the measure mu(r(a)) on each
morphism a, and its inverse mu(d(a)), so the modular function is the ratio
Delta(a) = mu(r(a)) / mu(d(a)) and its logarithm is the Radon-Nikodym cocycle.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from groupoidal.core.errors import NotUnimodularError, ParentMismatchError, StructuralError
from groupoidal.core.scalars import Scalar, close, defect, is_exact
from groupoidal.core.settings import settings
from groupoidal.services.cocycles import LogModularCocycle, evolve
from groupoidal.services.convolution import AlgebraElement
from groupoidal.services.groupoids.base import DiscreteGroupoid, Morphism, Window
from groupoidal.services.sampling import make_rng, random_element, random_time

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class UnitMeasure:
    """Strictly positive weights on the unit space (quasi-invariance in the discrete setting)."""

    weights: tuple[Scalar, ...]

    def __post_init__(self) -> None:
        if not self.weights:
            raise StructuralError("a unit measure needs at least one weight")
        for x, w in enumerate(self.weights):
            if isinstance(w, complex) or not w > 0:
                raise StructuralError(f"weight at unit {x} must be strictly positive, got {w!r}")

    @classmethod
    def of(cls, weights: Sequence[Scalar], *, normalize: bool = False) -> UnitMeasure:
        measure = cls(tuple(weights))
        return measure.normalized() if normalize else measure

    @classmethod
    def uniform(cls, n: int, *, normalize: bool = False) -> UnitMeasure:
        return cls.of([1] * n, normalize=normalize)

    def __len__(self) -> int:
        return len(self.weights)

    def weight(self, x: int) -> Scalar:
        return self.weights[x]

    @property
    def total_mass(self) -> Scalar:
        return sum(self.weights)

    def normalized(self) -> UnitMeasure:
        total = self.total_mass
        if all(is_exact(w) for w in self.weights):
            return UnitMeasure(tuple(Fraction(w) / total for w in self.weights))
        return UnitMeasure(tuple(float(w) / float(total) for w in self.weights))

    def is_uniform(self) -> bool:
        return all(w == self.weights[0] for w in self.weights)


@dataclass(frozen=True)
class ModularData:
    groupoid: DiscreteGroupoid
    measure: UnitMeasure
    c_mu: LogModularCocycle

    def delta(self, a: Morphism) -> Scalar:
        return self.c_mu.ratio(a)


def _check_measure(g: DiscreteGroupoid, mu: UnitMeasure) -> None:
    if len(mu) != g.unit_count:
        raise StructuralError(f"measure has {len(mu)} weights for {g.unit_count} units")


def modular_function(g: DiscreteGroupoid, mu: UnitMeasure) -> ModularData:
    _check_measure(g, mu)
    amb = g.ambient
    return ModularData(groupoid=amb, measure=mu, c_mu=LogModularCocycle(amb, mu.weights))


def radon_nikodym_cocycle(g: DiscreteGroupoid, mu: UnitMeasure) -> LogModularCocycle:
    return modular_function(g, mu).c_mu


def tau_functional(f: AlgebraElement, mu: UnitMeasure) -> Scalar:
    """tau(f) = sum over units x of f(x) mu(x)."""
    grp = f.parent
    _check_measure(grp, mu)
    total: Scalar = 0
    for x in range(grp.unit_count):
        value = f[grp.unit(x)]
        if value != 0:
            total += value * mu.weight(x)
    return total


# -------------------------------------------------------------------------
# Trace and KMS checks
# -------------------------------------------------------------------------


@dataclass
class TraceReport:
    holds: bool
    pairs: int
    exact: bool
    max_defect: float = 0.0
    witness: list[str] = field(default_factory=list)


@dataclass
class KmsReport:
    beta: float
    boundary_holds: bool
    continuation_holds: bool
    pairs: int
    exact: bool
    max_defect: float = 0.0
    witness: list[str] = field(default_factory=list)
    sample: dict[str, Scalar] = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.boundary_holds and self.continuation_holds


def _window(g: DiscreteGroupoid, window: Window | None) -> Window | None:
    return None if g.is_finite else (window or Window(settings.default_window))


def require_unimodular(
    domain: DiscreteGroupoid, mu: UnitMeasure, window: Window | None = None, *, tol: float | None = None
) -> None:
    """Raise NotUnimodularError at the lowest-degree morphism of ``domain`` with Delta != 1."""
    eps = settings.tolerance if tol is None else tol
    data = modular_function(domain, mu)
    win = _window(domain, window)
    ordered = sorted(
        domain.morphisms(win), key=lambda a: (abs(domain.degree(a)), domain.degree(a) < 0, a)
    )
    for a in ordered:
        q = data.delta(a)
        if not close(q, 1, eps):
            raise NotUnimodularError(f"Delta({a}) = {q} != 1: tau is not a trace here", witness=a)


def check_trace_unimodular(
    domain: DiscreteGroupoid,
    mu: UnitMeasure,
    sample_budget: int | None = None,
    *,
    rng: np.random.Generator | None = None,
    window: Window | None = None,
    tol: float | None = None,
) -> TraceReport:
    """tau(f*g) = tau(g*f) for random f, g supported in ``domain`` (G itself or a kernel)."""
    require_unimodular(domain, mu, window, tol=tol)
    budget = settings.sample_budget if sample_budget is None else sample_budget
    eps = settings.tolerance if tol is None else tol
    gen = rng if rng is not None else make_rng()
    report = TraceReport(holds=True, pairs=0, exact=True)
    for _ in range(budget):
        f = random_element(domain, gen)
        g = random_element(domain, gen)
        lhs, rhs = tau_functional(f * g, mu), tau_functional(g * f, mu)
        report.pairs += 1
        report.exact = report.exact and is_exact(lhs) and is_exact(rhs)
        report.max_defect = max(report.max_defect, defect(lhs, rhs))
        if report.holds and not close(lhs, rhs, eps):
            report.holds = False
            report.witness = [repr(f), repr(g)]
    return report


def kms_function(f: AlgebraElement, g: AlgebraElement, c: LogModularCocycle, mu: UnitMeasure, z: Scalar) -> Scalar:
    """F(z) = tau(f * u_z(g)) = sum over a of mu(r(a)) f(a) g(a^-1) e^{iz c(a^-1)}, entire in z."""
    if f.parent != g.parent:
        raise ParentMismatchError("elements belong to different groupoids")
    grp = f.parent
    total: Scalar = 0
    for a, fv in f.items():
        inv = grp.invert(a)
        gv = g[inv]
        if gv != 0:
            total += mu.weight(grp.r(a)) * fv * gv * c.exponential(inv, z)
    return total


def check_kms(
    g: DiscreteGroupoid,
    mu: UnitMeasure,
    sample_budget: int | None = None,
    *,
    rng: np.random.Generator | None = None,
    window: Window | None = None,
    beta: float = -1,
    tol: float | None = None,
) -> KmsReport:
    """
    KMS condition of tau at inverse temperature ``beta`` for u_t built from the Radon-Nikodym cocycle.

    Boundary identity: tau(f * u_{i beta}(g)) = tau(g * f), exact for rational weights at beta = -1.
    Continuation: F(t + i beta) from the closed form matches tau(u_t(g) * f) at sampled real t.
    Values of beta other than -1 are experimental; the identity is only expected when Delta = 1.
    """
    data = modular_function(g, mu)
    c = data.c_mu
    budget = settings.sample_budget if sample_budget is None else sample_budget
    eps = settings.tolerance if tol is None else tol
    gen = rng if rng is not None else make_rng()
    amb = g.ambient
    spread = 2 if window is None else min(2, window.M)
    z_boundary = 1j * beta
    report = KmsReport(beta=beta, boundary_holds=True, continuation_holds=True, pairs=0, exact=True)
    for _ in range(budget):
        f = random_element(amb, gen, spread=spread)
        h = random_element(amb, gen, spread=spread)
        lhs = tau_functional(f * evolve(h, c, z_boundary), mu)
        rhs = tau_functional(h * f, mu)
        report.pairs += 1
        report.exact = report.exact and is_exact(lhs) and is_exact(rhs)
        report.max_defect = max(report.max_defect, defect(lhs, rhs))
        if report.boundary_holds and not close(lhs, rhs, eps):
            report.boundary_holds = False
            report.witness = [repr(f), repr(h)]
            report.sample = {"lhs": lhs, "rhs": rhs}

        t = random_time(gen)
        interior = tau_functional(f * evolve(h, c, t), mu)
        continued = kms_function(f, h, c, mu, t + z_boundary)
        target = tau_functional(evolve(h, c, t) * f, mu)
        if not close(kms_function(f, h, c, mu, t), interior, eps) or not close(continued, target, eps):
            if report.continuation_holds:
                logger.debug("KMS continuation mismatch at t=%s: %s vs %s", t, continued, target)
            report.continuation_holds = False
    if beta != -1 and not data.measure.is_uniform():
        logger.info("KMS check at beta=%s on non-unimodular data is experimental", beta)
    return report


def check_tau_positive(
    g: DiscreteGroupoid,
    mu: UnitMeasure,
    sample_budget: int | None = None,
    *,
    rng: np.random.Generator | None = None,
    tol: float | None = None,
) -> tuple[bool, Scalar]:
    """tau(f* * f) >= 0 on random f; returns the verdict and the smallest value seen."""
    budget = settings.sample_budget if sample_budget is None else sample_budget
    gen = rng if rng is not None else make_rng()
    smallest: Scalar | None = None
    for _ in range(budget):
        f = random_element(g.ambient, gen)
        value = tau_functional(f.star() * f, mu)
        real = value.real if isinstance(value, complex) else value
        if smallest is None or real < smallest:
            smallest = real
    lowest = 0 if smallest is None else smallest
    return lowest >= -(settings.tolerance if tol is None else tol), lowest
