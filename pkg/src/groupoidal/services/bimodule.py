"""
The (C*(G), C*(H))-bimodule on C_c(G) for H = ker c, and the operator D of a cocycle.

Module elements share the representation of algebra elements (finitely supported
functions on G). The H-valued and G-valued inner products are evaluated from their
defining sums with an explicit choice of auxiliary morphism z, so the independence of
that choice is itself checkable.
"""

from __future__ import annotations

import cmath
import logging
import math
from collections import defaultdict
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from groupoidal.core.constants import TransformKind
from groupoidal.core.errors import (
    CocycleError,
    ParentMismatchError,
    PreconditionError,
)
from groupoidal.core.scalars import Scalar, close, is_exact
from groupoidal.core.settings import settings
from groupoidal.services.cocycles import ClassKey, Cocycle, DegreeCocycle, evolve
from groupoidal.services.convolution import AlgebraElement, convolve, fiber_basis
from groupoidal.services.groupoids.base import DiscreteGroupoid, Morphism, Window

logger = logging.getLogger(__name__)

ModuleElement = AlgebraElement

ZChooser = Callable[[Morphism], Morphism | None]


def _check_pair(phi: ModuleElement, psi: ModuleElement, c: Cocycle | None = None) -> DiscreteGroupoid:
    if phi.parent != psi.parent:
        raise ParentMismatchError("module elements belong to different groupoids")
    if c is not None and c.groupoid.ambient != phi.parent:
        raise ParentMismatchError("cocycle is defined on a different groupoid")
    return phi.parent


# -------------------------------------------------------------------------
# Module actions
# -------------------------------------------------------------------------


def act_left(g: AlgebraElement, phi: ModuleElement) -> ModuleElement:
    """(g.Phi)(z) = sum_xi g(xi) Phi(xi^-1 z); with Z = G this is convolution."""
    return convolve(g, phi)


def act_right(phi: ModuleElement, h: AlgebraElement, c: Cocycle) -> ModuleElement:
    """(Phi.h)(z) = sum_chi Phi(z chi) h(chi^-1) for h supported in ker c."""
    _check_pair(phi, h, c)
    outside = [a for a in h if not c.vanishes_at(a)]
    if outside:
        raise PreconditionError(f"right action needs h supported in ker c; {outside[0]} is not")
    return convolve(phi, h)


# -------------------------------------------------------------------------
# Inner products
# -------------------------------------------------------------------------


def _h_candidates(phi: ModuleElement, psi: ModuleElement, c: Cocycle) -> list[Morphism]:
    grp = phi.parent
    by_range: dict[int, list[Morphism]] = defaultdict(list)
    for zeta in psi.support:
        by_range[grp.r(zeta)].append(zeta)
    found: set[Morphism] = set()
    for w in phi.support:
        w_inv = grp.invert(w)
        for zeta in by_range[grp.r(w)]:
            chi = grp.compose(w_inv, zeta)
            if chi is not None and c.vanishes_at(chi):
                found.add(chi)
    return sorted(found)


def _h_value(phi: ModuleElement, psi: ModuleElement, chi: Morphism, z: Morphism) -> Scalar:
    """sum over xi with r(xi) = r(z) of conj Phi(xi^-1 z) Psi(xi^-1 z chi)."""
    grp = phi.parent
    total: Scalar = 0
    for w in phi.support:
        if grp.d(w) != grp.d(z):
            continue
        xi = grp.compose(z, grp.invert(w))
        assert xi is not None
        arg = grp.compose(grp.invert(xi), z)
        assert arg is not None
        target = grp.compose(arg, chi)
        if target is None:
            continue
        total += phi[arg].conjugate() * psi[target]
    return total


def inner_product_h(
    phi: ModuleElement,
    psi: ModuleElement,
    c: Cocycle,
    *,
    choose: ZChooser | None = None,
) -> AlgebraElement:
    """
    <Phi, Psi>_H(chi) for chi in ker c, using the morphism z = choose(chi) with d(z) = r(chi).

    The default choice is the unit at r(chi). A chooser returning None marks an empty class:
    the value is 0 and a warning is logged, or PreconditionError is raised when
    ``settings.strict_empty_classes`` is set.
    """
    grp = _check_pair(phi, psi, c)
    chooser = choose or (lambda chi: grp.unit(grp.r(chi)))
    values: dict[Morphism, Scalar] = {}
    for chi in _h_candidates(phi, psi, c):
        z = chooser(chi)
        if z is None:
            if settings.strict_empty_classes:
                raise PreconditionError(f"no admissible z for {chi}")
            logger.warning("empty class at %s: inner product value set to 0", chi)
            continue
        if grp.d(z) != grp.r(chi):
            raise PreconditionError(f"chosen z={z} does not satisfy d(z) = r({chi})")
        values[chi] = _h_value(phi, psi, chi, z)
    return AlgebraElement(grp, values, checked=True)


@dataclass(frozen=True)
class ChoiceIndependence:
    independent: bool
    checked: int
    witness: list[str] = field(default_factory=list)


def check_choice_independence(
    phi: ModuleElement,
    psi: ModuleElement,
    c: Cocycle,
    window: Window | None = None,
    tol: float | None = None,
) -> ChoiceIndependence:
    """Evaluate <Phi, Psi>_H(chi) with every admissible z in the window and compare."""
    grp = _check_pair(phi, psi, c)
    eps = settings.tolerance if tol is None else tol
    win = None if grp.is_finite else (window or Window(settings.default_window))
    checked = 0
    for chi in _h_candidates(phi, psi, c):
        reference = _h_value(phi, psi, chi, grp.unit(grp.r(chi)))
        for z in grp.source_fiber(grp.r(chi), win):
            checked += 1
            value = _h_value(phi, psi, chi, z)
            if not close(value, reference, eps):
                return ChoiceIndependence(False, checked, [str(chi), str(z)])
    return ChoiceIndependence(True, checked)


def _require_vanishing(c: Cocycle, morphs: list[Morphism]) -> None:
    for a in morphs:
        if not c.vanishes_at(a):
            raise PreconditionError(
                f"G-valued inner product needs H to act transitively (c = 0); c({a}) = {c.value(a)}"
            )


def inner_product_g(
    phi: ModuleElement,
    psi: ModuleElement,
    c: Cocycle,
    window: Window | None = None,
) -> AlgebraElement:
    """
    <Phi, Psi>_G(eta) = sum over w with r(w) = d(eta) of Phi(eta w) conj Psi(w).

    Only defined when ker c acts transitively on the class fibers; here that means c
    vanishes on every morphism in play (the supports and the windowed morphism set).
    """
    grp = _check_pair(phi, psi, c)
    win = None if grp.is_finite else (window or Window(settings.default_window))
    _require_vanishing(c, sorted(phi.support | psi.support))
    _require_vanishing(c, grp.morphisms(win))

    by_range: dict[int, list[Morphism]] = defaultdict(list)
    for w in psi.support:
        by_range[grp.r(w)].append(w)
    etas: set[Morphism] = set()
    for xi in phi.support:
        for zeta in psi.support:
            if grp.d(xi) == grp.d(zeta):
                eta = grp.compose(xi, grp.invert(zeta))
                if eta is not None:
                    etas.add(eta)
    values: dict[Morphism, Scalar] = {}
    for eta in sorted(etas):
        total: Scalar = 0
        for w in by_range[grp.d(eta)]:
            ew = grp.compose(eta, w)
            if ew is not None:
                total += phi[ew] * psi[w].conjugate()
        values[eta] = total
    return AlgebraElement(grp, values, checked=True)


# -------------------------------------------------------------------------
# The operator D and its transforms
# -------------------------------------------------------------------------


def symbol(kind: TransformKind | str, v: Scalar) -> Scalar:
    """Pointwise symbol of a transform of D at cocycle value v."""
    kind = TransformKind(kind)
    if kind is TransformKind.RESOLVENT_SQUARED:
        if is_exact(v):
            return Fraction(1) / (1 + v * v)
        return 1.0 / (1.0 + float(v) ** 2)
    if v == 0:
        return {TransformKind.RESOLVENT: 1, TransformKind.BOUNDED: 0, TransformKind.CAYLEY: -1}[kind]
    x = float(v)
    if kind is TransformKind.RESOLVENT:
        return 1.0 / math.sqrt(1.0 + x * x)
    if kind is TransformKind.BOUNDED:
        return x / math.sqrt(1.0 + x * x)
    return (x - 1j) / (x + 1j)


@dataclass(frozen=True)
class OperatorD:
    """(D Phi)(a) = c(a) Phi(a), a C_c(H)-linear derivation of C_c(G)."""

    cocycle: Cocycle

    @property
    def groupoid(self) -> DiscreteGroupoid:
        return self.cocycle.groupoid.ambient

    def apply(self, phi: ModuleElement) -> ModuleElement:
        if phi.parent != self.groupoid:
            raise ParentMismatchError("operator and element live on different groupoids")
        return phi.pointwise(self.cocycle.value)

    def __call__(self, phi: ModuleElement) -> ModuleElement:
        return self.apply(phi)

    def transform(self, phi: ModuleElement, kind: TransformKind | str) -> ModuleElement:
        if phi.parent != self.groupoid:
            raise ParentMismatchError("operator and element live on different groupoids")
        return phi.pointwise(lambda a: symbol(kind, self.cocycle.value(a)))

    def commutator(self, f: AlgebraElement, phi: ModuleElement) -> ModuleElement:
        """[D, f] Phi = D(f Phi) - f (D Phi)."""
        return self.apply(convolve(f, phi)) - convolve(f, self.apply(phi))

    def matrix(self, u: int, window: Window | None) -> np.ndarray:
        """Diagonal matrix of D on the truncated d-fiber at u."""
        basis = fiber_basis(self.groupoid, u, window)
        values = [self.cocycle.value(b) for b in basis]
        if all(isinstance(v, int) for v in values):
            return np.diag(np.array(values, dtype=np.int64))
        return np.diag(np.array([float(v) for v in values], dtype=float))


def apply_D(d: OperatorD, phi: ModuleElement) -> ModuleElement:
    return d.apply(phi)


def transform_D(d: OperatorD, phi: ModuleElement, kind: TransformKind | str) -> ModuleElement:
    return d.transform(phi, kind)


def operator_matrix(d: OperatorD, u: int, window: Window | None) -> np.ndarray:
    return d.matrix(u, window)


def commutator(d: OperatorD, f: AlgebraElement, phi: ModuleElement) -> ModuleElement:
    return d.commutator(f, phi)


# -------------------------------------------------------------------------
# Kernels on G x| G/H
# -------------------------------------------------------------------------


@dataclass(frozen=True)
class CompactApproximant:
    """
    A finitely supported kernel k(xi, [eta]) on G x| G/H.

    It acts on module elements by (k Psi)(xi zeta) = sum k(xi, [zeta]) Psi(zeta). Classes
    are (unit, cocycle key) pairs; ``representatives`` holds one morphism per class.
    """

    cocycle: Cocycle
    entries: Mapping[tuple[Morphism, ClassKey], Scalar]
    representatives: Mapping[ClassKey, Morphism]

    @property
    def groupoid(self) -> DiscreteGroupoid:
        return self.cocycle.groupoid.ambient

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.entries.values())

    def apply(self, psi: ModuleElement) -> ModuleElement:
        grp = self.groupoid
        if psi.parent != grp:
            raise ParentMismatchError("kernel and element live on different groupoids")
        by_class: dict[ClassKey, list[tuple[Morphism, Scalar]]] = defaultdict(list)
        for (xi, cls), value in self.entries.items():
            by_class[cls].append((xi, value))
        acc: dict[Morphism, Scalar] = {}
        for zeta, pv in psi.items():
            for xi, kv in by_class.get(self.cocycle.class_of(zeta), ()):
                eta = grp.compose(xi, zeta)
                if eta is None:
                    continue
                term = kv * pv
                acc[eta] = acc[eta] + term if eta in acc else term
        return AlgebraElement(grp, acc, checked=True)

    def __sub__(self, other: CompactApproximant) -> CompactApproximant:
        if other.cocycle is not self.cocycle:
            raise ParentMismatchError("kernels for different cocycles")
        merged: dict[tuple[Morphism, ClassKey], Scalar] = dict(self.entries)
        for key, value in other.entries.items():
            merged[key] = merged.get(key, 0) - value
        reps = {**other.representatives, **self.representatives}
        return CompactApproximant(
            cocycle=self.cocycle,
            entries={k: v for k, v in merged.items() if v != 0},
            representatives=reps,
        )

    def i_norm(self) -> Scalar:
        """max over classes of the fiberwise l1 sums, for both range ([xi eta]) and source ([eta])."""
        grp = self.groupoid
        by_source: dict[ClassKey, Scalar] = defaultdict(int)
        by_target: dict[ClassKey, Scalar] = defaultdict(int)
        for (xi, cls), value in self.entries.items():
            size = abs(value)
            by_source[cls] += size
            moved = grp.compose(xi, self.representatives[cls])
            assert moved is not None
            by_target[self.cocycle.class_of(moved)] += size
        return max(max(by_source.values(), default=0), max(by_target.values(), default=0))


def _class_window(c: Cocycle, bound: int, window: Window | None) -> Window | None:
    grp = c.groupoid
    if grp.is_finite:
        return None
    if window is not None:
        return window
    if isinstance(c, DegreeCocycle):
        return Window(bound)
    return Window(max(bound, settings.default_window))


def _representatives(
    c: Cocycle, units: set[int], keep: Callable[[Morphism], bool], window: Window | None
) -> dict[int, dict[ClassKey, Morphism]]:
    grp = c.groupoid
    reps: dict[int, dict[ClassKey, Morphism]] = {}
    for u in sorted(units):
        found: dict[ClassKey, Morphism] = {}
        for a in grp.range_fiber(u, window):
            if keep(a):
                found.setdefault(c.class_of(a), a)
        reps[u] = found
    return reps


def cutoff_approximant(
    f: AlgebraElement, d: OperatorD, m: int, window: Window | None = None
) -> CompactApproximant:
    """k_f^m(xi, [eta]) = (1 + c(eta)^2)^-1 f(xi) on classes with |c| <= m, zero beyond."""
    if m < 0:
        raise PreconditionError("cutoff level m must be >= 0")
    c = d.cocycle
    grp = d.groupoid
    if f.parent != grp:
        raise ParentMismatchError("element and operator live on different groupoids")
    win = _class_window(c, m, window)
    reps = _representatives(
        c, {grp.d(xi) for xi in f.support}, lambda a: abs(c.value(a)) <= m, win
    )
    entries: dict[tuple[Morphism, ClassKey], Scalar] = {}
    representatives: dict[ClassKey, Morphism] = {}
    for xi, value in f.items():
        for cls, rep in reps[grp.d(xi)].items():
            entries[(xi, cls)] = symbol(TransformKind.RESOLVENT_SQUARED, c.value(rep)) * value
            representatives[cls] = rep
    logger.debug("cutoff m=%d: %d kernel entries", m, len(entries))
    return CompactApproximant(cocycle=c, entries=entries, representatives=representatives)


# -------------------------------------------------------------------------
# Spectral subspaces of an integral cocycle
# -------------------------------------------------------------------------


def _require_integral(c: Cocycle) -> None:
    if not c.integral:
        raise CocycleError(f"{c.kind} cocycle is not integral; spectral projections need Z values")


def spectral_projection_rho(k: int, phi: ModuleElement, c: Cocycle) -> ModuleElement:
    """rho_k: restriction to c^-1(k)."""
    _require_integral(c)
    return phi.restrict(lambda a: c.value(a) == k)


def rho_by_quadrature(
    k: int, phi: ModuleElement, c: Cocycle, points: int | None = None
) -> ModuleElement:
    """(1/N) sum_j e^{-ik t_j} u_{t_j} Phi with t_j = 2 pi j / N; equals rho_k while |c - k| < N."""
    n = settings.quadrature_points if points is None else points
    total = AlgebraElement.zero(phi.parent)
    for j in range(n):
        t = 2 * math.pi * j / n
        total = total + evolve(phi, c, t).scale(cmath.exp(-1j * k * t) / n)
    return total


def ssa_witness(
    f: AlgebraElement, k: int, c: Cocycle, window: Window | None = None
) -> CompactApproximant:
    """The kernel f_k(xi, [eta]) = f(xi) 1[c(eta) = k], whose action is f * rho_k."""
    _require_integral(c)
    grp = c.groupoid.ambient
    if f.parent != grp:
        raise ParentMismatchError("element and cocycle live on different groupoids")
    win = _class_window(c, abs(k), window)
    reps = _representatives(c, {grp.d(xi) for xi in f.support}, lambda a: c.value(a) == k, win)
    entries: dict[tuple[Morphism, ClassKey], Scalar] = {}
    representatives: dict[ClassKey, Morphism] = {}
    for xi, value in f.items():
        for cls, rep in reps[grp.d(xi)].items():
            entries[(xi, cls)] = value
            representatives[cls] = rep
    return CompactApproximant(cocycle=c, entries=entries, representatives=representatives)
