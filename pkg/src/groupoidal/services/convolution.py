"""The convolution *-algebra C_c(G) of a discrete groupoid, its norms and truncated regular representation."""

from __future__ import annotations

import logging
from collections import defaultdict
from collections.abc import Callable, Iterable, Iterator, Mapping
from dataclasses import dataclass
from numbers import Number

import numpy as np

from groupoidal.core.errors import InvalidMorphismError, ParentMismatchError, WindowError
from groupoidal.core.scalars import Scalar, close, is_exact
from groupoidal.core.settings import settings
from groupoidal.services.groupoids.base import DiscreteGroupoid, Morphism, Window

logger = logging.getLogger(__name__)


class AlgebraElement:
    """
    A finitely supported function on the morphisms of ``parent``.

    Stored entries are never exactly zero. Instances are treated as immutable: every
    operation returns a new element. ``f * g`` is convolution when both sides are
    elements and scalar multiplication when one side is a number.
    """

    __slots__ = ("parent", "_support")

    def __init__(
        self,
        parent: DiscreteGroupoid,
        support: Mapping[Morphism, Scalar] | Iterable[tuple[Morphism, Scalar]] = (),
        *,
        checked: bool = False,
    ) -> None:
        self.parent = parent.ambient
        items = support.items() if isinstance(support, Mapping) else support
        acc: dict[Morphism, Scalar] = {}
        for a, value in items:
            if not checked and not self.parent.is_valid(a):
                raise InvalidMorphismError(f"{a!s} is not a morphism of {self.parent!r}")
            acc[a] = acc[a] + value if a in acc else value
        self._support: dict[Morphism, Scalar] = {a: v for a, v in acc.items() if v != 0}

    # ---------------------------------------------------------------------
    # Constructors
    # ---------------------------------------------------------------------

    @classmethod
    def zero(cls, parent: DiscreteGroupoid) -> AlgebraElement:
        return cls(parent)

    @classmethod
    def delta(cls, parent: DiscreteGroupoid, a: Morphism, coeff: Scalar = 1) -> AlgebraElement:
        return cls(parent, {a: coeff})

    @classmethod
    def identity(cls, parent: DiscreteGroupoid) -> AlgebraElement:
        """Sum of the unit deltas: the identity of C_c(G) (the unit space is finite)."""
        return cls(parent, {e: 1 for e in parent.ambient.units()}, checked=True)

    # ---------------------------------------------------------------------
    # Mapping-like access
    # ---------------------------------------------------------------------

    def __getitem__(self, a: Morphism) -> Scalar:
        return self._support.get(a, 0)

    def __contains__(self, a: object) -> bool:
        return a in self._support

    def __iter__(self) -> Iterator[Morphism]:
        return iter(sorted(self._support))

    def __len__(self) -> int:
        return len(self._support)

    def items(self) -> list[tuple[Morphism, Scalar]]:
        return sorted(self._support.items())

    @property
    def support(self) -> frozenset[Morphism]:
        return frozenset(self._support)

    def is_zero(self) -> bool:
        return not self._support

    def is_exact(self) -> bool:
        return all(is_exact(v) for v in self._support.values())

    def __repr__(self) -> str:
        terms = " + ".join(f"{v}*d{a}" for a, v in self.items()) or "0"
        return f"AlgebraElement({terms})"

    # ---------------------------------------------------------------------
    # Linear structure
    # ---------------------------------------------------------------------

    def _same_parent(self, other: AlgebraElement) -> None:
        if other.parent != self.parent:
            raise ParentMismatchError("elements belong to different groupoids")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return other.parent == self.parent and other._support == self._support

    __hash__ = None  # type: ignore[assignment]

    def __add__(self, other: AlgebraElement) -> AlgebraElement:
        self._same_parent(other)
        merged = dict(self._support)
        for a, v in other._support.items():
            merged[a] = merged[a] + v if a in merged else v
        return AlgebraElement(self.parent, merged, checked=True)

    def __neg__(self) -> AlgebraElement:
        return AlgebraElement(self.parent, {a: -v for a, v in self._support.items()}, checked=True)

    def __sub__(self, other: AlgebraElement) -> AlgebraElement:
        return self + (-other)

    def scale(self, s: Scalar) -> AlgebraElement:
        return AlgebraElement(self.parent, {a: s * v for a, v in self._support.items()}, checked=True)

    def __mul__(self, other: AlgebraElement | Scalar) -> AlgebraElement:
        if isinstance(other, AlgebraElement):
            return convolve(self, other)
        if isinstance(other, Number):
            return self.scale(other)  # type: ignore[arg-type]
        return NotImplemented

    def __rmul__(self, other: Scalar) -> AlgebraElement:
        if isinstance(other, Number):
            return self.scale(other)
        return NotImplemented

    def pointwise(self, fn: Callable[[Morphism], Scalar]) -> AlgebraElement:
        """Multiply each entry by fn(morphism)."""
        return AlgebraElement(
            self.parent, {a: fn(a) * v for a, v in self._support.items()}, checked=True
        )

    def restrict(self, keep: Callable[[Morphism], bool]) -> AlgebraElement:
        return AlgebraElement(
            self.parent, {a: v for a, v in self._support.items() if keep(a)}, checked=True
        )

    def star(self) -> AlgebraElement:
        return involute(self)

    def degree_spread(self) -> int:
        """max |degree| over the support (0 for the zero element)."""
        return max((abs(self.parent.degree(a)) for a in self._support), default=0)

    def is_close(self, other: AlgebraElement, tol: float | None = None) -> bool:
        self._same_parent(other)
        eps = settings.tolerance if tol is None else tol
        keys = set(self._support) | set(other._support)
        return all(close(self[a], other[a], eps) for a in keys)

    def max_defect(self, other: AlgebraElement) -> float:
        self._same_parent(other)
        keys = set(self._support) | set(other._support)
        return max((float(abs(complex(self[a]) - complex(other[a]))) for a in keys), default=0.0)


# -------------------------------------------------------------------------
# Product and involution
# -------------------------------------------------------------------------


def convolve(f: AlgebraElement, g: AlgebraElement) -> AlgebraElement:
    """(f*g)(eta) = sum over eta = xi zeta of f(xi) g(zeta); finite because both supports are."""
    if f.parent != g.parent:
        raise ParentMismatchError("cannot convolve elements of different groupoids")
    grp = f.parent
    by_range: dict[int, list[tuple[Morphism, Scalar]]] = defaultdict(list)
    for zeta, value in g._support.items():
        by_range[grp.r(zeta)].append((zeta, value))
    acc: dict[Morphism, Scalar] = {}
    for xi, fv in f._support.items():
        for zeta, gv in by_range.get(grp.d(xi), ()):
            eta = grp.compose(xi, zeta)
            if eta is None:
                raise InvalidMorphismError(f"composition {xi}*{zeta} is missing from the model")
            term = fv * gv
            acc[eta] = acc[eta] + term if eta in acc else term
    return AlgebraElement(grp, acc, checked=True)


def involute(f: AlgebraElement) -> AlgebraElement:
    """f*(xi) = conj f(xi^-1)."""
    grp = f.parent
    return AlgebraElement(
        grp, {grp.invert(a): v.conjugate() for a, v in f._support.items()}, checked=True
    )


# -------------------------------------------------------------------------
# Norms and the truncated regular representation
# -------------------------------------------------------------------------


@dataclass(frozen=True)
class NormReport:
    nu: Scalar
    nu_inv: Scalar
    i_norm: Scalar
    reduced_lower: float
    window_used: Window | None


def _require_window(f: AlgebraElement, window: Window | None) -> Window | None:
    if f.parent.is_finite:
        return window
    if window is None:
        raise WindowError("infinite groupoid: a Window is required")
    spread = f.degree_spread()
    if spread > window.M:
        raise WindowError(f"window M={window.M} is smaller than the support degree range {spread}")
    return window


def fiber_basis(grp: DiscreteGroupoid, u: int, window: Window | None) -> list[Morphism]:
    """Basis {xi : d(xi) = u, |degree(xi)| <= M} of the truncated l2 fiber at u."""
    return grp.source_fiber(u, None if grp.is_finite else window)


def truncated_regular_rep(f: AlgebraElement, u: int, window: Window | None) -> np.ndarray:
    """
    Matrix of left convolution by f on the truncated d-fiber at u.

    Entry [i, j] is f(b_i b_j^-1); products that leave the window are dropped.
    """
    w = _require_window(f, window)
    grp = f.parent
    basis = fiber_basis(grp, u, w)
    index = {b: i for i, b in enumerate(basis)}
    by_source: dict[int, list[tuple[Morphism, Scalar]]] = defaultdict(list)
    for xi, value in f._support.items():
        by_source[grp.d(xi)].append((xi, value))
    mat = np.zeros((len(basis), len(basis)), dtype=complex)
    for j, b in enumerate(basis):
        for xi, value in by_source.get(grp.r(b), ()):
            eta = grp.compose(xi, b)
            i = index.get(eta)  # type: ignore[arg-type]
            if i is not None:
                mat[i, j] += complex(value)
    logger.debug("regular rep at unit %d: dimension %d", u, len(basis))
    return mat


def _abs_sum(values: Iterable[Scalar]) -> Scalar:
    total: Scalar = 0
    for v in values:
        total += abs(v)
    return total


def norms(f: AlgebraElement, window: Window | None = None) -> NormReport:
    """nu, nu_inv and the I-norm exactly; a lower bound for the reduced norm from the truncation."""
    w = _require_window(f, window)
    grp = f.parent
    by_range: dict[int, list[Scalar]] = defaultdict(list)
    by_source: dict[int, list[Scalar]] = defaultdict(list)
    for a, value in f._support.items():
        by_range[grp.r(a)].append(value)
        by_source[grp.d(a)].append(value)
    nu = max((_abs_sum(vals) for vals in by_range.values()), default=0)
    nu_inv = max((_abs_sum(vals) for vals in by_source.values()), default=0)
    reduced = 0.0
    if not f.is_zero():
        for u in range(grp.unit_count):
            mat = truncated_regular_rep(f, u, w)
            if mat.size:
                reduced = max(reduced, float(np.linalg.norm(mat, 2)))
    return NormReport(
        nu=nu,
        nu_inv=nu_inv,
        i_norm=max(nu, nu_inv),
        reduced_lower=reduced,
        window_used=w,
    )


def i_norm(f: AlgebraElement) -> Scalar:
    """The I-norm alone; needs no window since it only reads the support."""
    grp = f.parent
    by_range: dict[int, Scalar] = defaultdict(int)
    by_source: dict[int, Scalar] = defaultdict(int)
    for a, value in f._support.items():
        by_range[grp.r(a)] += abs(value)
        by_source[grp.d(a)] += abs(value)
    return max(max(by_range.values(), default=0), max(by_source.values(), default=0))
