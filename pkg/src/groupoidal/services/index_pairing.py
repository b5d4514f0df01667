"""
The index map Ind_mu on unitaries over C_c(G), computed two independent ways.

Compression: per unit x, the tau-weighted Fredholm index of P u P on the truncated positive
fiber {a : d(a) = x, 0 <= c(a) <= M}, with P the projection onto c >= 0.

Spectral flow: per unit x, the signed count of eigenvalue crossings through zero along
D_s = (1 - s) D + s u D u* on the truncated fiber {|c| <= M}, weighted by mu(x).

Orientation: the degree-one shift on X x| Z with a probability measure has index -1.
"""

from __future__ import annotations

import cmath
import logging
from collections import defaultdict
from collections.abc import Sequence
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg

from groupoidal.core.constants import CheckStatus, IndexMethod
from groupoidal.core.errors import (
    CocycleError,
    NotUnitaryError,
    ParentMismatchError,
    PreconditionError,
    StructuralError,
    UnsupportedModelError,
    WindowError,
)
from groupoidal.core.scalars import Scalar, close
from groupoidal.core.settings import settings
from groupoidal.services.cocycles import Cocycle, DegreeCocycle, kernel_subgroupoid
from groupoidal.services.convolution import AlgebraElement
from groupoidal.services.groupoids.base import DiscreteGroupoid, Morphism, Trans, Window
from groupoidal.services.groupoids.transformation import TransformationGroupoid
from groupoidal.services.measures import UnitMeasure, require_unimodular

logger = logging.getLogger(__name__)


# -------------------------------------------------------------------------
# Unitaries over C_c(G)
# -------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class UnitaryElement:
    """A square matrix over C_c(G); unitarity is checked on demand, not at construction."""

    parent: DiscreteGroupoid
    entries: tuple[tuple[AlgebraElement, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.entries)
        if n == 0 or any(len(row) != n for row in self.entries):
            raise StructuralError("a unitary needs a non-empty square matrix of entries")
        for row in self.entries:
            for f in row:
                if f.parent != self.parent.ambient:
                    raise ParentMismatchError("matrix entries live on different groupoids")

    @classmethod
    def from_rows(cls, g: DiscreteGroupoid, rows: Sequence[Sequence[AlgebraElement]]) -> UnitaryElement:
        return cls(g.ambient, tuple(tuple(row) for row in rows))

    @classmethod
    def identity(cls, g: DiscreteGroupoid, n: int = 1) -> UnitaryElement:
        one, zero = AlgebraElement.identity(g), AlgebraElement.zero(g)
        return cls.from_rows(g, [[one if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def shift(cls, g: DiscreteGroupoid, power: int = 1) -> UnitaryElement:
        """sum over x of delta_(x, power): the degree-``power`` shift of a transformation groupoid."""
        amb = g.ambient
        if not isinstance(amb, TransformationGroupoid):
            raise UnsupportedModelError("the shift unitary is defined on transformation groupoids")
        element = AlgebraElement(amb, {Trans(x, power): 1 for x in range(amb.unit_count)})
        return cls.from_rows(amb, [[element]])

    @classmethod
    def scalar_phase(cls, g: DiscreteGroupoid, theta: float, n: int = 1) -> UnitaryElement:
        phase = cmath.exp(1j * theta)
        return cls.identity(g, n).scaled(phase)

    @property
    def size(self) -> int:
        return len(self.entries)

    def scaled(self, s: Scalar) -> UnitaryElement:
        return UnitaryElement(self.parent, tuple(tuple(f.scale(s) for f in row) for row in self.entries))

    def __matmul__(self, other: UnitaryElement) -> UnitaryElement:
        if other.parent != self.parent or other.size != self.size:
            raise ParentMismatchError("unitaries of different groupoids or sizes")
        n = self.size
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = AlgebraElement.zero(self.parent)
                for k in range(n):
                    acc = acc + self.entries[i][k] * other.entries[k][j]
                row.append(acc)
            rows.append(row)
        return UnitaryElement.from_rows(self.parent, rows)

    def adjoint(self) -> UnitaryElement:
        n = self.size
        return UnitaryElement.from_rows(
            self.parent, [[self.entries[j][i].star() for j in range(n)] for i in range(n)]
        )

    def direct_sum(self, other: UnitaryElement) -> UnitaryElement:
        if other.parent != self.parent:
            raise ParentMismatchError("unitaries of different groupoids")
        zero = AlgebraElement.zero(self.parent)
        n, m = self.size, other.size
        rows = [list(row) + [zero] * m for row in self.entries]
        rows += [[zero] * n + list(row) for row in other.entries]
        return UnitaryElement.from_rows(self.parent, rows)

    def conjugate_by(self, w: UnitaryElement) -> UnitaryElement:
        return w @ self @ w.adjoint()

    def is_unitary(self, tol: float | None = None) -> bool:
        eps = settings.unitary_tolerance if tol is None else tol
        one = UnitaryElement.identity(self.parent, self.size)
        star = self.adjoint()
        for product in (star @ self, self @ star):
            for row, expected_row in zip(product.entries, one.entries):
                for got, expected in zip(row, expected_row):
                    if got.is_exact() and got != expected:
                        return False
                    if not got.is_close(expected, eps):
                        return False
        return True

    def support(self) -> set[Morphism]:
        return {a for row in self.entries for f in row for a in f.support}

    def cocycle_spread(self, c: Cocycle) -> int:
        """max |c| over the supports of the entries (c integral)."""
        return max((abs(int(c.value(a))) for a in self.support()), default=0)

    def __repr__(self) -> str:
        return f"UnitaryElement(size={self.size}, entries={self.entries!r})"


def positive_spectral_projection(c: Cocycle, phi: AlgebraElement) -> AlgebraElement:
    """(P Phi)(a) = Phi(a) when c(a) >= 0, else 0."""
    return phi.restrict(lambda a: c.value(a) >= 0)


# -------------------------------------------------------------------------
# Reports
# -------------------------------------------------------------------------


@dataclass(frozen=True)
class IndexReport:
    value: Scalar | None
    window: Window
    stable: bool
    method: IndexMethod
    status: CheckStatus = CheckStatus.PASS
    per_unit: dict[int, dict[str, int]] = field(default_factory=dict)
    smallest_retained: float | None = None
    largest_discarded: float | None = None
    steps: int | None = None
    cross_check: Scalar | None = None
    agrees: bool | None = None
    homomorphism: bool | None = None
    detail: str = ""


@dataclass(frozen=True)
class _RankDecision:
    rank: int
    clear: bool
    smallest_retained: float | None
    largest_discarded: float | None


def _rank(mat: np.ndarray) -> _RankDecision:
    if mat.size == 0:
        return _RankDecision(0, True, None, None)
    sv = scipy.linalg.svdvals(mat)
    thr, gap = settings.rank_threshold, settings.rank_gap
    retained, discarded = sv[sv > thr], sv[sv <= thr]
    return _RankDecision(
        rank=int(retained.size),
        clear=not bool(np.any((sv > thr) & (sv < gap))),
        smallest_retained=float(retained.min()) if retained.size else None,
        largest_discarded=float(discarded.max()) if discarded.size else None,
    )


# -------------------------------------------------------------------------
# Truncated matrices
# -------------------------------------------------------------------------


def _check_inputs(u: UnitaryElement, c: Cocycle, mu: UnitMeasure, window: Window) -> int:
    grp = u.parent
    if not u.is_unitary():
        raise NotUnitaryError("u* u and u u* are not the identity amplification")
    if c.groupoid.ambient != grp:
        raise ParentMismatchError("cocycle is defined on a different groupoid")
    if not c.integral:
        raise CocycleError(f"{c.kind} cocycle is not integral; the index pairing needs Z values")
    if not grp.is_finite and not isinstance(c, DegreeCocycle):
        raise UnsupportedModelError("infinite models are truncated by degree; use the degree cocycle")
    if len(mu) != grp.unit_count:
        raise StructuralError(f"measure has {len(mu)} weights for {grp.unit_count} units")
    spread = u.cocycle_spread(c)
    if not grp.is_finite and window.M < spread + 2:
        raise WindowError(f"window M={window.M} needs to be at least {spread + 2}")
    return spread


def _fiber(c: Cocycle, x: int, lo: int, hi: int) -> list[Morphism]:
    grp = c.groupoid.ambient
    win = None if grp.is_finite else Window(max(abs(lo), abs(hi)))
    return [a for a in grp.source_fiber(x, win) if lo <= c.value(a) <= hi]


def _amplified(
    rows_of: Sequence[Sequence[AlgebraElement]], cols: list[Morphism], rows: list[Morphism]
) -> np.ndarray:
    """Matrix of the amplified left convolution from span(cols)^n into span(rows)^n, projected."""
    n = len(rows_of)
    nr, nc = len(rows), len(cols)
    mat = np.zeros((n * nr, n * nc), dtype=complex)
    if not nr or not nc:
        return mat
    grp = rows_of[0][0].parent
    row_index = {b: k for k, b in enumerate(rows)}
    for i in range(n):
        for j in range(n):
            by_source: dict[int, list[tuple[Morphism, Scalar]]] = defaultdict(list)
            for eta, value in rows_of[i][j].items():
                by_source[grp.d(eta)].append((eta, value))
            for k, xi in enumerate(cols):
                for eta, value in by_source.get(grp.r(xi), ()):
                    target = row_index.get(grp.compose(eta, xi))  # type: ignore[arg-type]
                    if target is not None:
                        mat[i * nr + target, j * nc + k] += complex(value)
    return mat


# -------------------------------------------------------------------------
# Compression
# -------------------------------------------------------------------------


def _compression_at(u: UnitaryElement, c: Cocycle, mu: UnitMeasure, m: int, spread: int) -> IndexReport:
    star = u.adjoint()
    value: Scalar = 0
    per_unit: dict[int, dict[str, int]] = {}
    clear = True
    retained: list[float] = []
    discarded: list[float] = []
    for x in range(u.parent.unit_count):
        domain = _fiber(c, x, 0, m)
        codomain = _fiber(c, x, 0, m + spread)
        dim = u.size * len(domain)
        forward = _rank(_amplified(u.entries, domain, codomain))
        backward = _rank(_amplified(star.entries, domain, codomain))
        ker, coker = dim - forward.rank, dim - backward.rank
        per_unit[x] = {"dim": dim, "ker": ker, "coker": coker}
        value += mu.weight(x) * (ker - coker)
        for decision in (forward, backward):
            clear = clear and decision.clear
            if decision.smallest_retained is not None:
                retained.append(decision.smallest_retained)
            if decision.largest_discarded is not None:
                discarded.append(decision.largest_discarded)
        logger.debug("compression unit %d at M=%d: ker=%d coker=%d", x, m, ker, coker)
    return IndexReport(
        value=value,
        window=Window(m),
        stable=True,
        method=IndexMethod.COMPRESSION,
        status=CheckStatus.PASS if clear else CheckStatus.INDETERMINATE,
        per_unit=per_unit,
        smallest_retained=min(retained, default=None),
        largest_discarded=max(discarded, default=None),
        detail="" if clear else "singular value inside the rank gap",
    )


def tau_index_compression(
    u: UnitaryElement, c: Cocycle, mu: UnitMeasure, window: Window | None = None
) -> IndexReport:
    """sum over x of mu(x) (dim ker - dim coker) of P u P on the truncated positive fiber at x."""
    win = window or Window(settings.default_window)
    spread = _check_inputs(u, c, mu, win)
    report = _compression_at(u, c, mu, win.M, spread)
    if u.parent.is_finite:
        return report
    again = _compression_at(u, c, mu, win.M + 1, spread)
    return replace(report, stable=again.value == report.value)


# -------------------------------------------------------------------------
# Spectral flow
# -------------------------------------------------------------------------


def _path_endpoints(u: UnitaryElement, c: Cocycle, x: int, m: int, spread: int) -> tuple[np.ndarray, np.ndarray]:
    """D and the compression of u D u* to the fiber {|c| <= m}, amplified."""
    basis = _fiber(c, x, -m, m)
    wide = _fiber(c, x, -m - spread, m + spread)
    d_small = np.diag(np.tile(np.array([float(c.value(a)) for a in basis]), u.size))
    d_wide = np.diag(np.tile(np.array([float(c.value(a)) for a in wide]), u.size))
    down = _amplified(u.adjoint().entries, basis, wide)
    up = _amplified(u.entries, wide, basis)
    conjugated = up @ d_wide @ down
    return d_small.astype(complex), (conjugated + conjugated.conj().T) / 2


@dataclass(frozen=True)
class _Crossings:
    up: int
    down: int
    steps: int

    @property
    def flow(self) -> int:
        return self.up - self.down


def _count_crossings(d0: np.ndarray, d1: np.ndarray, steps: int) -> _Crossings | None:
    """
    Follow each eigenvalue branch of (1 - s) d0 + s d1 and count its sign changes.

    eigvalsh returns ascending eigenvalues, so index i is the i-th branch, continuous in s.
    A branch rising from below -rank_threshold counts +1, a falling one -1. When distinct
    branches cross zero inside one step the step is halved; None once the budget is spent.
    """
    thr, gap = settings.rank_threshold, settings.rank_gap
    n = steps
    while True:
        prev = scipy.linalg.eigvalsh(d0)
        up = down = 0
        ambiguous = False
        for j in range(1, n + 1):
            s = j / n
            cur = scipy.linalg.eigvalsh((1 - s) * d0 + s * d1)
            rising = (prev < -thr) & (cur >= -thr)
            falling = (prev >= -thr) & (cur < -thr)
            crossing = np.nonzero(rising | falling)[0]
            if crossing.size > 1 and float(np.ptp(prev[crossing])) > gap:
                ambiguous = True
                break
            up += int(rising.sum())
            down += int(falling.sum())
            prev = cur
        if not ambiguous:
            return _Crossings(up=up, down=down, steps=n)
        if n * 2 > settings.spectral_flow_max_steps:
            return None
        n *= 2
        logger.debug("spectral flow: distinct branches crossed in one step, refining to %d", n)


def _flow_at(u: UnitaryElement, c: Cocycle, mu: UnitMeasure, m: int, spread: int, steps: int) -> IndexReport:
    value: Scalar = 0
    per_unit: dict[int, dict[str, int]] = {}
    used = steps
    for x in range(u.parent.unit_count):
        d0, d1 = _path_endpoints(u, c, x, m, spread)
        if d0.size == 0:
            per_unit[x] = {"flow": 0, "up": 0, "down": 0}
            continue
        crossings = _count_crossings(d0, d1, steps)
        if crossings is None:
            return IndexReport(
                value=None,
                window=Window(m),
                stable=False,
                method=IndexMethod.SPECTRAL_FLOW,
                status=CheckStatus.INDETERMINATE,
                steps=settings.spectral_flow_max_steps,
                detail=f"eigenvalue branches ambiguous at unit {x} after the step limit",
            )
        used = max(used, crossings.steps)
        per_unit[x] = {"flow": crossings.flow, "up": crossings.up, "down": crossings.down}
        value += mu.weight(x) * crossings.flow
    return IndexReport(
        value=value,
        window=Window(m),
        stable=True,
        method=IndexMethod.SPECTRAL_FLOW,
        per_unit=per_unit,
        steps=used,
    )


def spectral_flow(
    u: UnitaryElement,
    c: Cocycle,
    mu: UnitMeasure,
    window: Window | None = None,
    steps: int | None = None,
) -> IndexReport:
    win = window or Window(settings.default_window)
    n = settings.spectral_flow_steps if steps is None else steps
    if n < 2:
        raise PreconditionError("spectral flow needs at least 2 steps")
    spread = _check_inputs(u, c, mu, win)
    report = _flow_at(u, c, mu, win.M, spread, n)
    if u.parent.is_finite or report.value is None:
        return report
    again = _flow_at(u, c, mu, win.M + 1, spread, n)
    return replace(report, stable=again.value == report.value)


# -------------------------------------------------------------------------
# Ind_mu
# -------------------------------------------------------------------------


def index_mu(
    u: UnitaryElement,
    c: Cocycle,
    mu: UnitMeasure,
    window: Window | None = None,
    *,
    partners: Sequence[UnitaryElement] = (),
    tol: float | None = None,
) -> IndexReport:
    """
    Compression value of Ind_mu(u), cross-checked by spectral flow.

    Rejected with NotUnimodularError when mu is not invariant on ker c (tau is then no trace
    on C*(ker c)). ``partners`` v are used to check Ind(u v) = Ind(u) + Ind(v).
    """
    win = window or Window(settings.default_window)
    eps = settings.tolerance if tol is None else tol
    require_unimodular(kernel_subgroupoid(u.parent, c, tol=eps, window=win), mu, win, tol=eps)
    compression = tau_index_compression(u, c, mu, win)
    flow = spectral_flow(u, c, mu, win)
    agrees = (
        compression.value is not None
        and flow.value is not None
        and close(compression.value, flow.value, eps)
    )
    homomorphism: bool | None = None
    if partners:
        homomorphism = True
        for v in partners:
            joint = tau_index_compression(u @ v, c, mu, win).value
            single = tau_index_compression(v, c, mu, win).value
            if not close(joint, compression.value + single, eps):  # type: ignore[arg-type, operator]
                homomorphism = False
                break
    status = compression.status
    if status is CheckStatus.PASS and flow.status is CheckStatus.INDETERMINATE:
        status = CheckStatus.INDETERMINATE
    if agrees is False and status is CheckStatus.PASS:
        logger.warning("index methods disagree: compression=%s flow=%s", compression.value, flow.value)
    return replace(
        compression,
        status=status,
        cross_check=flow.value,
        agrees=agrees,
        homomorphism=homomorphism,
        steps=flow.steps,
    )
