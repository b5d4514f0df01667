from __future__ import annotations

import cmath
import math

import numpy as np
import scipy.linalg

from groupoidal.core.constants import SuiteName, TransformKind
from groupoidal.core.scalars import Scalar, close
from groupoidal.core.settings import settings
from groupoidal.services.bimodule import (
    OperatorD,
    act_left,
    act_right,
    check_choice_independence,
    cutoff_approximant,
    inner_product_g,
    inner_product_h,
    operator_matrix,
    rho_by_quadrature,
    spectral_projection_rho,
    ssa_witness,
)
from groupoidal.services.cocycles import DegreeCocycle, KernelGroupoid, evolve, kernel_subgroupoid
from groupoidal.services.convolution import AlgebraElement, i_norm, truncated_regular_rep
from groupoidal.services.documents import Workbench
from groupoidal.services.groupoids.base import DiscreteGroupoid, Trans, Window
from groupoidal.services.groupoids.transformation import TransformationGroupoid
from groupoidal.services.sampling import random_degree, random_element, random_time
from groupoidal.services.suites.base import Outcome, check, failed, passed, verdict

SAMPLES = 100
CUTOFF_SAMPLES = 20
CUTOFF_LEVELS = 10
CHOICE_SAMPLES = 10


def _kernel(bench: Workbench) -> KernelGroupoid:
    return kernel_subgroupoid(bench.groupoid, bench.cocycle, tol=bench.tolerance, window=bench.window)


def _sample(bench: Workbench, rng: np.random.Generator, domain: DiscreteGroupoid | None = None) -> AlgebraElement:
    return random_element(bench.groupoid if domain is None else domain, rng, spread=min(2, bench.window.M))


def _whole_kernel(bench: Workbench) -> bool:
    return _kernel(bench).structure == "whole"


def _integral(bench: Workbench) -> bool:
    return bench.cocycle.integral


def _fourier_model(bench: Workbench) -> bool:
    g = bench.groupoid
    return isinstance(g, TransformationGroupoid) and g.unit_count == 1 and isinstance(bench.cocycle, DegreeCocycle)


def _not_above(value: Scalar, bound: Scalar, tol: float) -> bool:
    return value <= bound or close(value, bound, tol)


@check(SuiteName.BIMODULE, "left_action")
def left_action(bench: Workbench, rng: np.random.Generator) -> Outcome:
    one = AlgebraElement.identity(bench.groupoid)
    for _ in range(SAMPLES):
        f, g, phi = _sample(bench, rng), _sample(bench, rng), _sample(bench, rng)
        if not act_left(f * g, phi).is_close(act_left(f, act_left(g, phi)), bench.tolerance):
            return failed(f"(f*g).Phi != f.(g.Phi) for Phi={phi!r}")
        if act_left(one, phi) != phi:
            return failed(f"identity does not act trivially on {phi!r}")
    return passed(samples=SAMPLES)


@check(SuiteName.BIMODULE, "right_action")
def right_action(bench: Workbench, rng: np.random.Generator) -> Outcome:
    c, ker = bench.cocycle, _kernel(bench)
    units = AlgebraElement.identity(bench.groupoid)
    for _ in range(SAMPLES):
        g, phi, h = _sample(bench, rng), _sample(bench, rng), _sample(bench, rng, ker)
        lhs = act_right(act_left(g, phi), h, c)
        rhs = act_left(g, act_right(phi, h, c))
        if not lhs.is_close(rhs, bench.tolerance):
            return failed(f"(g.Phi).h != g.(Phi.h) for Phi={phi!r}, h={h!r}")
        if act_right(phi, units, c) != phi:
            return failed(f"unit sum of H does not act trivially on {phi!r}")
    return passed(samples=SAMPLES, kernel=ker.structure)


@check(SuiteName.BIMODULE, "inner_product_h")
def inner_product_h_laws(bench: Workbench, rng: np.random.Generator) -> Outcome:
    g, c, tol = bench.groupoid, bench.cocycle, bench.tolerance
    ker = _kernel(bench)
    for _ in range(SAMPLES // 2):
        phi, psi, h = _sample(bench, rng), _sample(bench, rng), _sample(bench, rng, ker)
        ip = inner_product_h(phi, psi, c)
        if not ip.star().is_close(inner_product_h(psi, phi, c), tol):
            return failed(f"<Phi,Psi>* != <Psi,Phi> for Phi={phi!r}, Psi={psi!r}")
        if not inner_product_h(phi, act_right(psi, h, c), c).is_close(ip * h, tol):
            return failed(f"<Phi,Psi.h> != <Phi,Psi>*h for h={h!r}")
        square = inner_product_h(phi, phi, c)
        window = None if g.is_finite else Window(max(bench.window.M, square.degree_spread()))
        for u in range(g.unit_count):
            mat = truncated_regular_rep(square, u, window)
            if mat.size and scipy.linalg.eigvalsh(mat).min() < -settings.psd_tolerance:
                return failed(f"<Phi,Phi>_H is not positive at unit {u} for Phi={phi!r}")
    a = _sample(bench, rng)
    for xi in sorted(a.support):
        delta = AlgebraElement.delta(g, xi)
        if inner_product_h(delta, delta, c) != AlgebraElement.delta(g, g.unit(g.d(xi))):
            return failed(f"<d_xi, d_xi>_H is not the unit at d(xi) for xi={xi}")
    for _ in range(CHOICE_SAMPLES):
        phi, psi = _sample(bench, rng), _sample(bench, rng)
        report = check_choice_independence(phi, psi, c, bench.window, tol)
        if not report.independent:
            return failed(f"value depends on the choice of z: {', '.join(report.witness)}")
    return passed(samples=SAMPLES // 2, choice_checks=CHOICE_SAMPLES)


@check(SuiteName.BIMODULE, "inner_product_g", applies=_whole_kernel)
def inner_product_g_laws(bench: Workbench, rng: np.random.Generator) -> Outcome:
    g, c, tol = bench.groupoid, bench.cocycle, bench.tolerance
    zero = AlgebraElement.zero(g)
    for _ in range(SAMPLES):
        phi, psi, theta = _sample(bench, rng), _sample(bench, rng), _sample(bench, rng)
        lhs = act_left(inner_product_g(phi, psi, c, bench.window), theta)
        rhs = act_left(phi, inner_product_h(psi, theta, c))
        if not lhs.is_close(rhs, tol):
            return failed(f"<Phi,Psi>_G.Theta != Phi.<Psi,Theta>_H for Phi={phi!r}")
        if not inner_product_g(zero, psi, c, bench.window).is_zero():
            return failed("<0, Psi>_G is not 0")
    for xi in sorted(_sample(bench, rng).support):
        delta = AlgebraElement.delta(g, xi)
        if inner_product_g(delta, delta, c, bench.window) != AlgebraElement.delta(g, g.unit(g.r(xi))):
            return failed(f"<d_xi, d_xi>_G is not the unit at r(xi) for xi={xi}")
    return passed(samples=SAMPLES)


@check(SuiteName.BIMODULE, "derivation")
def derivation(bench: Workbench, rng: np.random.Generator) -> Outcome:
    """D(f Phi) = (Df) Phi + f (D Phi), <D Phi, Psi> = <Phi, D Psi>, D(Phi h) = (D Phi) h."""
    c, tol = bench.cocycle, bench.tolerance
    d = OperatorD(c)
    ker = _kernel(bench)
    if not d(AlgebraElement.identity(bench.groupoid)).is_zero():
        return failed("D does not vanish on unit-supported elements")
    for _ in range(SAMPLES):
        f, phi, psi = _sample(bench, rng), _sample(bench, rng), _sample(bench, rng)
        h = _sample(bench, rng, ker)
        if not d(f * phi).is_close(d(f) * phi + f * d(phi), tol):
            return failed(f"derivation identity fails for f={f!r}, Phi={phi!r}")
        if not inner_product_h(d(phi), psi, c).is_close(inner_product_h(phi, d(psi), c), tol):
            return failed(f"D is not symmetric for Phi={phi!r}, Psi={psi!r}")
        if not d(act_right(phi, h, c)).is_close(act_right(d(phi), h, c), tol):
            return failed(f"D is not H-linear for Phi={phi!r}, h={h!r}")
    return passed(samples=SAMPLES)


@check(SuiteName.BIMODULE, "transforms")
def transforms(bench: Workbench, rng: np.random.Generator) -> Outcome:
    c, tol = bench.cocycle, bench.tolerance
    d = OperatorD(c)
    units = AlgebraElement.identity(bench.groupoid)
    if d.transform(units, TransformKind.RESOLVENT) != units:
        return failed("resolvent is not the identity where c = 0")
    if not d.transform(units, TransformKind.BOUNDED).is_zero():
        return failed("bounded transform is not 0 where c = 0")
    if d.transform(units, TransformKind.CAYLEY) != -units:
        return failed("Cayley transform is not -1 where c = 0")
    for _ in range(SAMPLES):
        phi, psi = _sample(bench, rng), _sample(bench, rng)
        cphi, cpsi = d.transform(phi, TransformKind.CAYLEY), d.transform(psi, TransformKind.CAYLEY)
        if not inner_product_h(cphi, cpsi, c).is_close(inner_product_h(phi, psi, c), tol):
            return failed(f"Cayley transform does not preserve <.,.>_H for Phi={phi!r}")
        b2 = d.transform(d.transform(phi, TransformKind.BOUNDED), TransformKind.BOUNDED)
        r2 = d.transform(d.transform(phi, TransformKind.RESOLVENT), TransformKind.RESOLVENT)
        if not (b2 + r2).is_close(phi, tol):
            return failed(f"b(D)^2 + r(D)^2 != 1 on Phi={phi!r}")
    return passed(samples=SAMPLES)


@check(SuiteName.BIMODULE, "covariance")
def covariance(bench: Workbench, rng: np.random.Generator) -> Outcome:
    """[D, f] = convolution by Df, [D, U_t] = 0, U_t(f * U_-t g) = u_t(f) * g, U_t unitary for <.,.>_H."""
    c, tol = bench.cocycle, bench.tolerance
    d = OperatorD(c)
    for _ in range(SAMPLES):
        f, g, phi, psi = (_sample(bench, rng) for _ in range(4))
        t = random_time(rng)
        if not d.commutator(f, phi).is_close(d(f) * phi, tol):
            return failed(f"[D, f] Phi != (Df) * Phi for f={f!r}")
        if not d(evolve(phi, c, t)).is_close(evolve(d(phi), c, t), tol):
            return failed(f"D does not commute with U_t at t={t}")
        if not evolve(f * evolve(g, c, -t), c, t).is_close(evolve(f, c, t) * g, tol):
            return failed(f"U_t(f * U_-t g) != u_t(f) * g at t={t}")
        moved = inner_product_h(evolve(phi, c, t), evolve(psi, c, t), c)
        if not moved.is_close(inner_product_h(phi, psi, c), tol):
            return failed(f"U_t does not preserve <.,.>_H at t={t}")
    return passed(samples=SAMPLES)


@check(SuiteName.BIMODULE, "cutoff")
def cutoff(bench: Workbench, rng: np.random.Generator) -> Outcome:
    """||k^n - k^m||_I <= ||f||_I / (1 + m^2), and k^m Psi = f * (1 + D^2)^-1 Psi once m covers Psi."""
    c, tol = bench.cocycle, bench.tolerance
    d = OperatorD(c)
    worst = 0.0
    for _ in range(CUTOFF_SAMPLES):
        f = _sample(bench, rng)
        bound = i_norm(f)
        kernels = {m: cutoff_approximant(f, d, m) for m in range(1, CUTOFF_LEVELS + 1)}
        for m in range(1, CUTOFF_LEVELS + 1):
            for n in range(m + 1, CUTOFF_LEVELS + 1):
                gap = (kernels[n] - kernels[m]).i_norm()
                limit = bound / (1 + m * m)
                worst = max(worst, float(gap) - float(limit))
                if not _not_above(gap, limit, tol):
                    return failed(f"||k^{n} - k^{m}||_I = {gap} exceeds {limit} for f={f!r}")
        psi = _sample(bench, rng)
        cover = math.ceil(max((abs(float(c.value(a))) for a in psi.support), default=0))
        applied = cutoff_approximant(f, d, cover).apply(psi)
        if not applied.is_close(f * d.transform(psi, TransformKind.RESOLVENT_SQUARED), tol):
            return failed(f"k^{cover} Psi != f (1 + D^2)^-1 Psi for f={f!r}, Psi={psi!r}")
    return passed(samples=CUTOFF_SAMPLES, levels=CUTOFF_LEVELS, worst_margin=worst)


@check(SuiteName.BIMODULE, "spectral_subspaces", applies=_integral)
def spectral_subspaces(bench: Workbench, rng: np.random.Generator) -> Outcome:
    c, tol = bench.cocycle, bench.tolerance
    for _ in range(SAMPLES):
        f, phi, psi = _sample(bench, rng), _sample(bench, rng), _sample(bench, rng)
        k = random_degree(rng, 3)
        projected = spectral_projection_rho(k, psi, c)
        if not ssa_witness(f, k, c, bench.window).apply(psi).is_close(f * projected, tol):
            return failed(f"f_k Psi != f * rho_k Psi for k={k}, f={f!r}, Psi={psi!r}")
        if spectral_projection_rho(k, projected, c) != projected:
            return failed(f"rho_{k} is not idempotent")
        if not rho_by_quadrature(k, psi, c).is_close(projected, tol):
            return failed(f"quadrature of rho_{k} disagrees with restriction on Psi={psi!r}")
        t = random_time(rng)
        if not spectral_projection_rho(k, evolve(psi, c, t), c).is_close(projected.scale(cmath.exp(1j * k * t)), tol):
            return failed(f"rho_{k} U_t != e^(ikt) rho_{k} at t={t}")
        lhs = inner_product_h(spectral_projection_rho(k, phi, c), psi, c)
        if not lhs.is_close(inner_product_h(phi, projected, c), tol):
            return failed(f"rho_{k} is not selfadjoint for <.,.>_H")
        levels = {int(c.value(a)) for a in psi.support}
        total = AlgebraElement.zero(bench.groupoid)
        for level in levels:
            total = total + spectral_projection_rho(level, psi, c)
        if not total.is_close(psi, tol):
            return failed(f"sum of rho_k is not the identity on Psi={psi!r}")
    return passed(samples=SAMPLES)


@check(SuiteName.BIMODULE, "fourier", applies=_fourier_model)
def fourier(bench: Workbench, rng: np.random.Generator) -> Outcome:
    """On Z with c = id: D is diag(-M..M) on the window, ker c is a point, <.,.>_H has rank one."""
    g, c = bench.groupoid, bench.cocycle
    m = bench.window.M
    mat = operator_matrix(OperatorD(c), 0, bench.window)
    if not np.array_equal(mat, np.diag(np.arange(-m, m + 1))):
        return failed("D is not diag(-M..M) on the window basis")
    ker = _kernel(bench)
    if ker.structure != "units":
        return failed(f"ker c is {ker.structure}, expected the unit space")
    unit = AlgebraElement.delta(g, g.unit(0))
    for p in range(-2, 3):
        for q in range(-2, 3):
            ip = inner_product_h(AlgebraElement.delta(g, Trans(0, p)), AlgebraElement.delta(g, Trans(0, q)), c)
            expected = unit if p == q else AlgebraElement.zero(g)
            if ip != expected:
                return failed(f"<d_{p}, d_{q}>_H = {ip!r}")
    return verdict(True, None, window=m, diagonal=list(range(-m, m + 1)))
