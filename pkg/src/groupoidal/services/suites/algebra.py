from __future__ import annotations

import numpy as np
import scipy.linalg

from groupoidal.core.constants import SuiteName
from groupoidal.core.settings import settings
from groupoidal.services.convolution import (
    AlgebraElement,
    fiber_basis,
    i_norm,
    norms,
    truncated_regular_rep,
)
from groupoidal.services.documents import Workbench
from groupoidal.services.groupoids.base import Window
from groupoidal.services.sampling import random_element
from groupoidal.services.suites.base import Outcome, check, failed, passed, verdict

TRIPLES = 100
NORM_SAMPLES = 500
MONOTONE_SAMPLES = 20
MONOTONE_WINDOWS = (4, 8, 16, 32)


def _spread(bench: Workbench) -> int:
    return min(2, bench.window.M)


def _sample(bench: Workbench, rng: np.random.Generator) -> AlgebraElement:
    return random_element(bench.groupoid, rng, spread=_spread(bench))


def _equal(a: AlgebraElement, b: AlgebraElement, tol: float) -> bool:
    if a.is_exact() and b.is_exact():
        return a == b
    return a.is_close(b, tol)


def _infinite(bench: Workbench) -> bool:
    return not bench.groupoid.is_finite


@check(SuiteName.ALGEBRA, "associativity")
def associativity(bench: Workbench, rng: np.random.Generator) -> Outcome:
    for _ in range(TRIPLES):
        f, g, h = _sample(bench, rng), _sample(bench, rng), _sample(bench, rng)
        if not _equal((f * g) * h, f * (g * h), bench.tolerance):
            return failed(f"(f*g)*h != f*(g*h) for f={f!r}, g={g!r}, h={h!r}")
    return passed(triples=TRIPLES)


@check(SuiteName.ALGEBRA, "involution")
def involution(bench: Workbench, rng: np.random.Generator) -> Outcome:
    for _ in range(TRIPLES):
        f, g = _sample(bench, rng), _sample(bench, rng)
        if f.star().star() != f:
            return failed(f"f** != f for f={f!r}")
        if not _equal((f * g).star(), g.star() * f.star(), bench.tolerance):
            return failed(f"(f*g)* != g* * f* for f={f!r}, g={g!r}")
    return passed(pairs=TRIPLES)


@check(SuiteName.ALGEBRA, "identity")
def identity(bench: Workbench, rng: np.random.Generator) -> Outcome:
    one = AlgebraElement.identity(bench.groupoid)
    for _ in range(TRIPLES):
        f = _sample(bench, rng)
        if one * f != f or f * one != f:
            return failed(f"identity law fails for f={f!r}")
    return passed(samples=TRIPLES)


@check(SuiteName.ALGEBRA, "norm_bracket")
def norm_bracket(bench: Workbench, rng: np.random.Generator) -> Outcome:
    worst = 0.0
    for _ in range(NORM_SAMPLES):
        f = _sample(bench, rng)
        report = norms(f, bench.window)
        if report.i_norm != max(report.nu, report.nu_inv):
            return failed(f"i_norm is not max(nu, nu_inv) for f={f!r}")
        slack = report.reduced_lower - float(report.i_norm)
        worst = max(worst, slack)
        if slack > settings.psd_tolerance:
            return failed(
                f"reduced lower bound {report.reduced_lower} exceeds I-norm {report.i_norm} for f={f!r}"
            )
    return passed(samples=NORM_SAMPLES, worst_slack=worst)


@check(SuiteName.ALGEBRA, "submultiplicative")
def submultiplicative(bench: Workbench, rng: np.random.Generator) -> Outcome:
    for _ in range(TRIPLES):
        f, g = _sample(bench, rng), _sample(bench, rng)
        if i_norm(f * g) > i_norm(f) * i_norm(g) + bench.tolerance:
            return failed(f"||f*g||_I > ||f||_I ||g||_I for f={f!r}, g={g!r}")
    return passed(pairs=TRIPLES)


@check(SuiteName.ALGEBRA, "reduced_monotone", applies=_infinite)
def reduced_monotone(bench: Workbench, rng: np.random.Generator) -> Outcome:
    for _ in range(MONOTONE_SAMPLES):
        f = random_element(bench.groupoid, rng, spread=2)
        values = [norms(f, Window(m)).reduced_lower for m in MONOTONE_WINDOWS]
        if any(b < a - settings.psd_tolerance for a, b in zip(values, values[1:])):
            return failed(f"reduced lower bound decreases in M: {values} for f={f!r}")
    return passed(samples=MONOTONE_SAMPLES, windows=list(MONOTONE_WINDOWS))


def _interior_columns(bench: Workbench, u: int, margin: int) -> list[int]:
    g = bench.groupoid
    basis = fiber_basis(g, u, bench.window)
    if g.is_finite:
        return list(range(len(basis)))
    return [j for j, b in enumerate(basis) if abs(g.degree(b)) + margin <= bench.window.M]


@check(SuiteName.ALGEBRA, "representation")
def representation(bench: Workbench, rng: np.random.Generator) -> Outcome:
    """rep is a *-homomorphism on columns whose image stays inside the window; rep(f f*) is PSD."""
    g = bench.groupoid
    w = bench.window
    for _ in range(TRIPLES // 4):
        f, h = _sample(bench, rng), _sample(bench, rng)
        for u in range(g.unit_count):
            rf, rh = truncated_regular_rep(f, u, w), truncated_regular_rep(h, u, w)
            if not np.allclose(truncated_regular_rep(f.star(), u, w), rf.conj().T, atol=bench.tolerance):
                return failed(f"rep(f*) != rep(f)^H at unit {u} for f={f!r}")
            cols = _interior_columns(bench, u, h.degree_spread())
            product = truncated_regular_rep(f * h, u, w)
            if not np.allclose(product[:, cols], (rf @ rh)[:, cols], atol=bench.tolerance):
                return failed(f"rep(f*h) != rep(f) rep(h) at unit {u} for f={f!r}, h={h!r}")
            positive = truncated_regular_rep(f * f.star(), u, w)
            if positive.size and scipy.linalg.eigvalsh(positive).min() < -settings.psd_tolerance:
                return failed(f"rep(f f*) is not PSD at unit {u} for f={f!r}")
    return passed(pairs=TRIPLES // 4)
