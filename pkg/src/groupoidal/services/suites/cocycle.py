from __future__ import annotations

import numpy as np

from groupoidal.core.constants import CheckStatus, SuiteName
from groupoidal.core.scalars import close
from groupoidal.core.settings import settings
from groupoidal.services.cocycles import (
    NotCoboundary,
    check_exactness,
    evolve,
    kernel_subgroupoid,
    solve_coboundary,
    verify_cocycle,
)
from groupoidal.services.documents import Workbench
from groupoidal.services.sampling import random_element, random_time
from groupoidal.services.suites.base import Outcome, check, failed, indeterminate, passed, verdict

SAMPLES = 100


def _finite(bench: Workbench) -> bool:
    return bench.groupoid.is_finite


@check(SuiteName.COCYCLE, "verify")
def verify(bench: Workbench, rng: np.random.Generator) -> Outcome:
    report = verify_cocycle(
        bench.groupoid, bench.cocycle, settings.sample_budget, rng=rng, window=bench.window, tol=bench.tolerance
    )
    first = report.first_witness()
    return verdict(
        report.valid,
        f"{first.axiom} at {', '.join(first.witness)}: {first.detail}" if first else None,
        kind=bench.cocycle.kind,
        checked=report.checked,
        exhaustive=report.exhaustive,
        integral=bench.cocycle.integral,
    )


@check(SuiteName.COCYCLE, "coboundary", applies=_finite)
def coboundary(bench: Workbench, rng: np.random.Generator) -> Outcome:
    g, c = bench.groupoid, bench.cocycle
    result = solve_coboundary(g, c, tol=bench.tolerance)
    if isinstance(result, NotCoboundary):
        if result.value == 0:
            return failed(f"certificate loop {result.loop} has cocycle value 0")
        return passed(coboundary=False, loop=str(result.loop), loop_value=result.value, via=str(result.via))
    mismatch = next((a for a in g.morphisms() if not close(result.value(a), c.value(a), bench.tolerance)), None)
    return verdict(
        mismatch is None,
        f"reconstructed potential disagrees at {mismatch}",
        coboundary=True,
        potential=list(result.potential),
    )


@check(SuiteName.COCYCLE, "kernel")
def kernel(bench: Workbench, rng: np.random.Generator) -> Outcome:
    g = bench.groupoid
    ker = kernel_subgroupoid(g, bench.cocycle, tol=bench.tolerance, window=bench.window)
    window = None if g.is_finite else bench.window
    if not all(ker.contains(e) for e in g.units()):
        return failed("ker c misses a unit")
    members = ker.morphisms(window)
    by_range: dict[int, list] = {}
    for h in members:
        by_range.setdefault(g.r(h), []).append(h)
    for _ in range(SAMPLES):
        a = members[int(rng.integers(len(members)))]
        fiber = by_range.get(g.d(a), [])
        if not fiber:
            continue
        b = fiber[int(rng.integers(len(fiber)))]
        ab = g.compose(a, b)
        if ab is None or not ker.contains(ab) or not ker.contains(g.invert(a)):
            return failed(f"ker c is not closed at ({a}, {b})")
    return passed(
        structure=ker.structure,
        regular=ker.regular,
        members_in_window=len(members),
        isotropy_periods=ker.isotropy_periods(),
    )


@check(SuiteName.COCYCLE, "exactness")
def exactness(bench: Workbench, rng: np.random.Generator) -> Outcome:
    report = check_exactness(bench.groupoid, bench.cocycle, bench.window, bench.tolerance)
    values = {"method": report.method, "classes": report.classes}
    if report.status is CheckStatus.INDETERMINATE:
        return indeterminate(report.detail, **values)
    return verdict(bool(report.exact), ", ".join(report.witness) or report.detail, **values)


@check(SuiteName.COCYCLE, "automorphism_group")
def automorphism_group(bench: Workbench, rng: np.random.Generator) -> Outcome:
    """u_t(f*g) = u_t f * u_t g, u_t(f*) = (u_t f)*, u_s u_t = u_{s+t}."""
    g, c, tol = bench.groupoid, bench.cocycle, bench.tolerance
    spread = min(2, bench.window.M)
    for _ in range(SAMPLES):
        f = random_element(g, rng, spread=spread)
        h = random_element(g, rng, spread=spread)
        s, t = random_time(rng), random_time(rng)
        if not evolve(f * h, c, t).is_close(evolve(f, c, t) * evolve(h, c, t), tol):
            return failed(f"u_t(f*g) != u_t(f)*u_t(g) at t={t}")
        if not evolve(f.star(), c, t).is_close(evolve(f, c, t).star(), tol):
            return failed(f"u_t(f*) != u_t(f)* at t={t}")
        if not evolve(evolve(f, c, t), c, s).is_close(evolve(f, c, s + t), tol):
            return failed(f"u_s u_t != u_(s+t) at s={s}, t={t}")
    if evolve(f, c, 0) is not f:
        return failed("u_0 is not the identity map")
    return passed(samples=SAMPLES)


@check(SuiteName.COCYCLE, "fixed_points")
def fixed_points(bench: Workbench, rng: np.random.Generator) -> Outcome:
    """u_t h = h exactly for h supported in ker c."""
    g, c = bench.groupoid, bench.cocycle
    ker = kernel_subgroupoid(g, c, tol=bench.tolerance, window=bench.window)
    for _ in range(SAMPLES):
        h = random_element(ker, rng, spread=min(2, bench.window.M))
        t = random_time(rng)
        if not evolve(h, c, t).is_close(h, bench.tolerance):
            return failed(f"u_t moves a kernel element at t={t}: {h!r}")
    return passed(samples=SAMPLES)
