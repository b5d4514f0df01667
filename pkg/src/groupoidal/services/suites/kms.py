from __future__ import annotations

import numpy as np

from groupoidal.core.constants import SuiteName
from groupoidal.core.errors import NotUnimodularError
from groupoidal.core.scalars import close, parse_scalar
from groupoidal.core.settings import settings
from groupoidal.services.cocycles import evolve, kernel_subgroupoid, verify_cocycle
from groupoidal.services.convolution import AlgebraElement
from groupoidal.services.documents import Workbench
from groupoidal.services.groupoids.base import Window
from groupoidal.services.measures import (
    check_kms,
    check_tau_positive,
    check_trace_unimodular,
    modular_function,
    require_unimodular,
    tau_functional,
)
from groupoidal.services.suites.base import Outcome, check, failed, passed, verdict

MULTIPLICATIVE_SAMPLES = 100


def _has_example(bench: Workbench) -> bool:
    return bench.document.kms is not None


def _window(bench: Workbench) -> Window | None:
    return None if bench.groupoid.is_finite else bench.window


@check(SuiteName.KMS, "modular")
def modular(bench: Workbench, rng: np.random.Generator) -> Outcome:
    """c_mu = log Delta is a cocycle and Delta(ab) = Delta(a) Delta(b)."""
    g = bench.groupoid
    data = modular_function(g, bench.measure)
    report = verify_cocycle(
        g, data.c_mu, settings.sample_budget, rng=rng, window=bench.window, tol=bench.tolerance
    )
    if not report.valid:
        first = report.first_witness()
        return failed(f"c_mu is not a cocycle: {first.axiom if first else 'unknown'}")
    morphs = g.morphisms(_window(bench))
    for _ in range(MULTIPLICATIVE_SAMPLES):
        a = morphs[int(rng.integers(len(morphs)))]
        fiber = g.range_fiber(g.d(a), _window(bench))
        b = fiber[int(rng.integers(len(fiber)))]
        ab = g.compose(a, b)
        if ab is not None and not close(data.delta(ab), data.delta(a) * data.delta(b), bench.tolerance):
            return failed(f"Delta is not multiplicative at ({a}, {b})")
    return passed(unimodular=bench.measure.is_uniform() or all(data.delta(a) == 1 for a in morphs))


@check(SuiteName.KMS, "boundary")
def boundary(bench: Workbench, rng: np.random.Generator) -> Outcome:
    report = check_kms(
        bench.groupoid,
        bench.measure,
        settings.sample_budget,
        rng=rng,
        window=bench.window,
        tol=bench.tolerance,
    )
    witness = None
    if not report.boundary_holds:
        witness = f"tau(f * u_-i(g)) != tau(g * f) for f={report.witness[0]}, g={report.witness[1]}"
    elif not report.continuation_holds:
        witness = "F(t + i beta) disagrees with tau(u_t(g) * f)"
    return verdict(
        report.holds,
        witness,
        beta=report.beta,
        pairs=report.pairs,
        exact=report.exact,
        max_defect=report.max_defect,
        **report.sample,
    )


@check(SuiteName.KMS, "example", applies=_has_example)
def example(bench: Workbench, rng: np.random.Generator) -> Outcome:
    """The document's own pair (f, g): both sides of the boundary identity, recorded."""
    spec = bench.document.kms
    assert spec is not None
    f, h = bench.elements[spec.f], bench.elements[spec.g]
    c = modular_function(bench.groupoid, bench.measure).c_mu
    lhs = tau_functional(f * evolve(h, c, -1j), bench.measure)
    rhs = tau_functional(h * f, bench.measure)
    values = {"lhs": lhs, "rhs": rhs}
    if not close(lhs, rhs, bench.tolerance):
        return failed(f"tau(f * u_-i(g)) = {lhs} but tau(g * f) = {rhs}", **values)
    if spec.expected is not None:
        expected = parse_scalar(spec.expected)
        if not close(lhs, expected, bench.tolerance):
            return failed(f"both sides equal {lhs}, expected {expected}", **values)
    return passed(**values)


@check(SuiteName.KMS, "tau_positive")
def tau_positive(bench: Workbench, rng: np.random.Generator) -> Outcome:
    ok, smallest = check_tau_positive(
        bench.groupoid, bench.measure, settings.sample_budget, rng=rng, tol=bench.tolerance
    )
    return verdict(ok, f"tau(f* f) = {smallest} < 0", smallest=smallest)


@check(SuiteName.KMS, "trace_kernel")
def trace_kernel(bench: Workbench, rng: np.random.Generator) -> Outcome:
    """On ker c_mu the modular function is 1 and tau is a trace."""
    g = bench.groupoid
    c_mu = modular_function(g, bench.measure).c_mu
    ker = kernel_subgroupoid(g, c_mu, tol=bench.tolerance, window=bench.window)
    report = check_trace_unimodular(
        ker, bench.measure, settings.sample_budget, rng=rng, window=bench.window, tol=bench.tolerance
    )
    return verdict(
        report.holds,
        f"tau(f*g) != tau(g*f) on ker c_mu for f={report.witness[0]}, g={report.witness[1]}"
        if report.witness
        else None,
        pairs=report.pairs,
        exact=report.exact,
        kernel=ker.structure,
    )


@check(SuiteName.KMS, "trace_full")
def trace_full(bench: Workbench, rng: np.random.Generator) -> Outcome:
    """tau is a trace on all of G iff Delta = 1; otherwise the witness must really break the trace."""
    g, mu = bench.groupoid, bench.measure
    try:
        require_unimodular(g, mu, _window(bench), tol=bench.tolerance)
    except NotUnimodularError as exc:
        a = exc.witness
        f = AlgebraElement.delta(g, a)
        h = AlgebraElement.delta(g, g.invert(a))
        lhs, rhs = tau_functional(f * h, mu), tau_functional(h * f, mu)
        return verdict(
            not close(lhs, rhs, bench.tolerance),
            f"non-unimodular witness {a} does not break the trace",
            unimodular=False,
            morphism=str(a),
            lhs=lhs,
            rhs=rhs,
        )
    report = check_trace_unimodular(
        g, mu, settings.sample_budget, rng=rng, window=bench.window, tol=bench.tolerance
    )
    return verdict(
        report.holds,
        f"tau(f*g) != tau(g*f) for f={report.witness[0]}, g={report.witness[1]}" if report.witness else None,
        unimodular=True,
        pairs=report.pairs,
        exact=report.exact,
    )
