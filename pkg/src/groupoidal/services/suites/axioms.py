from __future__ import annotations

import numpy as np

from groupoidal.core.constants import SuiteName
from groupoidal.core.settings import settings
from groupoidal.services.documents import Workbench
from groupoidal.services.groupoids.finite import FiniteExplicitGroupoid
from groupoidal.services.groupoids.quotient import quotient_by_kernel
from groupoidal.services.groupoids.validation import mutate_composition_table, validate_axioms
from groupoidal.services.suites.base import Outcome, check, failed, passed, verdict

MUTATIONS = 50


def _finite_table(bench: Workbench) -> bool:
    return isinstance(bench.groupoid, FiniteExplicitGroupoid)


@check(SuiteName.AXIOMS, "groupoid")
def groupoid_axioms(bench: Workbench, rng: np.random.Generator) -> Outcome:
    report = validate_axioms(bench.groupoid, settings.sample_budget, rng=rng, window=bench.window)
    values = {
        "checked": report.checked,
        "exhaustive": report.exhaustive,
        "violations": report.violation_count,
    }
    if report.structural_errors:
        return failed("structural: " + "; ".join(report.structural_errors[:3]), **values)
    first = report.first_witness()
    if first is not None:
        return failed(f"{first.axiom} at {', '.join(first.witness)}: {first.detail}", **values)
    return passed(**values)


@check(SuiteName.AXIOMS, "mutation_kill", applies=_finite_table)
def mutation_kill(bench: Workbench, rng: np.random.Generator) -> Outcome:
    g = bench.groupoid
    assert isinstance(g, FiniteExplicitGroupoid)
    if not validate_axioms(g).valid:
        return failed("base table is not a groupoid; mutations are meaningless")
    survivors = []
    for _ in range(MUTATIONS):
        mutant, key = mutate_composition_table(g, rng)
        if validate_axioms(mutant).valid:
            survivors.append(key)
    return verdict(
        not survivors,
        f"undetected corruption at table entry {survivors[0]}" if survivors else None,
        mutations=MUTATIONS,
        killed=MUTATIONS - len(survivors),
    )


@check(SuiteName.AXIOMS, "quotient")
def quotient(bench: Workbench, rng: np.random.Generator) -> Outcome:
    model = quotient_by_kernel(bench.groupoid, bench.cocycle, bench.window, bench.tolerance)
    return verdict(
        model.well_defined,
        ", ".join(model.witness) or None,
        classes=model.size,
        bijective=model.bijective,
        constant_on_cosets=model.constant_on_cosets,
        injective=model.injective,
    )
