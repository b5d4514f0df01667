"""Suites run end to end against the shipped example documents."""

from __future__ import annotations

import pytest

from groupoidal.core.constants import CheckStatus, ExitCode, SuiteName
from groupoidal.services.documents import corpus_names, load_corpus, load_workbench
from groupoidal.services.metrics import render_metrics
from groupoidal.services.suites import SUITE_ORDER, checks_for, run_suite, run_suites


def _record(report, name):
    matches = [r for r in report.records if r.name == name]
    assert matches, f"{name} did not run"
    return matches[0]


def test_every_suite_registers_checks() -> None:
    for suite in SUITE_ORDER:
        assert checks_for(suite), suite
    assert len(checks_for(SuiteName.ALL)) == sum(len(checks_for(s)) for s in SUITE_ORDER)


def test_kms_swap_example_values() -> None:
    bench = load_workbench(load_corpus("kms_swap"))
    report = run_suite(bench, SuiteName.KMS)
    example = _record(report, "kms.example")
    assert example.status is CheckStatus.PASS
    assert example.values == {"lhs": 2, "rhs": 2}
    full = _record(report, "kms.trace_full")
    assert full.status is CheckStatus.PASS


def test_kms_boundary_on_three_cycle_is_exact() -> None:
    bench = load_workbench(load_corpus("kms_cycle3"))
    boundary = _record(run_suite(bench, SuiteName.KMS), "kms.boundary")
    assert boundary.status is CheckStatus.PASS
    assert boundary.values["exact"] is True
    assert boundary.values["pairs"] == 200


def test_shift_index_value() -> None:
    bench = load_workbench(load_corpus("shift_x3"))
    report = run_suite(bench, SuiteName.INDEX)
    value = _record(report, "index.value")
    assert value.status is CheckStatus.PASS
    assert value.values["value"] == -1
    assert value.values["spectral_flow"] == -1
    assert value.values["stable"] is True
    assert value.values["homomorphism"] is True


def test_index_on_integers_and_rotation() -> None:
    for name in ("integers", "rotation", "shift_x1"):
        bench = load_workbench(load_corpus(name))
        value = _record(run_suite(bench, SuiteName.INDEX), "index.value")
        assert value.status is CheckStatus.PASS, value.witness
        assert value.values["value"] == -1


def test_axioms_on_pair_cyclic() -> None:
    bench = load_workbench(load_corpus("pair_cyclic"))
    report = run_suite(bench, SuiteName.AXIOMS)
    assert _record(report, "axioms.groupoid").status is CheckStatus.PASS
    kill = _record(report, "axioms.mutation_kill")
    assert kill.status is CheckStatus.PASS
    assert report.exit_code is ExitCode.OK


def test_reports_are_deterministic_apart_from_timing() -> None:
    bench = load_workbench(load_corpus("shift_x3"))
    first = run_suite(bench, SuiteName.ALGEBRA, seed=5)
    second = run_suite(bench, SuiteName.ALGEBRA, seed=5, max_workers=4)
    assert first.without_timing() == second.without_timing()
    assert first.seed == 5
    assert first.input_digest == bench.digest


def test_multiple_suites_merge_into_one_report() -> None:
    bench = load_workbench(load_corpus("deaconu4"))
    report = run_suites(bench, [SuiteName.COCYCLE, SuiteName.AXIOMS])
    assert report.suite == "axioms,cocycle"
    prefixes = {r.name.split(".")[0] for r in report.records}
    assert prefixes == {"axioms", "cocycle"}
    assert report.summary.total == len(report.records)
    assert [r.name for r in report.records] == sorted(r.name for r in report.records)


@pytest.mark.slow
@pytest.mark.parametrize("name", corpus_names())
def test_shipped_examples_pass_their_suites(name: str) -> None:
    bench = load_workbench(load_corpus(name))
    report = run_suites(bench, list(bench.document.suites))
    failures = [(r.name, r.witness) for r in report.records if r.status is not CheckStatus.PASS]
    assert not failures
    assert report.exit_code is ExitCode.OK


def test_runs_are_counted_in_the_metrics_registry() -> None:
    bench = load_workbench(load_corpus("kms_swap"))
    run_suite(bench, SuiteName.KMS)
    exposition = render_metrics().decode("utf-8")
    assert 'groupoidal_checks_total{suite="kms",status="pass"}' in exposition
    assert "groupoidal_check_seconds_bucket" in exposition
