from __future__ import annotations

import hashlib
import json
from fractions import Fraction

import pytest

from groupoidal.core.constants import SuiteName
from groupoidal.core.errors import DocumentError
from groupoidal.services.cocycles import DegreeCocycle, LogModularCocycle, ZeroCocycle
from groupoidal.services.documents import (
    canonical_json,
    corpus_names,
    input_digest,
    json_schema,
    load_corpus,
    load_workbench,
    parse_model,
    validate_document,
)
from groupoidal.services.groupoids.base import Trans


def _document(**overrides) -> str:
    doc = {"groupoid": {"kind": "pair", "size": 2}}
    doc.update(overrides)
    return json.dumps(doc)


def _errors(raw: str) -> list[tuple[str, str]]:
    with pytest.raises(DocumentError) as info:
        parse_model(raw)
    return info.value.errors


def test_minimal_document_parses_with_defaults() -> None:
    doc = parse_model(_document())
    assert doc.groupoid.kind == "pair"
    assert doc.suites == [SuiteName.ALL]
    assert doc.cocycle is None

    bench = load_workbench(_document())
    assert isinstance(bench.cocycle, ZeroCocycle)
    assert bench.measure.weights == (1, 1)
    assert bench.window.M == 8
    assert bench.name == "finite"


def test_non_permutation_act_is_reported_at_its_path() -> None:
    errors = _errors(_document(groupoid={"kind": "transformation", "size": 3, "act": [0, 0, 1]}))
    assert ("groupoid.act", "act must be a permutation of 0..size-1") in errors


def test_invalid_json_is_a_document_error() -> None:
    errors = _errors("{not json")
    assert errors[0][0] == ""
    assert errors[0][1].startswith("invalid JSON")


def test_unknown_fields_are_rejected() -> None:
    errors = _errors(_document(bogus=1))
    assert [path for path, _ in errors] == ["bogus"]


def test_zero_denominator_is_rejected() -> None:
    errors = _errors(_document(measure={"weights": [1, [1, 0]]}))
    assert any(path == "measure.weights.1" and "denominator" in msg for path, msg in errors)


def test_cross_references_are_collected() -> None:
    raw = _document(
        groupoid={"kind": "deaconu", "size": 4, "sigma": [1, 2, 0, 0]},
        elements={"f": [[[0, 1, 0], 1, 0]], "g": [[[3, 0, 2], 1, 0]]},
        unitaries={"w": {"kind": "sum", "parts": ["missing"]}},
        index={"unitary": "nope"},
        kms={"f": "f", "g": "h"},
    )
    paths = {path for path, _ in _errors(raw)}
    assert paths == {"elements.f.0.0", "unitaries.w.parts.0", "index.unitary", "kms.g"}


def test_measure_length_must_match_units() -> None:
    errors = _errors(_document(measure={"weights": [1, 2, 3]}))
    assert errors == [("measure.weights", "expected 2 weights, got 3")]


def test_workbench_builds_elements_and_cocycles() -> None:
    bench = load_workbench(load_corpus("kms_swap"))
    assert isinstance(bench.cocycle, LogModularCocycle)
    assert bench.elements["f"][Trans(0, 1)] == 1
    assert bench.elements["g"][Trans(1, -1)] == 1

    bench = load_workbench(load_corpus("integers"))
    assert isinstance(bench.cocycle, DegreeCocycle)
    assert set(bench.unitaries) == {"shift", "shift2", "one"}
    assert bench.elements["f"][Trans(0, 1)] == Fraction(1, 2)


def test_canonical_form_is_stable() -> None:
    raw = load_corpus("integers")
    canonical = canonical_json(parse_model(raw))
    assert canonical_json(parse_model(canonical)) == canonical
    assert canonical.startswith('{"cocycle":{"kind":"degree"},"description":')


def test_digest_is_sha256_of_the_input_bytes() -> None:
    raw = load_corpus("shift_x3")
    assert input_digest(raw) == hashlib.sha256(raw).hexdigest()
    assert load_workbench(raw).digest == input_digest(raw)


def test_every_shipped_example_loads() -> None:
    names = corpus_names()
    assert {"integers", "kms_swap", "shift_x3", "deaconu4", "pair_cyclic"} <= set(names)
    for name in names:
        assert load_workbench(load_corpus(name)).document.name == name
    with pytest.raises(FileNotFoundError):
        load_corpus("does_not_exist")


def test_json_schemas() -> None:
    assert "groupoid" in json_schema("model")["properties"]
    assert "records" in json_schema("report")["properties"]
    with pytest.raises(ValueError):
        json_schema("other")


def test_validate_document_skips_cross_references() -> None:
    doc = validate_document(_document(index={"unitary": "nope"}))
    assert doc.index is not None
