"""
Model documents: parsing with path-addressed errors, canonical serialization, digests, and
assembly of the engine objects (the workbench) a suite runs against.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field
from importlib import resources
from typing import Any

from pydantic import ValidationError

from groupoidal.core.errors import DocumentError, GroupoidalError
from groupoidal.core.scalars import make_scalar, parse_scalar
from groupoidal.core.settings import settings
from groupoidal.models.document import (
    COCYCLE_KINDS,
    GROUPOID_KINDS,
    UNITARY_KINDS,
    DeaconuSpec,
    DegreeCocycleSpec,
    ExplicitCocycleSpec,
    IdentityUnitarySpec,
    LogModularCocycleSpec,
    MatrixUnitarySpec,
    ModelDocument,
    PhaseUnitarySpec,
    PotentialCocycleSpec,
    ProductUnitarySpec,
    RotationSpec,
    ShiftUnitarySpec,
    SumUnitarySpec,
    TransformationSpec,
    ZeroCocycleSpec,
)
from groupoidal.models.report import SuiteReport
from groupoidal.services.cocycles import (
    Cocycle,
    DegreeCocycle,
    ExplicitCocycle,
    LogModularCocycle,
    PotentialCocycle,
    ZeroCocycle,
)
from groupoidal.services.convolution import AlgebraElement
from groupoidal.services.groupoids.base import (
    Deaconu,
    DiscreteGroupoid,
    Explicit,
    Morphism,
    Trans,
    Window,
)
from groupoidal.services.groupoids.factory import GroupoidFactory
from groupoidal.services.index_pairing import UnitaryElement
from groupoidal.services.measures import UnitMeasure

logger = logging.getLogger(__name__)

CORPUS_PACKAGE = "groupoidal.corpus"


# -------------------------------------------------------------------------
# Parsing and canonical form
# -------------------------------------------------------------------------


def _error_path(loc: tuple[Any, ...]) -> str:
    """Dotted path with pydantic's union-member tags removed."""
    parts: list[str] = []
    previous: Any = None
    for item in loc:
        text = str(item)
        if previous == "groupoid" and text in GROUPOID_KINDS:
            pass
        elif previous == "cocycle" and text in COCYCLE_KINDS:
            pass
        elif len(parts) >= 2 and parts[-2] == "unitaries" and text in UNITARY_KINDS:
            pass
        elif isinstance(item, str) and ("[" in text or text in {"int", "float", "str", "bool"}):
            pass
        else:
            parts.append(text)
        previous = text
    return ".".join(parts)


def _message(error: dict[str, Any]) -> str:
    msg = str(error.get("msg", "invalid value"))
    return msg.removeprefix("Value error, ")


def _schema_errors(exc: ValidationError) -> list[tuple[str, str]]:
    seen: set[tuple[str, str]] = set()
    errors: list[tuple[str, str]] = []
    for error in exc.errors():
        entry = (_error_path(tuple(error.get("loc", ()))), _message(error))
        if entry not in seen:
            seen.add(entry)
            errors.append(entry)
    return errors


def validate_document(raw: bytes | str) -> ModelDocument:
    """Schema validation only: JSON decoding plus the pydantic model."""
    try:
        text = raw.decode("utf-8") if isinstance(raw, bytes) else raw
    except UnicodeDecodeError as exc:
        raise DocumentError([("", f"input is not UTF-8: {exc.reason}")]) from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError([("", f"invalid JSON: {exc.msg} at line {exc.lineno}")]) from exc
    try:
        return ModelDocument.model_validate(data)
    except ValidationError as exc:
        raise DocumentError(_schema_errors(exc)) from exc


def parse_model(raw: bytes | str) -> ModelDocument:
    """Validate a document against the schema and cross-check names and morphism encodings."""
    doc = validate_document(raw)
    _Builder(doc).build()
    return doc


def canonical_json(doc: ModelDocument) -> str:
    return json.dumps(
        doc.model_dump(mode="json", exclude_none=True),
        sort_keys=True,
        separators=(",", ":"),
        ensure_ascii=False,
    )


def input_digest(raw: bytes | str) -> str:
    data = raw.encode("utf-8") if isinstance(raw, str) else raw
    return hashlib.sha256(data).hexdigest()


def json_schema(kind: str) -> dict[str, Any]:
    if kind == "model":
        return ModelDocument.model_json_schema()
    if kind == "report":
        return SuiteReport.model_json_schema()
    raise ValueError(f"unknown schema {kind!r}; expected 'model' or 'report'")


# -------------------------------------------------------------------------
# Shipped corpus
# -------------------------------------------------------------------------


def corpus_names() -> list[str]:
    root = resources.files(CORPUS_PACKAGE)
    return sorted(p.name.removesuffix(".json") for p in root.iterdir() if p.name.endswith(".json"))


def load_corpus(name: str) -> bytes:
    path = resources.files(CORPUS_PACKAGE) / f"{name}.json"
    if not path.is_file():
        raise FileNotFoundError(f"no shipped example named {name!r}")
    return path.read_bytes()


# -------------------------------------------------------------------------
# Workbench assembly
# -------------------------------------------------------------------------


@dataclass
class Workbench:
    """Everything a suite needs, built from one document."""

    document: ModelDocument
    groupoid: DiscreteGroupoid
    cocycle: Cocycle
    measure: UnitMeasure
    elements: dict[str, AlgebraElement] = field(default_factory=dict)
    unitaries: dict[str, UnitaryElement] = field(default_factory=dict)
    window: Window = field(default_factory=lambda: Window(settings.default_window))
    tolerance: float = settings.tolerance
    seed: int = settings.seed
    digest: str = ""

    @property
    def name(self) -> str:
        return self.document.name or self.groupoid.kind


class _Builder:
    """Builds the engine objects, collecting every cross-reference problem before raising."""

    def __init__(self, doc: ModelDocument) -> None:
        self.doc = doc
        self.errors: list[tuple[str, str]] = []

    def fail(self, path: str, message: str) -> None:
        self.errors.append((path, message))

    def build(self) -> Workbench:
        doc = self.doc
        try:
            groupoid = GroupoidFactory.from_spec(doc.groupoid)
        except GroupoidalError as exc:
            raise DocumentError([("groupoid", str(exc))]) from exc
        measure = self._measure(groupoid)
        cocycle = self._cocycle(groupoid, measure)
        elements = {name: self._element(groupoid, name) for name in doc.elements}
        unitaries: dict[str, UnitaryElement] = {}
        for name in doc.unitaries:
            built = self._unitary(groupoid, name, elements, unitaries, ())
            if built is not None:
                unitaries[name] = built
        self._references(elements)
        if self.errors:
            raise DocumentError(self.errors)
        assert cocycle is not None and measure is not None
        return Workbench(
            document=doc,
            groupoid=groupoid,
            cocycle=cocycle,
            measure=measure,
            elements=elements,
            unitaries=unitaries,
            window=Window(doc.window if doc.window is not None else settings.default_window),
            tolerance=doc.tolerance if doc.tolerance is not None else settings.tolerance,
            seed=doc.seed if doc.seed is not None else settings.seed,
        )

    def _measure(self, g: DiscreteGroupoid) -> UnitMeasure | None:
        spec = self.doc.measure
        if spec is None:
            return UnitMeasure.uniform(g.unit_count)
        if len(spec.weights) != g.unit_count:
            self.fail("measure.weights", f"expected {g.unit_count} weights, got {len(spec.weights)}")
            return None
        return UnitMeasure.of([parse_scalar(w) for w in spec.weights], normalize=spec.normalize)

    def _cocycle(self, g: DiscreteGroupoid, measure: UnitMeasure | None) -> Cocycle | None:
        spec = self.doc.cocycle
        try:
            if spec is None:
                return ZeroCocycle(g) if g.is_finite else DegreeCocycle(g)
            if isinstance(spec, DegreeCocycleSpec):
                return DegreeCocycle(g)
            if isinstance(spec, PotentialCocycleSpec):
                return PotentialCocycle(g, tuple(parse_scalar(v) for v in spec.values))
            if isinstance(spec, ExplicitCocycleSpec):
                return ExplicitCocycle(g, tuple(parse_scalar(v) for v in spec.values))
            if isinstance(spec, LogModularCocycleSpec):
                if measure is None:
                    return None
                return LogModularCocycle(g, measure.weights)
            if isinstance(spec, ZeroCocycleSpec):
                return ZeroCocycle(g)
        except GroupoidalError as exc:
            self.fail("cocycle", str(exc))
            return None
        self.fail("cocycle.kind", f"unsupported cocycle {spec!r}")
        return None

    def _morphism(self, g: DiscreteGroupoid, code: int | list[int], path: str) -> Morphism | None:
        spec = self.doc.groupoid
        if isinstance(spec, (TransformationSpec, RotationSpec)):
            if not isinstance(code, list) or len(code) != 2:
                self.fail(path, "expected [x, n] for a transformation groupoid")
                return None
            morphism: Morphism = Trans(*code)
        elif isinstance(spec, DeaconuSpec):
            if not isinstance(code, list) or len(code) != 3:
                self.fail(path, "expected [x, n, y] for a Deaconu groupoid")
                return None
            morphism = Deaconu(*code)
        else:
            if not isinstance(code, int):
                self.fail(path, "expected a morphism id for a finite groupoid")
                return None
            morphism = Explicit(code)
        if not g.is_valid(morphism):
            self.fail(path, f"{morphism} is not a morphism of the {spec.kind} groupoid")
            return None
        return morphism

    def _element(self, g: DiscreteGroupoid, name: str) -> AlgebraElement:
        pairs = []
        for i, (code, re, im) in enumerate(self.doc.elements[name]):
            morphism = self._morphism(g, code, f"elements.{name}.{i}.0")
            if morphism is not None:
                pairs.append((morphism, make_scalar(parse_scalar(re), parse_scalar(im))))
        return AlgebraElement(g, pairs, checked=True)

    def _unitary(
        self,
        g: DiscreteGroupoid,
        name: str,
        elements: dict[str, AlgebraElement],
        done: dict[str, UnitaryElement],
        stack: tuple[str, ...],
    ) -> UnitaryElement | None:
        if name in done:
            return done[name]
        path = f"unitaries.{name}"
        if name in stack:
            self.fail(path, f"circular reference through {' -> '.join((*stack, name))}")
            return None
        spec = self.doc.unitaries[name]
        try:
            if isinstance(spec, IdentityUnitarySpec):
                return UnitaryElement.identity(g, spec.size)
            if isinstance(spec, ShiftUnitarySpec):
                return UnitaryElement.shift(g, spec.power)
            if isinstance(spec, PhaseUnitarySpec):
                return UnitaryElement.scalar_phase(g, spec.theta)
            if isinstance(spec, MatrixUnitarySpec):
                return self._matrix(g, spec, path, elements)
            if isinstance(spec, (SumUnitarySpec, ProductUnitarySpec)):
                names = spec.parts if isinstance(spec, SumUnitarySpec) else spec.factors
                field_name = "parts" if isinstance(spec, SumUnitarySpec) else "factors"
                built: list[UnitaryElement] = []
                for i, ref in enumerate(names):
                    if ref not in self.doc.unitaries:
                        self.fail(f"{path}.{field_name}.{i}", f"unknown unitary {ref!r}")
                        return None
                    part = self._unitary(g, ref, elements, done, (*stack, name))
                    if part is None:
                        return None
                    built.append(part)
                result = built[0]
                for part in built[1:]:
                    result = result.direct_sum(part) if isinstance(spec, SumUnitarySpec) else result @ part
                done[name] = result
                return result
        except GroupoidalError as exc:
            self.fail(path, str(exc))
            return None
        self.fail(f"{path}.kind", "unsupported unitary")
        return None

    def _matrix(
        self,
        g: DiscreteGroupoid,
        spec: MatrixUnitarySpec,
        path: str,
        elements: dict[str, AlgebraElement],
    ) -> UnitaryElement | None:
        n = len(spec.entries)
        rows: list[list[AlgebraElement]] = []
        for i, row in enumerate(spec.entries):
            if len(row) != n:
                self.fail(f"{path}.entries.{i}", f"row has {len(row)} entries, expected {n}")
                return None
            built_row = []
            for j, ref in enumerate(row):
                if ref is None:
                    built_row.append(AlgebraElement.zero(g))
                elif ref in elements:
                    built_row.append(elements[ref])
                else:
                    self.fail(f"{path}.entries.{i}.{j}", f"unknown element {ref!r}")
                    return None
            rows.append(built_row)
        if not rows:
            self.fail(f"{path}.entries", "matrix must not be empty")
            return None
        return UnitaryElement.from_rows(g, rows)

    def _references(self, elements: dict[str, AlgebraElement]) -> None:
        doc = self.doc
        if doc.index is not None:
            if doc.index.unitary not in doc.unitaries:
                self.fail("index.unitary", f"unknown unitary {doc.index.unitary!r}")
            for i, ref in enumerate(doc.index.partners):
                if ref not in doc.unitaries:
                    self.fail(f"index.partners.{i}", f"unknown unitary {ref!r}")
        if doc.kms is not None:
            for key in ("f", "g"):
                ref = getattr(doc.kms, key)
                if ref not in elements:
                    self.fail(f"kms.{key}", f"unknown element {ref!r}")


def build_workbench(doc: ModelDocument, raw: bytes | str | None = None) -> Workbench:
    bench = _Builder(doc).build()
    bench.digest = input_digest(raw) if raw is not None else input_digest(canonical_json(doc))
    logger.debug("workbench %s: %d elements, %d unitaries", bench.name, len(bench.elements), len(bench.unitaries))
    return bench


def load_workbench(raw: bytes | str) -> Workbench:
    return build_workbench(validate_document(raw), raw)
