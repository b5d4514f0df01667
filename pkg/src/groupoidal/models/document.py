from __future__ import annotations

from typing import Annotated, Literal, Union

from pydantic import (
    AfterValidator,
    BaseModel,
    ConfigDict,
    Field,
    StrictFloat,
    StrictInt,
    ValidationInfo,
    field_validator,
)

from groupoidal.core.constants import MODEL_SCHEMA_VERSION, SuiteName
from groupoidal.core.scalars import parse_scalar


def _rational_pair(value: list[int]) -> list[int]:
    if value[1] == 0:
        raise ValueError("rational denominator must be nonzero")
    return value


# A scalar in a document: JSON integer, JSON float, or [numerator, denominator].
ScalarValue = Union[
    StrictInt,
    StrictFloat,
    Annotated[list[StrictInt], Field(min_length=2, max_length=2), AfterValidator(_rational_pair)],
]

# Explicit morphism id, [x, n] (transformation) or [x, n, y] (Deaconu).
MorphismCode = Union[StrictInt, Annotated[list[StrictInt], Field(min_length=2, max_length=3)]]

# [morphism, re, im]
ElementEntry = tuple[MorphismCode, ScalarValue, ScalarValue]


class _Spec(BaseModel):
    model_config = ConfigDict(extra="forbid")


# -------------------------------------------------------------------------
# Groupoids
# -------------------------------------------------------------------------


class TransformationSpec(_Spec):
    kind: Literal["transformation"]
    size: int = Field(..., ge=1)
    act: list[int]

    @field_validator("act")
    @classmethod
    def act_is_permutation(cls, value: list[int], info: ValidationInfo) -> list[int]:
        size = info.data.get("size")
        if size is not None and sorted(value) != list(range(size)):
            raise ValueError("act must be a permutation of 0..size-1")
        return value


class DeaconuSpec(_Spec):
    kind: Literal["deaconu"]
    size: int = Field(..., ge=1)
    sigma: list[int | None] = Field(..., description="sigma[x], or null where sigma is undefined")

    @field_validator("sigma")
    @classmethod
    def sigma_in_range(cls, value: list[int | None], info: ValidationInfo) -> list[int | None]:
        size = info.data.get("size")
        if size is None:
            return value
        if len(value) != size:
            raise ValueError(f"sigma must have {size} entries")
        if any(image is not None and not 0 <= image < size for image in value):
            raise ValueError("sigma image outside unit range")
        return value


class FiniteMorphismSpec(_Spec):
    r: int
    d: int
    label: str | None = None


class FiniteSpec(_Spec):
    """Explicit tables. Index errors are reported by validation, not by the schema."""

    kind: Literal["finite"]
    units: int = Field(..., ge=1)
    morphisms: list[FiniteMorphismSpec] = Field(..., min_length=1)
    unit_ids: list[int]
    inverses: list[int]
    table: list[tuple[int, int, int]]


class PairSpec(_Spec):
    kind: Literal["pair"]
    size: int = Field(..., ge=1)
    group_order: int = Field(1, ge=1)


class RotationSpec(_Spec):
    kind: Literal["rotation"]
    size: int = Field(..., ge=1)
    step: int = 1


GroupoidSpec = Annotated[
    Union[TransformationSpec, DeaconuSpec, FiniteSpec, PairSpec, RotationSpec],
    Field(discriminator="kind"),
]


# -------------------------------------------------------------------------
# Cocycles and measures
# -------------------------------------------------------------------------


class DegreeCocycleSpec(_Spec):
    kind: Literal["degree"]


class PotentialCocycleSpec(_Spec):
    kind: Literal["potential"]
    values: list[ScalarValue] = Field(..., description="f(x) per unit; c = f(r) - f(d)")


class ExplicitCocycleSpec(_Spec):
    kind: Literal["explicit"]
    values: list[ScalarValue] = Field(..., description="c(#i) per morphism id")


class LogModularCocycleSpec(_Spec):
    kind: Literal["log_modular"]


class ZeroCocycleSpec(_Spec):
    kind: Literal["zero"]


CocycleSpec = Annotated[
    Union[
        DegreeCocycleSpec,
        PotentialCocycleSpec,
        ExplicitCocycleSpec,
        LogModularCocycleSpec,
        ZeroCocycleSpec,
    ],
    Field(discriminator="kind"),
]


class MeasureSpec(_Spec):
    weights: list[ScalarValue] = Field(..., min_length=1)
    normalize: bool = False

    @field_validator("weights")
    @classmethod
    def weights_positive(cls, value: list) -> list:
        if any(parse_scalar(w) <= 0 for w in value):
            raise ValueError("weights must be strictly positive")
        return value


# -------------------------------------------------------------------------
# Unitaries
# -------------------------------------------------------------------------


class IdentityUnitarySpec(_Spec):
    kind: Literal["identity"]
    size: int = Field(1, ge=1)


class ShiftUnitarySpec(_Spec):
    kind: Literal["shift"]
    power: int = 1


class PhaseUnitarySpec(_Spec):
    kind: Literal["phase"]
    theta: float


class MatrixUnitarySpec(_Spec):
    kind: Literal["matrix"]
    entries: list[list[str | None]] = Field(..., description="element names; null is zero")


class SumUnitarySpec(_Spec):
    kind: Literal["sum"]
    parts: list[str] = Field(..., min_length=1)


class ProductUnitarySpec(_Spec):
    kind: Literal["product"]
    factors: list[str] = Field(..., min_length=1)


UnitarySpec = Annotated[
    Union[
        IdentityUnitarySpec,
        ShiftUnitarySpec,
        PhaseUnitarySpec,
        MatrixUnitarySpec,
        SumUnitarySpec,
        ProductUnitarySpec,
    ],
    Field(discriminator="kind"),
]


class IndexSpec(_Spec):
    unitary: str
    partners: list[str] = Field(default_factory=list)
    expected: ScalarValue | None = None


class KmsSpec(_Spec):
    f: str
    g: str
    expected: ScalarValue | None = None


# -------------------------------------------------------------------------
# Document
# -------------------------------------------------------------------------

GROUPOID_KINDS = frozenset({"transformation", "deaconu", "finite", "pair", "rotation"})
COCYCLE_KINDS = frozenset({"degree", "potential", "explicit", "log_modular", "zero"})
UNITARY_KINDS = frozenset({"identity", "shift", "phase", "matrix", "sum", "product"})


class ModelDocument(_Spec):
    """A declarative model: groupoid, cocycle, measure, named elements and suite choices."""

    schema_version: Literal["1"] = MODEL_SCHEMA_VERSION
    name: str | None = None
    description: str | None = None
    groupoid: GroupoidSpec
    cocycle: CocycleSpec | None = None
    measure: MeasureSpec | None = None
    elements: dict[str, list[ElementEntry]] = Field(default_factory=dict)
    unitaries: dict[str, UnitarySpec] = Field(default_factory=dict)
    index: IndexSpec | None = None
    kms: KmsSpec | None = None
    suites: list[SuiteName] = Field(default_factory=lambda: [SuiteName.ALL])
    window: int | None = Field(None, ge=0)
    tolerance: float | None = Field(None, gt=0)
    seed: int | None = None
