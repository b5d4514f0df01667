"""Factory that returns the groupoid model described by a document's groupoid section."""

from __future__ import annotations

from groupoidal.core.errors import UnsupportedModelError
from groupoidal.models.document import (
    DeaconuSpec,
    FiniteSpec,
    GroupoidSpec,
    PairSpec,
    RotationSpec,
    TransformationSpec,
)
from groupoidal.services.groupoids.base import DiscreteGroupoid
from groupoidal.services.groupoids.deaconu import build_deaconu_groupoid
from groupoidal.services.groupoids.finite import build_finite_groupoid, build_pair_groupoid
from groupoidal.services.groupoids.transformation import (
    build_rotation_groupoid,
    build_transformation_groupoid,
)


class GroupoidFactory:
    """transformation / rotation -> X x| Z; deaconu -> X x| sigma; finite / pair -> explicit tables."""

    @staticmethod
    def from_spec(spec: GroupoidSpec) -> DiscreteGroupoid:
        if isinstance(spec, TransformationSpec):
            return build_transformation_groupoid(spec.size, spec.act)
        if isinstance(spec, RotationSpec):
            return build_rotation_groupoid(spec.size, spec.step)
        if isinstance(spec, DeaconuSpec):
            return build_deaconu_groupoid(spec.size, spec.sigma)
        if isinstance(spec, PairSpec):
            return build_pair_groupoid(spec.size, spec.group_order)
        if isinstance(spec, FiniteSpec):
            return build_finite_groupoid(
                units=spec.units,
                ranges=[m.r for m in spec.morphisms],
                sources=[m.d for m in spec.morphisms],
                unit_ids=spec.unit_ids,
                inverses=spec.inverses,
                table=spec.table,
                labels=[m.label or f"#{i}" for i, m in enumerate(spec.morphisms)],
            )
        raise UnsupportedModelError(f"unknown groupoid kind {getattr(spec, 'kind', spec)!r}")
