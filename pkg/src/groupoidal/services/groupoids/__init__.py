"""
Discrete groupoid models: base, concrete implementations, factory and validation.

- DiscreteGroupoid: abstract base (units, r, d, compose, invert, windowed enumeration).
- FiniteExplicitGroupoid: explicit composition tables (pair groupoids, finite groups).
- TransformationGroupoid: X x| Z for a permutation of X (also the rotation examples).
- DeaconuGroupoid: X x| sigma for a partial self-map of X.
- GroupoidFactory: builds the model named by a document's groupoid section.

The class-space quotient lives in ``groupoids.quotient`` and is imported from there.
"""

from __future__ import annotations

from groupoidal.services.groupoids.base import (
    Deaconu,
    DiscreteGroupoid,
    Explicit,
    Morphism,
    Trans,
    Window,
)
from groupoidal.services.groupoids.deaconu import DeaconuGroupoid, build_deaconu_groupoid
from groupoidal.services.groupoids.factory import GroupoidFactory
from groupoidal.services.groupoids.finite import (
    FiniteExplicitGroupoid,
    build_cyclic_group,
    build_finite_groupoid,
    build_pair_groupoid,
)
from groupoidal.services.groupoids.transformation import (
    TransformationGroupoid,
    build_rotation_groupoid,
    build_transformation_groupoid,
)
from groupoidal.services.groupoids.validation import mutate_composition_table, validate_axioms

__all__ = [
    "Deaconu",
    "DeaconuGroupoid",
    "DiscreteGroupoid",
    "Explicit",
    "FiniteExplicitGroupoid",
    "GroupoidFactory",
    "Morphism",
    "Trans",
    "TransformationGroupoid",
    "Window",
    "build_cyclic_group",
    "build_deaconu_groupoid",
    "build_finite_groupoid",
    "build_pair_groupoid",
    "build_rotation_groupoid",
    "build_transformation_groupoid",
    "mutate_composition_table",
    "validate_axioms",
]
