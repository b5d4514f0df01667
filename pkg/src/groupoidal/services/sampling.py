"""Seeded random data for the property checks: rational coefficients, bounded-degree supports."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from groupoidal.core.scalars import Scalar
from groupoidal.core.settings import settings
from groupoidal.services.convolution import AlgebraElement
from groupoidal.services.groupoids.base import DiscreteGroupoid, Morphism, Window


def make_rng(seed: int | None = None) -> np.random.Generator:
    return np.random.default_rng(settings.seed if seed is None else seed)


def random_rational(rng: np.random.Generator, bound: int = 5) -> Fraction:
    """Nonzero p/q with |p| <= bound and 1 <= q <= bound."""
    p = 0
    while p == 0:
        p = int(rng.integers(-bound, bound + 1))
    return Fraction(p, int(rng.integers(1, bound + 1)))


def random_scalar(rng: np.random.Generator, *, exact: bool = True) -> Scalar:
    if exact:
        value = random_rational(rng)
        return value.numerator if value.denominator == 1 else value
    return complex(float(rng.normal()), float(rng.normal()))


def support_pool(g: DiscreteGroupoid, spread: int) -> list[Morphism]:
    """Morphisms available to random elements: all of a finite model, |degree| <= spread otherwise."""
    return g.morphisms(None if g.is_finite else Window(spread))


def random_element(
    g: DiscreteGroupoid,
    rng: np.random.Generator,
    *,
    terms: int = 5,
    spread: int = 2,
    exact: bool = True,
    pool: list[Morphism] | None = None,
) -> AlgebraElement:
    """
    A random element of C_c(g) with up to ``terms`` support points.

    ``g`` may be a subgroupoid (a kernel); the element then lives on its ambient groupoid
    but is supported inside ``g``.
    """
    candidates = pool if pool is not None else support_pool(g, spread)
    if not candidates:
        return AlgebraElement.zero(g)
    picks = rng.choice(len(candidates), size=min(terms, len(candidates)), replace=False)
    return AlgebraElement(
        g, {candidates[int(i)]: random_scalar(rng, exact=exact) for i in picks}, checked=True
    )


def random_time(rng: np.random.Generator) -> float:
    return float(rng.uniform(-math.pi, math.pi))


def random_degree(rng: np.random.Generator, bound: int) -> int:
    return int(rng.integers(-bound, bound + 1))
