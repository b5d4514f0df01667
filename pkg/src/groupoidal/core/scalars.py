"""Scalar helpers shared by the engines.

Two regimes coexist. Exact scalars are ``int`` and ``fractions.Fraction`` (real rationals);
everything that needs a square root, a logarithm or an imaginary unit falls back to
binary64 ``float``/``complex``. Arithmetic between the two follows Python's numeric tower,
so a single float entry demotes a computation to tolerance comparisons.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any, Union

Scalar = Union[int, Fraction, float, complex]
ExactScalar = Union[int, Fraction]


def is_exact(value: Any) -> bool:
    return isinstance(value, (int, Fraction))


def is_integral(value: Any) -> bool:
    if isinstance(value, int):
        return True
    if isinstance(value, Fraction):
        return value.denominator == 1
    return False


def as_complex(value: Scalar) -> complex:
    return complex(value)


def as_real(value: Scalar) -> ExactScalar | float:
    """Return the real part, keeping exact values exact."""
    if isinstance(value, complex):
        return value.real
    return value


def close(a: Scalar, b: Scalar, tol: float) -> bool:
    """Exact equality for exact inputs; mixed absolute/relative tolerance otherwise."""
    if is_exact(a) and is_exact(b):
        return a == b
    za, zb = complex(a), complex(b)
    scale = max(1.0, abs(za), abs(zb))
    return abs(za - zb) <= tol * scale


def defect(a: Scalar, b: Scalar) -> float:
    return float(abs(complex(a) - complex(b)))


def make_scalar(re: Scalar, im: Scalar = 0) -> Scalar:
    """Combine real and imaginary parts, staying exact when the imaginary part is exactly 0."""
    if im == 0:
        return re
    return complex(float(re), float(im))


def parse_scalar(raw: Any) -> ExactScalar | float:
    """Decode the document encoding: JSON int, JSON float, or ``[num, den]``."""
    if isinstance(raw, bool):
        raise ValueError("booleans are not scalars")
    if isinstance(raw, int):
        return raw
    if isinstance(raw, float):
        return raw
    if isinstance(raw, (list, tuple)) and len(raw) == 2:
        num, den = raw
        if isinstance(num, bool) or isinstance(den, bool):
            raise ValueError("rational parts must be integers")
        if not isinstance(num, int) or not isinstance(den, int):
            raise ValueError("rational parts must be integers")
        if den == 0:
            raise ValueError("rational denominator must be nonzero")
        value = Fraction(num, den)
        return value.numerator if value.denominator == 1 else value
    raise ValueError(f"not a scalar: {raw!r}")


def dump_scalar(value: Scalar) -> Any:
    """JSON-ready form; the inverse of :func:`parse_scalar` for real values."""
    if isinstance(value, bool):
        return int(value)
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return value.numerator
        return [value.numerator, value.denominator]
    if isinstance(value, float):
        return value
    if isinstance(value, complex):
        if value.imag == 0:
            return value.real
        return {"re": value.real, "im": value.imag}
    raise TypeError(f"unsupported scalar type {type(value).__name__}")
