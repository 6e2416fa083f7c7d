"""Coefficient rings: Z (int), Z2 (int mod 2), Q (Fraction)."""

from fractions import Fraction

RINGS = ("Z", "Z2", "Q")


class StructuralError(ValueError):
    """Malformed input: the data does not describe the object it claims to."""


def check_ring(ring):
    if ring not in RINGS:
        raise StructuralError(f"unknown ring {ring!r}; expected one of {RINGS}")
    return ring


def coerce(value, ring):
    """Normalise a scalar into the canonical representation for ``ring``."""
    if ring == "Q":
        return Fraction(value)
    if isinstance(value, Fraction):
        if value.denominator != 1:
            raise StructuralError(f"non-integral coefficient {value} for ring {ring}")
        value = value.numerator
    elif not isinstance(value, int):
        raise StructuralError(f"bad coefficient {value!r} for ring {ring}")
    if ring == "Z2":
        return value % 2
    return int(value)


def zero(ring):
    return Fraction(0) if ring == "Q" else 0


def one(ring):
    return Fraction(1) if ring == "Q" else 1


def parse_scalar(text, ring):
    """Parse interchange scalars: ints, or strings like '5/6'."""
    if isinstance(text, str):
        text = Fraction(text)
    return coerce(text, ring)


def format_scalar(value):
    if isinstance(value, Fraction):
        return str(value) if value.denominator != 1 else str(value.numerator)
    return str(value)
