"""Number backends: exact rationals and 64-bit floats.

Rational values travel through JSON as ``"p/q"`` strings; floats stay JSON
numbers.
"""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Union

Number = Union[Fraction, float]

REL_TOL = 1e-9
BACKENDS = ("rational", "float")


def check_backend(backend: str) -> str:
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")
    return backend


def convert(x, backend: str = "rational") -> Number:
    """Coerce ``x`` (int, float, Fraction or ``"p/q"`` string) into ``backend``."""
    if isinstance(x, str):
        x = Fraction(x)
    if backend == "rational":
        if isinstance(x, Fraction):
            return x
        if isinstance(x, (int, Rational)):
            return Fraction(x)
        return Fraction(float(x))
    return float(x)


def is_exact(x) -> bool:
    return isinstance(x, (Fraction, int))


def encode(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return float(x)


def decode(x, backend: str | None = None):
    if isinstance(x, str):
        if x == "inf":
            return math.inf
        value = Fraction(x)
        return value if backend in (None, "rational") else float(value)
    if backend == "rational":
        return Fraction(x)
    return float(x)


def leq(a, b, exact: bool, rel_tol: float = REL_TOL) -> bool:
    """``a <= b`` exactly, or within a relative tolerance for floats."""
    if exact:
        return a <= b
    return float(a) <= float(b) + rel_tol * max(abs(float(a)), abs(float(b)), 1e-300)


def close(a, b, exact: bool, rel_tol: float = REL_TOL) -> bool:
    if exact:
        return a == b
    return math.isclose(float(a), float(b), rel_tol=rel_tol, abs_tol=1e-12)


def exact_sqrt(q: Fraction) -> Number:
    """Square root of a nonnegative rational; exact when it is a rational square."""
    if q < 0:
        raise ValueError("negative argument")
    num, den = q.numerator, q.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return math.sqrt(num / den) if num < 2**1000 else math.sqrt(float(q))


def lcm_denominators(values) -> int:
    out = 1
    for v in values:
        out = math.lcm(out, Fraction(v).denominator)
    return out
