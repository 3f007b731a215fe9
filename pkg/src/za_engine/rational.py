"""The exact scalar type.

``Rational`` is ``gmpy2.mpq`` when available and ``fractions.Fraction``
otherwise; both are exact, hash-compatible and interoperate.  Floats are
refused at every entry point.
"""

from __future__ import annotations

from fractions import Fraction

try:
    from gmpy2 import mpq as Rational
except ImportError:  # pragma: no cover
    Rational = Fraction

RATIONAL_TYPES = (Fraction, type(Rational(0)), int)


def to_rational(x) -> Rational:
    """Exact conversion from int, Fraction, mpq or a ``"p/q"`` string."""
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, float):
        raise TypeError("floats are not accepted for exact quantities")
    if isinstance(x, str):
        s = x.strip()
        if not s or any(ch in s for ch in ".eE"):
            raise ValueError(f"not an exact rational literal: {x!r}")
        return Rational(Fraction(s))
    if isinstance(x, RATIONAL_TYPES):
        return Rational(x)
    try:
        return Rational(x)
    except (TypeError, ValueError):
        raise TypeError(f"cannot convert {type(x).__name__} to a rational") from None


def is_rational(x) -> bool:
    return isinstance(x, RATIONAL_TYPES) and not isinstance(x, bool)


def sign(n: int) -> int:
    """``(-1)**n`` as an int, also for negative ``n``."""
    return -1 if n % 2 else 1
