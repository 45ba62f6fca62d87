"""Exact rational scalar type: gmpy2's ``mpq`` when available, else ``Fraction``."""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational

try:
    from gmpy2 import mpq as Q
except ImportError:  # pragma: no cover - exercised only without gmpy2
    Q = Fraction


def as_rational(c):
    if isinstance(c, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(c, (int, Rational)):
        return Q(c)
    if isinstance(c, str):
        return Q(Fraction(c))
    raise TypeError(f"exact rational coefficient required, got {type(c).__name__}")
