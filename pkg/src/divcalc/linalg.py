"""Exact sparse Gaussian elimination over the rationals.

Vectors are dicts ``key -> exact rational``; keys must be mutually comparable so
the pivot choice (smallest key) is deterministic.
"""
from __future__ import annotations

from typing import Dict, Hashable, List, Optional, Sequence

from .rational import Q

Vector = Dict[Hashable, Q]


class ResourceLimitExceeded(RuntimeError):
    """The reduction basis outgrew the configured limit."""


def _axpy(y: Vector, a: Q, x: Vector) -> None:
    for k, v in x.items():
        s = y.get(k, 0) + a * v
        if s:
            y[k] = s
        else:
            y.pop(k, None)


class EchelonBasis:
    """Incrementally reduced basis that remembers how each row was built."""

    def __init__(self):
        self.rows: Dict[Hashable, Vector] = {}
        self.combos: Dict[Hashable, Vector] = {}

    def reduce(self, v: Vector, combo: Optional[Vector] = None):
        v = dict(v)
        combo = dict(combo or {})
        while v:
            pivots = [k for k in v if k in self.rows]
            if not pivots:
                break
            for k in sorted(pivots):
                c = v.get(k)
                if not c:
                    continue
                _axpy(v, -c, self.rows[k])
                _axpy(combo, -c, self.combos[k])
        return v, combo

    def add(self, v: Vector, label: Hashable) -> bool:
        v, combo = self.reduce(v, {label: Q(1)})
        if not v:
            return False
        p = min(v)
        inv = 1 / v[p]
        v = {k: c * inv for k, c in v.items()}
        combo = {k: c * inv for k, c in combo.items()}
        # keep rows fully reduced against the new pivot
        for q, row in self.rows.items():
            c = row.get(p)
            if c:
                _axpy(row, -c, v)
                _axpy(self.combos[q], -c, combo)
        self.rows[p] = v
        self.combos[p] = combo
        return True

    @property
    def rank(self) -> int:
        return len(self.rows)


def solve_membership(columns: Sequence[Vector], target: Vector):
    """Return multipliers ``m`` with ``sum m_k columns[k] == target``, or None.

    The second return value is the reduced remainder of ``target``.
    """
    basis = EchelonBasis()
    for idx, col in enumerate(columns):
        basis.add(col, idx)
    rem, combo = basis.reduce(target)
    if rem:
        return None, rem
    mult = {k: -c for k, c in combo.items() if c}
    return mult, {}


def rank(vectors: List[Vector]) -> int:
    basis = EchelonBasis()
    for i, v in enumerate(vectors):
        basis.add(v, i)
    return basis.rank
