"""Multi-indices and differential polynomials over jet space.

A jet variable phi_A^(J) is keyed as ``(field, |J|, J)`` so that plain tuple
ordering gives the canonical order: field label, then graded-lex on ``J``.
Base coordinates x^i use the reserved field label ``""`` with ``J = e_i``; they
are never prolonged.
"""
from __future__ import annotations

import itertools
from functools import lru_cache
from math import comb
from numbers import Rational
from typing import Dict, Iterable, Iterator, Mapping, Tuple

from .rational import Q, as_rational

MultiIndex = Tuple[int, ...]
Var = Tuple[str, int, MultiIndex]
Monomial = Tuple[Tuple[Var, int], ...]

COORD = ""
AXES = "xyzw"
RESERVED = {"theta", "int", "D", "xi"}


# -- multi-indices -----------------------------------------------------------

def zero_index(n: int) -> MultiIndex:
    return (0,) * n


def unit_index(n: int, i: int) -> MultiIndex:
    if not 0 <= i < n:
        raise ValueError(f"axis {i} out of range for dimension {n}")
    return tuple(1 if k == i else 0 for k in range(n))


def madd(J: MultiIndex, K: MultiIndex) -> MultiIndex:
    return tuple(a + b for a, b in zip(J, K))


def msub(J: MultiIndex, K: MultiIndex) -> MultiIndex:
    """``J - K``; only defined when ``K <= J`` componentwise."""
    out = tuple(a - b for a, b in zip(J, K))
    if any(c < 0 for c in out):
        raise ValueError(f"{K} is not below {J}")
    return out


def mle(K: MultiIndex, J: MultiIndex) -> bool:
    return all(a <= b for a, b in zip(K, J))


def order(J: MultiIndex) -> int:
    return sum(J)


def below(J: MultiIndex) -> Iterator[MultiIndex]:
    """All multi-indices ``K <= J``."""
    return itertools.product(*(range(j + 1) for j in J))


def indices_of_order(n: int, k: int) -> Iterator[MultiIndex]:
    """All multi-indices in dimension ``n`` with ``|J| == k``."""
    if n == 1:
        yield (k,)
        return
    for first in range(k, -1, -1):
        for rest in indices_of_order(n - 1, k - first):
            yield (first,) + rest


def indices_up_to(n: int, k: int) -> Iterator[MultiIndex]:
    for m in range(k + 1):
        yield from indices_of_order(n, m)


def multi_binomial(J: MultiIndex, K: MultiIndex) -> int:
    """Product of 1-D binomials; 0 whenever some ``k_i`` falls outside ``[0, j_i]``."""
    out = 1
    for j, k in zip(J, K):
        if k < 0 or k > j:
            return 0
        out *= comb(j, k)
    return out


# -- monomials ---------------------------------------------------------------

def jet_var(field: str, J: MultiIndex) -> Var:
    return (field, sum(J), tuple(J))


def coord_var(n: int, i: int) -> Var:
    return (COORD, 1, unit_index(n, i))


def shift_var(v: Var, K: MultiIndex) -> Var:
    J = madd(v[2], K)
    return (v[0], v[1] + sum(K), J)


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    # merge of two sorted factor lists
    out = []
    i = j = 0
    la, lb = len(a), len(b)
    while i < la and j < lb:
        va, vb = a[i][0], b[j][0]
        if va == vb:
            out.append((va, a[i][1] + b[j][1]))
            i += 1
            j += 1
        elif va < vb:
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            j += 1
    if i < la:
        out.extend(a[i:])
    elif j < lb:
        out.extend(b[j:])
    return tuple(out)


def _mono_replace(m: Monomial, idx: int, new: Var) -> Monomial:
    """Lower the exponent of the ``idx``-th factor by one and multiply by ``new``."""
    v, e = m[idx]
    rest = list(m[:idx]) + ([(v, e - 1)] if e > 1 else []) + list(m[idx + 1:])
    for k, (w, f) in enumerate(rest):
        if w == new:
            rest[k] = (w, f + 1)
            return tuple(rest)
        if w > new:
            rest.insert(k, (new, 1))
            return tuple(rest)
    rest.append((new, 1))
    return tuple(rest)


@lru_cache(maxsize=None)
def _shift_axis(v: Var, axis: int) -> Var:
    J = list(v[2])
    J[axis] += 1
    return (v[0], v[1] + 1, tuple(J))


def _mono_drop(m: Monomial, idx: int) -> Monomial:
    v, e = m[idx]
    if e == 1:
        return m[:idx] + m[idx + 1:]
    return m[:idx] + ((v, e - 1),) + m[idx + 1:]


@lru_cache(maxsize=1_000_000)
def _mono_total_derivative(m: Monomial, axis: int) -> Tuple[Tuple[Monomial, int], ...]:
    out: Dict[Monomial, int] = {}
    for idx, (v, e) in enumerate(m):
        n = len(v[2])
        if axis >= n:
            raise ValueError(f"axis {axis} out of range for dimension {n}")
        if v[0] == COORD:
            if v[2][axis] != 1:
                continue
            nm = _mono_drop(m, idx)
        else:
            nm = _mono_replace(m, idx, _shift_axis(v, axis))
        out[nm] = out.get(nm, 0) + e
    return tuple(out.items())


_coerce = as_rational


# -- differential polynomials ------------------------------------------------

class DiffPolynomial:
    """Exact-coefficient polynomial in jet variables (and optionally coordinates).

    Instances are immutable; ``terms`` maps monomials to nonzero Fractions.
    """

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, object] | None = None):
        clean: Dict[Monomial, Q] = {}
        if terms:
            for m, c in terms.items():
                c = _coerce(c)
                if c:
                    clean[m] = c
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: Dict[Monomial, Q]) -> "DiffPolynomial":
        obj = cls.__new__(cls)
        obj.terms = terms
        obj._hash = None
        return obj

    @classmethod
    def const(cls, c) -> "DiffPolynomial":
        return cls({(): c})

    @classmethod
    def var(cls, field: str, J: MultiIndex) -> "DiffPolynomial":
        return cls._raw({((jet_var(field, J), 1),): Q(1)})

    @classmethod
    def coordinate(cls, n: int, i: int) -> "DiffPolynomial":
        return cls._raw({((coord_var(n, i), 1),): Q(1)})

    # arithmetic
    def __add__(self, other):
        other = as_poly(other)
        if not other.terms:
            return self
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return DiffPolynomial._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return DiffPolynomial._raw({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-as_poly(other))

    def __rsub__(self, other):
        return as_poly(other) - self

    def __mul__(self, other):
        if not isinstance(other, DiffPolynomial):
            c = _coerce(other)
            if not c:
                return ZERO
            return DiffPolynomial._raw({m: v * c for m, v in self.terms.items()})
        if not self.terms or not other.terms:
            return ZERO
        out: Dict[Monomial, Q] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return DiffPolynomial._raw({m: c for m, c in out.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * (1 / _coerce(other))

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        out = ONE
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Rational)):
            other = DiffPolynomial.const(other)
        if not isinstance(other, DiffPolynomial):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"DiffPolynomial({self})"

    def __str__(self):
        from .printer import format_poly
        return format_poly(self)

    # structure
    def variables(self) -> set:
        return {v for m in self.terms for v, _ in m}

    def jet_variables(self) -> set:
        return {v for v in self.variables() if v[0] != COORD}

    def fields(self) -> set:
        return {v[0] for v in self.jet_variables()}

    def max_order(self) -> int:
        """Largest ``|J|`` among jet variables; -1 when there are none."""
        return max((v[1] for v in self.jet_variables()), default=-1)

    def dimension(self) -> int | None:
        for v in self.variables():
            return len(v[2])
        return None

    def is_constant(self) -> bool:
        return all(not m for m in self.terms)

    def constant_term(self) -> Q:
        return self.terms.get((), Q(0))

    def diff(self, v: Var) -> "DiffPolynomial":
        """Partial derivative with respect to one jet (or coordinate) variable."""
        out: Dict[Monomial, Q] = {}
        for m, c in self.terms.items():
            for idx, (w, e) in enumerate(m):
                if w == v:
                    nm = _mono_drop(m, idx)
                    out[nm] = out.get(nm, 0) + c * e
                    break
        return DiffPolynomial._raw({m: c for m, c in out.items() if c})

    def diff_jet(self, field: str, J: MultiIndex) -> "DiffPolynomial":
        return self.diff(jet_var(field, J))

    def substitute_zero_coordinates(self) -> "DiffPolynomial":
        return DiffPolynomial({m: c for m, c in self.terms.items()
                               if all(v[0] != COORD for v, _ in m)})


ZERO = DiffPolynomial._raw({})
ONE = DiffPolynomial._raw({(): Q(1)})


class PolyAccumulator:
    """Mutable sum of polynomials; avoids quadratic copying in long sums."""

    __slots__ = ("terms",)

    def __init__(self):
        self.terms: Dict[Monomial, Q] = {}

    def add(self, f: DiffPolynomial, scale=1) -> None:
        t = self.terms
        for m, c in f.terms.items():
            t[m] = t.get(m, 0) + (c * scale if scale != 1 else c)

    def result(self) -> DiffPolynomial:
        return DiffPolynomial._raw({m: c for m, c in self.terms.items() if c})


def as_poly(x) -> DiffPolynomial:
    if isinstance(x, DiffPolynomial):
        return x
    return DiffPolynomial.const(x)


# -- total derivatives -------------------------------------------------------

def total_derivative(f: DiffPolynomial, axis: int) -> DiffPolynomial:
    """``D_axis f`` (axes are 0-based)."""
    if axis < 0:
        raise ValueError(f"axis {axis} out of range")
    out: Dict[Monomial, Q] = {}
    for m, c in f.terms.items():
        for nm, k in _mono_total_derivative(m, axis):
            out[nm] = out.get(nm, 0) + c * k
    return DiffPolynomial._raw({m: c for m, c in out.items() if c})


def total_derivative_multi(f: DiffPolynomial, J: MultiIndex) -> DiffPolynomial:
    """``D_J f = D_1^{j_1} ... D_n^{j_n} f``."""
    for axis, k in enumerate(J):
        for _ in range(k):
            if not f.terms:
                return f
            f = total_derivative(f, axis)
    return f


class _DerivativeTower:
    """Memo of ``D_K f`` for one ``f``, built incrementally along each axis."""

    def __init__(self, f: DiffPolynomial, n: int):
        self.n = n
        self.cache = {zero_index(n): f}

    def __call__(self, K: MultiIndex) -> DiffPolynomial:
        got = self.cache.get(K)
        if got is not None:
            return got
        axis = max(i for i, k in enumerate(K) if k)
        prev = list(K)
        prev[axis] -= 1
        out = total_derivative(self(tuple(prev)), axis)
        self.cache[K] = out
        return out


def derivative_tower(f: DiffPolynomial, n: int) -> _DerivativeTower:
    return _DerivativeTower(f, n)


# -- Frechet derivatives -----------------------------------------------------

class LinearDiffOperatorRow:
    """A scalar differential operator ``sum_N c_N D_N`` with polynomial coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[MultiIndex, DiffPolynomial] | None = None):
        self.coeffs = {tuple(N): as_poly(c) for N, c in (coeffs or {}).items() if as_poly(c)}

    def __eq__(self, other):
        if not isinstance(other, LinearDiffOperatorRow):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __add__(self, other: "LinearDiffOperatorRow"):
        out = dict(self.coeffs)
        for N, c in other.coeffs.items():
            out[N] = out.get(N, ZERO) + c
        return LinearDiffOperatorRow(out)

    def scale(self, g) -> "LinearDiffOperatorRow":
        return LinearDiffOperatorRow({N: c * g for N, c in self.coeffs.items()})

    def apply(self, eta: DiffPolynomial) -> DiffPolynomial:
        if not self.coeffs:
            return ZERO
        n = len(next(iter(self.coeffs)))
        tower = derivative_tower(eta, n)
        out = ZERO
        for N, c in self.coeffs.items():
            out = out + c * tower(N)
        return out

    def after_total_derivative(self, axis: int) -> "LinearDiffOperatorRow":
        """The composite ``D_axis o self``."""
        out: Dict[MultiIndex, DiffPolynomial] = {}
        for N, c in self.coeffs.items():
            out[N] = out.get(N, ZERO) + total_derivative(c, axis)
            N1 = madd(N, unit_index(len(N), axis))
            out[N1] = out.get(N1, ZERO) + c
        return LinearDiffOperatorRow(out)

    def __repr__(self):
        inner = ", ".join(f"{N}: {c}" for N, c in sorted(self.coeffs.items()))
        return f"LinearDiffOperatorRow({{{inner}}})"


def jet_partials(f: DiffPolynomial, field: str | None = None) -> Dict[Var, DiffPolynomial]:
    """All nonzero ``df/dphi_A^(J)``, optionally restricted to one field."""
    out = {}
    for v in sorted(f.jet_variables()):
        if field is None or v[0] == field:
            d = f.diff(v)
            if d:
                out[v] = d
    return out


def frechet_derivative(f: DiffPolynomial, field: str) -> LinearDiffOperatorRow:
    """``f'_A = sum_J (df/dphi_A^(J)) D_J``."""
    return LinearDiffOperatorRow({v[2]: d for v, d in jet_partials(f, field).items()})


class SecondFrechet:
    """Symmetric bilinear form ``(A,J),(B,K) -> d^2 f / dphi_A^(J) dphi_B^(K)``."""

    def __init__(self, entries: Dict[Tuple[Var, Var], DiffPolynomial]):
        self.entries = entries

    def coefficient(self, a: Var, b: Var) -> DiffPolynomial:
        return self.entries.get((a, b), ZERO)

    def is_zero(self) -> bool:
        return not self.entries

    def apply(self, xi: Mapping[str, DiffPolynomial], eta: Mapping[str, DiffPolynomial]) -> DiffPolynomial:
        out = ZERO
        for (a, b), c in self.entries.items():
            x = xi.get(a[0])
            y = eta.get(b[0])
            if x is None or y is None:
                continue
            out = out + c * total_derivative_multi(x, a[2]) * total_derivative_multi(y, b[2])
        return out


def second_frechet(f: DiffPolynomial) -> SecondFrechet:
    entries = {}
    first = jet_partials(f)
    for a, fa in first.items():
        for b, fab in jet_partials(fa).items():
            entries[(a, b)] = fab
    return SecondFrechet(entries)


# -- higher Eulerian operators ----------------------------------------------

def higher_euler(f: DiffPolynomial, field: str, J: MultiIndex) -> DiffPolynomial:
    """``E^J_A(f) = sum_K (-1)^{|K|+|J|} C(K,J) D_{K-J} df/dphi_A^(K)``.

    The sign is ``(-1)^{|K|+|J|}``, which differs from the ``(-1)^{|K|}``
    convention found elsewhere; the two agree at ``J = 0``.
    """
    J = tuple(J)
    out = ZERO
    for v, d in jet_partials(f, field).items():
        K = v[2]
        b = multi_binomial(K, J)
        if not b:
            continue
        sign = -1 if (v[1] + sum(J)) % 2 else 1
        out = out + total_derivative_multi(d, msub(K, J)) * (sign * b)
    return out


def higher_euler_all(f: DiffPolynomial, field: str, n: int) -> Dict[MultiIndex, DiffPolynomial]:
    """Every nonzero ``E^J_A(f)``; ``J`` ranges over ``|J| <= max_order(f)``.

    Shares one derivative tower per partial derivative across all ``J``.
    """
    acc: Dict[MultiIndex, Dict[Monomial, Q]] = {}
    for v, d in jet_partials(f, field).items():
        K = v[2]
        tower = derivative_tower(d, n)
        for J in below(K):
            b = multi_binomial(K, J)
            sign = -1 if (v[1] + sum(J)) % 2 else 1
            tgt = acc.setdefault(J, {})
            for m, c in tower(msub(K, J)).terms.items():
                tgt[m] = tgt.get(m, 0) + c * (sign * b)
    out = {}
    for J, terms in acc.items():
        e = DiffPolynomial._raw({m: c for m, c in terms.items() if c})
        if e:
            out[J] = e
    return out


def euler_lagrange(f: DiffPolynomial, field: str, n: int) -> DiffPolynomial:
    return higher_euler(f, field, zero_index(n))


class JetSpace:
    """Declared fields and spatial dimension; fixed for a session."""

    def __init__(self, fields: Iterable[str], n: int = 1):
        self.fields = tuple(fields)
        if not self.fields:
            raise ValueError("at least one field is required")
        if not 1 <= n <= len(AXES):
            raise ValueError(f"dimension must be between 1 and {len(AXES)}")
        self.n = n
        self.axis_names = tuple(AXES[:n])
        if len(set(self.fields)) != len(self.fields):
            raise ValueError("duplicate field label")
        for f in self.fields:
            # labels must survive the u_x / Dx / theta notation unambiguously
            if (not f.isidentifier() or f in RESERVED or "_" in f or f.startswith("D")
                    or f in self.axis_names):
                raise ValueError(f"invalid field label {f!r}")

    def __eq__(self, other):
        return (isinstance(other, JetSpace) and self.fields == other.fields
                and self.n == other.n and self.axis_names == other.axis_names)

    def __hash__(self):
        return hash((self.fields, self.n, self.axis_names))

    def __repr__(self):
        return f"JetSpace(fields={list(self.fields)}, n={self.n})"

    def zero(self) -> MultiIndex:
        return zero_index(self.n)

    def unit(self, i: int) -> MultiIndex:
        return unit_index(self.n, i)

    def var(self, field: str, J: MultiIndex | None = None) -> DiffPolynomial:
        if field not in self.fields:
            raise KeyError(f"undeclared field {field!r}")
        J = self.zero() if J is None else tuple(J)
        if len(J) != self.n:
            raise ValueError(f"multi-index {J} does not match dimension {self.n}")
        return DiffPolynomial.var(field, J)

    def coordinate(self, i: int) -> DiffPolynomial:
        return DiffPolynomial.coordinate(self.n, i)

