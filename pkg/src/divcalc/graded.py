"""Theta-graded densities and local functionals modulo formal divergences.

A density ``sum_J theta^(J) f_J`` stands for ``sum_J (D_J theta) f_J`` where
theta is the characteristic function of the integration domain.  Products of
gradings add (``theta^(I) * theta^(J) = theta^(I+J)``).  Formal divergences
``D_i(theta^(J) w)`` integrate to zero for any boundary behaviour, so every
functional has the unique grading-zero representative
``theta * sum_J (-1)^{|J|} D_J f_J``.
"""
from __future__ import annotations

from typing import Dict, Iterator, Mapping, Tuple

from .jetcore import (
    ZERO,
    DiffPolynomial,
    MultiIndex,
    as_poly,
    higher_euler,
    higher_euler_all,
    madd,
    total_derivative,
    unit_index,
    zero_index,
)


def theta_multiply(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    """``D_I theta x D_J theta = D_{I+J} theta``."""
    if len(a) != len(b):
        raise ValueError("gradings of different dimension")
    return madd(a, b)


class GradedDensity:
    """Finite sum ``sum_J theta^(J) f^<J>`` (a representative, not a class)."""

    __slots__ = ("n", "terms")

    def __init__(self, terms: Mapping[MultiIndex, object] | None, n: int):
        self.n = n
        clean: Dict[MultiIndex, DiffPolynomial] = {}
        for J, f in (terms or {}).items():
            J = tuple(J)
            if len(J) != n:
                raise ValueError(f"grading {J} does not match dimension {n}")
            f = as_poly(f)
            if f:
                clean[J] = clean.get(J, ZERO) + f
        self.terms = {J: f for J, f in clean.items() if f}

    @classmethod
    def bulk(cls, f, n: int) -> "GradedDensity":
        return cls({zero_index(n): f}, n)

    @classmethod
    def zero(cls, n: int) -> "GradedDensity":
        return cls({}, n)

    def __iter__(self) -> Iterator[Tuple[MultiIndex, DiffPolynomial]]:
        return iter(sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0])))

    def __add__(self, other: "GradedDensity") -> "GradedDensity":
        self._check(other)
        out = dict(self.terms)
        for J, f in other.terms.items():
            out[J] = out.get(J, ZERO) + f
        return GradedDensity(out, self.n)

    def __neg__(self):
        return GradedDensity({J: -f for J, f in self.terms.items()}, self.n)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c) -> "GradedDensity":
        """Multiply every coefficient by a scalar or polynomial."""
        return GradedDensity({J: f * c for J, f in self.terms.items()}, self.n)

    __rmul__ = __mul__

    def __eq__(self, other):
        """Representation equality; use :class:`LocalFunctional` for equality of classes."""
        if not isinstance(other, GradedDensity):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"GradedDensity({self})"

    def __str__(self):
        from .printer import format_graded
        return format_graded(self)

    def _check(self, other):
        if self.n != other.n:
            raise ValueError("densities of different dimension")

    def component(self, J: MultiIndex) -> DiffPolynomial:
        return self.terms.get(tuple(J), ZERO)

    def gradings(self):
        return sorted(self.terms, key=lambda J: (sum(J), J))

    def max_grading(self) -> int:
        return max((sum(J) for J in self.terms), default=0)

    def max_order(self) -> int:
        return max((f.max_order() for f in self.terms.values()), default=-1)

    def shift(self, K: MultiIndex) -> "GradedDensity":
        """Multiply by ``theta^(K)`` (gradings add)."""
        return GradedDensity({madd(J, K): f for J, f in self.terms.items()}, self.n)

    def times(self, other: "GradedDensity") -> "GradedDensity":
        """Graded product: gradings add, coefficients multiply."""
        self._check(other)
        out: Dict[MultiIndex, DiffPolynomial] = {}
        for I, f in self.terms.items():
            for J, g in other.terms.items():
                K = madd(I, J)
                out[K] = out.get(K, ZERO) + f * g
        return GradedDensity(out, self.n)

    def map_coefficients(self, fn) -> "GradedDensity":
        return GradedDensity({J: fn(f) for J, f in self.terms.items()}, self.n)

    def coefficient_derivative(self, axis: int) -> "GradedDensity":
        """``D_axis`` on the coefficients only, gradings untouched."""
        return self.map_coefficients(lambda f: total_derivative(f, axis))

    def total_derivative(self, axis: int) -> "GradedDensity":
        """Formal divergence ``D_axis`` acting by Leibniz on theta and coefficient."""
        e = unit_index(self.n, axis)
        out: Dict[MultiIndex, DiffPolynomial] = {}
        for J, f in self.terms.items():
            out[madd(J, e)] = out.get(madd(J, e), ZERO) + f
            df = total_derivative(f, axis)
            out[J] = out.get(J, ZERO) + df
        return GradedDensity(out, self.n)

    def double_bracket_components(self) -> Dict[MultiIndex, DiffPolynomial]:
        """Coefficients in the domain-integral notation: ``f^<<J>> = (-1)^{|J|} f^<J>``."""
        return {J: (-f if sum(J) % 2 else f) for J, f in self.terms.items()}


def canonicalize_functional(d: GradedDensity) -> GradedDensity:
    """Grading-zero representative ``theta * sum_J (-1)^{|J|} D_J f^<J>``.

    Evaluated Horner-style: the top grading is integrated by parts one step
    at a time, so each total derivative acts on an accumulated sum.
    """
    work = dict(d.terms)
    while True:
        graded = [J for J in work if any(J)]
        if not graded:
            break
        J = max(graded, key=lambda K: (sum(K), K))
        axis = next(i for i, j in enumerate(J) if j)
        lower = list(J)
        lower[axis] -= 1
        lower = tuple(lower)
        work[lower] = work.get(lower, ZERO) - total_derivative(work.pop(J), axis)
    return GradedDensity(work, d.n)


class LocalFunctional:
    """``int sum_J theta^(J) f^<J>`` as a class modulo formal divergences."""

    __slots__ = ("density", "_canon")

    def __init__(self, density: GradedDensity):
        self.density = density
        self._canon = None

    @classmethod
    def bulk(cls, f, n: int) -> "LocalFunctional":
        return cls(GradedDensity.bulk(f, n))

    @property
    def n(self) -> int:
        return self.density.n

    def canonical(self) -> GradedDensity:
        if self._canon is None:
            self._canon = canonicalize_functional(self.density)
        return self._canon

    def canonical_integrand(self) -> DiffPolynomial:
        return self.canonical().component(zero_index(self.n))

    def is_zero(self) -> bool:
        return not self.canonical()

    def __eq__(self, other):
        if not isinstance(other, LocalFunctional):
            return NotImplemented
        return self.canonical() == other.canonical()

    def __hash__(self):
        return hash(self.canonical())

    def __add__(self, other):
        return LocalFunctional(self.density + other.density)

    def __sub__(self, other):
        return LocalFunctional(self.density - other.density)

    def __neg__(self):
        return LocalFunctional(-self.density)

    def __mul__(self, c):
        return LocalFunctional(self.density * c)

    __rmul__ = __mul__

    def __repr__(self):
        return f"LocalFunctional(int {self.density})"

    def __str__(self):
        return f"int {self.density}"

    def bulk_boundary(self) -> Tuple[GradedDensity, GradedDensity]:
        """Split the stored representative into grading-0 and boundary (|J|>0) parts."""
        z = zero_index(self.n)
        bulk = GradedDensity({J: f for J, f in self.density.terms.items() if J == z}, self.n)
        bnd = GradedDensity({J: f for J, f in self.density.terms.items() if J != z}, self.n)
        return bulk, bnd


def functional_is_zero(F: LocalFunctional) -> bool:
    return F.is_zero()


def as_functional(F) -> LocalFunctional:
    if isinstance(F, LocalFunctional):
        return F
    if isinstance(F, GradedDensity):
        return LocalFunctional(F)
    raise TypeError(f"expected a local functional, got {type(F).__name__}")


def variational_derivative(F, field: str) -> Dict[MultiIndex, DiffPolynomial]:
    """Components of ``dF/dphi_A = sum_J (-1)^{|J|} E^J_A(f) D_J theta``.

    ``f`` is the canonical integrand; the zero component is the classical
    Euler-Lagrange derivative.
    """
    F = as_functional(F)
    f = F.canonical_integrand()
    return {J: (-e if sum(J) % 2 else e) for J, e in higher_euler_all(f, field, F.n).items()}


def full_variational_derivative(F, field: str) -> GradedDensity:
    """The same data as a graded density ``sum_J theta^(J) (-1)^{|J|} E^J(f)``."""
    F = as_functional(F)
    return GradedDensity(variational_derivative(F, field), F.n)


class StandardClass:
    """A density of the classical calculus (theta = 1), modulo total divergences."""

    def __init__(self, f: DiffPolynomial, n: int, fields):
        self.representative = f
        self.n = n
        self.fields = tuple(fields)

    def is_zero(self) -> bool:
        # kernel of the Euler-Lagrange operator = total divergences
        z = zero_index(self.n)
        fields = set(self.fields) | self.representative.fields()
        return all(not higher_euler(self.representative, A, z) for A in fields)

    def __eq__(self, other):
        if not isinstance(other, StandardClass):
            return NotImplemented
        return StandardClass(self.representative - other.representative, self.n,
                             set(self.fields) | set(other.fields)).is_zero()

    def __repr__(self):
        return f"StandardClass(int {self.representative})"


def quotient_to_standard(d, fields=()) -> StandardClass:
    """Set ``theta = 1``: every ``D_J theta`` with ``|J| > 0`` vanishes."""
    if isinstance(d, LocalFunctional):
        d = d.density
    return StandardClass(d.component(zero_index(d.n)), d.n, fields)
