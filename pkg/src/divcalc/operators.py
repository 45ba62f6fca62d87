"""Graded matrix differential operators ``I_AB = theta^(J) I^<J>N_AB D_N``."""
from __future__ import annotations

from typing import Dict, Iterable, Mapping, Tuple

from .graded import GradedDensity
from .jetcore import (
    ZERO,
    DiffPolynomial,
    JetSpace,
    MultiIndex,
    as_poly,
    below,
    derivative_tower,
    jet_partials,
    madd,
    msub,
    multi_binomial,
    total_derivative_multi,
)
from .rational import Q

Entry = Dict[Tuple[MultiIndex, MultiIndex], DiffPolynomial]


class GradedDiffOperator:
    """Square matrix operator over the fields of a :class:`JetSpace`.

    ``entries[(A, B)][(J, N)]`` is the coefficient of ``theta^(J) (.) D_N``.
    Storage is fully expanded, so equality is structural.
    """

    __slots__ = ("space", "entries")

    def __init__(self, space: JetSpace, entries: Mapping[Tuple[str, str], Mapping] | None = None):
        self.space = space
        clean: Dict[Tuple[str, str], Entry] = {}
        for (A, B), terms in (entries or {}).items():
            if A not in space.fields or B not in space.fields:
                raise KeyError(f"entry ({A}, {B}) uses an undeclared field")
            row: Entry = {}
            for (J, N), c in terms.items():
                J, N = tuple(J), tuple(N)
                if len(J) != space.n or len(N) != space.n:
                    raise ValueError("multi-index does not match dimension")
                row[(J, N)] = row.get((J, N), ZERO) + as_poly(c)
            row = {k: c for k, c in row.items() if c}
            if row:
                clean[(A, B)] = row
        self.entries = clean

    @classmethod
    def scalar(cls, space: JetSpace, terms: Mapping) -> "GradedDiffOperator":
        if len(space.fields) != 1:
            raise ValueError("scalar operator needs exactly one field")
        A = space.fields[0]
        return cls(space, {(A, A): terms})

    def terms(self) -> Iterable[Tuple[str, str, MultiIndex, MultiIndex, DiffPolynomial]]:
        for (A, B), row in sorted(self.entries.items()):
            for (J, N), c in sorted(row.items(), key=lambda t: (sum(t[0][0]), t[0][0], sum(t[0][1]), t[0][1])):
                yield A, B, J, N, c

    def entry(self, A: str, B: str) -> Entry:
        return self.entries.get((A, B), {})

    def gradings(self):
        return sorted({J for row in self.entries.values() for J, _ in row}, key=lambda J: (sum(J), J))

    def grade_component(self, J: MultiIndex) -> "GradedDiffOperator":
        """The operator ``I^<J>`` (returned at grading zero)."""
        z = self.space.zero()
        J = tuple(J)
        return GradedDiffOperator(self.space, {
            k: {(z, N): c for (K, N), c in row.items() if K == J}
            for k, row in self.entries.items()})

    def is_zero(self) -> bool:
        return not self.entries

    def __eq__(self, other):
        if not isinstance(other, GradedDiffOperator):
            return NotImplemented
        return self.space == other.space and self.entries == other.entries

    def __hash__(self):
        return hash((self.space, frozenset((k, frozenset(v.items())) for k, v in self.entries.items())))

    def __add__(self, other: "GradedDiffOperator") -> "GradedDiffOperator":
        _check_space(self, other)
        out = {k: dict(v) for k, v in self.entries.items()}
        for k, row in other.entries.items():
            tgt = out.setdefault(k, {})
            for key, c in row.items():
                tgt[key] = tgt.get(key, ZERO) + c
        return GradedDiffOperator(self.space, out)

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c) -> "GradedDiffOperator":
        return GradedDiffOperator(self.space, {
            k: {key: v * c for key, v in row.items()} for k, row in self.entries.items()})

    __rmul__ = __mul__

    def __repr__(self):
        return f"GradedDiffOperator({self})"

    def __str__(self):
        from .printer import format_operator
        return format_operator(self)

    def max_order(self) -> int:
        return max((sum(N) for row in self.entries.values() for _, N in row), default=0)

    def is_constant_coefficient(self) -> bool:
        return all(c.is_constant() for row in self.entries.values() for c in row.values())


def _check_space(a: GradedDiffOperator, b: GradedDiffOperator):
    if a.space != b.space:
        raise ValueError("operators act on different field sets")


def _as_vector(space: JetSpace, g) -> Dict[str, DiffPolynomial]:
    if isinstance(g, Mapping):
        extra = set(g) - set(space.fields)
        if extra:
            raise KeyError(f"undeclared fields {sorted(extra)}")
        return {A: as_poly(g.get(A, 0)) for A in space.fields}
    g = list(g)
    if len(g) != len(space.fields):
        raise ValueError(f"expected {len(space.fields)} components, got {len(g)}")
    return {A: as_poly(x) for A, x in zip(space.fields, g)}


def apply(op: GradedDiffOperator, g) -> Dict[str, GradedDensity]:
    """``(op g)_A = sum_B theta^(J) I^<J>N_AB D_N g_B`` for polynomial ``g``."""
    space = op.space
    vec = _as_vector(space, g)
    towers = {B: derivative_tower(vec[B], space.n) for B in space.fields}
    out = {}
    for A in space.fields:
        acc: Dict[MultiIndex, DiffPolynomial] = {}
        for B in space.fields:
            for (J, N), c in op.entry(A, B).items():
                acc[J] = acc.get(J, ZERO) + c * towers[B](N)
        out[A] = GradedDensity(acc, space.n)
    return out


def adjoint(op: GradedDiffOperator) -> GradedDiffOperator:
    """Graded adjoint, keeping every boundary term.

    ``I*^<J>M_AB = sum (-1)^{|K|} C(K,L) C(K-L,M) D_{K-L-M} I^<J-L>K_BA``.
    """
    out: Dict[Tuple[str, str], Entry] = {}
    for (B, A), row in op.entries.items():
        tgt = out.setdefault((A, B), {})
        for (J0, K), c in row.items():
            sign = -1 if sum(K) % 2 else 1
            tower = derivative_tower(c, op.space.n)
            for L in below(K):
                bl = multi_binomial(K, L)
                KL = msub(K, L)
                J = madd(J0, L)
                for M in below(KL):
                    coef = sign * bl * multi_binomial(KL, M)
                    key = (J, M)
                    tgt[key] = tgt.get(key, ZERO) + tower(msub(KL, M)) * coef
    return GradedDiffOperator(op.space, out)


def antisymmetrize(op: GradedDiffOperator) -> GradedDiffOperator:
    """``(op - op*) / 2``."""
    return (op - adjoint(op)) * Q(1, 2)


def is_antisymmetric(op: GradedDiffOperator) -> bool:
    return adjoint(op) == -op


def compose(a: GradedDiffOperator, b: GradedDiffOperator) -> GradedDiffOperator:
    """Composite ``a o b``.

    ``D_N`` of ``a`` acts by Leibniz on both the theta factor and the
    coefficient of ``b``; theta factors multiply by adding gradings.
    """
    _check_space(a, b)
    space = a.space
    out: Dict[Tuple[str, str], Entry] = {}
    for (A, C), row_a in a.entries.items():
        for (C2, B), row_b in b.entries.items():
            if C != C2:
                continue
            tgt = out.setdefault((A, B), {})
            for (Jb, Nb), cb in row_b.items():
                tower = derivative_tower(cb, space.n)
                for (Ja, Na), ca in row_a.items():
                    J0 = madd(Ja, Jb)
                    for P in below(Na):
                        rest = msub(Na, P)
                        bp = multi_binomial(Na, P)
                        for Qi in below(rest):
                            key = (madd(J0, P), madd(msub(rest, Qi), Nb))
                            val = ca * tower(Qi) * (bp * multi_binomial(rest, Qi))
                            tgt[key] = tgt.get(key, ZERO) + val
    return GradedDiffOperator(space, out)


def operator_frechet(op: GradedDiffOperator, direction) -> GradedDiffOperator:
    """Differentiate coefficients along ``direction`` (per-field graded densities).

    Term ``theta^(J) c D_N`` becomes ``theta^(J+M) (dc/dphi_C^(K)) D_K(eta_C^<M>) D_N``.
    """
    space = op.space
    eta = {}
    for A in space.fields:
        d = direction.get(A) if isinstance(direction, Mapping) else None
        if d is None:
            continue
        if not isinstance(d, GradedDensity):
            d = GradedDensity.bulk(d, space.n)
        eta[A] = d
    out: Dict[Tuple[str, str], Entry] = {}
    for (A, B), row in op.entries.items():
        tgt = out.setdefault((A, B), {})
        for (J, N), c in row.items():
            for v, dc in jet_partials(c).items():
                if v[0] not in eta:
                    continue
                for M, e in eta[v[0]].terms.items():
                    key = (madd(J, M), N)
                    tgt[key] = tgt.get(key, ZERO) + dc * total_derivative_multi(e, v[2])
    return GradedDiffOperator(space, out)


def identity_operator(space: JetSpace) -> GradedDiffOperator:
    z = space.zero()
    return GradedDiffOperator(space, {(A, A): {(z, z): 1} for A in space.fields})
