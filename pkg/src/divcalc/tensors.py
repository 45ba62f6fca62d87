"""Functional forms, multivectors, evolutionary vector fields and the SN bracket.

Forms and multivectors share one wedge engine.  A term is
``theta^(J) * c * b_1 ^ ... ^ b_m`` with ``c`` a differential polynomial and
basis labels ``b = (A, |K|, K)`` standing for ``delta phi_A^(K)`` (forms) or
``D_K delta/delta phi_A`` (vectors).  Labels are kept strictly increasing with
the sign of the sorting permutation folded into ``c``.

Two kinds of total derivative act on wedge densities:

* ``total_derivative`` is the formal divergence; it also raises the grading.
* ``coefficient_derivative`` acts on ``c`` and the labels only.  Contractions
  use it: gradings of the two arguments simply add, and each argument's
  basis derivatives move onto the other argument.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .graded import GradedDensity, LocalFunctional, as_functional
from .jetcore import (
    ZERO,
    DiffPolynomial,
    JetSpace,
    MultiIndex,
    PolyAccumulator,
    Var,
    as_poly,
    below,
    derivative_tower,
    jet_partials,
    jet_var,
    madd,
    msub,
    multi_binomial,
    shift_var,
    total_derivative,
    unit_index,
    zero_index,
)
from .linalg import ResourceLimitExceeded, solve_membership
from .rational import Q

FORM = "form"
VECTOR = "vector"
_OTHER = {FORM: VECTOR, VECTOR: FORM}

Labels = Tuple[Var, ...]
Key = Tuple[MultiIndex, Labels]


def normalize_labels(labels: Sequence[Var]) -> Tuple[int, Labels]:
    """Sort wedge labels; returns ``(sign, labels)`` with sign 0 on a repeat."""
    ls = list(labels)
    sign = 1
    for i in range(1, len(ls)):
        j = i
        while j > 0 and ls[j - 1] > ls[j]:
            ls[j - 1], ls[j] = ls[j], ls[j - 1]
            sign = -sign
            j -= 1
    for a, b in zip(ls, ls[1:]):
        if a == b:
            return 0, ()
    return sign, tuple(ls)


class WedgeDensity:
    """Theta-graded wedge polynomial of fixed degree and kind."""

    __slots__ = ("kind", "degree", "n", "terms")

    def __init__(self, kind: str, degree: int, n: int,
                 terms: Iterable[Tuple[MultiIndex, Sequence[Var], object]] = ()):
        if kind not in _OTHER:
            raise ValueError(f"unknown kind {kind!r}")
        self.kind = kind
        self.degree = degree
        self.n = n
        acc: Dict[Key, DiffPolynomial] = {}
        for J, labels, c in terms:
            if len(labels) != degree:
                raise ValueError(f"expected {degree} labels, got {len(labels)}")
            s, ls = normalize_labels(labels)
            if not s:
                continue
            c = as_poly(c)
            key = (tuple(J), ls)
            acc[key] = acc.get(key, ZERO) + (c if s > 0 else -c)
        self.terms = {k: c for k, c in acc.items() if c}

    @classmethod
    def _raw(cls, kind, degree, n, terms: Dict[Key, DiffPolynomial]) -> "WedgeDensity":
        obj = cls.__new__(cls)
        obj.kind, obj.degree, obj.n = kind, degree, n
        obj.terms = {k: c for k, c in terms.items() if c}
        return obj

    def like(self, terms: Dict[Key, DiffPolynomial], degree: int | None = None) -> "WedgeDensity":
        return WedgeDensity._raw(self.kind, self.degree if degree is None else degree, self.n, terms)

    # linear structure
    def _check(self, other: "WedgeDensity"):
        if (self.kind, self.degree, self.n) != (other.kind, other.degree, other.n):
            raise ValueError(f"cannot combine {self.kind}/{self.degree} with {other.kind}/{other.degree}")

    def __add__(self, other: "WedgeDensity") -> "WedgeDensity":
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, ZERO) + c
        return self.like(out)

    def __neg__(self):
        return self.like({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c) -> "WedgeDensity":
        return self.like({k: v * c for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, WedgeDensity):
            return NotImplemented
        if not self.terms and not other.terms:
            return True
        return (self.kind, self.degree, self.n) == (other.kind, other.degree, other.n) \
            and self.terms == other.terms

    def __hash__(self):
        return hash((self.kind, self.degree, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"WedgeDensity<{self.kind},{self.degree}>({self})"

    def __str__(self):
        from .printer import format_wedge
        return format_wedge(self)

    # structure
    def gradings(self):
        return sorted({J for J, _ in self.terms}, key=lambda J: (sum(J), J))

    def max_grading(self) -> int:
        return max((sum(J) for J, _ in self.terms), default=0)

    def max_order(self) -> int:
        best = -1
        for (_, labels), c in self.terms.items():
            best = max([best, c.max_order()] + [l[1] for l in labels])
        return best

    def grade_component(self, J: MultiIndex) -> "WedgeDensity":
        J = tuple(J)
        return self.like({k: c for k, c in self.terms.items() if k[0] == J})

    def shift(self, K: MultiIndex) -> "WedgeDensity":
        return self.like({(madd(J, K), ls): c for (J, ls), c in self.terms.items()})

    def monomials(self) -> Dict[Tuple[MultiIndex, Labels, tuple], Q]:
        """Flatten to ``(grading, labels, coefficient monomial) -> rational``."""
        out = {}
        for (J, ls), c in self.terms.items():
            for m, v in c.terms.items():
                out[(J, ls, m)] = v
        return out

    # derivatives
    def coefficient_derivative(self, axis: int) -> "WedgeDensity":
        e = unit_index(self.n, axis)
        out: Dict[Key, DiffPolynomial] = {}
        for (J, ls), c in self.terms.items():
            dc = total_derivative(c, axis)
            if dc:
                out[(J, ls)] = out.get((J, ls), ZERO) + dc
            for i, lab in enumerate(ls):
                new = ls[:i] + (shift_var(lab, e),) + ls[i + 1:]
                s, nl = normalize_labels(new)
                if s:
                    out[(J, nl)] = out.get((J, nl), ZERO) + (c if s > 0 else -c)
        return self.like(out)

    def coefficient_derivative_multi(self, K: MultiIndex) -> "WedgeDensity":
        w = self
        for axis, k in enumerate(K):
            for _ in range(k):
                if not w.terms:
                    return w
                w = w.coefficient_derivative(axis)
        return w

    def total_derivative(self, axis: int) -> "WedgeDensity":
        """Formal divergence: Leibniz over theta, coefficient and labels."""
        e = unit_index(self.n, axis)
        return self.shift(e) + self.coefficient_derivative(axis)

    def canonical(self) -> "WedgeDensity":
        """Grading-zero representative: ``theta^(J) X -> (-1)^{|J|} theta D_J X``."""
        z = zero_index(self.n)
        by_grade: Dict[MultiIndex, Dict[Key, DiffPolynomial]] = {}
        for (J, ls), c in self.terms.items():
            by_grade.setdefault(J, {})[(z, ls)] = c
        out = self.like({})
        for J, terms in by_grade.items():
            w = self.like(terms).coefficient_derivative_multi(J)
            out = out - w if sum(J) % 2 else out + w
        return out

    def quotient_to_standard(self) -> "WedgeDensity":
        """Drop every term carrying ``D_J theta`` with ``|J| > 0``."""
        z = zero_index(self.n)
        return self.like({k: c for k, c in self.terms.items() if k[0] == z})

    # products and partials
    def wedge(self, other: "WedgeDensity") -> "WedgeDensity":
        if self.kind != other.kind and self.degree and other.degree:
            raise ValueError("wedge of a form with a vector")
        kind = self.kind if self.degree else other.kind
        out: Dict[Key, DiffPolynomial] = {}
        for (I, la), a in self.terms.items():
            for (J, lb), b in other.terms.items():
                s, ls = normalize_labels(la + lb)
                if not s:
                    continue
                key = (madd(I, J), ls)
                p = a * b
                out[key] = out.get(key, ZERO) + (p if s > 0 else -p)
        return WedgeDensity._raw(kind, self.degree + other.degree, self.n, out)

    def jet_partials(self) -> Dict[Var, "WedgeDensity"]:
        """``dW/dphi_A^(J)`` for every jet variable in the coefficients."""
        out: Dict[Var, Dict[Key, DiffPolynomial]] = {}
        for key, c in self.terms.items():
            for v, d in jet_partials(c).items():
                tgt = out.setdefault(v, {})
                tgt[key] = tgt.get(key, ZERO) + d
        return {v: self.like(t) for v, t in out.items()}

    def label_partials(self) -> Dict[Var, "WedgeDensity"]:
        """Left derivative with respect to each basis label (slot ``i`` carries ``(-1)^i``)."""
        out: Dict[Var, Dict[Key, DiffPolynomial]] = {}
        for (J, ls), c in self.terms.items():
            for i, lab in enumerate(ls):
                tgt = out.setdefault(lab, {})
                key = (J, ls[:i] + ls[i + 1:])
                tgt[key] = tgt.get(key, ZERO) + (-c if i % 2 else c)
        return {v: self.like(t, self.degree - 1) for v, t in out.items()}

    def to_graded(self) -> GradedDensity:
        if self.degree:
            raise ValueError("only degree-0 wedge densities are scalar densities")
        return GradedDensity({J: c for (J, _), c in self.terms.items()}, self.n)


def scalar_wedge(d: GradedDensity, kind: str = VECTOR) -> WedgeDensity:
    return WedgeDensity._raw(kind, 0, d.n, {(J, ()): f for J, f in d.terms.items()})


def FunctionalForm(n: int, degree: int, terms=()) -> WedgeDensity:
    return WedgeDensity(FORM, degree, n, terms)


def MultiVector(n: int, degree: int, terms=()) -> WedgeDensity:
    return WedgeDensity(VECTOR, degree, n, terms)


def basis_vector(space: JetSpace, field: str, K: MultiIndex | None = None) -> WedgeDensity:
    """``D_K delta/delta phi_A`` with grading zero."""
    K = space.zero() if K is None else tuple(K)
    return MultiVector(space.n, 1, [(space.zero(), [jet_var(field, K)], 1)])


# -- evolutionary vector fields ---------------------------------------------

class EvolutionaryVectorField:
    """Characteristics ``psi_A = sum_J theta^(J) psi_A^<J>`` per field."""

    def __init__(self, space: JetSpace, characteristics: Mapping[str, object]):
        self.space = space
        chars = {}
        for A, psi in characteristics.items():
            if A not in space.fields:
                raise KeyError(f"undeclared field {A!r}")
            if not isinstance(psi, GradedDensity):
                psi = GradedDensity.bulk(psi, space.n)
            if psi:
                chars[A] = psi
        self.characteristics = chars

    def characteristic(self, A: str) -> GradedDensity:
        return self.characteristics.get(A, GradedDensity.zero(self.space.n))

    def __eq__(self, other):
        if not isinstance(other, EvolutionaryVectorField):
            return NotImplemented
        return self.characteristics == other.characteristics

    def __add__(self, other):
        chars = dict(self.characteristics)
        for A, p in other.characteristics.items():
            chars[A] = chars[A] + p if A in chars else p
        return EvolutionaryVectorField(self.space, chars)

    def __mul__(self, c):
        return EvolutionaryVectorField(self.space, {A: p * c for A, p in self.characteristics.items()})

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def is_zero(self) -> bool:
        return not self.characteristics

    def __repr__(self):
        inner = ", ".join(f"{A}: {p}" for A, p in self.characteristics.items())
        return f"EvolutionaryVectorField({inner})"


def _graded_frechet_apply(target: GradedDensity, direction: Mapping[str, GradedDensity]) -> GradedDensity:
    """``sum theta^(I+J) D_K eta_B^<J> d t^<I> / dphi_B^(K)``."""
    n = target.n
    towers = {B: [(J, derivative_tower(e, n)) for J, e in eta.terms.items()]
              for B, eta in direction.items()}
    acc: Dict[MultiIndex, PolyAccumulator] = {}
    for I, t in target.terms.items():
        for v, d in jet_partials(t).items():
            for J, tower in towers.get(v[0], ()):
                de = tower(v[2])
                if de:
                    acc.setdefault(madd(I, J), PolyAccumulator()).add(d * de)
    return GradedDensity({J: a.result() for J, a in acc.items()}, n)


def _dmulti(f: DiffPolynomial, K: MultiIndex) -> DiffPolynomial:
    from .jetcore import total_derivative_multi
    return total_derivative_multi(f, K)


def vf_action(xi: EvolutionaryVectorField, F) -> LocalFunctional:
    """``Xi F = int theta^(I+J) D_K psi_A^<J> df^<I>/dphi_A^(K)``."""
    F = as_functional(F)
    return LocalFunctional(_graded_frechet_apply(F.density, xi.characteristics))


def commutator(xi: EvolutionaryVectorField, lam: EvolutionaryVectorField) -> EvolutionaryVectorField:
    """Characteristic ``lambda'(xi) - xi'(lambda)`` with gradings added."""
    chars = {}
    for A in xi.space.fields:
        a = _graded_frechet_apply(lam.characteristic(A), xi.characteristics)
        b = _graded_frechet_apply(xi.characteristic(A), lam.characteristics)
        chars[A] = a - b
    return EvolutionaryVectorField(xi.space, chars)


def vf_to_onevector(xi: EvolutionaryVectorField) -> WedgeDensity:
    """``int theta^(J) psi_A^<J> delta/delta phi_A`` (canonical 1-vector)."""
    z = xi.space.zero()
    terms = []
    for A, psi in xi.characteristics.items():
        for J, c in psi.terms.items():
            terms.append((J, [jet_var(A, z)], c))
    return MultiVector(xi.space.n, 1, terms)


def degree_one_canonical(w: WedgeDensity) -> WedgeDensity:
    """Move every basis derivative onto the (graded) coefficient.

    ``theta^(J) c D_K b -> (-1)^{|K|} sum_L C(K,L) theta^(J+L) D_{K-L} c b``.
    """
    if w.degree != 1:
        raise ValueError("degree-one density required")
    z = zero_index(w.n)
    out: Dict[Key, DiffPolynomial] = {}
    for (J, (lab,)), c in w.terms.items():
        K = lab[2]
        sign = -1 if lab[1] % 2 else 1
        base = (jet_var(lab[0], z),)
        for L in below(K):
            key = (madd(J, L), base)
            val = _dmulti(c, msub(K, L)) * (sign * multi_binomial(K, L))
            out[key] = out.get(key, ZERO) + val
    return w.like(out)


def onevector_to_vf(space: JetSpace, w: WedgeDensity) -> EvolutionaryVectorField:
    if w.kind != VECTOR or w.degree != 1:
        raise ValueError("1-vector required")
    canon = degree_one_canonical(w)
    chars: Dict[str, Dict[MultiIndex, DiffPolynomial]] = {}
    for (J, (lab,)), c in canon.terms.items():
        chars.setdefault(lab[0], {})[J] = c
    return EvolutionaryVectorField(space, {A: GradedDensity(t, space.n) for A, t in chars.items()})


def _as_onevector(x) -> WedgeDensity:
    if isinstance(x, EvolutionaryVectorField):
        return vf_to_onevector(x)
    return x


# -- forms -------------------------------------------------------------------

def differential(F) -> WedgeDensity:
    """``dF = int theta^(J) df^<J>/dphi_A^(K) delta phi_A^(K)``."""
    if isinstance(F, WedgeDensity):
        return form_differential(F)
    F = as_functional(F)
    terms = []
    for J, f in F.density.terms.items():
        for v, d in jet_partials(f).items():
            terms.append((J, [v], d))
    return FunctionalForm(F.n, 1, terms)


def form_differential(sigma: WedgeDensity) -> WedgeDensity:
    """Differentiate coefficients and prepend the new ``delta phi`` factor."""
    if sigma.kind != FORM:
        raise ValueError("form_differential acts on functional forms")
    terms = []
    for (J, ls), c in sigma.terms.items():
        for v, d in jet_partials(c).items():
            terms.append((J, (v,) + ls, d))
    return WedgeDensity(FORM, sigma.degree + 1, sigma.n, terms)


def form_of(F) -> WedgeDensity:
    """Degree-0 form of a functional (so ``form_differential`` applies)."""
    F = as_functional(F)
    return scalar_wedge(F.density, FORM)


# -- contractions ------------------------------------------------------------

def contract(one: WedgeDensity, other: WedgeDensity) -> WedgeDensity:
    """Interior product of a degree-1 element into an element of the opposite kind.

    Slot ``i`` of ``other`` contributes ``(-1)^i theta^(I+J) D_{K_i}(x) *
    D_L(c ^ rest)`` where ``L`` is the basis derivative of ``one``.
    """
    one = _as_onevector(one)
    other = _as_onevector(other)
    if one.degree != 1:
        raise ValueError("first argument must have degree 1")
    if other.degree < 1:
        raise ValueError("degree underflow")
    if one.kind == other.kind:
        raise ValueError("contraction needs a form and a vector")
    n = other.n
    acc: Dict[Key, DiffPolynomial] = {}
    for (I, (la,)), x in one.terms.items():
        tower = derivative_tower(x, n)
        for (J, ls), c in other.terms.items():
            for i, lab in enumerate(ls):
                if lab[0] != la[0]:
                    continue
                left = tower(lab[2])
                if not left:
                    continue
                if i % 2:
                    left = -left
                key = (madd(I, J), ls[:i] + ls[i + 1:])
                if not any(la[2]):
                    acc[key] = acc.get(key, ZERO) + c * left
                    continue
                rest = WedgeDensity._raw(other.kind, other.degree - 1, n, {key: c})
                for k2, v in rest.coefficient_derivative_multi(la[2]).terms.items():
                    acc[k2] = acc.get(k2, ZERO) + v * left
    return WedgeDensity._raw(other.kind, other.degree - 1, n, acc)


def interior_product(one, other) -> WedgeDensity:
    return contract(one, other)


def evaluate(w: WedgeDensity, args: Sequence) -> LocalFunctional:
    """``w(a_1, ..., a_m) = a_m _| ... a_1 _| w``."""
    if len(args) != w.degree:
        raise ValueError(f"need {w.degree} arguments, got {len(args)}")
    for a in args:
        # canonical 1-forms carry no basis derivatives, which keeps contraction cheap
        w = contract(degree_one_canonical(_as_onevector(a)), w)
    return LocalFunctional(w.to_graded())


def pairing(a, b) -> LocalFunctional:
    """Trace pairing of a 1-vector (or vector field) with a 1-form, either order."""
    a, b = _as_onevector(a), _as_onevector(b)
    if a.degree != 1 or b.degree != 1:
        raise ValueError("pairing needs degree-1 arguments")
    return LocalFunctional(contract(a, b).to_graded())


def lie_derivative(xi, sigma: WedgeDensity) -> WedgeDensity:
    """Cartan formula ``L_xi = xi _| d + d (xi _| .)``."""
    xi = _as_onevector(xi)
    first = contract(xi, form_differential(sigma))
    if sigma.degree == 0:
        return first
    inner = contract(xi, sigma)
    return first + form_differential(inner)


# -- Schouten-Nijenhuis bracket ---------------------------------------------

def _half_bracket(P: WedgeDensity, Q: WedgeDensity) -> WedgeDensity:
    """Contract the 1-form part of ``dP`` into ``Q``; ``Q``'s remainder stands first."""
    n = P.n
    out = WedgeDensity._raw(VECTOR, P.degree + Q.degree - 1, n, {})
    qparts = Q.label_partials()
    if not qparts:
        return out
    for v, dP in P.jet_partials().items():
        for lab, dQ in qparts.items():
            if lab[0] != v[0]:
                continue
            left = dQ.coefficient_derivative_multi(v[2])
            if not left:
                continue
            right = dP.coefficient_derivative_multi(lab[2])
            out = out + left.wedge(right)
    return out


def sn_bracket(P: WedgeDensity, Q: WedgeDensity) -> WedgeDensity:
    """Schouten-Nijenhuis bracket of a p-vector and a q-vector.

    With ``a = dP _| Q`` and ``b = dQ _| P`` (remainder of the contracted
    argument written first) the bracket is
    ``e(p, q) ((-1)^{p(q-1)} a - (-1)^{p-1} b)``.  The two signs convert the
    left label derivatives used by the half brackets into the usual
    right/left pairing, which makes the bracket graded antisymmetric for
    every pair of degrees.  ``e(p, q) = (-1)^{(p-1)(q-1)}`` is a bicharacter
    in the shifted degrees, so graded antisymmetry and the graded Jacobi
    identity are unaffected.  It leaves the bracket of 1-vectors equal to
    minus the commutator and fixes the sign of bivector brackets so the
    self-bracket of the second KdV structure is
    ``int (2/3 theta xi^D3xi^Dxi + theta_x xi^D2xi^Dxi)``.
    """
    P, Q = _as_onevector(P), _as_onevector(Q)
    if P.kind != VECTOR or Q.kind != VECTOR:
        raise ValueError("the Schouten-Nijenhuis bracket acts on multivectors")
    p, q = P.degree, Q.degree
    a = _half_bracket(P, Q)
    b = _half_bracket(Q, P)
    a = -a if p * (q - 1) % 2 else a
    out = a + b if (p - 1) % 2 else a - b
    return -out if (p - 1) * (q - 1) % 2 else out


def operator_vector(op, fields=None) -> Dict[str, WedgeDensity]:
    """``(op xi)_A = sum_B theta^(J) I^<J>N_AB D_N xi_B`` as degree-1 densities."""
    n = op.space.n
    out = {}
    for A in op.space.fields:
        terms = []
        for B in op.space.fields:
            for (J, N), c in op.entry(A, B).items():
                terms.append((J, [jet_var(B, N)], c))
        out[A] = MultiVector(n, 1, terms)
    return out


def bivector(op) -> WedgeDensity:
    """``1/2 int xi_A ^ I_AB xi_B``."""
    space = op.space
    terms = []
    for A, B, J, N, c in op.terms():
        terms.append((J, [jet_var(A, space.zero()), jet_var(B, N)], c * Q(1, 2)))
    return MultiVector(space.n, 2, terms)


def prolongation_term(I, K) -> WedgeDensity:
    """``int xi ^ I'(K xi) ^ xi``, i.e. sum over terms ``theta^(L) c D_N`` of ``I_AB`` of
    ``theta^(L) xi_A ^ (dc/dphi_C^(J)) D_J (K xi)_C ^ D_N xi_B``."""
    space = I.space
    n = space.n
    z = space.zero()
    kxi = operator_vector(K)
    out = MultiVector(n, 3)
    for A, B, L, N, c in I.terms():
        first = MultiVector(n, 1, [(L, [jet_var(A, z)], 1)])
        last = MultiVector(n, 1, [(z, [jet_var(B, N)], 1)])
        for v, dc in jet_partials(c).items():
            eta = kxi[v[0]]
            if not eta:
                continue
            mid = eta.coefficient_derivative_multi(v[2]) * dc
            out = out + first.wedge(mid).wedge(last)
    return out


def sn_bracket_bivectors(I, K) -> WedgeDensity:
    """Trivector ``[Lambda_I, Psi_K]`` through the prolongation formula (Olver's lemma).

    ``1/2 int xi ^ I'(K xi) ^ xi + 1/2 int xi ^ K'(I xi) ^ xi``.  Both
    operators must be antisymmetric.  The sign follows :func:`sn_bracket`
    (``PROLONGATION_SIGN``), so the two paths agree modulo formal divergences.
    """
    from .operators import is_antisymmetric
    for op in (I, K):
        if not is_antisymmetric(op):
            raise ValueError("sn_bracket_bivectors needs antisymmetric operators")
    if I.space != K.space:
        raise ValueError("operators act on different field sets")
    t = prolongation_term(I, K) + prolongation_term(K, I)
    return t * (Q(PROLONGATION_SIGN, 2))


PROLONGATION_SIGN = 1


# -- zero test modulo formal divergences -------------------------------------

@dataclass
class Generator:
    """One formal divergence ``multiplier * D_axis(theta^(grading) density)``."""

    axis: int
    grading: MultiIndex
    density: WedgeDensity
    multiplier: Q = Q(1)

    def expand(self) -> WedgeDensity:
        return self.density.shift(self.grading).total_derivative(self.axis) * self.multiplier

    def to_json(self) -> dict:
        from .printer import format_wedge
        return {"axis": self.axis, "grading": list(self.grading),
                "density": format_wedge(self.density), "multiplier": str(self.multiplier)}


@dataclass
class ZeroTest:
    is_zero: bool
    residue: WedgeDensity
    certificate: List[Generator] = field(default_factory=list)
    method: str = "reduce"
    order_bound: Optional[int] = None
    complete: bool = True

    def __bool__(self):
        return self.is_zero

    def to_json(self) -> dict:
        from .printer import format_wedge
        return {"is_zero": self.is_zero, "method": self.method,
                "order_bound": self.order_bound, "complete": self.complete,
                "residue": format_wedge(self.residue),
                "certificate": [g.to_json() for g in self.certificate]}


def verify_certificate(V: WedgeDensity, result: ZeroTest) -> bool:
    """Check ``V == sum(generators) + residue`` term by term."""
    total = result.residue
    for g in result.certificate:
        total = total + g.expand()
    return total == V


def _reduce(V: WedgeDensity) -> ZeroTest:
    work = V
    cert: List[Generator] = []
    while True:
        graded = [J for J in work.gradings() if sum(J)]
        if not graded:
            break
        J = graded[-1]
        axis = next(i for i, j in enumerate(J) if j)
        lower = msub(J, unit_index(V.n, axis))
        X = work.grade_component(J).shift(tuple(-j for j in J))
        g = Generator(axis, lower, X)
        cert.append(g)
        work = work - g.expand()
    return ZeroTest(not work, work, cert, "reduce", None, True)


def _linear(V: WedgeDensity, order_bound: Optional[int], max_generators: int) -> ZeroTest:
    n = V.n
    top = V.max_order()
    # the reduction certificate never needs jets beyond top + max grading
    bound = top + V.max_grading() if order_bound is None else order_bound
    complete = bound >= top + V.max_grading()
    target = V.monomials()
    seen = set(target)
    queue = list(sorted(target))
    cand_keys = []
    cand_set = set()
    columns = []
    while queue:
        J, ls, m = queue.pop(0)
        for axis in range(n):
            if not J[axis]:
                continue
            lower = msub(J, unit_index(n, axis))
            ck = (axis, lower, ls, m)
            if ck in cand_set:
                continue
            cand_set.add(ck)
            w = WedgeDensity._raw(V.kind, V.degree, n, {(lower, ls): DiffPolynomial._raw({m: Q(1)})})
            image = w.total_derivative(axis)
            mons = image.monomials()
            if any(max([l[1] for l in key[1]] + [v[1] for v, _ in key[2]]) > bound for key in mons):
                continue
            if len(columns) >= max_generators:
                raise ResourceLimitExceeded(f"more than {max_generators} divergence generators")
            cand_keys.append((axis, lower, w))
            columns.append(mons)
            for key in sorted(mons):
                if key not in seen:
                    seen.add(key)
                    queue.append(key)
    mult, rem = solve_membership(columns, target)
    if mult is None:
        return ZeroTest(False, V.canonical(), [], "linear", bound, complete)
    cert = []
    for k, c in sorted(mult.items()):
        axis, lower, w = cand_keys[k]
        cert.append(Generator(axis, lower, w.shift(tuple(-j for j in lower)), c))
    return ZeroTest(True, V.like({}), cert, "linear", bound, True)


def multivector_is_zero(V: WedgeDensity, method: str = "reduce",
                        order_bound: Optional[int] = None,
                        max_generators: int = 20000) -> ZeroTest:
    """Decide whether ``V`` is a sum of formal divergences.

    ``reduce`` integrates every boundary term by parts onto theta and is
    complete.  ``linear`` searches the span of divergence generators up to
    ``order_bound`` (default: top order plus top grading, which is always
    enough) by exact Gaussian elimination.  ``complete`` reports whether the
    verdict is final: a found certificate always is, a failed search only
    when the bound reaches that default.
    """
    if method == "reduce":
        return _reduce(V)
    if method == "linear":
        return _linear(V, order_bound, max_generators)
    raise ValueError(f"unknown method {method!r}")


def standard_is_zero(W: WedgeDensity) -> bool:
    """Classical test (theta = 1): the variational derivative in every basis field vanishes.

    Labels (vector kind) are treated as odd jet variables, coefficients as even
    ones; a homogeneous multivector of positive degree is a total divergence
    exactly when its odd Euler-Lagrange derivatives vanish.
    """
    W = W.quotient_to_standard()
    if W.degree == 0:
        from .graded import StandardClass
        return StandardClass(W.to_graded().component(zero_index(W.n)), W.n, ()).is_zero()
    fields = {lab[0] for (_, ls) in W.terms for lab in ls}
    for A in fields:
        acc = W.like({}, W.degree - 1)
        for lab, part in W.label_partials().items():
            if lab[0] != A:
                continue
            d = part.coefficient_derivative_multi(lab[2])
            acc = acc - d if lab[1] % 2 else acc + d
        if acc:
            return False
    return True
