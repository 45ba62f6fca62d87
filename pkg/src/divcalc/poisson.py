"""Poisson brackets of local functionals and the Hamiltonian test."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional

from .graded import GradedDensity, LocalFunctional, StandardClass, as_functional, variational_derivative
from .jetcore import ZERO, DiffPolynomial, MultiIndex, PolyAccumulator, derivative_tower, euler_lagrange, madd
from .operators import GradedDiffOperator, antisymmetrize, is_antisymmetric
from .tensors import (
    EvolutionaryVectorField,
    WedgeDensity,
    ZeroTest,
    bivector,
    commutator,
    contract,
    differential,
    evaluate,
    multivector_is_zero,
    onevector_to_vf,
    sn_bracket,
    sn_bracket_bivectors,
    standard_is_zero,
    vf_action,
    vf_to_onevector,
)


class PoissonCandidate:
    """An antisymmetric graded operator together with its bivector."""

    def __init__(self, operator: GradedDiffOperator, name: str = ""):
        if not is_antisymmetric(operator):
            raise ValueError("operator is not antisymmetric; pass it through antisymmetrize() first")
        self.operator = operator
        self.space = operator.space
        self.name = name
        self._bivector = None

    @classmethod
    def from_operator(cls, op: GradedDiffOperator, name: str = "") -> "PoissonCandidate":
        """Antisymmetrize ``op`` (a no-op when it already is) and wrap it."""
        return cls(op if is_antisymmetric(op) else antisymmetrize(op), name)

    @property
    def bivector(self) -> WedgeDensity:
        if self._bivector is None:
            self._bivector = bivector(self.operator)
        return self._bivector

    def __repr__(self):
        return f"PoissonCandidate({self.name or self.operator})"


@dataclass
class BracketResult:
    """``{F, G}`` with the representative split into bulk and boundary terms."""

    value: LocalFunctional
    bulk: GradedDensity
    boundary: GradedDensity

    def recombined(self) -> LocalFunctional:
        return LocalFunctional(self.bulk + self.boundary)


def _check_fields(P: PoissonCandidate, *funcs: LocalFunctional):
    allowed = set(P.space.fields)
    for F in funcs:
        for f in F.density.terms.values():
            extra = f.fields() - allowed
            if extra:
                raise ValueError(f"functional uses fields {sorted(extra)} not declared for the operator")
        if F.n != P.space.n:
            raise ValueError("functional and operator have different dimensions")


def _bracket_euler(F: LocalFunctional, G: LocalFunctional, P: PoissonCandidate) -> GradedDensity:
    """``int (dF/dphi_A) I_AB (dG/dphi_B)`` with full variational derivatives."""
    space = P.space
    n = space.n
    vf = {A: variational_derivative(F, A) for A in space.fields}
    vg = {B: variational_derivative(G, B) for B in space.fields}
    out: Dict[MultiIndex, PolyAccumulator] = {}
    for (A, B), row in P.operator.entries.items():
        if not vf[A] or not vg[B]:
            continue
        towers = {Q: derivative_tower(b, n) for Q, b in vg[B].items()}
        for (J, N), c in row.items():
            for Pi, a in vf[A].items():
                ac = a * c
                JP = madd(J, Pi)
                for Q, tower in towers.items():
                    out.setdefault(madd(JP, Q), PolyAccumulator()).add(ac * tower(N))
    return GradedDensity({J: acc.result() for J, acc in out.items()}, n)


def _bracket_frechet(F: LocalFunctional, G: LocalFunctional, P: PoissonCandidate) -> GradedDensity:
    """``Psi(dF, dG) = dG _| dF _| Psi`` through the trace contraction."""
    return evaluate(P.bivector, [differential(F), differential(G)]).density


def poisson_bracket(F, G, P: PoissonCandidate, method: str = "euler") -> BracketResult:
    """``{F, G}``; ``method`` is ``"euler"`` (higher Eulerian form) or ``"frechet"``."""
    F, G = as_functional(F), as_functional(G)
    _check_fields(P, F, G)
    if method == "euler":
        rep = _bracket_euler(F, G, P)
    elif method == "frechet":
        rep = _bracket_frechet(F, G, P)
    else:
        raise ValueError(f"unknown bracket method {method!r}")
    z = P.space.zero()
    bulk = GradedDensity({J: f for J, f in rep.terms.items() if J == z}, rep.n)
    boundary = GradedDensity({J: f for J, f in rep.terms.items() if J != z}, rep.n)
    return BracketResult(LocalFunctional(rep), bulk, boundary)


def bracket(F, G, P: PoissonCandidate, method: str = "euler") -> LocalFunctional:
    return poisson_bracket(F, G, P, method).value


def hamiltonian_vector_field(H, P: PoissonCandidate) -> WedgeDensity:
    """``I dH = -dH _| Psi`` as a 1-vector."""
    H = as_functional(H)
    _check_fields(P, H)
    return -contract(differential(H), P.bivector)


def hamiltonian_field(H, P: PoissonCandidate) -> EvolutionaryVectorField:
    """The same field in characteristic form."""
    return onevector_to_vf(P.space, hamiltonian_vector_field(H, P))


def jacobi_residual(F, G, H, P: PoissonCandidate, method: str = "euler") -> LocalFunctional:
    """``{{F,G},H} + {{G,H},F} + {{H,F},G}``.

    ``euler`` and ``frechet`` nest :func:`poisson_bracket`.  ``action``
    evaluates each outer bracket as ``{K, H} = X_H K`` with the Hamiltonian
    field in characteristic form; it is an independent route but slower in
    two dimensions.
    """
    F, G, H = as_functional(F), as_functional(G), as_functional(H)
    if method == "action":
        xf, xg, xh = (hamiltonian_field(X, P) for X in (F, G, H))
        return (vf_action(xh, vf_action(xg, F)) + vf_action(xf, vf_action(xh, G))
                + vf_action(xg, vf_action(xf, H)))

    def br(a, b):
        return bracket(a, b, P, method)

    return br(br(F, G), H) + br(br(G, H), F) + br(br(H, F), G)


def trivector_value(T: WedgeDensity, F, G, H) -> LocalFunctional:
    """``T(dF, dG, dH) = dH _| dG _| dF _| T``."""
    return evaluate(T, [differential(as_functional(X)) for X in (F, G, H)])


def self_trivector(P: PoissonCandidate, path: str = "olver") -> WedgeDensity:
    if path == "olver":
        return sn_bracket_bivectors(P.operator, P.operator)
    if path == "general":
        return sn_bracket(P.bivector, P.bivector)
    raise ValueError(f"unknown path {path!r}")


@dataclass
class HamiltonianVerdict:
    hamiltonian: bool
    trivector: WedgeDensity
    zero_test: ZeroTest
    standard_hamiltonian: bool
    paths_agree: Optional[bool] = None
    extra: dict = field(default_factory=dict)

    @property
    def obstruction(self) -> Optional[WedgeDensity]:
        return None if self.hamiltonian else self.zero_test.residue

    @property
    def certificate(self):
        return self.zero_test.certificate if self.hamiltonian else None


def is_hamiltonian(P: PoissonCandidate, method: str = "reduce", order_bound: Optional[int] = None,
                   cross_check: bool = True) -> HamiltonianVerdict:
    """Self-bracket of the bivector through the prolongation formula, then the zero test.

    ``cross_check`` also evaluates the general bracket and records whether
    the two trivectors agree modulo formal divergences.
    """
    T = self_trivector(P, "olver")
    zt = multivector_is_zero(T, method=method, order_bound=order_bound)
    agree = None
    if cross_check:
        agree = multivector_is_zero(T - self_trivector(P, "general")).is_zero
    return HamiltonianVerdict(zt.is_zero, T, zt, standard_is_zero(T), agree)


def commutator_theorem_check(F, H, P: PoissonCandidate) -> bool:
    """``[X_F, X_H] = -X_{F,H}`` as 1-vectors modulo formal divergences."""
    F, H = as_functional(F), as_functional(H)
    xf, xh = hamiltonian_field(F, P), hamiltonian_field(H, P)
    lhs = vf_to_onevector(commutator(xf, xh))
    rhs = -hamiltonian_vector_field(bracket(F, H, P), P)
    return multivector_is_zero(lhs - rhs).is_zero


# -- classical (theta = 1) quotient -----------------------------------------

def standard_operator(P: PoissonCandidate) -> GradedDiffOperator:
    """Grading-zero part of the operator: the classical Hamiltonian operator."""
    return P.operator.grade_component(P.space.zero())


def standard_bracket(F, G, P: PoissonCandidate) -> DiffPolynomial:
    """Classical density ``E(f)_A I_AB E(g)_B`` with ``theta = 1``."""
    F, G = as_functional(F), as_functional(G)
    space = P.space
    z = space.zero()
    f = F.density.component(z)
    g = G.density.component(z)
    out = ZERO
    for (A, B), row in P.operator.entries.items():
        ea = euler_lagrange(f, A, space.n)
        eb = euler_lagrange(g, B, space.n)
        if not ea or not eb:
            continue
        tower = derivative_tower(eb, space.n)
        for (J, N), c in row.items():
            if J == z:
                out = out + ea * c * tower(N)
    return out


def standard_jacobi_residual(F, G, H, P: PoissonCandidate) -> StandardClass:
    n = P.space.n

    def br(a, b):
        return LocalFunctional.bulk(standard_bracket(a, b, P), n)

    F, G, H = as_functional(F), as_functional(G), as_functional(H)
    total = standard_bracket(br(F, G), H, P) + standard_bracket(br(G, H), F, P) \
        + standard_bracket(br(H, F), G, P)
    return StandardClass(total, n, P.space.fields)
