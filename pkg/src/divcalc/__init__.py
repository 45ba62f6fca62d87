"""Graded formal variational calculus with boundary terms.

Densities carry a theta factor (the characteristic function of the domain and
its derivatives) so that integration by parts never discards surface terms.
On top of that: graded operators and adjoints, functional forms and
multivectors, the Schouten-Nijenhuis bracket, and a Hamiltonian test modulo
formal divergences.
"""
from .graded import GradedDensity, LocalFunctional, StandardClass, canonicalize_functional, quotient_to_standard
from .jetcore import DiffPolynomial, JetSpace, euler_lagrange, higher_euler, total_derivative
from .operators import GradedDiffOperator, adjoint, antisymmetrize, compose, is_antisymmetric
from .parser import ParseError, parse_expression, parse_functional, parse_operator
from .poisson import (
    PoissonCandidate,
    bracket,
    hamiltonian_field,
    hamiltonian_vector_field,
    is_hamiltonian,
    jacobi_residual,
    poisson_bracket,
    self_trivector,
    trivector_value,
)
from .problem import ProblemSpec, corpus, corpus_names
from .frontend import Verdict, run_check
from .tensors import (
    EvolutionaryVectorField,
    WedgeDensity,
    bivector,
    differential,
    multivector_is_zero,
    sn_bracket,
    sn_bracket_bivectors,
)

__version__ = "0.1.0"

__all__ = [
    "DiffPolynomial", "JetSpace", "euler_lagrange", "higher_euler", "total_derivative",
    "GradedDensity", "LocalFunctional", "StandardClass", "canonicalize_functional", "quotient_to_standard",
    "GradedDiffOperator", "adjoint", "antisymmetrize", "compose", "is_antisymmetric",
    "EvolutionaryVectorField", "WedgeDensity", "bivector", "differential", "multivector_is_zero",
    "sn_bracket", "sn_bracket_bivectors",
    "PoissonCandidate", "bracket", "poisson_bracket", "hamiltonian_field", "hamiltonian_vector_field",
    "is_hamiltonian", "jacobi_residual", "self_trivector", "trivector_value",
    "ParseError", "parse_expression", "parse_functional", "parse_operator",
    "ProblemSpec", "corpus", "corpus_names", "Verdict", "run_check",
]
