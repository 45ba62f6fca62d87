import random

import pytest
import sympy as sp
from hypothesis import given

import oracles
from divcalc.graded import GradedDensity, LocalFunctional, functional_is_zero
from divcalc.jetcore import DiffPolynomial, JetSpace
from divcalc.operators import (
    GradedDiffOperator,
    adjoint,
    antisymmetrize,
    apply,
    compose,
    identity_operator,
    is_antisymmetric,
    operator_frechet,
)
from divcalc.parser import parse_operator
from divcalc.rational import Q
from divcalc.sampling import random_operator, random_polynomial
from strategies import operators, polynomials

S = JetSpace(["u"], 1)
S2 = JetSpace(["w"], 2)
SUV = JetSpace(["u", "v"], 1)
u, ux = S.var("u"), S.var("u", (1,))


def op1(text, space=S):
    return parse_operator(text, space)


def pairing_density(f, g):
    """sum_A f_A * g_A for polynomial f and graded g."""
    out = None
    for A, gd in g.items():
        term = gd * f[A]
        out = term if out is None else out + term
    return out


# -- examples ---------------------------------------------------------------------

def test_apply_examples():
    assert apply(op1("theta*D"), [u])["u"] == GradedDensity({(0,): ux}, 1)
    got = apply(op1("theta*D + 1/2*theta_x"), [u * u])["u"]
    assert got == GradedDensity({(0,): 2 * u * ux, (1,): u * u * Q(1, 2)}, 1)
    assert apply(GradedDiffOperator(S), [u])["u"] == GradedDensity({}, 1)


def test_adjoint_examples():
    assert adjoint(op1("theta*D")) == op1("-theta*D - theta_x")
    K = op1("theta*(D3 + 2/3*u*D + 1/3*D(u))")
    want = op1("-theta*(D3 + 2/3*u*D + 1/3*D(u)) - theta_x*(3*D2 + 2/3*u) - 3*theta_{xx}*D - theta_{xxx}")
    assert adjoint(K) == want
    c = op1("theta*(u^2 + u_xx)")
    assert adjoint(c) == c


def test_antisymmetrize_examples():
    assert antisymmetrize(op1("theta*D")) == op1("theta*D + 1/2*theta_x")
    K = op1("theta*(D3 + 2/3*u*D + 1/3*D(u))")
    want = op1("theta*(D3 + 2/3*u*D + 1/3*D(u)) + theta_x*(3/2*D2 + 1/3*u) + 3/2*theta_{xx}*D + 1/2*theta_{xxx}")
    assert antisymmetrize(K) == want
    assert antisymmetrize(want) == want and is_antisymmetric(want)


def test_operator_frechet_examples():
    eta = S.var("u", (2,))
    assert operator_frechet(op1("theta*D + 1/2*theta_x"), {"u": eta}).is_zero()
    assert operator_frechet(op1("theta*2/3*u*D"), {"u": eta}) == \
        GradedDiffOperator.scalar(S, {((0,), (1,)): eta * Q(2, 3)})
    # the composite D o u = u D + u_x, differentiated along eta
    got = operator_frechet(op1("theta*1/3*D@u"), {"u": eta})
    assert got == GradedDiffOperator.scalar(S, {((0,), (1,)): eta * Q(1, 3), ((0,), (0,)): S.var("u", (3,)) * Q(1, 3)})


def test_operator_frechet_graded_direction():
    # a graded direction theta_x * eta adds its grading
    eta = GradedDensity({(1,): S.var("u", (0,))}, 1)
    got = operator_frechet(op1("theta*u*D"), {"u": eta})
    assert got == GradedDiffOperator.scalar(S, {((1,), (1,)): u})


def test_matrix_adjoint_transposes():
    op = parse_operator({("u", "v"): "theta*u*D"}, SUV)
    adj = adjoint(op)
    assert set(adj.entries) == {("v", "u")}
    assert adj == parse_operator({("v", "u"): "-theta*u*D - theta*u_x - theta_x*u"}, SUV)


def test_space_mismatch_rejected():
    with pytest.raises(ValueError):
        op1("theta*D") + identity_operator(JetSpace(["v"], 1))
    with pytest.raises(KeyError):
        GradedDiffOperator(S, {("u", "q"): {((0,), (0,)): 1}})


# -- properties -----------------------------------------------------------------------

@given(operators(S2))
def test_adjoint_involution(op):
    assert adjoint(adjoint(op)) == op


@given(operators(SUV), polynomials(SUV, max_order=2), polynomials(SUV, max_order=2),
       polynomials(SUV, max_order=2), polynomials(SUV, max_order=2))
def test_adjoint_defining_identity(op, f1, f2, g1, g2):
    f, g = {"u": f1, "v": f2}, {"u": g1, "v": g2}
    lhs = pairing_density(f, apply(op, g))
    rhs = pairing_density(g, apply(adjoint(op), f))
    assert functional_is_zero(LocalFunctional(lhs - rhs))


@given(operators(S2))
def test_antisymmetrize_is_a_projection(op):
    a = antisymmetrize(op)
    assert is_antisymmetric(a)
    assert antisymmetrize(a) == a


@given(operators(S, max_grading=0))
def test_grade_zero_quotient_is_classical_adjoint(op):
    """At theta = 1 the graded adjoint keeps only the classical (-D)_N o c terms."""
    classical = GradedDiffOperator(S)
    for _, _, J, N, c in op.terms():
        dn = GradedDiffOperator.scalar(S, {((0,), N): (-1) ** sum(N)})
        classical = classical + compose(dn, GradedDiffOperator.scalar(S, {((0,), (0,)): c}))
    strip = lambda o: o.grade_component((0,))
    assert strip(adjoint(op)) == strip(classical)


@given(operators(S2), operators(S2))
def test_compose_left_identity_and_linearity(a, b):
    # theta o a = a, while a o theta also differentiates theta
    I = identity_operator(S2)
    assert compose(I, a) == a
    assert compose(a + b, a) == compose(a, a) + compose(b, a)
    assert compose(a, a + b) == compose(a, a) + compose(a, b)


@pytest.mark.parametrize("seed", range(8))
def test_apply_and_compose_match_sympy(seed):
    rng = random.Random(seed)
    for space in (S, S2):
        a, b = random_operator(space, rng, max_grading=0), random_operator(space, rng)
        g = random_polynomial(space, rng, max_order=2, max_degree=2)
        A = space.fields[0]
        gs = {A: oracles.poly_to_sympy(g, space.n)}
        got = oracles.graded_to_sympy(apply(a, [g])[A])
        assert sp.expand(got - oracles.apply_operator(a, gs)[A]) == 0
        two_step = oracles.apply_operator(a, oracles.apply_operator(b, gs), theta=False)[A]
        got = oracles.graded_to_sympy(apply(compose(a, b), [g])[A])
        assert sp.expand(got - two_step) == 0


@pytest.mark.parametrize("seed", range(8))
def test_adjoint_identity_against_sympy(seed):
    rng = random.Random(40 + seed)
    for space in (S, S2):
        op = random_operator(space, rng)
        A = space.fields[0]
        f, g = (random_polynomial(space, rng, max_order=1, max_degree=2) for _ in range(2))
        lhs = oracles.poly_to_sympy(f, space.n) * oracles.apply_operator(op, {A: oracles.poly_to_sympy(g, space.n)})[A]
        rhs = oracles.poly_to_sympy(g, space.n) * oracles.apply_operator(adjoint(op), {A: oracles.poly_to_sympy(f, space.n)})[A]
        assert oracles.is_total_derivative(sp.expand(lhs - rhs), [A, "theta"], space.n)

