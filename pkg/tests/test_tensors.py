import random

import pytest

import oracles
from divcalc.graded import GradedDensity, LocalFunctional
from divcalc.jetcore import JetSpace, jet_var
from divcalc.operators import antisymmetrize
from divcalc.parser import parse_functional, parse_operator, parse_polynomial
from divcalc.poisson import PoissonCandidate, self_trivector
from divcalc.rational import Q
from divcalc.sampling import random_operator, random_polynomial, random_wedge
from divcalc.tensors import (
    EvolutionaryVectorField,
    FunctionalForm,
    MultiVector,
    basis_vector,
    bivector,
    commutator,
    contract,
    degree_one_canonical,
    differential,
    evaluate,
    form_differential,
    lie_derivative,
    multivector_is_zero,
    normalize_labels,
    onevector_to_vf,
    pairing,
    sn_bracket,
    sn_bracket_bivectors,
    standard_is_zero,
    verify_certificate,
    vf_action,
    vf_to_onevector,
)

S = JetSpace(["u"], 1)
S2 = JetSpace(["w"], 2)
SUV = JetSpace(["u", "v"], 1)
z = (0,)


def P(text, space=S):
    return parse_polynomial(text, space)


def F(text, space=S):
    return parse_functional(text, space)


def lab(k, A="u"):
    return jet_var(A, (k,))


def vf(text, space=S):
    return EvolutionaryVectorField(space, {space.fields[0]: P(text, space)})


def zero_mod_divergence(w):
    return multivector_is_zero(w).is_zero


# -- wedge normalization ----------------------------------------------------------

def test_labels_sorted_with_sign():
    assert normalize_labels([lab(2), lab(0), lab(1)]) == (1, (lab(0), lab(1), lab(2)))
    assert normalize_labels([lab(1), lab(0)]) == (-1, (lab(0), lab(1)))
    assert normalize_labels([lab(1), lab(1)])[0] == 0
    w = MultiVector(1, 2, [(z, [lab(1), lab(0)], P("u")), (z, [lab(0), lab(1)], P("u"))])
    assert not w


def test_wedge_degree_and_kind_checks():
    with pytest.raises(ValueError):
        MultiVector(1, 2, [(z, [lab(0)], 1)])
    with pytest.raises(ValueError):
        FunctionalForm(1, 1, [(z, [lab(0)], 1)]) + MultiVector(1, 1, [(z, [lab(0)], 1)])
    with pytest.raises(ValueError):
        sn_bracket(FunctionalForm(1, 1, [(z, [lab(0)], 1)]), basis_vector(S, "u"))


# -- forms ----------------------------------------------------------------------------

def test_differential_examples():
    assert differential(F("int theta*u^2/2")) == FunctionalForm(1, 1, [(z, [lab(0)], P("u"))])
    assert differential(F("int theta*u*u_x")) == \
        FunctionalForm(1, 1, [(z, [lab(0)], P("u_x")), (z, [lab(1)], P("u"))])


def test_form_differential_examples():
    assert not form_differential(FunctionalForm(1, 1, [(z, [lab(0)], P("u"))]))
    got = form_differential(FunctionalForm(1, 1, [(z, [lab(0)], P("u_x"))]))
    assert got == FunctionalForm(1, 2, [(z, [lab(1), lab(0)], 1)])
    assert not form_differential(differential(F("int theta*u^3*u_xx")))


def test_pairing_examples():
    sigma = FunctionalForm(1, 1, [(z, [lab(0)], P("u"))])
    assert pairing(vf("u_x"), sigma) == F("int theta*u*u_x")
    bdry = FunctionalForm(1, 1, [((1,), [lab(0)], 1)])
    got = pairing(EvolutionaryVectorField(S, {"u": 1}), bdry)
    assert got.density == GradedDensity({(1,): P("1")}, 1)
    assert pairing(vf("u_x"), FunctionalForm(1, 1)).is_zero()


def test_interior_product_gives_hamiltonian_field():
    I = parse_operator("theta*D + 1/2*theta_x", S)
    got = onevector_to_vf(S, contract(differential(F("int theta*u^2/2")), bivector(I)))
    want = EvolutionaryVectorField(S, {"u": GradedDensity({z: -P("u_x"), (1,): -P("u") * Q(1, 2)}, 1)})
    assert got == want


def test_contraction_of_degree_one_is_pairing():
    rng = random.Random(5)
    for _ in range(10):
        a = random_wedge(S, rng, "vector", 1)
        b = random_wedge(S, rng, "form", 1)
        assert LocalFunctional(contract(a, b).to_graded()) == pairing(a, b)


# -- vector fields --------------------------------------------------------------------

def test_vf_action_examples():
    H = F("int theta*u^2/2")
    assert vf_action(vf("u_x"), H) == F("int theta*u*u_x")
    assert vf_action(vf("u^2*u_xx"), LocalFunctional(GradedDensity({z: P("u")}, 1).total_derivative(0))).is_zero()
    assert vf_action(EvolutionaryVectorField(S, {}), H).is_zero()


def test_commutator_examples():
    assert commutator(vf("u_x"), vf("u")).is_zero()
    assert commutator(vf("u_x"), vf("u_xxx")).is_zero()
    c = commutator(vf("u"), vf("u^2"))
    assert c == EvolutionaryVectorField(S, {"u": P("u^2")})


def test_onevector_round_trip():
    assert vf_to_onevector(vf("u_x")) == MultiVector(1, 1, [(z, [lab(0)], P("u_x"))])
    rng = random.Random(0)
    for space in (S, S2, SUV):
        for _ in range(10):
            xi = EvolutionaryVectorField(space, {A: GradedDensity({space.zero(): random_polynomial(space, rng)}, space.n)
                                                  for A in space.fields})
            assert onevector_to_vf(space, vf_to_onevector(xi)) == xi


def test_lie_derivative_examples():
    sigma = FunctionalForm(1, 1, [(z, [lab(0)], P("u"))])
    want = FunctionalForm(1, 1, [(z, [lab(0)], P("u_x")), (z, [lab(1)], P("u"))])
    assert lie_derivative(vf("u_x"), sigma) == want
    assert not lie_derivative(EvolutionaryVectorField(S, {}), sigma)


@pytest.mark.parametrize("seed", range(10))
def test_lie_derivative_of_exact_form(seed):
    rng = random.Random(seed)
    G = LocalFunctional.bulk(random_polynomial(S, rng), 1)
    xi = EvolutionaryVectorField(S, {"u": random_polynomial(S, rng, max_order=2)})
    lhs = lie_derivative(xi, differential(G))
    rhs = differential(vf_action(xi, G))
    assert zero_mod_divergence(lhs - rhs)


# -- SN bracket -----------------------------------------------------------------------

def test_sn_examples():
    assert not sn_bracket(vf("u_x"), vf("u"))
    kdv1 = bivector(parse_operator("theta*D + 1/2*theta_x", S))
    assert not sn_bracket(kdv1, kdv1)
    K = antisymmetrize(parse_operator("theta*(D3 + 2/3*u*D + 1/3*D(u))", S))
    T = sn_bracket_bivectors(K, K)
    want = MultiVector(1, 3, [(z, [lab(0), lab(3), lab(1)], Q(2, 3)), ((1,), [lab(0), lab(2), lab(1)], 1)])
    assert T == want
    assert zero_mod_divergence(sn_bracket(bivector(K), bivector(K)) - T)


def test_sn_bivector_requires_antisymmetric():
    with pytest.raises(ValueError):
        sn_bracket_bivectors(parse_operator("theta*D", S), parse_operator("theta*D", S))


@pytest.mark.parametrize("seed", range(25))
def test_sn_of_one_vectors_is_minus_commutator(seed):
    rng = random.Random(seed)
    space = (S, S2, SUV)[seed % 3]
    xi, lam = (EvolutionaryVectorField(space, {A: random_polynomial(space, rng, max_order=2) for A in space.fields})
               for _ in range(2))
    lhs = sn_bracket(vf_to_onevector(xi), vf_to_onevector(lam))
    assert zero_mod_divergence(lhs + vf_to_onevector(commutator(xi, lam)))


@pytest.mark.parametrize("seed", range(15))
def test_sn_graded_antisymmetry(seed):
    rng = random.Random(100 + seed)
    p, q = rng.choice([(1, 2), (2, 2), (1, 1), (2, 1)])
    A = random_wedge(S, rng, "vector", p, max_grading=0)
    B = random_wedge(S, rng, "vector", q, max_grading=0)
    sign = -1 if (p - 1) * (q - 1) % 2 == 0 else 1
    assert sn_bracket(A, B) == sn_bracket(B, A) * sign


@pytest.mark.parametrize("seed", range(10))
def test_olver_and_general_paths_agree(seed):
    rng = random.Random(300 + seed)
    space = (S, SUV)[seed % 2]
    I = antisymmetrize(random_operator(space, rng))
    cand = PoissonCandidate.from_operator(I)
    assert zero_mod_divergence(self_trivector(cand, "olver") - self_trivector(cand, "general"))


# -- zero test ------------------------------------------------------------------------

def test_zero_test_examples():
    K = PoissonCandidate.from_operator(parse_operator("theta*(D3 + 2/3*u*D + 1/3*D(u))", S))
    r = multivector_is_zero(self_trivector(K))
    assert not r.is_zero and verify_certificate(self_trivector(K), r)
    assert r.residue == MultiVector(1, 3, [(z, [lab(0), lab(1), lab(3)], Q(1, 3))])
    fluid = PoissonCandidate.from_operator(parse_operator("theta*(w_x*Dy - w_y*Dx)", S2))
    r = multivector_is_zero(self_trivector(fluid))
    assert r.is_zero and verify_certificate(self_trivector(fluid), r)


@pytest.mark.parametrize("seed", range(20))
def test_divergences_are_zero_both_methods(seed):
    rng = random.Random(seed)
    space = (S, S2)[seed % 2]
    w = random_wedge(space, rng, "vector", rng.randint(0, 3) if space is S else rng.randint(1, 2))
    div = w.total_derivative(rng.randrange(space.n))
    for method in ("reduce", "linear"):
        r = multivector_is_zero(div, method)
        assert r.is_zero and r.complete and verify_certificate(div, r)


@pytest.mark.parametrize("seed", range(20))
def test_reduce_residue_is_canonical(seed):
    rng = random.Random(50 + seed)
    w = random_wedge(S2, rng, "form", 2, max_grading=2)
    r = multivector_is_zero(w)
    assert verify_certificate(w, r)
    assert all(not any(J) for J in r.residue.gradings())
    assert r.residue == w.canonical()
    # adding a divergence does not move the residue
    extra = random_wedge(S2, rng, "form", 2).total_derivative(1)
    assert multivector_is_zero(w + extra).residue == r.residue


@pytest.mark.parametrize("seed", range(12))
def test_zero_test_matches_oracle(seed):
    rng = random.Random(900 + seed)
    w = random_wedge(S, rng, "vector", rng.randint(1, 3), max_grading=1, max_label_order=3)
    v = w.total_derivative(0)
    if seed % 2:
        v = v + MultiVector(1, w.degree, [(z, [lab(k) for k in range(w.degree)], P("u_x^2"))])
    want = oracles.oracle_is_divergence(oracles.from_engine(v), v.degree)
    assert multivector_is_zero(v).is_zero == want
    assert multivector_is_zero(v, "linear").is_zero == want
    assert want == (seed % 2 == 0)


def test_linear_order_bound_flag():
    w = MultiVector(1, 1, [((1,), [lab(0)], P("u_xx"))])
    tight = multivector_is_zero(w, "linear", order_bound=1)
    assert not tight.is_zero and not tight.complete
    full = multivector_is_zero(w, "linear")
    assert not full.is_zero and full.complete


def test_standard_quotient_zero_test():
    K = PoissonCandidate.from_operator(parse_operator("theta*(D3 + 2/3*u*D + 1/3*D(u))", S))
    assert standard_is_zero(self_trivector(K))
    assert not standard_is_zero(MultiVector(1, 3, [(z, [lab(0), lab(1), lab(2)], P("u"))]))


# -- property suites (100 seeded cases each) ------------------------------------------

def test_d_squared_is_zero():
    rng = random.Random(2024)
    for i in range(100):
        space = (S, S2, SUV)[i % 3]
        deg = 1 + i % 3
        sigma = random_wedge(space, rng, "form", deg, max_label_order=1)
        assert not form_differential(form_differential(sigma))
        G = LocalFunctional.bulk(random_polynomial(space, rng), space.n)
        assert not form_differential(differential(G))


def test_pairing_invariant_under_integration_by_parts():
    rng = random.Random(7)
    for i in range(100):
        space = (S, S2)[i % 2]
        xi = random_wedge(space, rng, "vector", 1)
        sigma = random_wedge(space, rng, "form", 1)
        tau = random_wedge(space, rng, "form", 1)
        base = pairing(xi, sigma)
        assert pairing(xi, sigma + tau.total_derivative(rng.randrange(space.n))) == base
        assert pairing(degree_one_canonical(xi), sigma) == base


def test_pairing_with_differential_is_vector_field_action():
    rng = random.Random(11)
    for i in range(30):
        space = (S, S2)[i % 2]
        xi = EvolutionaryVectorField(space, {"u" if space is S else "w": random_polynomial(space, rng, max_order=2)})
        G = LocalFunctional.bulk(random_polynomial(space, rng), space.n)
        assert pairing(xi, differential(G)) == vf_action(xi, G)


def test_evaluate_argument_count():
    with pytest.raises(ValueError):
        evaluate(MultiVector(1, 2), [differential(F("int theta*u"))])


@pytest.mark.parametrize("degs", [(1, 1, 2), (1, 2, 2), (2, 2, 2), (1, 2, 3), (1, 1, 3)])
def test_sn_graded_jacobi(degs):
    rng = random.Random(sum(degs))
    sgn = lambda k: -1 if k % 2 else 1
    for _ in range(3):
        A, B, C = (random_wedge(S, rng, "vector", d, max_grading=0, max_label_order=1 if d < 3 else 2,
                                max_order=1) for d in degs)
        p, q, r = degs
        total = (sn_bracket(A, sn_bracket(B, C)) * sgn((p - 1) * (r - 1))
                 + sn_bracket(B, sn_bracket(C, A)) * sgn((q - 1) * (p - 1))
                 + sn_bracket(C, sn_bracket(A, B)) * sgn((r - 1) * (q - 1)))
        assert zero_mod_divergence(total)
