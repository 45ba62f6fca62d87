"""Acceptance criteria 1-9.

Run under pytest (one pass/fail line per criterion is printed in the terminal
summary) or directly: ``python tests/test_acceptance.py``.
"""
import os
import random
import sys
import time
from fractions import Fraction

import pytest

sys.path.insert(0, os.path.dirname(__file__))

import oracles  # noqa: E402
from divcalc.graded import LocalFunctional, functional_is_zero  # noqa: E402
from divcalc.jetcore import (  # noqa: E402
    DiffPolynomial,
    JetSpace,
    frechet_derivative,
    higher_euler_all,
    jet_var,
    total_derivative_multi,
)
from divcalc.operators import adjoint, antisymmetrize, apply  # noqa: E402
from divcalc.parser import parse_operator  # noqa: E402
from divcalc.poisson import (  # noqa: E402
    PoissonCandidate,
    bracket,
    is_hamiltonian,
    jacobi_residual,
    self_trivector,
    standard_jacobi_residual,
    trivector_value,
)
from divcalc.problem import corpus, corpus_names  # noqa: E402
from divcalc.rational import Q  # noqa: E402
from divcalc.sampling import random_functional, random_operator, random_polynomial, random_wedge  # noqa: E402
from divcalc.tensors import (  # noqa: E402
    EvolutionaryVectorField,
    MultiVector,
    commutator,
    degree_one_canonical,
    form_differential,
    multivector_is_zero,
    pairing,
    sn_bracket,
    sn_bracket_bivectors,
    standard_is_zero,
    verify_certificate,
    vf_to_onevector,
)

RESULTS = {}

S = JetSpace(["u"], 1)
S2 = JetSpace(["w"], 2)
SUV = JetSpace(["u", "v"], 1)
KDV2_TEXT = "theta*(D3 + 2/3*u*D + 1/3*D(u))"


def op(text, space=S):
    return parse_operator(text, space)


def record(k, ok, detail):
    RESULTS[k] = (bool(ok), detail)
    return bool(ok)


def lab(k):
    return jet_var("u", (k,))


# -- 1, 2: adjoints ---------------------------------------------------------------

def check_1():
    a = adjoint(op("theta*D")) == op("-theta*D - theta_x")
    b = antisymmetrize(op("theta*D")) == op("theta*D + 1/2*theta_x")
    return record(1, a and b, f"adjoint(theta D) exact: {a}; antisymmetrize exact: {b}")


def check_2():
    want = op("-theta*(D3 + 2/3*u*D + 1/3*D(u)) - theta_x*(3*D2 + 2/3*u) - 3*theta_{xx}*D - theta_{xxx}")
    got = adjoint(op(KDV2_TEXT))
    parts = [got.grade_component(J) == want.grade_component(J) for J in [(0,), (1,), (2,), (3,)]]
    ok = got == want and all(parts)
    return record(2, ok, f"four displayed terms matched: {sum(parts)}/4, no extra terms: {got == want}")


# -- 3, 4, 5: SN self-brackets ------------------------------------------------------

def check_3():
    K = antisymmetrize(op(KDV2_TEXT))
    T = sn_bracket_bivectors(K, K)
    display = MultiVector(1, 3, [((0,), [lab(0), lab(3), lab(1)], Q(2, 3)),
                                 ((1,), [lab(0), lab(2), lab(1)], 1)])
    diff_zero = multivector_is_zero(T - display).is_zero
    zt = multivector_is_zero(T)
    target = MultiVector(1, 3, [((0,), [lab(0), lab(1), lab(2)], Q(1, 3))]).coefficient_derivative(0)
    residue_ok = multivector_is_zero(zt.residue - target).is_zero
    verdict = is_hamiltonian(PoissonCandidate(K))
    ok = diff_zero and residue_ok and not verdict.hamiltonian and verify_certificate(T, zt)
    return record(3, ok, f"trivector - display ~ 0: {diff_zero}; residue ~ 1/3 theta D(xi^Dxi^D2xi): "
                         f"{residue_ok}; hamiltonian: {'yes' if verdict.hamiltonian else 'no'}")


def check_4():
    P = PoissonCandidate.from_operator(op("theta*(w_x*Dy - w_y*Dx)", S2))
    want = op("theta*(w_x*Dy - w_y*Dx) + 1/2*(theta_y*w_x - theta_x*w_y)", S2)
    v = is_hamiltonian(P)
    cert_ok = verify_certificate(v.trivector, v.zero_test)
    ok = P.operator == want and v.hamiltonian and cert_ok and v.paths_agree
    return record(4, ok, f"reduces to zero: {v.hamiltonian}; certificate of {len(v.zero_test.certificate)} "
                         f"generators verified: {cert_ok}; general path agrees: {v.paths_agree}")


def check_5():
    I = op("theta*D + 1/2*theta_x")
    T = sn_bracket_bivectors(I, I)
    v = is_hamiltonian(PoissonCandidate(I))
    general = sn_bracket(PoissonCandidate(I).bivector, PoissonCandidate(I).bivector)
    ok = not T and not general and v.hamiltonian
    return record(5, ok, f"self-bracket identically zero before reduction: {not T and not general}; "
                         f"hamiltonian: {v.hamiltonian}")


# -- 6: Jacobi residual versus the trivector -------------------------------------------

def _triples(space, rng, count):
    budget = None if space.n == 1 else 3
    for _ in range(count):
        yield tuple(random_functional(space, rng, max_order=3, derivative_budget=budget) for _ in range(3))


_C6 = {}


def _criterion_6_data(triples=20):
    """Per structure: (literal -T matches, -1/2 T matches, nonzero residuals, seconds)."""
    if _C6:
        return _C6
    for name in corpus_names():
        spec = corpus(name)
        P = PoissonCandidate.from_operator(spec.operator())
        T = self_trivector(P)
        rng = random.Random(6000 + len(name))
        lit = half = nonzero = 0
        t0 = time.perf_counter()
        for F, G, H in _triples(spec.space, rng, triples):
            j = jacobi_residual(F, G, H, P)
            t = trivector_value(T, F, G, H)
            lit += (j + t).is_zero()
            half += (j + t * Q(1, 2)).is_zero()
            nonzero += not j.is_zero()
        _C6[name] = (lit, half, nonzero, triples, time.perf_counter() - t0)
    return _C6


def check_6():
    data = _criterion_6_data()
    ok = all(lit == n for lit, _, _, n, _ in data.values())
    detail = "; ".join(f"{k}: J = -T in {lit}/{n}, J = -1/2 T in {half}/{n}"
                       for k, (lit, half, _, n, _) in data.items())
    return record(6, ok, detail + ("" if ok else " (literal factor fails; see ledger)"))


# -- 7: standard quotient ---------------------------------------------------------------

def check_7():
    rng = random.Random(77)
    out = []
    for text in ("theta*D", KDV2_TEXT):
        P = PoissonCandidate.from_operator(op(text))
        v = is_hamiltonian(P)
        classical = v.standard_hamiltonian and standard_is_zero(v.zero_test.residue)
        triples = all(standard_jacobi_residual(F, G, H, P).is_zero() for F, G, H in _triples(S, rng, 5))
        out.append(classical and triples)
    return record(7, all(out), f"kdv1 classical Jacobi: {out[0]}; kdv2 classical Jacobi "
                               f"(obstruction vanishes at theta = 1): {out[1]}")


# -- 8: property suites --------------------------------------------------------------------

CASES = 100


def _space(i):
    return (S, S2, SUV)[i % 3]


def prop_adjoint_involution(rng, i):
    o = random_operator(_space(i), rng, max_grading=2, max_order=3)
    return adjoint(adjoint(o)) == o


def prop_adjoint_identity(rng, i):
    space = _space(i)
    o = random_operator(space, rng)
    f = {A: random_polynomial(space, rng, max_order=2, max_degree=2) for A in space.fields}
    g = {A: random_polynomial(space, rng, max_order=2, max_degree=2) for A in space.fields}
    og, of = apply(o, g), apply(adjoint(o), f)
    lhs = sum((og[A] * f[A] for A in space.fields[1:]), og[space.fields[0]] * f[space.fields[0]])
    rhs = sum((of[A] * g[A] for A in space.fields[1:]), of[space.fields[0]] * g[space.fields[0]])
    return functional_is_zero(LocalFunctional(lhs - rhs))


def prop_d_squared(rng, i):
    space = _space(i)
    sigma = random_wedge(space, rng, "form", 1 + i % 3, max_label_order=1)
    return not form_differential(form_differential(sigma))


def prop_pairing_invariance(rng, i):
    space = _space(i)
    xi = random_wedge(space, rng, "vector", 1)
    sigma = random_wedge(space, rng, "form", 1)
    tau = random_wedge(space, rng, "form", 1)
    base = pairing(xi, sigma)
    moved = pairing(xi, sigma + tau.total_derivative(rng.randrange(space.n)))
    return moved == base and pairing(degree_one_canonical(xi), sigma) == base


def prop_sn_one_vectors(rng, i):
    space = _space(i)
    xi, lam = (EvolutionaryVectorField(space, {A: random_polynomial(space, rng, max_order=2) for A in space.fields})
               for _ in range(2))
    lhs = sn_bracket(vf_to_onevector(xi), vf_to_onevector(lam))
    return multivector_is_zero(lhs + vf_to_onevector(commutator(xi, lam))).is_zero


_P8 = {}


def prop_bracket_paths(rng, i):
    space = _space(i)
    if space not in _P8:
        _P8[space] = [PoissonCandidate.from_operator(random_operator(space, random.Random(k))) for k in range(3)]
    P = rng.choice(_P8[space])
    budget = None if space.n == 1 else 3
    F, G = (random_functional(space, rng, derivative_budget=budget) for _ in range(2))
    return bracket(F, G, P, "euler") == bracket(F, G, P, "frechet")


def prop_higher_euler(rng, i):
    space = _space(i)
    f = random_polynomial(space, rng, max_order=3)
    eta = random_polynomial(space, rng, max_order=2)
    ok = True
    for A in space.fields:
        rebuilt = DiffPolynomial()
        for J, e in higher_euler_all(f, A, space.n).items():
            rebuilt = rebuilt + total_derivative_multi(e * eta, J)
        ok &= rebuilt == frechet_derivative(f, A).apply(eta)
    return ok


PROPERTIES = [
    ("adjoint involution", prop_adjoint_involution),
    ("adjoint defining identity", prop_adjoint_identity),
    ("d^2 = 0 (degrees 1-3)", prop_d_squared),
    ("pairing invariance", prop_pairing_invariance),
    ("SN of 1-vectors = -commutator", prop_sn_one_vectors),
    ("bracket paths agree", prop_bracket_paths),
    ("higher-Euler reconstruction", prop_higher_euler),
]


def run_property(k):
    name, fn = PROPERTIES[k]
    rng = random.Random(8000 + k)
    passed = sum(bool(fn(rng, i)) for i in range(CASES))
    return name, passed


_C8 = {}


def check_8():
    for k in range(len(PROPERTIES)):
        if k not in _C8:
            _C8[k] = run_property(k)
    ok = all(p == CASES for _, p in _C8.values())
    return record(8, ok, "; ".join(f"{n} {p}/{CASES}" for n, p in _C8.values()))


# -- 9: zero test against the brute-force oracle ------------------------------------------

def _oracle_trivector(rng, max_order):
    """Random oracle-side trivector with labels and jets of order <= ``max_order``."""
    vec = {}
    for _ in range(rng.randint(1, 3)):
        j = rng.randint(0, 1)
        labels = tuple(sorted(rng.sample(range(max_order + 1), 3)))
        mono = {}
        for _ in range(rng.randint(0, 2)):
            k = rng.randint(0, max_order)
            mono[k] = mono.get(k, 0) + 1
        key = (j, tuple(sorted(mono.items())), labels)
        vec[key] = vec.get(key, 0) + Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.choice([1, 2, 3]))
    return {k: v for k, v in vec.items() if v}


def _max_order(vec):
    return max(max([k for k, _ in m] + list(ls)) for _, m, ls in vec)


def c9_cases(count=60):
    rng = random.Random(9000)
    cases = []
    while len(cases) < count:
        planted_div = len(cases) % 2 == 0
        vec = oracles.wedge_D(_oracle_trivector(rng, 3))
        if not planted_div:
            extra = _oracle_trivector(rng, 4)
            extra = {(0, m, ls): c for (_, m, ls), c in extra.items()}
            for k, c in extra.items():
                vec[k] = vec.get(k, 0) + c
            vec = {k: v for k, v in vec.items() if v}
        if not vec or _max_order(vec) > 4:
            continue
        cases.append((planted_div, vec))
    return cases


_C9 = {}


def check_9():
    if not _C9:
        agree = planted_ok = 0
        cases = c9_cases()
        for planted, vec in cases:
            want = oracles.oracle_is_divergence(vec, 3)
            V = oracles.to_engine(vec)
            r = multivector_is_zero(V, "reduce")
            lin = multivector_is_zero(V, "linear")
            agree += (r.is_zero == want == lin.is_zero) and verify_certificate(V, r) and lin.complete
            planted_ok += want == planted
        _C9.update(n=len(cases), agree=agree, planted=planted_ok,
                   divs=sum(p for p, _ in cases))
    ok = _C9["agree"] == _C9["n"] and _C9["planted"] == _C9["n"] and _C9["n"] >= 50
    return record(9, ok, f"{_C9['agree']}/{_C9['n']} elements agree with the oracle (both methods); "
                         f"{_C9['divs']} planted divergences, {_C9['n'] - _C9['divs']} planted non-divergences")


# -- pytest entry points -----------------------------------------------------------------

def test_criterion_1_adjoint_first_kdv():
    assert check_1()


def test_criterion_2_adjoint_second_kdv():
    assert check_2()


def test_criterion_3_sn_obstruction():
    assert check_3()


def test_criterion_4_fluid_verdict():
    assert check_4()


def test_criterion_5_first_kdv_verdict():
    assert check_5()


@pytest.mark.xfail(strict=True, reason="the Jacobi residual is -1/2 of the trivector value, not -1 times it")
def test_criterion_6_jacobi_equals_minus_trivector_literal():
    assert check_6()


def test_criterion_6_jacobi_equals_minus_half_trivector():
    data = _criterion_6_data()
    for name, (_, half, nonzero, n, _) in data.items():
        assert n >= 20 and half == n, name
    assert data["kdv2"][2] > 0 and data["kdv1"][2] == 0 and data["fluid2d"][2] == 0


def test_criterion_7_standard_quotient():
    assert check_7()


@pytest.mark.parametrize("k", range(len(PROPERTIES)), ids=[n for n, _ in PROPERTIES])
def test_criterion_8_property(k):
    if k not in _C8:
        _C8[k] = run_property(k)
    name, passed = _C8[k]
    if len(_C8) == len(PROPERTIES):
        check_8()
    assert passed == CASES, name


def test_criterion_9_zero_test_oracle():
    assert check_9()


def main():
    checks = [check_1, check_2, check_3, check_4, check_5, check_6, check_7, check_8, check_9]
    for k, fn in enumerate(checks, 1):
        t0 = time.perf_counter()
        fn()
        ok, detail = RESULTS[k]
        print(f"criterion {k}: {'PASS' if ok else 'FAIL'}  ({time.perf_counter() - t0:.1f}s)  {detail}")
    return 0 if all(ok for ok, _ in RESULTS.values()) else 1


if __name__ == "__main__":
    sys.exit(main())
