"""Seeded random differential polynomials for randomized cross-checks."""
from __future__ import annotations

import random

from .graded import LocalFunctional
from .jetcore import DiffPolynomial, JetSpace, indices_up_to, jet_var


def random_polynomial(space: JetSpace, rng: random.Random, max_order: int = 3,
                      max_degree: int = 3, max_terms: int = 3, coeff: int = 3,
                      derivative_budget: int | None = None) -> DiffPolynomial:
    """A nonzero polynomial of at most ``max_terms`` monomials in the field jets.

    ``derivative_budget`` caps the summed jet order of each monomial; nested
    brackets of high-order densities in two dimensions are expensive.
    """
    idx = list(indices_up_to(space.n, max_order))
    cap = derivative_budget if derivative_budget is not None else max_degree * max_order
    while True:
        p = DiffPolynomial()
        for _ in range(rng.randint(1, max_terms)):
            m = DiffPolynomial.const(rng.choice([c for c in range(-coeff, coeff + 1) if c]))
            spent = 0
            for _ in range(rng.randint(1, max_degree)):
                J = rng.choice([K for K in idx if spent + sum(K) <= cap])
                spent += sum(J)
                m = m * space.var(rng.choice(space.fields), J)
            p = p + m
        if p:
            return p


def random_functional(space: JetSpace, rng: random.Random, **kw) -> LocalFunctional:
    return LocalFunctional.bulk(random_polynomial(space, rng, **kw), space.n)


def random_wedge(space: JetSpace, rng: random.Random, kind: str = "vector", degree: int = 1,
                 max_grading: int = 1, max_label_order: int = 2, max_terms: int = 3, **kw):
    """Wedge density with random gradings, basis labels and polynomial coefficients."""
    from .tensors import WedgeDensity
    gidx = list(indices_up_to(space.n, max_grading))
    labels = [jet_var(A, K) for A in space.fields for K in indices_up_to(space.n, max_label_order)]
    if len(labels) < degree:
        raise ValueError("not enough distinct basis labels for this degree")
    kw.setdefault("max_order", 2)
    kw.setdefault("max_degree", 2)
    kw.setdefault("max_terms", 2)
    terms = []
    for _ in range(rng.randint(1, max_terms)):
        terms.append((rng.choice(gidx), rng.sample(labels, degree), random_polynomial(space, rng, **kw)))
    return WedgeDensity(kind, degree, space.n, terms)


def random_operator(space: JetSpace, rng: random.Random, max_grading: int = 1, max_order: int = 2,
                    max_terms: int = 2, **kw):
    """Matrix operator with a few random ``theta^(J) c D_N`` terms per entry."""
    from .operators import GradedDiffOperator
    gidx = list(indices_up_to(space.n, max_grading))
    nidx = list(indices_up_to(space.n, max_order))
    kw.setdefault("max_order", 1)
    kw.setdefault("max_degree", 2)
    kw.setdefault("max_terms", 2)
    entries = {}
    for A in space.fields:
        for B in space.fields:
            row = {}
            for _ in range(rng.randint(1, max_terms)):
                key = (rng.choice(gidx), rng.choice(nidx))
                row[key] = row.get(key, DiffPolynomial()) + random_polynomial(space, rng, **kw)
            entries[(A, B)] = row
    return GradedDiffOperator(space, entries)
