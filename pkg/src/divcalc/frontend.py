"""Structure checks driven by problem specs, and their text/JSON rendering."""
from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field
from typing import Optional

from .operators import antisymmetrize, is_antisymmetric
from .poisson import (
    PoissonCandidate,
    hamiltonian_field,
    is_hamiltonian,
    jacobi_residual,
    trivector_value,
)
from .printer import format_graded, format_operator, format_wedge
from .problem import ProblemSpec
from .rational import Q
from .sampling import random_functional
from .tensors import verify_certificate

SCHEMA_VERSION = 1


class CheckError(RuntimeError):
    pass


@dataclass
class Verdict:
    structure: str
    hamiltonian: bool
    operator: str
    antisymmetrized: str
    trivector: str
    residue: str
    certificate: Optional[list]
    certificate_verified: bool
    obstruction: Optional[str]
    standard_hamiltonian: bool
    paths_agree: Optional[bool]
    zero_test: dict
    trials: dict
    hamiltonian_fields: dict
    expected: Optional[bool] = None
    timing: dict = field(default_factory=dict)

    def __post_init__(self):
        if (self.obstruction is None) != self.hamiltonian:
            raise AssertionError("obstruction must be present exactly when the verdict is negative")

    @property
    def matches_expectation(self) -> Optional[bool]:
        return None if self.expected is None else self.expected == self.hamiltonian

    def to_json(self, timing: bool = False) -> dict:
        out = {
            "schema": SCHEMA_VERSION,
            "structure": self.structure,
            "hamiltonian": "yes" if self.hamiltonian else "no",
            "operator": self.operator,
            "antisymmetrized": self.antisymmetrized,
            "trivector": {"raw": self.trivector, "canonical_residue": self.residue},
            "certificate": self.certificate,
            "certificate_verified": self.certificate_verified,
            "obstruction": self.obstruction,
            "standard_quotient": {"hamiltonian": "yes" if self.standard_hamiltonian else "no"},
            "paths_agree": self.paths_agree,
            "zero_test": self.zero_test,
            "trials": self.trials,
            "hamiltonian_fields": self.hamiltonian_fields,
            "expected": None if self.expected is None else ("yes" if self.expected else "no"),
        }
        if timing:
            out["timing"] = self.timing
        return out

    def to_text(self, timing: bool = False) -> str:
        lines = [f"structure: {self.structure}",
                 f"operator: {self.operator}"]
        if self.antisymmetrized != self.operator:
            lines.append(f"antisymmetrized: {self.antisymmetrized}")
        lines.append(f"SN self-bracket: {self.trivector}")
        lines.append(f"canonical residue: {self.residue}")
        lines.append(f"hamiltonian: {'yes' if self.hamiltonian else 'no'}")
        if self.hamiltonian:
            lines.append(f"certificate: {len(self.certificate or [])} divergence generator(s), "
                         f"verified: {'yes' if self.certificate_verified else 'no'}")
            for g in self.certificate or []:
                lines.append(f"  {g['multiplier']} * D_{g['axis']}(grading {g['grading']}: {g['density']})")
        else:
            lines.append(f"obstruction: {self.obstruction}")
        lines.append(f"standard quotient (theta = 1): {'hamiltonian' if self.standard_hamiltonian else 'not hamiltonian'}")
        if self.paths_agree is not None:
            lines.append(f"general bracket agrees with prolongation formula: {'yes' if self.paths_agree else 'no'}")
        if not self.zero_test.get("complete", True):
            lines.append(f"note: order bound {self.zero_test.get('order_bound')} may be too small for a final answer")
        t = self.trials
        if t["count"]:
            lines.append(f"random Jacobi trials: {t['count']} (seed {t['seed']}), residual zero in {t['residual_zero']}, "
                         f"Jacobi = -1/2 trivector in {t['identity_holds']}")
        for name, xs in self.hamiltonian_fields.items():
            lines.append(f"X_{name}: " + "; ".join(f"{A}: {v}" for A, v in xs.items()))
        if self.expected is not None:
            lines.append(f"expected: {'yes' if self.expected else 'no'} "
                         f"({'match' if self.matches_expectation else 'MISMATCH'})")
        if timing:
            lines.append("timing: " + ", ".join(f"{k} {v:.3f}s" for k, v in self.timing.items()))
        return "\n".join(lines)


def dumps_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def _field_text(X) -> dict:
    return {A: format_graded(X.characteristic(A)) for A in X.space.fields}


def run_check(spec: ProblemSpec, order_bound: Optional[int] = None, trials: Optional[int] = None,
              seed: Optional[int] = None, method: Optional[str] = None, cross_check: bool = True) -> Verdict:
    """Decide whether the problem's operator is Hamiltonian and collect cross-checks.

    Arguments override the problem's options.  The result depends only on the
    problem and the seed.
    """
    clock = {}
    t0 = time.perf_counter()
    order_bound = spec.order_bound if order_bound is None else order_bound
    trials = spec.trials if trials is None else trials
    seed = spec.seed if seed is None else seed
    method = spec.method if method is None else method
    try:
        op = spec.operator()
    except Exception as e:
        raise CheckError(f"{spec.name}: cannot build operator: {e}") from e
    if spec.antisymmetrize:
        op_used = antisymmetrize(op)
    elif is_antisymmetric(op):
        op_used = op
    else:
        raise CheckError(f"{spec.name}: operator is not antisymmetric and antisymmetrize = no")
    P = PoissonCandidate(op_used, spec.name)
    clock["parse"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    hv = is_hamiltonian(P, method=method, order_bound=order_bound, cross_check=cross_check)
    zt = hv.zero_test
    clock["sn_bracket_and_zero_test"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    rng = random.Random(seed)
    budget = None if spec.space.n == 1 else 4
    zero_count = ident_count = 0
    for _ in range(trials):
        F, G, H = (random_functional(spec.space, rng, derivative_budget=budget) for _ in range(3))
        j = jacobi_residual(F, G, H, P)
        zero_count += j.is_zero()
        ident_count += (j + trivector_value(hv.trivector, F, G, H) * Q(1, 2)).is_zero()
    clock["trials"] = time.perf_counter() - t0

    fields = {}
    for name, F in spec.parsed_functionals().items():
        fields[name] = _field_text(hamiltonian_field(F, P))

    cert = [g.to_json() for g in zt.certificate] if hv.hamiltonian else None
    return Verdict(
        structure=spec.name,
        hamiltonian=hv.hamiltonian,
        operator=format_operator(op),
        antisymmetrized=format_operator(op_used),
        trivector=format_wedge(hv.trivector),
        residue=format_wedge(zt.residue),
        certificate=cert,
        certificate_verified=verify_certificate(hv.trivector, zt),
        obstruction=None if hv.hamiltonian else format_wedge(zt.residue),
        standard_hamiltonian=hv.standard_hamiltonian,
        paths_agree=hv.paths_agree,
        zero_test={"method": zt.method, "order_bound": zt.order_bound, "complete": zt.complete},
        trials={"count": trials, "seed": seed, "residual_zero": zero_count, "identity_holds": ident_count},
        hamiltonian_fields=fields,
        expected=spec.expected,
        timing=clock,
    )
