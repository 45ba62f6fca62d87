"""Command-line entry point (``divcalc``).

Exit codes: 0 computed, 2 structure not Hamiltonian (``check``) or a corpus
verdict differs from its recorded expectation (``corpus run``), 1 error.
"""
from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor

from . import problem as problem_mod
from .frontend import CheckError, dumps_json, run_check
from .graded import LocalFunctional, full_variational_derivative
from .jetcore import DiffPolynomial, JetSpace, higher_euler_all
from .operators import adjoint, antisymmetrize
from .parser import ParseError, parse_expression, parse_functional, parse_operator
from .poisson import (
    PoissonCandidate,
    is_hamiltonian,
    jacobi_residual,
    poisson_bracket,
    self_trivector,
    trivector_value,
)
from .printer import format_graded, format_operator, format_poly, format_theta, format_wedge
from .rational import Q
from .tensors import multivector_is_zero


class UsageError(Exception):
    pass


def _space(args) -> JetSpace:
    fields = [s.strip() for s in args.fields.split(",") if s.strip()]
    try:
        return JetSpace(fields, args.dim)
    except ValueError as e:
        raise UsageError(str(e)) from e


def _emit(args, text: str, data: dict):
    if args.format == "json":
        print(dumps_json(data))
    else:
        print(text)


def _functional_text(F: LocalFunctional) -> str:
    return f"int {format_graded(F.canonical())}"


def _candidate(args, space) -> PoissonCandidate:
    if not args.op:
        raise UsageError("this command needs --op")
    return PoissonCandidate.from_operator(parse_operator(args.op, space))


# -- subcommands ---------------------------------------------------------------

def cmd_canon(args):
    space = _space(args)
    F = parse_functional(args.expr, space)
    out = _functional_text(F)
    _emit(args, out, {"input": args.expr, "canonical": out, "is_zero": F.is_zero()})
    return 0


def cmd_adjoint(args):
    space = _space(args)
    op = parse_operator(args.expr, space)
    out = format_operator(adjoint(op))
    _emit(args, out, {"input": format_operator(op), "adjoint": out})
    return 0


def cmd_antisym(args):
    space = _space(args)
    op = parse_operator(args.expr, space)
    out = format_operator(antisymmetrize(op))
    _emit(args, out, {"input": format_operator(op), "antisymmetrized": out})
    return 0


def cmd_euler(args):
    space = _space(args)
    f = parse_expression(args.expr, space)
    if isinstance(f, LocalFunctional):
        f = f.canonical_integrand()
    if not isinstance(f, DiffPolynomial):
        raise UsageError("euler needs a differential polynomial or a functional")
    data = {}
    lines = []
    for A in space.fields:
        comps = higher_euler_all(f, A, space.n)
        data[A] = {format_theta(J).replace("theta", "E"): format_poly(e)
                   for J, e in sorted(comps.items(), key=lambda t: (sum(t[0]), t[0]))}
        for k, v in data[A].items():
            lines.append(f"{k}[{A}] = {v}")
    _emit(args, "\n".join(lines) or "0", {"input": args.expr, "higher_euler": data})
    return 0


def cmd_vder(args):
    space = _space(args)
    F = parse_functional(args.expr, space)
    data = {A: format_graded(full_variational_derivative(F, A)) for A in space.fields}
    _emit(args, "\n".join(f"d/d{A}: {v}" for A, v in data.items()),
          {"input": args.expr, "variational_derivative": data})
    return 0


def cmd_bracket(args):
    space = _space(args)
    P = _candidate(args, space)
    F, G = parse_functional(args.F, space), parse_functional(args.G, space)
    r = poisson_bracket(F, G, P, args.method)
    data = {"bracket": _functional_text(r.value), "bulk": format_graded(r.bulk),
            "boundary": format_graded(r.boundary)}
    text = f"{{F, G}} = {data['bracket']}\n  bulk: {data['bulk']}\n  boundary: {data['boundary']}"
    _emit(args, text, data)
    return 0


def cmd_sn(args):
    space = _space(args)
    P = _candidate(args, space)
    T = self_trivector(P, args.path)
    zt = multivector_is_zero(T, method=args.method, order_bound=args.order_bound)
    data = {"trivector": format_wedge(T), "zero_test": zt.to_json()}
    text = f"[Psi, Psi] = {data['trivector']}\nreduces to zero: {'yes' if zt.is_zero else 'no'}" \
           f"\ncanonical residue: {format_wedge(zt.residue)}"
    _emit(args, text, data)
    return 0


def cmd_jacobi(args):
    space = _space(args)
    P = _candidate(args, space)
    F, G, H = (parse_functional(x, space) for x in (args.F, args.G, args.H))
    j = jacobi_residual(F, G, H, P)
    T = is_hamiltonian(P, cross_check=False).trivector
    v = trivector_value(T, F, G, H)
    data = {"residual": _functional_text(j), "trivector_value": _functional_text(v),
            "residual_plus_half_trivector_is_zero": (j + v * Q(1, 2)).is_zero()}
    text = (f"Jacobi residual: {data['residual']}\nT(dF, dG, dH): {data['trivector_value']}\n"
            f"residual = -1/2 T(dF, dG, dH): {'yes' if data['residual_plus_half_trivector_is_zero'] else 'no'}")
    _emit(args, text, data)
    return 0


def _check_kwargs(args):
    return dict(order_bound=args.order_bound, trials=args.trials, seed=args.seed,
                method=args.method if args.method != "auto" else None)


def cmd_check(args):
    if args.problem:
        spec = problem_mod.load(args.problem)
    elif args.corpus:
        spec = problem_mod.corpus(args.corpus)
    elif args.op:
        space = _space(args)
        spec = problem_mod.ProblemSpec("cli", space, args.op)
    else:
        raise UsageError("check needs --problem, --corpus or --op")
    v = run_check(spec, **_check_kwargs(args))
    if args.format == "json":
        print(dumps_json(v.to_json(args.timing)))
    else:
        print(v.to_text(args.timing))
    return 0 if v.hamiltonian else 2


def _corpus_one(name, kw):
    return run_check(problem_mod.corpus(name), **kw)


def cmd_corpus(args):
    if args.action == "list":
        names = problem_mod.corpus_names()
        if args.format == "json":
            print(dumps_json({n: problem_mod.CORPUS_TEXT[n] for n in names}))
        else:
            for n in names:
                spec = problem_mod.corpus(n)
                exp = {True: "yes", False: "no", None: "?"}[spec.expected]
                print(f"{n}\tn={spec.space.n}\tfields={','.join(spec.space.fields)}\texpected hamiltonian: {exp}")
        return 0
    names = args.names or problem_mod.corpus_names()
    for n in names:
        problem_mod.corpus(n)  # fail early on unknown names
    kw = _check_kwargs(args)
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            verdicts = list(ex.map(_corpus_one, names, [kw] * len(names)))
    else:
        verdicts = [_corpus_one(n, kw) for n in names]
    ok = all(v.matches_expectation is not False for v in verdicts)
    if args.format == "json":
        print(dumps_json({"results": [v.to_json(args.timing) for v in verdicts], "all_as_expected": ok}))
    else:
        print("\n\n".join(v.to_text(args.timing) for v in verdicts))
    return 0 if ok else 2


# -- argument parsing -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--fields", default="u", help="comma-separated field names (default: u)")
    common.add_argument("--dim", type=int, default=1, help="spatial dimension (default: 1)")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--order-bound", type=int, default=None,
                        help="jet-order bound for the linear zero test")
    common.add_argument("--trials", type=int, default=None, help="random Jacobi trials")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--timing", action="store_true", help="include wall-clock timings")

    p = argparse.ArgumentParser(prog="divcalc", description="Graded variational calculus and Hamiltonian checks.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=func)
        return sp

    add("canon", cmd_canon, "canonical form of a functional").add_argument("expr")
    add("adjoint", cmd_adjoint, "graded adjoint of an operator").add_argument("expr")
    add("antisym", cmd_antisym, "antisymmetric part of an operator").add_argument("expr")
    add("euler", cmd_euler, "higher Euler operators of a density").add_argument("expr")
    add("vder", cmd_vder, "graded variational derivative of a functional").add_argument("expr")

    sp = add("bracket", cmd_bracket, "Poisson bracket {F, G}")
    sp.add_argument("F")
    sp.add_argument("G")
    sp.add_argument("--op", required=True)
    sp.add_argument("--method", choices=("euler", "frechet"), default="euler")

    sp = add("sn", cmd_sn, "SN self-bracket of the bivector of an operator")
    sp.add_argument("--op", required=True)
    sp.add_argument("--path", choices=("olver", "general"), default="olver")
    sp.add_argument("--method", choices=("reduce", "linear"), default="reduce")

    sp = add("jacobi", cmd_jacobi, "Jacobi residual of three functionals")
    for name in "FGH":
        sp.add_argument(name)
    sp.add_argument("--op", required=True)

    sp = add("check", cmd_check, "decide whether an operator is Hamiltonian")
    src = sp.add_mutually_exclusive_group()
    src.add_argument("--problem", help="problem file")
    src.add_argument("--corpus", help="built-in corpus entry")
    src.add_argument("--op", help="operator expression")
    sp.add_argument("--method", choices=("auto", "reduce", "linear"), default="auto")

    sp = add("corpus", cmd_corpus, "built-in structures")
    sp.add_argument("action", choices=("list", "run"))
    sp.add_argument("names", nargs="*")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--method", choices=("auto", "reduce", "linear"), default="auto")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, problem_mod.ProblemError, CheckError, UsageError, KeyError, ValueError) as e:
        msg = e.args[0] if isinstance(e, KeyError) and e.args else str(e)
        print(f"error: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
