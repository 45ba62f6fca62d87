"""Problem files and the built-in corpus.

A problem file is INI-style::

    [fields]
    dimension = 1
    fields = u

    [operator]
    op = theta*(D3 + 2/3*u*D + 1/3*D(u))

    [functionals]
    H = int theta*u^2/2

    [options]
    name = kdv2
    antisymmetrize = yes
    order_bound = 6
    trials = 3
    seed = 0

For several fields the ``[operator]`` section lists matrix entries as
``A,B = expr``; missing entries are zero.
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple, Union

from .graded import LocalFunctional
from .jetcore import JetSpace
from .operators import GradedDiffOperator
from .parser import ParseError, parse_functional, parse_operator


class ProblemError(ValueError):
    pass


@dataclass
class ProblemSpec:
    name: str
    space: JetSpace
    operator_source: Union[str, Dict[Tuple[str, str], str]]
    functionals: Dict[str, str] = field(default_factory=dict)
    antisymmetrize: bool = True
    order_bound: Optional[int] = None
    trials: int = 3
    seed: int = 0
    method: str = "reduce"
    expected: Optional[bool] = None

    def operator(self) -> GradedDiffOperator:
        return parse_operator(self.operator_source, self.space)

    def parsed_functionals(self) -> Dict[str, LocalFunctional]:
        out = {}
        for k, text in self.functionals.items():
            try:
                out[k] = parse_functional(text, self.space)
            except ParseError as e:
                raise ProblemError(f"functional {k}: {e}") from e
        return out


def _parser() -> configparser.ConfigParser:
    cp = configparser.ConfigParser(delimiters=("=",), interpolation=None)
    cp.optionxform = str
    return cp


def _bool(text: str, key: str) -> bool:
    t = text.strip().lower()
    if t in ("yes", "true", "1", "on"):
        return True
    if t in ("no", "false", "0", "off"):
        return False
    raise ProblemError(f"option {key}: expected yes/no, got {text!r}")


def _int(text: str, key: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ProblemError(f"option {key}: expected an integer, got {text!r}") from None


def loads(text: str, default_name: str = "problem") -> ProblemSpec:
    cp = _parser()
    try:
        cp.read_string(text)
    except configparser.Error as e:
        raise ProblemError(f"malformed problem file: {e}") from e
    for sec in ("fields", "operator"):
        if not cp.has_section(sec):
            raise ProblemError(f"missing [{sec}] section")
    unknown = set(cp.sections()) - {"fields", "operator", "functionals", "options"}
    if unknown:
        raise ProblemError(f"unknown sections {sorted(unknown)}")
    fs = cp["fields"]
    n = _int(fs.get("dimension", "1"), "dimension")
    names = [s.strip() for s in fs.get("fields", "").split(",") if s.strip()]
    try:
        space = JetSpace(names, n)
    except ValueError as e:
        raise ProblemError(f"[fields]: {e}") from e

    entries: Dict[Tuple[str, str], str] = {}
    for key, value in cp["operator"].items():
        if "," in key:
            A, B = (s.strip() for s in key.split(",", 1))
        elif len(space.fields) == 1:
            A = B = space.fields[0]
        else:
            raise ProblemError(f"operator key {key!r}: several fields need 'A,B = expr'")
        if (A, B) in entries:
            raise ProblemError(f"operator entry {A},{B} given twice")
        entries[(A, B)] = value.strip()
    if not entries:
        raise ProblemError("empty [operator] section")

    funcs = dict(cp["functionals"].items()) if cp.has_section("functionals") else {}
    opts = cp["options"] if cp.has_section("options") else {}
    known = {"name", "antisymmetrize", "order_bound", "trials", "seed", "method", "expect"}
    extra = set(opts) - known
    if extra:
        raise ProblemError(f"unknown options {sorted(extra)}")
    ob = opts.get("order_bound", "").strip()
    method = opts.get("method", "reduce").strip()
    if method not in ("reduce", "linear"):
        raise ProblemError(f"option method: expected reduce or linear, got {method!r}")
    expected = None
    if opts.get("expect", "").strip():
        expected = _bool(opts["expect"], "expect")
    spec = ProblemSpec(
        name=opts.get("name", default_name).strip(),
        space=space,
        operator_source=entries,
        functionals={k: v.strip() for k, v in funcs.items()},
        antisymmetrize=_bool(opts.get("antisymmetrize", "yes"), "antisymmetrize"),
        order_bound=_int(ob, "order_bound") if ob else None,
        trials=_int(opts.get("trials", "3"), "trials"),
        seed=_int(opts.get("seed", "0"), "seed"),
        method=method,
        expected=expected,
    )
    # surface parse errors at load time
    try:
        spec.operator()
    except (ParseError, KeyError, ValueError) as e:
        raise ProblemError(f"[operator]: {e}") from e
    spec.parsed_functionals()
    return spec


def load(path: str) -> ProblemSpec:
    import os
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return loads(text, os.path.splitext(os.path.basename(path))[0])


def dumps(spec: ProblemSpec) -> str:
    lines = ["[fields]", f"dimension = {spec.space.n}", f"fields = {', '.join(spec.space.fields)}",
             "", "[operator]"]
    single = len(spec.space.fields) == 1
    src = spec.operator_source
    if isinstance(src, str):
        if not single:
            raise ProblemError("cannot serialize a multi-field operator given as one string")
        src = {(spec.space.fields[0],) * 2: src}
    for (A, B), text in src.items():
        lines.append(f"op = {text}" if single else f"{A},{B} = {text}")
    if spec.functionals:
        lines += ["", "[functionals]"] + [f"{k} = {v}" for k, v in spec.functionals.items()]
    lines += ["", "[options]", f"name = {spec.name}",
              f"antisymmetrize = {'yes' if spec.antisymmetrize else 'no'}"]
    if spec.order_bound is not None:
        lines.append(f"order_bound = {spec.order_bound}")
    lines += [f"trials = {spec.trials}", f"seed = {spec.seed}", f"method = {spec.method}"]
    if spec.expected is not None:
        lines.append(f"expect = {'yes' if spec.expected else 'no'}")
    return "\n".join(lines) + "\n"


CORPUS_TEXT = {
    "kdv1": """\
[fields]
dimension = 1
fields = u

[operator]
op = theta*D

[functionals]
H = int theta*u^2/2

[options]
name = kdv1
expect = yes
""",
    "kdv2": """\
[fields]
dimension = 1
fields = u

[operator]
op = theta*(D3 + 2/3*u*D + 1/3*D(u))

[functionals]
H = int theta*u^2/2

[options]
name = kdv2
expect = no
""",
    "fluid2d": """\
[fields]
dimension = 2
fields = w

[operator]
op = theta*(w_x*Dy - w_y*Dx)

[functionals]
E = int theta*w^2/2

[options]
name = fluid2d
trials = 2
expect = yes
""",
}


def corpus_names():
    return list(CORPUS_TEXT)


def corpus(name: str) -> ProblemSpec:
    if name not in CORPUS_TEXT:
        raise ProblemError(f"unknown corpus entry {name!r}; known: {', '.join(CORPUS_TEXT)}")
    return loads(CORPUS_TEXT[name], name)
