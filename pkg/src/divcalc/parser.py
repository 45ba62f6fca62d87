"""Recursive-descent parser for polynomials, graded densities, functionals and operators.

Grammar (whitespace is insignificant)::

    top    := ["int"] expr
    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "@" | "/") unary)*
    unary  := ("+" | "-") unary | power
    power  := atom [("^" | "**") INT]
    atom   := INT | name | dsym "(" expr ")" | dsym | "(" expr ")"

Names are field jets (``u``, ``u_x``, ``u_{xy}``), axis coordinates (``x``),
theta factors (``theta``, ``theta_x``, ``theta_{xx}``) and total-derivative
symbols (``D``, ``D2``, ``D3`` in one dimension; ``Dx``, ``Dxy``, ``D_x``,
``D_{xy}`` in any dimension).  ``*`` and ``@`` are both composition, so a
derivative symbol followed by a factor acts on everything to its right:
``D@u`` and ``D*u`` are the operator ``u D + u_x``.  ``D(u)`` applies the
total derivative and gives the polynomial ``u_x``.  Division is only by
nonzero constants.
"""
from __future__ import annotations

import re
from typing import Dict, List, Optional, Tuple

from .graded import GradedDensity, LocalFunctional
from .jetcore import ZERO, DiffPolynomial, JetSpace, MultiIndex, below, derivative_tower, madd, msub, multi_binomial
from .operators import GradedDiffOperator


class ParseError(ValueError):
    """Syntax error, undeclared identifier or dimension mismatch, with a position."""

    def __init__(self, message: str, pos: int = 0, text: str = ""):
        self.message = message
        self.pos = pos
        self.text = text
        super().__init__(self._render())

    def _render(self) -> str:
        if not self.text:
            return f"{self.message} (at {self.pos})"
        return f"{self.message} at position {self.pos}\n  {self.text}\n  {' ' * self.pos}^"


_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>\d+)
  | (?P<name>[A-Za-z][A-Za-z0-9]*(?:_(?:\{[A-Za-z]*\}|[A-Za-z]+))?)
  | (?P<op>\*\*|[-+*/^@()])
""", re.X)


def tokenize(text: str) -> List[Tuple[str, str, int]]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind != "ws":
            out.append((kind, m.group(), pos))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


# -- term algebra ------------------------------------------------------------
# key (J, N): theta^(J) c D_N, with J = None for "no theta factor".

Key = Tuple[Optional[MultiIndex], MultiIndex]


class _Expr:
    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Dict[Key, DiffPolynomial]):
        self.n = n
        self.terms = {k: c for k, c in terms.items() if c}

    @classmethod
    def poly(cls, n, f):
        return cls(n, {(None, (0,) * n): f})

    def add(self, other: "_Expr", sign=1) -> "_Expr":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, ZERO) + (c if sign == 1 else -c)
        return _Expr(self.n, out)

    def scale(self, c) -> "_Expr":
        return _Expr(self.n, {k: v * c for k, v in self.terms.items()})

    def compose(self, other: "_Expr") -> "_Expr":
        out: Dict[Key, DiffPolynomial] = {}
        for (Jb, Nb), cb in other.terms.items():
            tower = derivative_tower(cb, self.n)
            for (Ja, Na), ca in self.terms.items():
                if Jb is None:
                    # D_N only meets the coefficient
                    for P in below(Na):
                        key = (Ja, madd(msub(Na, P), Nb))
                        out[key] = out.get(key, ZERO) + ca * tower(P) * multi_binomial(Na, P)
                    continue
                J0 = Jb if Ja is None else madd(Ja, Jb)
                for P in below(Na):
                    rest = msub(Na, P)
                    bp = multi_binomial(Na, P)
                    for Qi in below(rest):
                        key = (madd(J0, P), madd(msub(rest, Qi), Nb))
                        val = ca * tower(Qi) * (bp * multi_binomial(rest, Qi))
                        out[key] = out.get(key, ZERO) + val
        return _Expr(self.n, out)

    def has_operator(self) -> bool:
        return any(any(N) for _, N in self.terms)

    def theta_states(self) -> set:
        return {J is not None for J, _ in self.terms}

    def constant(self):
        """The value as a rational, or None when it is not a plain constant."""
        if not self.terms:
            return 0
        if len(self.terms) != 1:
            return None
        (J, N), c = next(iter(self.terms.items()))
        if J is not None or any(N) or not c.is_constant():
            return None
        return c.constant_term()


def _letters_to_index(letters: str, space: JetSpace, pos: int, text: str) -> MultiIndex:
    J = [0] * space.n
    for ch in letters:
        if ch not in space.axis_names:
            raise ParseError(f"axis {ch!r} is not available in dimension {space.n}", pos, text)
        J[space.axis_names.index(ch)] += 1
    return tuple(J)


class _Parser:
    def __init__(self, text: str, space: JetSpace):
        self.text = text
        self.space = space
        self.n = space.n
        self.toks = tokenize(text)
        self.i = 0

    # token helpers
    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, tok[2], self.text)

    def expect(self, value):
        t = self.peek()
        if t[1] != value or t[0] == "name":
            self.error(f"expected {value!r}, found {t[1] or 'end of input'!r}")
        return self.take()

    # grammar
    def parse_top(self):
        functional = False
        t = self.peek()
        if t[0] == "name" and t[1] == "int":
            self.take()
            functional = True
        e = self.expr()
        if self.peek()[0] != "end":
            self.error(f"unexpected {self.peek()[1]!r}")
        return functional, e

    def expr(self) -> _Expr:
        e = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            e = e.add(self.term(), 1 if op == "+" else -1)
        return e

    def term(self) -> _Expr:
        e = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in ("*", "@", "/"):
            tok = self.take()
            rhs = self.unary()
            if tok[1] == "/":
                c = rhs.constant()
                if c is None:
                    self.error("division is only allowed by a constant", tok)
                if c == 0:
                    self.error("division by zero", tok)
                e = e.scale(1 / DiffPolynomial.const(c).constant_term())
            else:
                e = e.compose(rhs)
        return e

    def unary(self) -> _Expr:
        t = self.peek()
        if t[0] == "op" and t[1] in ("+", "-"):
            self.take()
            e = self.unary()
            return e if t[1] == "+" else e.scale(-1)
        return self.power()

    def power(self) -> _Expr:
        base = self.atom()
        t = self.peek()
        if t[0] == "op" and t[1] in ("^", "**"):
            self.take()
            k = self.peek()
            if k[0] != "num":
                self.error("exponent must be a non-negative integer literal")
            self.take()
            out = _Expr.poly(self.n, DiffPolynomial.const(1))
            for _ in range(int(k[1])):
                out = out.compose(base)
            return out
        return base

    def atom(self) -> _Expr:
        t = self.peek()
        if t[0] == "num":
            self.take()
            return _Expr.poly(self.n, DiffPolynomial.const(int(t[1])))
        if t[0] == "op" and t[1] == "(":
            self.take()
            e = self.expr()
            self.expect(")")
            return e
        if t[0] == "name":
            self.take()
            return self.name(t)
        self.error(f"unexpected {t[1] or 'end of input'!r}")

    def name(self, tok) -> _Expr:
        word, pos = tok[1], tok[2]
        base, _, suffix = word.partition("_")
        letters = suffix.strip("{}")
        if "_" in word and not letters:
            raise ParseError("empty jet suffix", pos, self.text)
        z = self.space.zero()
        if base == "int":
            raise ParseError("'int' may only open a functional", pos, self.text)
        if base == "theta":
            J = _letters_to_index(letters, self.space, pos, self.text)
            return _Expr(self.n, {(J, z): DiffPolynomial.const(1)})
        N = self._dsymbol(base, letters, pos, "_" in word)
        if N is not None:
            op = _Expr(self.n, {(None, N): DiffPolynomial.const(1)})
            nxt = self.peek()
            if nxt[0] == "op" and nxt[1] == "(" and nxt[2] == pos + len(word):
                # D(expr): apply rather than compose
                self.take()
                arg = self.expr()
                self.expect(")")
                if arg.has_operator():
                    raise ParseError("D(...) applies to densities, not operators", pos, self.text)
                applied = op.compose(arg)
                return _Expr(self.n, {k: c for k, c in applied.terms.items() if not any(k[1])})
            return op
        if base in self.space.fields:
            J = _letters_to_index(letters, self.space, pos, self.text)
            return _Expr.poly(self.n, DiffPolynomial.var(base, J))
        if base in self.space.axis_names and "_" not in word:
            return _Expr.poly(self.n, self.space.coordinate(self.space.axis_names.index(base)))
        raise ParseError(f"undeclared identifier {word!r}", pos, self.text)

    def _dsymbol(self, base: str, letters: str, pos: int, has_suffix: bool) -> Optional[MultiIndex]:
        if not base.startswith("D"):
            return None
        rest = base[1:]
        if has_suffix:
            if rest:
                raise ParseError(f"malformed derivative symbol {base + '_' + letters!r}", pos, self.text)
            return _letters_to_index(letters, self.space, pos, self.text)
        if not rest or rest.isdigit():
            if self.n != 1:
                raise ParseError(f"{base!r} needs an axis in dimension {self.n} (use Dx, Dxy, ...)",
                                 pos, self.text)
            k = int(rest) if rest else 1
            if k < 1:
                raise ParseError("derivative order must be positive", pos, self.text)
            return (k,)
        if rest.isalpha():
            return _letters_to_index(rest, self.space, pos, self.text)
        raise ParseError(f"undeclared identifier {base!r}", pos, self.text)


def _with_theta(e: _Expr, text: str) -> Dict[Tuple[MultiIndex, MultiIndex], DiffPolynomial]:
    states = e.theta_states()
    if len(states) > 1:
        raise ParseError("some terms carry a theta factor and others do not", 0, text)
    z = (0,) * e.n
    out: Dict[Tuple[MultiIndex, MultiIndex], DiffPolynomial] = {}
    for (J, N), c in e.terms.items():
        key = (z if J is None else J, N)
        out[key] = out.get(key, ZERO) + c
    return out


def _finish(functional: bool, e: _Expr, space: JetSpace, text: str):
    if functional:
        if e.has_operator():
            raise ParseError("a functional cannot contain derivative operators", 0, text)
        return LocalFunctional(GradedDensity({J: c for (J, _), c in _with_theta(e, text).items()}, space.n))
    if e.has_operator():
        terms = _with_theta(e, text)
        return GradedDiffOperator.scalar(space, terms) if len(space.fields) == 1 else terms
    if e.theta_states() == {True}:
        return GradedDensity({J: c for (J, _), c in e.terms.items()}, space.n)
    if e.theta_states() == {True, False}:
        raise ParseError("some terms carry a theta factor and others do not", 0, text)
    z = (None, space.zero())
    return e.terms.get(z, ZERO)


def parse_expression(text: str, space: JetSpace):
    """Parse ``text`` over ``space``.

    Returns a :class:`DiffPolynomial`, :class:`GradedDensity`,
    :class:`LocalFunctional` (``int`` prefix) or, when a derivative symbol
    survives normalization, a :class:`GradedDiffOperator` (for a multi-field
    space, the raw ``{(J, N): coefficient}`` map of one matrix entry).
    An operator written without theta gets the plain ``theta`` factor.
    """
    p = _Parser(text, space)
    functional, e = p.parse_top()
    return _finish(functional, e, space, text)


def parse_polynomial(text: str, space: JetSpace) -> DiffPolynomial:
    r = parse_expression(text, space)
    if not isinstance(r, DiffPolynomial):
        raise ParseError("expected a differential polynomial", 0, text)
    return r


def parse_functional(text: str, space: JetSpace) -> LocalFunctional:
    """A functional; the ``int`` prefix is optional and a bare polynomial gets ``theta``."""
    r = parse_expression(text, space)
    if isinstance(r, DiffPolynomial):
        return LocalFunctional.bulk(r, space.n)
    if isinstance(r, GradedDensity):
        return LocalFunctional(r)
    if isinstance(r, LocalFunctional):
        return r
    raise ParseError("expected a functional", 0, text)


def _entry_terms(text: str, space: JetSpace):
    p = _Parser(text, space)
    functional, e = p.parse_top()
    if functional:
        raise ParseError("an operator entry cannot be a functional", 0, text)
    return _with_theta(e, text)


def parse_operator(source, space: JetSpace) -> GradedDiffOperator:
    """Build an operator from one expression (single field) or from matrix entries.

    ``source`` is either a string or a mapping ``{(A, B): text}``.  A string
    may also hold one ``A,B: expr`` entry per line, as printed for several
    fields.
    """
    if isinstance(source, str):
        lines = [ln for ln in source.splitlines() if ln.strip()]
        if len(lines) == 1 and not re.match(r"^\s*\w+\s*,\s*\w+\s*:", lines[0]):
            if len(space.fields) != 1:
                raise ParseError("several fields need 'A,B: expr' entries", 0, source)
            A = space.fields[0]
            source = {(A, A): lines[0]}
        else:
            entries = {}
            for ln in lines:
                head, sep, body = ln.partition(":")
                names = [s.strip() for s in head.split(",")]
                if not sep or len(names) != 2:
                    raise ParseError("expected 'A,B: expr'", 0, ln)
                entries[tuple(names)] = body
            source = entries
    out = {}
    for (A, B), text in source.items():
        for f in (A, B):
            if f not in space.fields:
                raise ParseError(f"undeclared field {f!r} in operator entry", 0, f"{A},{B}")
        out[(A, B)] = _entry_terms(text, space)
    return GradedDiffOperator(space, out)
