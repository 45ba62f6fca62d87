"""Plain-text rendering.  Output of the polynomial, density and operator
printers parses back to the same object (see :mod:`divcalc.parser`)."""
from __future__ import annotations

from .jetcore import AXES, COORD


def axis_names(n: int):
    return AXES[:n]


def _suffix(J, n) -> str:
    letters = "".join(a * j for a, j in zip(axis_names(n), J))
    if not letters:
        return ""
    return "_" + letters if len(letters) == 1 else "_{" + letters + "}"


def format_var(v) -> str:
    field, _, J = v
    if field == COORD:
        return axis_names(len(J))[J.index(1)]
    return field + _suffix(J, len(J))


def format_theta(J) -> str:
    return "theta" + _suffix(J, len(J))


def format_d(N) -> str:
    """``D``, ``D2``, ``D3`` in one dimension; ``Dx``, ``Dxy`` otherwise."""
    k = sum(N)
    if not k:
        return ""
    if len(N) == 1:
        return "D" if k == 1 else f"D{k}"
    return "D" + "".join(a * j for a, j in zip(axis_names(len(N)), N))


def format_rational(c) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _monomial(m) -> str:
    parts = []
    for v, e in m:
        s = format_var(v)
        parts.append(s if e == 1 else f"{s}^{e}")
    return "*".join(parts)


def _sort_key(m):
    return (sum(e for _, e in m), tuple(v for v, _ in m), m)


def _term(c, body: str):
    """``(sign, magnitude, body)``; the magnitude is dropped later when it is 1."""
    return ("-" if c < 0 else "+"), abs(c), body


def _render(a, body: str) -> str:
    if not body:
        return format_rational(a)
    return body if a == 1 else f"{format_rational(a)}*{body}"


def _poly_pieces(f):
    return [_term(f.terms[m], _monomial(m)) for m in sorted(f.terms, key=_sort_key)]


def _join(pieces) -> str:
    if not pieces:
        return "0"
    sign, a, body = pieces[0]
    s = ("-" if sign == "-" else "") + _render(a, body)
    for sign, a, body in pieces[1:]:
        s += f" {sign} {_render(a, body)}"
    return s


def format_poly(f) -> str:
    return _join(_poly_pieces(f))


def _wrap(f) -> str:
    s = format_poly(f)
    return f"({s})"


def _grade_key(J):
    return (sum(J), tuple(-j for j in J))


def _theta_piece(J, pieces):
    """One grading group: ``theta*(...)``, or a single signed term without brackets."""
    th = format_theta(J)
    if len(pieces) == 1:
        sign, a, body = pieces[0]
        return sign, a, f"{th}*{body}" if body else th
    return "+", 1, f"{th}*({_join(pieces)})"


def format_graded(d) -> str:
    if not d.terms:
        return "0"
    return _join([_theta_piece(J, _poly_pieces(d.terms[J])) for J in sorted(d.terms, key=_grade_key)])


def _operator_pieces(terms):
    pieces = []
    for N, c in sorted(terms, key=lambda t: (-sum(t[0]), tuple(-k for k in t[0]))):
        dn = format_d(N)
        if not dn:
            pieces.extend(_poly_pieces(c))
        elif len(c.terms) == 1:
            (m, a), = c.terms.items()
            body = _monomial(m)
            pieces.append(_term(a, f"{body}*{dn}" if body else dn))
        else:
            pieces.append(("+", 1, f"({format_poly(c)})*{dn}"))
    return pieces


def _scalar_operator(row) -> str:
    by_grade = {}
    for (J, N), c in row.items():
        by_grade.setdefault(J, []).append((N, c))
    return _join([_theta_piece(J, _operator_pieces(by_grade[J])) for J in sorted(by_grade, key=_grade_key)])


def format_operator(op) -> str:
    fields = op.space.fields
    if len(fields) == 1:
        return _scalar_operator(op.entry(fields[0], fields[0]))
    lines = [f"{A},{B}: {_scalar_operator(row)}" for (A, B), row in sorted(op.entries.items())]
    return "\n".join(lines) if lines else "0"


def _label(v, kind: str, single: bool) -> str:
    field, _, K = v
    if kind == "form":
        return "d" + field + _suffix(K, len(K))
    base = "xi" if single else f"xi[{field}]"
    d = format_d(K)
    return f"{d} {base}" if d else base


def format_wedge(w) -> str:
    if not w.terms:
        return "0"
    fields = {lab[0] for (_, ls) in w.terms for lab in ls}
    single = len(fields) <= 1
    out = []
    for (J, ls) in sorted(w.terms, key=lambda k: (_grade_key(k[0]), k[1])):
        c = w.terms[(J, ls)]
        wedge = " /\\ ".join(_label(v, w.kind, single) for v in ls)
        text = f"{format_theta(J)}*{_wrap(c)}"
        if wedge:
            text += f" {wedge}"
        out.append(text)
    return " + ".join(out)
