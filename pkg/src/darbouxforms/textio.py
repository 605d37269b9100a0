"""Plain-text syntax for polynomials and forms, plus the exact JSON encoding.

Grammar::

    file      := [ "vars" INT ";" ] form
    form      := [sign] term ( sign term )*
    term      := coeff [ ["*"] wedge ] | wedge
    wedge     := DATOM ( "^" DATOM )*
    coeff     := factor ( "*" factor )*
    factor    := INT [ "/" INT ] | VAR [ "^" INT ] | "(" poly ")"
    poly      := [sign] monoterm ( sign monoterm )*
    monoterm  := factor ( "*" factor )*

``VAR`` is ``z1 .. zN`` and ``DATOM`` is ``dz1 .. dzN``.  ``^`` is an exponent
after a variable and a wedge between differential atoms.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import InvalidInput, ParseError
from .exterior import DifferentialForm
from .polyring import Polynomial

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<datom>dz(?P<dnum>\d+))
  | (?P<var>z(?P<vnum>\d+))
  | (?P<vars>vars\b)
  | (?P<int>\d+)
  | (?P<op>[-+*/^();])
    """,
    re.VERBOSE,
)


@dataclass
class Token:
    kind: str
    text: str
    value: int | None
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        col = pos - line_start + 1
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        if kind in ("dnum", "vnum"):
            kind = "datom" if m.group("datom") else "var"
        s = m.group(0)
        if kind == "ws":
            nl = s.count("\n")
            if nl:
                line += nl
                line_start = pos + s.rfind("\n") + 1
        elif kind == "datom":
            tokens.append(Token("datom", s, int(m.group("dnum")), line, col))
        elif kind == "var":
            tokens.append(Token("var", s, int(m.group("vnum")), line, col))
        elif kind == "int":
            tokens.append(Token("int", s, int(s), line, col))
        elif kind == "vars":
            tokens.append(Token("vars", s, None, line, col))
        else:
            tokens.append(Token(s, s, None, line, col))
        pos = m.end()
    col = pos - line_start + 1
    tokens.append(Token("eof", "", None, line, col))
    return tokens


class _Parser:
    def __init__(self, text: str, n: int | None):
        self.toks = tokenize(text)
        self.i = 0
        self.n = n

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def take(self, kind: str | None = None) -> Token:
        t = self.tok
        if kind is not None and t.kind != kind:
            want = "end of input" if kind == "eof" else repr(kind)
            got = "end of input" if t.kind == "eof" else repr(t.text)
            raise ParseError(f"expected {want}, found {got}", t.line, t.col)
        self.i += 1
        return t

    def error(self, msg: str, t: Token | None = None):
        t = t or self.tok
        raise ParseError(msg, t.line, t.col)

    def check_index(self, t: Token) -> int:
        if t.value < 1 or (self.n is not None and t.value > self.n):
            self.error(f"index {t.value} out of declared range 1..{self.n}", t)
        return t.value - 1

    # the polynomial layer builds {exponent-tuple(sparse dict): coefficient}
    # dictionaries first and converts once n is known
    def factor(self) -> dict:
        t = self.tok
        if t.kind == "int":
            self.take()
            num = Fraction(t.value)
            if self.tok.kind == "/":
                self.take()
                den = self.take("int")
                if den.value == 0:
                    self.error("zero denominator", den)
                num /= den.value
            return {(): num}
        if t.kind == "var":
            self.take()
            idx = self.check_index(t)
            k = 1
            if self.tok.kind == "^":
                nxt = self.toks[self.i + 1]
                if nxt.kind != "int":
                    self.error("exponent must be a non-negative integer", nxt)
                self.take()
                k = self.take().value
            return {((idx, k),) if k else (): Fraction(1)}
        if t.kind == "(":
            self.take()
            p = self.poly()
            self.take(")")
            if self.tok.kind == "^" and self.toks[self.i + 1].kind != "datom":
                self.error("exponents are only allowed on variables")
            return p
        if t.kind == "datom":
            self.error("differential atom inside a coefficient")
        self.error("expected a number, variable or parenthesized polynomial" if t.kind != "eof" else "unexpected end of input")

    def monoterm(self) -> dict:
        p = self.factor()
        while self.tok.kind == "*" and self.toks[self.i + 1].kind != "datom":
            self.take()
            p = _mul(p, self.factor())
        return p

    def poly(self) -> dict:
        sign = 1
        if self.tok.kind in ("+", "-"):
            sign = -1 if self.take().kind == "-" else 1
        p = _scale(self.monoterm(), sign)
        while self.tok.kind in ("+", "-"):
            s = -1 if self.take().kind == "-" else 1
            p = _add(p, _scale(self.monoterm(), s))
        return p

    def wedge_chain(self) -> list[int]:
        atoms = [self.check_index(self.take("datom"))]
        while self.tok.kind == "^":
            self.take()
            t = self.tok
            if t.kind != "datom":
                self.error("wedge '^' must be followed by a differential atom", t)
            atoms.append(self.check_index(self.take()))
        return atoms

    def term(self):
        t = self.tok
        if t.kind == "datom":
            return {(): Fraction(1)}, self.wedge_chain(), t
        coeff = self.monoterm()
        if self.tok.kind == "*":
            self.take()
            if self.tok.kind != "datom":
                self.error("expected a differential atom after '*'")
        if self.tok.kind == "datom":
            return coeff, self.wedge_chain(), t
        return coeff, [], t

    def form(self):
        if self.tok.kind == "vars":
            self.take()
            nt = self.take("int")
            if nt.value < 1:
                self.error("vars must be positive", nt)
            if self.n is not None and self.n != nt.value:
                self.error(f"header declares {nt.value} variables but {self.n} were requested", nt)
            self.n = nt.value
            self.take(";")
        terms = []
        sign = 1
        if self.tok.kind in ("+", "-"):
            sign = -1 if self.take().kind == "-" else 1
        c, atoms, t = self.term()
        terms.append((_scale(c, sign), atoms, t))
        while self.tok.kind in ("+", "-"):
            s = -1 if self.take().kind == "-" else 1
            c, atoms, t = self.term()
            terms.append((_scale(c, s), atoms, t))
        self.take("eof")
        return terms


def _mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = dict(ea)
            for i, k in eb:
                e[i] = e.get(i, 0) + k
            key = tuple(sorted(e.items()))
            out[key] = out.get(key, 0) + ca * cb
    return out


def _add(a: dict, b: dict) -> dict:
    out = dict(a)
    for e, c in b.items():
        out[e] = out.get(e, 0) + c
    return out


def _scale(a: dict, s: int) -> dict:
    return {e: s * c for e, c in a.items()}


def _to_poly(p: dict, n: int) -> Polynomial:
    terms = {}
    for e, c in p.items():
        v = [0] * n
        for i, k in e:
            v[i] += k
        v = tuple(v)
        terms[v] = terms.get(v, 0) + c
    return Polynomial(n, terms)


def parse_form(text: str, n: int | None = None) -> DifferentialForm:
    """Parse a form; ``n`` defaults to a ``vars N;`` header or the largest index used."""
    parser = _Parser(text, n)
    terms = parser.form()
    n = parser.n
    if n is None:
        used = [t.value for t in parser.toks if t.kind in ("var", "datom")]
        n = max(used) if used else 1
    degrees = {len(atoms) for _, atoms, _ in terms}
    if len(degrees) > 1:
        first = {len(terms[0][1])}
        bad = next(t for _, atoms, t in terms if len(atoms) not in first)
        raise ParseError("terms of different form degrees in one expression", bad.line, bad.col)
    r = degrees.pop()
    total = DifferentialForm.zero(n, r)
    for coeff, atoms, _ in terms:
        total = total + DifferentialForm(n, r, {tuple(atoms): _to_poly(coeff, n)})
    return total


def parse_polynomial(text: str, n: int | None = None) -> Polynomial:
    f = parse_form(text, n)
    if f.r != 0:
        raise InvalidInput("expected a polynomial, found a differential form")
    return f.coefficient(())


def read_form_file(path: str, n: int | None = None) -> DifferentialForm:
    with open(path, encoding="utf-8") as fh:
        return parse_form(fh.read(), n)


# ---------------------------------------------------------------------------
# printing
# ---------------------------------------------------------------------------


def _fmt(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _monomial(e) -> str:
    parts = []
    for i, k in enumerate(e):
        if k == 1:
            parts.append(f"z{i + 1}")
        elif k > 1:
            parts.append(f"z{i + 1}^{k}")
    return "*".join(parts)


def _term_body(e, c: Fraction) -> str:
    """Unsigned text of one term with coefficient |c|."""
    mono = _monomial(e)
    a = abs(c)
    if not mono:
        return _fmt(a)
    return mono if a == 1 else f"{_fmt(a)}*{mono}"


def print_polynomial(p: Polynomial) -> str:
    terms = p.sorted_terms()
    if not terms:
        return "0"
    out = []
    for k, (e, c) in enumerate(terms):
        body = _term_body(e, c)
        if k == 0:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append((" - " if c < 0 else " + ") + body)
    return "".join(out)


def print_form(f: DifferentialForm) -> str:
    if f.r == 0:
        return print_polynomial(f.coefficient(()))
    if not f:
        return "0"
    pieces = []
    for idx in sorted(f.terms):
        c = f.coefficient(idx)
        atoms = " ^ ".join(f"dz{i + 1}" for i in idx)
        if len(c) == 1:
            (e, v), = c.items()
            neg = v < 0
            if not any(e) and abs(v) == 1:
                body = atoms
            else:
                body = f"{_term_body(e, v)} {atoms}"
        else:
            neg = False
            body = f"({print_polynomial(c)}) {atoms}"
        if not pieces:
            pieces.append(("-" if neg else "") + body)
        else:
            pieces.append((" - " if neg else " + ") + body)
    return "".join(pieces)


# ---------------------------------------------------------------------------
# exact JSON encoding
# ---------------------------------------------------------------------------


def fraction_to_json(c: Fraction) -> str:
    return f"{c.numerator}/{c.denominator}"


def fraction_from_json(s) -> Fraction:
    return Fraction(s)


def poly_to_json(p: Polynomial) -> list:
    return [[list(e), fraction_to_json(c)] for e, c in p.sorted_terms()]


def poly_from_json(data, n: int) -> Polynomial:
    return Polynomial(n, {tuple(e): fraction_from_json(c) for e, c in data})


def form_to_json(f: DifferentialForm) -> dict:
    """Indices in the JSON encoding are 1-based, matching the text syntax."""
    return {
        "n": f.n,
        "r": f.r,
        "terms": [[[i + 1 for i in idx], poly_to_json(f.coefficient(idx))] for idx in sorted(f.terms)],
    }


def form_from_json(data) -> DifferentialForm:
    n, r = data["n"], data["r"]
    return DifferentialForm(n, r, {tuple(i - 1 for i in idx): poly_from_json(c, n) for idx, c in data["terms"]})


def matrix_to_json(M) -> list:
    return [[fraction_to_json(Fraction(v)) for v in row] for row in M]


def matrix_from_json(data) -> list[list[Fraction]]:
    return [[fraction_from_json(v) for v in row] for row in data]
