"""Shorthand constructors and Hypothesis strategies for the test-suite."""

from fractions import Fraction
from itertools import combinations

import sympy
from hypothesis import strategies as st

from darbouxforms.exterior import DifferentialForm, VectorField
from darbouxforms.polyring import Polynomial
from darbouxforms.textio import parse_form, parse_polynomial


def P(text: str, n: int) -> Polynomial:
    return parse_polynomial(text, n)


def F(text: str, n: int) -> DifferentialForm:
    return parse_form(text, n)


def to_sympy(p: Polynomial):
    zs = sympy.symbols(f"z1:{p.n + 1}")
    return sympy.Add(*[sympy.Rational(c.numerator, c.denominator) * sympy.Mul(*[z**k for z, k in zip(zs, e)])
                       for e, c in p.items()])


def from_sympy(expr, n: int) -> Polynomial:
    zs = sympy.symbols(f"z1:{n + 1}")
    poly = sympy.Poly(sympy.expand(expr), *zs)
    return Polynomial(n, {e: Fraction(int(c.p), int(c.q)) for e, c in poly.terms()})


coefficients = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@st.composite
def polynomials(draw, n=None, max_degree=3, max_terms=5):
    n = n if n is not None else draw(st.integers(1, 4))
    exps = st.tuples(*[st.integers(0, max_degree)] * n).filter(lambda e: sum(e) <= max_degree)
    terms = draw(st.dictionaries(exps, coefficients, max_size=max_terms))
    return Polynomial(n, terms)


@st.composite
def forms(draw, n, r=None, max_degree=2):
    r = r if r is not None else draw(st.integers(0, n))
    idx = list(combinations(range(n), r))
    chosen = draw(st.lists(st.sampled_from(idx), unique=True, max_size=4)) if idx else []
    return DifferentialForm(n, r, {i: draw(polynomials(n, max_degree, 3)) for i in chosen})


@st.composite
def vector_fields(draw, n, max_degree=1):
    return VectorField(tuple(draw(polynomials(n, max_degree, 3)) for _ in range(n)))


# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE: list[str] = []
