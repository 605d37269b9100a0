"""Sparse multivariate polynomials with exact rational coefficients.

Variables are indexed from 0 in the Python API (``z[0]`` prints as ``z1``).
Terms are stored as a mapping from exponent tuples to :class:`fractions.Fraction`.
"""

from __future__ import annotations

import math
from functools import lru_cache
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Sequence

from .errors import DimensionMismatch, InvalidInput

Exponents = tuple[int, ...]

#: Degree of the zero polynomial.  Compares below every integer.
DEGREE_OF_ZERO = float("-inf")


def as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, str)):
        return Fraction(c)
    if isinstance(c, Polynomial):
        if c.degree() > 0:
            raise TypeError("expected a constant, got a non-constant polynomial")
        return c.constant_term()
    raise TypeError(f"cannot use {type(c).__name__} as an exact scalar")


def grlex_key(e: Exponents):
    """Sort key for graded lexicographic order (z1 > z2 > ... within a degree)."""
    return (sum(e), e)


class Polynomial:
    """Immutable polynomial in ``n`` variables over the rationals."""

    __slots__ = ("n", "_terms", "_hash")

    def __init__(self, n: int, terms: Mapping[Exponents, object] | None = None):
        if n < 0:
            raise InvalidInput("ambient dimension must be non-negative")
        self.n = n
        clean: dict[Exponents, Fraction] = {}
        if terms:
            for e, c in terms.items():
                e = tuple(e)
                if len(e) != n or any(k < 0 for k in e):
                    raise InvalidInput(f"bad exponent vector {e} for n={n}")
                c = as_fraction(c)
                if c:
                    clean[e] = clean.get(e, 0) + c
                    if not clean[e]:
                        del clean[e]
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, n: int, terms: dict[Exponents, Fraction]) -> "Polynomial":
        # trusted constructor: terms already normalized, no zero coefficients
        p = object.__new__(cls)
        p.n = n
        p._terms = terms
        p._hash = None
        return p

    # construction helpers
    @classmethod
    def zero(cls, n: int) -> "Polynomial":
        return cls._raw(n, {})

    @classmethod
    def constant(cls, n: int, c) -> "Polynomial":
        c = as_fraction(c)
        return cls._raw(n, {(0,) * n: c} if c else {})

    @classmethod
    def variable(cls, n: int, i: int) -> "Polynomial":
        if not 0 <= i < n:
            raise InvalidInput(f"variable index {i} out of range for n={n}")
        e = [0] * n
        e[i] = 1
        return cls._raw(n, {tuple(e): Fraction(1)})

    @classmethod
    def linear(cls, coeffs: Sequence) -> "Polynomial":
        """The linear form sum(c_i * z_i)."""
        n = len(coeffs)
        terms = {}
        for i, c in enumerate(coeffs):
            c = as_fraction(c)
            if c:
                e = [0] * n
                e[i] = 1
                terms[tuple(e)] = c
        return cls._raw(n, terms)

    # basic accessors
    @property
    def terms(self) -> dict[Exponents, Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coefficient(self, e: Exponents) -> Fraction:
        return self._terms.get(tuple(e), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def degree(self):
        """Total degree, or ``DEGREE_OF_ZERO`` for the zero polynomial."""
        if not self._terms:
            return DEGREE_OF_ZERO
        return max(sum(e) for e in self._terms)

    def degree_in(self, i: int):
        if not self._terms:
            return DEGREE_OF_ZERO
        return max(e[i] for e in self._terms)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._terms)

    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * self.n, Fraction(0))

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self._terms}) <= 1

    def variables_used(self) -> set[int]:
        used = set()
        for e in self._terms:
            used.update(i for i, k in enumerate(e) if k)
        return used

    def sorted_terms(self) -> list[tuple[Exponents, Fraction]]:
        """Terms in decreasing graded lexicographic order."""
        return sorted(self._terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    def leading_term(self) -> tuple[Exponents, Fraction]:
        if not self._terms:
            raise InvalidInput("zero polynomial has no leading term")
        e = max(self._terms, key=grlex_key)
        return e, self._terms[e]

    # equality and hashing
    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self.n == other.n and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_term() == other
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self._terms.items())))
        return self._hash

    # arithmetic
    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.n != self.n:
                raise DimensionMismatch(f"polynomials in {self.n} and {other.n} variables")
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(self.n, other)
        return NotImplemented

    def __add__(self, other) -> "Polynomial":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for e, c in other._terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Polynomial._raw(self.n, out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial._raw(self.n, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other) -> "Polynomial":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "Polynomial":
        return (-self) + other

    def scale(self, c) -> "Polynomial":
        c = as_fraction(c)
        if not c:
            return Polynomial.zero(self.n)
        return Polynomial._raw(self.n, {e: c * v for e, v in self._terms.items()})

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if len(self._terms) * len(other._terms) > 24:
            return _packed_product(self, other)
        out: dict[Exponents, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Polynomial._raw(self.n, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("division of a polynomial by zero")
            return self.scale(Fraction(1) / Fraction(other))
        if isinstance(other, Polynomial):
            return exact_divide(self, other)
        return NotImplemented

    def __pow__(self, m: int) -> "Polynomial":
        if not isinstance(m, int) or m < 0:
            raise InvalidInput("polynomial powers must be non-negative integers")
        result = Polynomial.constant(self.n, 1)
        base = self
        while m:
            if m & 1:
                result = result * base
            m >>= 1
            if m:
                base = base * base
        return result

    def power(self, m: int) -> "Polynomial":
        return self ** m

    # calculus and substitution
    def differentiate(self, i: int) -> "Polynomial":
        if not 0 <= i < self.n:
            raise InvalidInput(f"variable index {i} out of range for n={self.n}")
        out = {}
        for e, c in self._terms.items():
            k = e[i]
            if k:
                e2 = list(e)
                e2[i] = k - 1
                out[tuple(e2)] = c * k
        return Polynomial._raw(self.n, out)

    def homogeneous_component(self, d: int) -> "Polynomial":
        if d < 0:
            raise InvalidInput("degree must be non-negative")
        return Polynomial._raw(self.n, {e: c for e, c in self._terms.items() if sum(e) == d})

    def evaluate(self, point: Sequence) -> Fraction:
        if len(point) != self.n:
            raise DimensionMismatch(f"point of length {len(point)} for n={self.n}")
        pt = [as_fraction(v) for v in point]
        total = Fraction(0)
        for e, c in self._terms.items():
            v = c
            for x, k in zip(pt, e):
                if k:
                    v *= x ** k
            total += v
        return total

    def compose(self, images: Sequence["Polynomial"]) -> "Polynomial":
        """Substitute ``z_i -> images[i]``; the result lives in the images' ring."""
        if len(images) != self.n:
            raise DimensionMismatch(f"{len(images)} images for {self.n} variables")
        if not images:
            m = 0
        else:
            m = images[0].n
            if any(q.n != m for q in images):
                raise DimensionMismatch("images live in different rings")
        cache: dict[tuple[int, int], Polynomial] = {}

        def pw(i: int, k: int) -> Polynomial:
            if (i, k) not in cache:
                cache[(i, k)] = images[i] ** k
            return cache[(i, k)]

        total = Polynomial.zero(m)
        for e, c in self._terms.items():
            term = Polynomial.constant(m, c)
            for i, k in enumerate(e):
                if k:
                    term = term * pw(i, k)
            total = total + term
        return total

    def substitute_linear(self, M: Sequence[Sequence]) -> "Polynomial":
        """Return ``p(M z)`` for a square invertible matrix ``M``."""
        from .linalg import inverse

        if len(M) != self.n or any(len(row) != self.n for row in M):
            raise DimensionMismatch(f"expected a {self.n}x{self.n} matrix")
        inverse(M)  # raises SingularMatrix
        return self.compose([Polynomial.linear(row) for row in M])

    def extend(self, m: int, positions: Sequence[int] | None = None) -> "Polynomial":
        """Embed into ``m`` variables, sending variable ``i`` to ``positions[i]``."""
        if positions is None:
            positions = range(self.n)
        out = {}
        for e, c in self._terms.items():
            e2 = [0] * m
            for i, k in zip(positions, e):
                e2[i] = k
            out[tuple(e2)] = c
        return Polynomial._raw(m, out)

    def restrict(self, keep: Sequence[int]) -> "Polynomial":
        """Drop variables not in ``keep``; they must not occur in the polynomial."""
        if self.variables_used() - set(keep):
            raise InvalidInput("polynomial depends on a dropped variable")
        return Polynomial._raw(len(keep), {tuple(e[i] for i in keep): c for e, c in self._terms.items()})

    def monic(self) -> "Polynomial":
        if not self._terms:
            return self
        return self.scale(1 / self.leading_term()[1])

    # text
    def __str__(self) -> str:
        from .textio import print_polynomial

        return print_polynomial(self)

    def __repr__(self) -> str:
        return f"Polynomial({self.n}, {str(self)!r})"


def variables(n: int) -> list[Polynomial]:
    return [Polynomial.variable(n, i) for i in range(n)]


def arithmetic(p: Polynomial, q: Polynomial, op: str) -> Polynomial:
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    raise InvalidInput(f"unknown operation {op!r}")


# ---------------------------------------------------------------------------
# division and gcd
# ---------------------------------------------------------------------------


def divmod_poly(p: Polynomial, q: Polynomial) -> tuple[Polynomial, Polynomial]:
    """Multivariate division by a single divisor in graded lex order.

    The remainder is zero exactly when ``q`` divides ``p``.
    """
    if q.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if p.n != q.n:
        raise DimensionMismatch("division of polynomials in different rings")
    lq, cq = q.leading_term()
    quot: dict[Exponents, Fraction] = {}
    rem: dict[Exponents, Fraction] = {}
    work = dict(p.items())
    while work:
        e = max(work, key=grlex_key)
        c = work[e]
        if all(a >= b for a, b in zip(e, lq)):
            f = tuple(a - b for a, b in zip(e, lq))
            m = c / cq
            quot[f] = quot.get(f, 0) + m
            for eq, c2 in q.items():
                t = tuple(a + b for a, b in zip(f, eq))
                v = work.get(t, 0) - m * c2
                if v:
                    work[t] = v
                else:
                    work.pop(t, None)
        else:
            rem[e] = c
            del work[e]
    return Polynomial(p.n, quot), Polynomial(p.n, rem)


def exact_divide(p: Polynomial, q: Polynomial) -> Polynomial:
    quot, rem = divmod_poly(p, q)
    if rem:
        raise InvalidInput("polynomial division is not exact")
    return quot


def divides(q: Polynomial, p: Polynomial) -> bool:
    return divmod_poly(p, q)[1].is_zero()


def _as_univariate(p: Polynomial, v: int) -> dict[int, Polynomial]:
    coeffs: dict[int, dict] = {}
    for e, c in p.items():
        k = e[v]
        e2 = list(e)
        e2[v] = 0
        coeffs.setdefault(k, {})[tuple(e2)] = c
    return {k: Polynomial._raw(p.n, t) for k, t in coeffs.items()}


def _from_univariate(coeffs: dict[int, Polynomial], v: int, n: int) -> Polynomial:
    xv = Polynomial.variable(n, v)
    total = Polynomial.zero(n)
    for k, c in coeffs.items():
        total = total + c * xv ** k
    return total


def _content(p: Polynomial, v: int) -> Polynomial:
    g = Polynomial.zero(p.n)
    for c in _as_univariate(p, v).values():
        g = _gcd(g, c)
        if g.is_constant():
            return Polynomial.constant(p.n, 1)
    return g


def _monomial_content(p: Polynomial) -> Exponents:
    return tuple(min(e[i] for e in p._terms) for i in range(p.n))


def _gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Monic gcd via monomial content and recursive primitive remainder sequences."""
    if a.is_zero():
        return b.monic()
    if b.is_zero():
        return a.monic()
    n = a.n
    if a.is_constant() or b.is_constant():
        return Polynomial.constant(n, 1)
    ma, mb = _monomial_content(a), _monomial_content(b)
    mono = tuple(min(x, y) for x, y in zip(ma, mb))
    if any(ma):
        a = exact_divide(a, Polynomial(n, {ma: 1}))
    if any(mb):
        b = exact_divide(b, Polynomial(n, {mb: 1}))
    if a.is_constant() or b.is_constant():
        return Polynomial(n, {mono: 1})
    common = a.variables_used() | b.variables_used()
    v = min(common)
    ca, cb = _content(a, v), _content(b, v)
    cont = _gcd(ca, cb)
    a, b = exact_divide(a, ca), exact_divide(b, cb)
    # primitive remainder sequence in variable v
    if a.degree_in(v) < b.degree_in(v):
        a, b = b, a
    while b and b.degree_in(v) > 0:
        r = _pseudo_remainder(a, b, v)
        if r.is_zero():
            break
        if r.degree_in(v) <= 0:
            b = Polynomial.constant(n, 1)
            break
        a, b = b, exact_divide(r, _content(r, v))
    else:
        b = Polynomial.constant(n, 1)
    if b.degree_in(v) <= 0:
        b = Polynomial.constant(n, 1)
    g = b * cont * Polynomial(n, {mono: 1})
    return g.monic()


def _pseudo_remainder(a: Polynomial, b: Polynomial, v: int) -> Polynomial:
    db = b.degree_in(v)
    bu = _as_univariate(b, v)
    lb = bu[db]
    xv = Polynomial.variable(a.n, v)
    r = a
    while r and r.degree_in(v) >= db:
        dr = r.degree_in(v)
        lr = _as_univariate(r, v)[dr]
        r = r * lb - lr * b * xv ** (dr - db)
    return r


def gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    if a.n != b.n:
        raise DimensionMismatch("gcd of polynomials in different rings")
    return _gcd(a, b)


def gcd_many(ps: Iterable[Polynomial]) -> Polynomial:
    """Greatest common divisor, monic in graded lex order."""
    ps = list(ps)
    if not ps or all(p.is_zero() for p in ps):
        raise InvalidInput("gcd of zero polynomials is undefined")
    g = Polynomial.zero(ps[0].n)
    for p in ps:
        g = gcd(g, p)
        if g.is_constant():
            break
    return g


def monomials_of_degree(n: int, d: int) -> list[Exponents]:
    """All exponent vectors of total degree ``d`` in ``n`` variables, grlex-descending."""
    out = [e for e in product(range(d + 1), repeat=n) if sum(e) == d]
    return sorted(out, key=grlex_key, reverse=True)


def _packed_product(a: Polynomial, b: Polynomial) -> Polynomial:
    """Product via integer coefficients and exponent vectors packed into ints."""
    width = max(1, (a.degree() + b.degree()).bit_length())
    shifts = [width * i for i in range(a.n)]

    def pack(p: Polynomial):
        den = math.lcm(*(c.denominator for c in p._terms.values()))
        out = []
        for e, c in p._terms.items():
            key = 0
            for k, sh in zip(e, shifts):
                if k:
                    key |= k << sh
            out.append((key, c.numerator * (den // c.denominator)))
        return den, out

    da, A = pack(a)
    db, B = pack(b)
    acc: dict[int, int] = {}
    get = acc.get
    for ea, ca in A:
        for eb, cb in B:
            e = ea + eb
            acc[e] = get(e, 0) + ca * cb
    return Polynomial._raw(a.n, unpack_terms(acc, da * db, width, a.n))


_SMALL = {i: Fraction(i) for i in range(-4096, 4097)}


@lru_cache(maxsize=1 << 16)
def _unpack(e: int, width: int, n: int) -> Exponents:
    mask = (1 << width) - 1
    return tuple((e >> (width * i)) & mask for i in range(n))


def unpack_terms(acc: dict[int, int], den: int, width: int, n: int) -> dict[Exponents, Fraction]:
    """Turn packed exponents with integer numerators over ``den`` back into terms."""
    out = {}
    if den == 1:
        small = _SMALL
        for e, v in acc.items():
            if v:
                out[_unpack(e, width, n)] = small.get(v) or Fraction(v)
    else:
        for e, v in acc.items():
            if v:
                out[_unpack(e, width, n)] = Fraction(v, den)
    return out
