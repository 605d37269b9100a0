"""Polynomial differential forms on C^n and the operations of Cartan calculus.

A form of degree ``r`` is a map from strictly increasing index tuples
``(i1 < ... < ir)`` to polynomial coefficients.  Indices are 0-based.
"""

from __future__ import annotations

import math
from collections import OrderedDict
from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from . import linalg
from .errors import DimensionMismatch, InvalidInput, NotClosed, NotHomogeneous, ZeroForm
from .polyring import DEGREE_OF_ZERO, Polynomial, as_fraction, unpack_terms

Index = tuple[int, ...]


def sort_index(idx: Sequence[int]) -> tuple[int, Index]:
    """Sort an index tuple, returning ``(sign, sorted)``; sign 0 on a repeat."""
    idx = list(idx)
    sign = 1
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    if any(a == b for a, b in zip(idx, idx[1:])):
        return 0, tuple(idx)
    return sign, tuple(idx)


class DifferentialForm:
    """Immutable polynomial r-form in ``n`` variables."""

    __slots__ = ("n", "r", "_terms")

    def __init__(self, n: int, r: int, terms: Mapping[Sequence[int], Polynomial] | None = None):
        if not 0 <= r:
            raise InvalidInput("form degree must be non-negative")
        self.n = n
        self.r = r
        clean: dict[Index, Polynomial] = {}
        for idx, c in (terms or {}).items():
            idx = tuple(idx)
            if len(idx) != r:
                raise InvalidInput(f"index {idx} has length {len(idx)}, expected {r}")
            if any(not 0 <= i < n for i in idx):
                raise InvalidInput(f"index {idx} out of range for n={n}")
            if not isinstance(c, Polynomial):
                c = Polynomial.constant(n, c)
            elif c.n != n:
                raise DimensionMismatch(f"coefficient in {c.n} variables, form in {n}")
            sign, key = sort_index(idx)
            if not sign or not c:
                continue
            total = clean.get(key, Polynomial.zero(n)) + (c if sign > 0 else -c)
            if total:
                clean[key] = total
            else:
                clean.pop(key, None)
        self._terms = clean

    @classmethod
    def _raw(cls, n: int, r: int, terms: dict[Index, Polynomial]) -> "DifferentialForm":
        f = object.__new__(cls)
        f.n, f.r, f._terms = n, r, terms
        return f

    @classmethod
    def zero(cls, n: int, r: int) -> "DifferentialForm":
        return cls._raw(n, r, {})

    @classmethod
    def function(cls, p: Polynomial) -> "DifferentialForm":
        return cls._raw(p.n, 0, {(): p} if p else {})

    @classmethod
    def dz(cls, n: int, *indices: int) -> "DifferentialForm":
        """The constant form dz_{i1} ^ ... ^ dz_{ir}."""
        return cls(n, len(indices), {indices: Polynomial.constant(n, 1)})

    @classmethod
    def one_form(cls, coeffs: Sequence[Polynomial]) -> "DifferentialForm":
        n = len(coeffs)
        return cls(n, 1, {(i,): c for i, c in enumerate(coeffs)})

    @classmethod
    def constant_one_form(cls, coeffs: Sequence) -> "DifferentialForm":
        n = len(coeffs)
        return cls(n, 1, {(i,): Polynomial.constant(n, c) for i, c in enumerate(coeffs)})

    # accessors
    def items(self):
        return self._terms.items()

    @property
    def terms(self) -> dict[Index, Polynomial]:
        return dict(self._terms)

    def coefficient(self, idx: Sequence[int]) -> Polynomial:
        sign, key = sort_index(idx)
        c = self._terms.get(key)
        if c is None or not sign:
            return Polynomial.zero(self.n)
        return c if sign > 0 else -c

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def differentials_used(self) -> set[int]:
        return {i for idx in self._terms for i in idx}

    def variables_used(self) -> set[int]:
        out = set()
        for c in self._terms.values():
            out |= c.variables_used()
        return out

    def coefficient_degrees(self) -> set:
        return {sum(e) for c in self._terms.values() for e, _ in c.items()}

    def homogeneous_degree(self) -> int | None:
        """Common total degree of every coefficient monomial, or None if mixed or zero."""
        degs = self.coefficient_degrees()
        return degs.pop() if len(degs) == 1 else None

    def evaluate(self, point: Sequence) -> "DifferentialForm":
        """The constant form obtained by evaluating coefficients at ``point``."""
        return DifferentialForm(
            self.n, self.r, {idx: Polynomial.constant(self.n, c.evaluate(point)) for idx, c in self._terms.items()}
        )

    # equality
    def __eq__(self, other) -> bool:
        if not isinstance(other, DifferentialForm):
            return NotImplemented
        if self.n != other.n:
            return False
        if not self._terms and not other._terms:
            return True
        return self.r == other.r and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.n, self.r, frozenset(self._terms.items())))

    # linear structure
    def _check(self, other: "DifferentialForm"):
        if self.n != other.n:
            raise DimensionMismatch(f"forms on C^{self.n} and C^{other.n}")
        if self.r != other.r and self._terms and other._terms:
            raise InvalidInput(f"cannot add a {self.r}-form and a {other.r}-form")

    def __add__(self, other: "DifferentialForm") -> "DifferentialForm":
        if not isinstance(other, DifferentialForm):
            return NotImplemented
        self._check(other)
        if not self._terms:
            return other
        out = dict(self._terms)
        for idx, c in other._terms.items():
            s = out[idx] + c if idx in out else c
            if s:
                out[idx] = s
            else:
                out.pop(idx, None)
        return DifferentialForm._raw(self.n, self.r, out)

    def __neg__(self) -> "DifferentialForm":
        return DifferentialForm._raw(self.n, self.r, {i: -c for i, c in self._terms.items()})

    def __sub__(self, other: "DifferentialForm") -> "DifferentialForm":
        if not isinstance(other, DifferentialForm):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other) -> "DifferentialForm":
        if isinstance(other, DifferentialForm):
            return wedge(self, other)
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            if not c:
                return DifferentialForm.zero(self.n, self.r)
            return DifferentialForm._raw(self.n, self.r, {i: p.scale(c) for i, p in self._terms.items()})
        if isinstance(other, Polynomial):
            if other.n != self.n:
                raise DimensionMismatch("polynomial and form in different rings")
            out = {}
            for i, p in self._terms.items():
                q = p * other
                if q:
                    out[i] = q
            return DifferentialForm._raw(self.n, self.r, out)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, c) -> "DifferentialForm":
        return self * (Fraction(1) / as_fraction(c))

    def __xor__(self, other: "DifferentialForm") -> "DifferentialForm":
        return wedge(self, other)

    def restrict_to(self, keep: Sequence[int]) -> "DifferentialForm":
        """Re-express on C^len(keep); variables and differentials outside ``keep`` must be absent."""
        pos = {v: i for i, v in enumerate(keep)}
        if self.differentials_used() - set(keep):
            raise InvalidInput("form uses a dropped differential")
        return DifferentialForm(
            len(keep), self.r, {tuple(pos[i] for i in idx): c.restrict(keep) for idx, c in self._terms.items()}
        )

    def __str__(self) -> str:
        from .textio import print_form

        return print_form(self)

    def __repr__(self) -> str:
        return f"DifferentialForm(n={self.n}, r={self.r}, {str(self)!r})"


@dataclass(frozen=True)
class VectorField:
    components: tuple[Polynomial, ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if len({c.n for c in self.components}) > 1:
            raise DimensionMismatch("vector field components live in different rings")
        if self.components and self.components[0].n != len(self.components):
            raise DimensionMismatch("component count must equal the ambient dimension")

    @property
    def n(self) -> int:
        return len(self.components)


def radial_field(n: int) -> VectorField:
    if n < 1:
        raise InvalidInput("radial field needs n >= 1")
    return VectorField(tuple(Polynomial.variable(n, i) for i in range(n)))


def partial_radial_field(n: int, coords: Iterable[int]) -> VectorField:
    """sum of z_i d/dz_i over the listed coordinates only."""
    coords = set(coords)
    return VectorField(
        tuple(Polynomial.variable(n, i) if i in coords else Polynomial.zero(n) for i in range(n))
    )


# ---------------------------------------------------------------------------
# algebra and calculus
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _merge(ia: Index, ib: Index) -> tuple[int, Index]:
    return sort_index(ia + ib)


def _packed(a: DifferentialForm, width: int) -> tuple[int, list]:
    """Scale to integer coefficients and pack each exponent vector into one int.

    With ``width`` bits per variable, multiplying monomials is adding their
    packed exponents as long as no exponent reaches ``2**width``.
    """
    den = 1
    for _, c in a.items():
        for _, v in c.items():
            den = den * v.denominator // math.gcd(den, v.denominator)
    shifts = [width * i for i in range(a.n)]
    out = []
    for idx, c in a.items():
        terms = []
        for e, v in c.items():
            key = 0
            for k, sh in zip(e, shifts):
                if k:
                    key |= k << sh
            terms.append((key, v.numerator * (den // v.denominator)))
        out.append((idx, terms))
    return den, out


def _max_degree(a: DifferentialForm) -> int:
    return max((c.degree() for _, c in a.items()), default=0)


def wedge(a: DifferentialForm, b: DifferentialForm) -> DifferentialForm:
    if a.n != b.n:
        raise DimensionMismatch(f"wedge of forms on C^{a.n} and C^{b.n}")
    r = a.r + b.r
    n = a.n
    if not a or not b:
        return DifferentialForm.zero(n, r)
    width = max(1, (_max_degree(a) + _max_degree(b)).bit_length())
    da, A = _packed(a, width)
    db, B = _packed(b, width)
    acc: dict[Index, dict[int, int]] = {}
    for ia, ta in A:
        for ib, tb in B:
            sign, key = _merge(ia, ib)
            if not sign:
                continue
            bucket = acc.setdefault(key, {})
            get = bucket.get
            for ea, ca in ta:
                if sign < 0:
                    ca = -ca
                for eb, cb in tb:
                    e = ea + eb
                    bucket[e] = get(e, 0) + ca * cb
    den = da * db
    out: dict[Index, Polynomial] = {}
    for key, bucket in acc.items():
        terms = unpack_terms(bucket, den, width, n)
        if terms:
            out[key] = Polynomial._raw(n, terms)
    return DifferentialForm._raw(n, r, out)


def wedge_all(forms: Sequence[DifferentialForm], n: int | None = None) -> DifferentialForm:
    if not forms:
        if n is None:
            raise InvalidInput("empty wedge product needs an explicit dimension")
        return DifferentialForm.function(Polynomial.constant(n, 1))
    out = forms[0]
    for f in forms[1:]:
        out = wedge(out, f)
    return out


_POWER_CACHE: "OrderedDict[DifferentialForm, list[DifferentialForm]]" = OrderedDict()


def _powers(a: DifferentialForm, m: int) -> list[DifferentialForm]:
    """[a^0, a^1, ...] up to a^m or the first zero power, memoized for recent forms."""
    chain = _POWER_CACHE.get(a)
    if chain is None:
        chain = [DifferentialForm.function(Polynomial.constant(a.n, 1))]
        _POWER_CACHE[a] = chain
        if len(_POWER_CACHE) > 32:
            _POWER_CACHE.popitem(last=False)
    else:
        _POWER_CACHE.move_to_end(a)
    while len(chain) <= m and chain[-1]:
        chain.append(wedge(chain[-1], a))
    return chain


def wedge_power(a: DifferentialForm, m: int) -> DifferentialForm:
    if m < 0:
        raise InvalidInput("wedge power must be non-negative")
    chain = _powers(a, m)
    if m < len(chain):
        return chain[m]
    return DifferentialForm.zero(a.n, a.r * m)


def differential(p: Polynomial) -> DifferentialForm:
    """dp as a 1-form."""
    return DifferentialForm._raw(
        p.n, 1, {(i,): q for i in range(p.n) if (q := p.differentiate(i))}
    )


def exterior_derivative(a: DifferentialForm) -> DifferentialForm:
    out: dict[Index, Polynomial] = {}
    for idx, c in a.items():
        for j in c.variables_used():
            if j in idx:
                continue
            sign, key = sort_index((j,) + idx)
            dc = c.differentiate(j)
            if sign < 0:
                dc = -dc
            s = out[key] + dc if key in out else dc
            if s:
                out[key] = s
            else:
                out.pop(key, None)
    return DifferentialForm._raw(a.n, a.r + 1, out)


d = exterior_derivative


def interior_product(X: VectorField, a: DifferentialForm) -> DifferentialForm:
    if X.n != a.n:
        raise DimensionMismatch("vector field and form in different dimensions")
    if a.r < 1:
        raise InvalidInput("interior product of a 0-form")
    out: dict[Index, Polynomial] = {}
    for idx, c in a.items():
        for pos, i in enumerate(idx):
            xi = X.components[i]
            if not xi:
                continue
            rest = idx[:pos] + idx[pos + 1:]
            term = xi * c
            if pos % 2:
                term = -term
            s = out[rest] + term if rest in out else term
            if s:
                out[rest] = s
            else:
                out.pop(rest, None)
    return DifferentialForm._raw(a.n, a.r - 1, out)


def form_degree(a: DifferentialForm):
    """Largest total degree among the coefficients (DEGREE_OF_ZERO for the zero form)."""
    if not a:
        return DEGREE_OF_ZERO
    return max(c.degree() for _, c in a.items())


def is_closed(a: DifferentialForm) -> bool:
    return exterior_derivative(a).is_zero()


def pullback_linear(a: DifferentialForm, M: Sequence[Sequence]) -> DifferentialForm:
    """Pull back a form on C^m along the linear map C^n -> C^m, z -> M z."""
    m = len(M)
    if m != a.n:
        raise DimensionMismatch(f"matrix has {m} rows, form lives on C^{a.n}")
    n = len(M[0]) if M else 0
    if any(len(row) != n for row in M):
        raise DimensionMismatch("ragged matrix")
    M = linalg.to_matrix(M)
    images = [Polynomial.linear(row) for row in M]
    dforms = [DifferentialForm.constant_one_form(row) for row in M]
    one = DifferentialForm.function(Polynomial.constant(n, 1))
    total = DifferentialForm.zero(n, a.r)
    for idx, c in a.items():
        basis = one
        for i in idx:
            basis = wedge(basis, dforms[i])
        total = total + basis * c.compose(images)
    if not total:
        return DifferentialForm.zero(n, a.r)
    return total


def euler_primitive(a: DifferentialForm) -> DifferentialForm:
    """A primitive of a closed homogeneous form via i_R a / (q + s)."""
    q = a.r
    if q < 1:
        raise InvalidInput("euler_primitive needs a form of degree >= 1")
    if not a:
        return DifferentialForm.zero(a.n, q - 1)
    s = a.homogeneous_degree()
    if s is None:
        raise NotHomogeneous("coefficients are not homogeneous of a single degree")
    if q + s == 0:
        raise InvalidInput("q + s must be positive")
    if not is_closed(a):
        raise NotClosed("form is not closed")
    return interior_product(radial_field(a.n), a) / (q + s)


def class_of_two_form(w: DifferentialForm) -> int:
    if w.r != 2:
        raise InvalidInput("class_of_two_form expects a 2-form")
    if not w:
        raise ZeroForm("the zero form has no class")
    k = 1
    while wedge_power(w, k + 1):
        k += 1
    return k


# ---------------------------------------------------------------------------
# constant 2-forms and linear coordinate changes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LinearChange:
    """New coordinates ``u = M z``.

    ``to_new`` re-expresses a form given in ``z`` in terms of ``u`` and
    ``to_old`` is its inverse; in particular ``to_old(f) = pullback(f, M)``.
    """

    M: tuple[tuple[Fraction, ...], ...]
    M_inv: tuple[tuple[Fraction, ...], ...] = field(default=None, compare=False)

    def __post_init__(self):
        M = tuple(tuple(Fraction(v) for v in row) for row in self.M)
        object.__setattr__(self, "M", M)
        inv = linalg.inverse(M)
        object.__setattr__(self, "M_inv", tuple(tuple(row) for row in inv))

    @classmethod
    def identity(cls, n: int) -> "LinearChange":
        return cls(linalg.identity(n))

    @property
    def n(self) -> int:
        return len(self.M)

    def then(self, other: "LinearChange") -> "LinearChange":
        """First apply ``self`` then ``other``: ``w = other.M (self.M z)``."""
        return LinearChange(linalg.matmul(other.M, self.M))

    def to_new(self, a: DifferentialForm) -> DifferentialForm:
        return pullback_linear(a, self.M_inv)

    def to_old(self, a: DifferentialForm) -> DifferentialForm:
        return pullback_linear(a, self.M)

    def poly_to_old(self, p: Polynomial) -> Polynomial:
        return p.compose([Polynomial.linear(row) for row in self.M])

    def poly_to_new(self, p: Polynomial) -> Polynomial:
        return p.compose([Polynomial.linear(row) for row in self.M_inv])

    def point_to_new(self, p: Sequence) -> list[Fraction]:
        return linalg.matvec(self.M, p)


def constant_matrix(w: DifferentialForm, point: Sequence | None = None) -> list[list[Fraction]]:
    """Skew matrix A with A[i][j] the coefficient of dz_i ^ dz_j (evaluated at ``point``)."""
    if w.r != 2:
        raise InvalidInput("constant_matrix expects a 2-form")
    A = [[Fraction(0)] * w.n for _ in range(w.n)]
    for (i, j), c in w.items():
        v = c.evaluate(point) if point is not None else c.constant_term()
        if point is None and not c.is_constant():
            raise InvalidInput("form is not constant; supply a point")
        A[i][j] = v
        A[j][i] = -v
    return A


def two_form_from_matrix(A: Sequence[Sequence]) -> DifferentialForm:
    n = len(A)
    return DifferentialForm(n, 2, {(i, j): Polynomial.constant(n, A[i][j]) for i, j in combinations(range(n), 2)})


def skew_normal_form(A: Sequence[Sequence]) -> tuple[list[list[Fraction]], int]:
    """Rows of M such that sum_i x_i ^ y_i equals the 2-form of A, where x_i = M[i],
    y_i = M[k+i] and the remaining rows are coordinate covectors.

    Pairs are peeled off by congruence elimination: for the first nonzero
    A[a][b] (row-major), with alpha = i_{e_a} A, beta = i_{e_b} A, the form
    A - alpha ^ beta / A[a][b] vanishes on e_a and e_b.
    """
    n = len(A)
    W = linalg.to_matrix(A)
    for i in range(n):
        for j in range(n):
            if W[i][j] != -W[j][i]:
                raise InvalidInput("matrix is not skew-symmetric")
    xs, ys, pivots = [], [], []
    while True:
        ab = next(((a, b) for a in range(n) for b in range(a + 1, n) if W[a][b]), None)
        if ab is None:
            break
        a, b = ab
        c = W[a][b]
        alpha = list(W[a])  # i_{e_a} of the form, as a covector
        beta = list(W[b])
        xs.append([-v / c for v in beta])
        ys.append(alpha)
        pivots += [a, b]
        for i in range(n):
            for j in range(n):
                W[i][j] -= (alpha[i] * beta[j] - alpha[j] * beta[i]) / c
    k = len(xs)
    rest = [linalg.identity(n)[j] for j in range(n) if j not in pivots]
    return xs + ys + rest, k


def darboux_basis_at(w: DifferentialForm, point: Sequence) -> tuple[LinearChange, int]:
    """Linear coordinates (x, y, z) in which w(point) = sum dx_i ^ dy_i."""
    A = constant_matrix(w, point)
    if not any(any(row) for row in A):
        raise InvalidInput("the 2-form vanishes at the given point")
    M, k = skew_normal_form(A)
    return LinearChange(M), k


def constant_forms_basis(n: int, r: int) -> Iterable[Index]:
    return combinations(range(n), r)


def random_linear_change(rng, n: int, lo: int = -3, hi: int = 3) -> LinearChange:
    """A random invertible integer matrix, drawn until nonsingular."""
    while True:
        M = [[rng.randint(lo, hi) for _ in range(n)] for _ in range(n)]
        if linalg.rank(M) == n:
            return LinearChange(M)


def random_polynomial(rng, n: int, degree: int, density: float = 0.5, homogeneous: bool = True, lo: int = -5, hi: int = 5) -> Polynomial:
    from .polyring import monomials_of_degree

    degs = [degree] if homogeneous else range(degree + 1)
    terms = {}
    for dd in degs:
        for e in monomials_of_degree(n, dd):
            if rng.random() < density:
                terms[e] = rng.randint(lo, hi)
    return Polynomial(n, terms)


def random_form(rng, n: int, r: int, degree: int, density: float = 0.4, homogeneous: bool = True) -> DifferentialForm:
    terms = {}
    for idx in combinations(range(n), r):
        if rng.random() < density:
            terms[idx] = random_polynomial(rng, n, degree, density, homogeneous)
    return DifferentialForm(n, r, terms)


def random_vector_field(rng, n: int, degree: int, density: float = 0.4) -> VectorField:
    return VectorField(tuple(random_polynomial(rng, n, degree, density, homogeneous=False) for _ in range(n)))
