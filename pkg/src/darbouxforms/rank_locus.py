"""Directions along which a linear closed 2-form contracts to low rank.

For a closed 2-form ``w`` with linear coefficients and a constant vector ``v``,
``i_v w`` is a 1-form with linear coefficients, i.e. an ``n x n`` matrix
``M(v)`` (row c holds ``i_v w`` evaluated at ``e_c``).  ``M`` is linear in
``v``.  This module finds the set of ``v`` with ``rank M(v) <= k`` when that
set is a linear subspace.

The (k+1)-minors of ``M(v)`` are forms of degree k+1 in ``v``.  A linear
functional on degree-(k+1) forms that kills all of them behaves like
evaluation on the locus, and a linear form ``l`` vanishes on the locus when
``l * m`` is killed for every monomial ``m`` of degree k.  Both steps are
linear algebra; they run modulo word-size primes with numpy and the answer is
lifted back to the rationals by rational reconstruction.  Callers must verify
the lifted subspace exactly (``contraction_rank`` does that).
"""

from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction

import numpy as np

from . import linalg
from .exterior import DifferentialForm, constant_matrix
from .polyring import Polynomial, gcd_many, monomials_of_degree

PRIMES = (2147483647, 2147483629)


def contraction_matrix(w: DifferentialForm, v) -> list[list[Fraction]]:
    """Row c is the coefficient vector of (i_v w)(e_c)."""
    n = w.n
    out = []
    for c in range(n):
        Om = constant_matrix(w, [int(i == c) for i in range(n)])
        out.append([sum((Fraction(v[a]) * Om[a][b] for a in range(n)), Fraction(0)) for b in range(n)])
    return out


def contraction_rank(w: DifferentialForm, v) -> int:
    return linalg.rank(contraction_matrix(w, v))


def _rref_mod(A: np.ndarray, p: int):
    A = A % p
    rows, cols = A.shape
    piv = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if len(nz) == 0:
            continue
        i = r + nz[0]
        A[[r, i]] = A[[i, r]]
        A[r] = (A[r] * pow(int(A[r, c]), p - 2, p)) % p
        f = A[:, c].copy()
        f[r] = 0
        A = (A - (f[:, None] * A[r][None, :]) % p) % p
        piv.append(c)
        r += 1
    return A[:r], piv


def _nullspace_mod(A: np.ndarray, p: int, cols: int) -> np.ndarray:
    if A.shape[0] == 0:
        return np.eye(cols, dtype=np.int64)
    R, piv = _rref_mod(A, p)
    basis = []
    for f in range(cols):
        if f in piv:
            continue
        v = np.zeros(cols, dtype=np.int64)
        v[f] = 1
        for i, c in enumerate(piv):
            v[c] = (-R[i, f]) % p
        basis.append(v)
    return np.array(basis, dtype=np.int64).reshape(len(basis), cols)


def rational_reconstruction(a: int, m: int) -> Fraction | None:
    """The fraction r/s with r = a s (mod m) and |r|, |s| <= sqrt(m/2), if any."""
    bound = math.isqrt(m // 2)
    r0, r1, s0, s1 = m, a % m, 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1, s0, s1 = r1, r0 - q * r1, s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound:
        return None
    return Fraction(r1, s1)


class _MinorSystem:
    """Coefficient vectors of the (k+1)-minors of M(v), reduced modulo p."""

    def __init__(self, w: DifferentialForm, k: int, sample: bool):
        self.n = n = w.n
        self.m = m = k + 1
        self.k = k
        self.mons = monomials_of_degree(n, m)
        self.index = {e: i for i, e in enumerate(self.mons)}
        self.Om = [constant_matrix(w, [int(i == c) for i in range(n)]) for c in range(n)]
        self.perms = list(itertools.permutations(range(m)))
        self.signs = np.array(
            [(-1) ** sum(s[i] > s[j] for i in range(m) for j in range(i + 1, m)) for s in self.perms],
            dtype=np.int64,
        )
        tmap = np.empty(n**m, dtype=np.int64)
        for flat, tup in enumerate(itertools.product(range(n), repeat=m)):
            e = [0] * n
            for a in tup:
                e[a] += 1
            tmap[flat] = self.index[tuple(e)]
        # float64 is exact here: each sum has at most m! * m! terms below 2^31
        self.aggregate = np.zeros((n**m, len(self.mons)))
        self.aggregate[np.arange(n**m), tmap] = 1.0
        subsets = list(itertools.combinations(range(n), m))
        pairs = [(R, C) for R in subsets for C in subsets]
        target = 2 * len(self.mons) + 20
        if sample and len(pairs) > target:
            pairs = random.Random(0).sample(pairs, target)
        self.pairs = pairs

    def rows(self, p: int) -> np.ndarray:
        n, m = self.n, self.m

        def red(x: Fraction) -> int:
            return (x.numerator % p) * pow(x.denominator % p, p - 2, p) % p

        # L[c, b, a]: coefficient of v_a in M(v)[c][b]
        L = np.array(
            [[[red(self.Om[c][a][b]) for a in range(n)] for b in range(n)] for c in range(n)], dtype=np.int64
        )
        out = []
        for start in range(0, len(self.pairs), 64):
            chunk = self.pairs[start : start + 64]
            T = None
            for r in range(m):
                rows_r = np.array([R[r] for R, _ in chunk])
                cols_r = np.array([[C[s[r]] for s in self.perms] for _, C in chunk])
                A = L[rows_r[:, None], cols_r]  # (chunk, perms, n)
                if T is None:
                    T = A
                else:
                    T = ((T[:, :, :, None] * A[:, :, None, :]) % p).reshape(A.shape[0], A.shape[1], -1)
            vec = (self.signs[None, :, None] * T).sum(axis=1) % p
            out.append(np.rint(vec.astype(np.float64) @ self.aggregate).astype(np.int64) % p)
        return np.concatenate(out)

    def vanishing_forms(self, p: int) -> np.ndarray:
        """RREF (mod p) of the linear forms vanishing on the common zero set."""
        ann = _nullspace_mod(self.rows(p), p, len(self.mons))
        cond = []
        for phi in ann:
            for e in monomials_of_degree(self.n, self.k):
                row = []
                for a in range(self.n):
                    f = list(e)
                    f[a] += 1
                    row.append(phi[self.index[tuple(f)]])
                cond.append(row)
        perp = _nullspace_mod(np.array(cond, dtype=np.int64).reshape(-1, self.n), p, self.n)
        if perp.shape[0] == 0:
            return perp
        return _rref_mod(perp, p)[0]


def _lift(residues: list[np.ndarray], primes: list[int]) -> list[list[Fraction]] | None:
    shape = residues[0].shape
    if any(r.shape != shape for r in residues):
        return None
    modulus = math.prod(primes)
    out = []
    for i in range(shape[0]):
        row = []
        for j in range(shape[1]):
            x = 0
            for r, p in zip(residues, primes):
                q = modulus // p
                x += int(r[i, j]) * q * pow(q, -1, p)
            frac = rational_reconstruction(x % modulus, modulus)
            if frac is None:
                return None
            row.append(frac)
        out.append(row)
    return out


def _binary_minors(w: DifferentialForm, k: int, b1, b2) -> list[Polynomial]:
    """(k+1)-minors of M(s b1 + t b2) as binary forms in (s, t)."""
    M1, M2 = contraction_matrix(w, b1), contraction_matrix(w, b2)
    s, t = Polynomial.variable(2, 0), Polynomial.variable(2, 1)
    n = w.n
    M = [[s * M1[c][b] + t * M2[c][b] for b in range(n)] for c in range(n)]

    def det(rows, cols):
        if len(rows) == 1:
            return M[rows[0]][cols[0]]
        total = Polynomial.zero(2)
        for j, c in enumerate(cols):
            if M[rows[0]][c]:
                term = M[rows[0]][c] * det(rows[1:], cols[:j] + cols[j + 1 :])
                total = total + term if j % 2 == 0 else total - term
        return total

    subsets = list(itertools.combinations(range(n), k + 1))
    return [d for R in subsets for C in subsets if (d := det(R, C))]


def _divisors(m: int) -> list[int]:
    m = abs(m)
    small = [d for d in range(1, math.isqrt(m) + 1) if m % d == 0]
    return sorted(set(small + [m // d for d in small]))


def _rational_roots(f: Polynomial) -> list[Fraction]:
    """Rational roots of a univariate polynomial (variable 0 of a 2-variable ring)."""
    coeffs = {e[0]: c for e, c in f.items()}
    deg = max(coeffs)
    low = min(coeffs)
    roots = [Fraction(0)] if low > 0 else []
    a = [coeffs.get(i, Fraction(0)) for i in range(low, deg + 1)]
    den = math.lcm(*(c.denominator for c in a))
    a = [int(c * den) for c in a]
    if len(a) == 1:
        return roots
    if len(a) == 3:
        c0, c1, c2 = a
        disc = c1 * c1 - 4 * c2 * c0
        r = math.isqrt(disc) if disc >= 0 else -1
        if r * r == disc:
            roots += [Fraction(-c1 + r, 2 * c2), Fraction(-c1 - r, 2 * c2)]
        return roots
    if max(abs(a[0]), abs(a[-1])) > 10**12:
        return roots
    for p in _divisors(a[0]):
        for q in _divisors(a[-1]):
            for x in (Fraction(p, q), Fraction(-p, q)):
                if sum(c * x**i for i, c in enumerate(a)) == 0:
                    roots.append(x)
    return roots


def _points_on_plane(w: DifferentialForm, k: int, b1, b2) -> list[list[Fraction]]:
    minors = _binary_minors(w, k, b1, b2)
    if not minors:
        return []
    g = gcd_many(minors)
    candidates = []
    if g.degree_in(0) < g.degree():  # t divides g: the point b1
        candidates.append((Fraction(1), Fraction(0)))
    univariate = Polynomial(2, {(e[0], 0): c for e, c in g.items()})
    if univariate.degree() > 0:
        candidates += [(r, Fraction(1)) for r in _rational_roots(univariate)]
    points = []
    for s_, t_ in dict.fromkeys(candidates):
        v = [s_ * a + t_ * b for a, b in zip(b1, b2)]
        if any(v) and contraction_rank(w, v) <= k:
            points.append(v)
    return points


def low_rank_directions(w: DifferentialForm, k: int) -> list[list[list[Fraction]]]:
    """Candidate bases for the space of v with rank M(v) <= k.

    Usually there is one candidate, the whole zero set of the minors, which
    is then a linear space.  When the zero set consists of two points, each
    point is returned as its own candidate.  Every returned vector has been
    checked exactly; an empty list means nothing usable was found.
    """
    if w.r != 2:
        raise ValueError("expected a 2-form")
    total = len(list(itertools.combinations(range(w.n), k + 1))) ** 2
    for sample in (True, False):
        system = _MinorSystem(w, k, sample)
        residues, primes = [], []
        for p in PRIMES:
            residues.append(system.vanishing_forms(p))
            primes.append(p)
            perp = _lift(residues, primes)
            if perp is None:
                continue
            span = linalg.nullspace(perp, w.n) if perp else linalg.identity(w.n)
            if not span:
                continue
            if all(contraction_rank(w, v) <= k for v in span):
                return [span]
            if len(span) == 2:
                points = _points_on_plane(w, k, *span)
                if points:
                    return [[v] for v in points]
        if len(system.pairs) == total:
            break
    return []
