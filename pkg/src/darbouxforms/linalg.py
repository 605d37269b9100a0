"""Small exact linear algebra over the rationals (lists of Fraction rows)."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import DimensionMismatch, SingularMatrix

Matrix = list[list[Fraction]]


def to_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [[Fraction(v) for v in row] for row in rows]


def identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def matmul(A: Sequence[Sequence], B: Sequence[Sequence]) -> Matrix:
    if A and len(A[0]) != len(B):
        raise DimensionMismatch("matrix shapes do not compose")
    cols = len(B[0]) if B else 0
    return [
        [sum((A[i][k] * B[k][j] for k in range(len(B))), Fraction(0)) for j in range(cols)]
        for i in range(len(A))
    ]


def matvec(A: Sequence[Sequence], v: Sequence) -> list[Fraction]:
    return [sum((Fraction(a) * b for a, b in zip(row, v)), Fraction(0)) for row in A]


def transpose(A: Sequence[Sequence]) -> Matrix:
    return [list(col) for col in zip(*A)]


def rref(A: Sequence[Sequence]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns (first nonzero pivot per column)."""
    M = to_matrix(A)
    rows = len(M)
    cols = len(M[0]) if M else 0
    pivots = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if M[i][c]), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        piv = M[r][c]
        M[r] = [v / piv for v in M[r]]
        for i in range(rows):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return M, pivots


def rank(A: Sequence[Sequence]) -> int:
    if not A:
        return 0
    return len(rref(A)[1])


def inverse(A: Sequence[Sequence]) -> Matrix:
    n = len(A)
    if any(len(row) != n for row in A):
        raise DimensionMismatch("inverse of a non-square matrix")
    aug = [list(row) + e for row, e in zip(to_matrix(A), identity(n))]
    R, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise SingularMatrix("matrix is singular")
    return [row[n:] for row in R]


def solve(A: Sequence[Sequence], b: Sequence) -> list[Fraction] | None:
    """A solution of ``A x = b`` with free variables set to zero, or None if inconsistent."""
    cols = len(A[0]) if A else 0
    aug = [list(row) + [bv] for row, bv in zip(A, b)]
    if not aug:
        return [Fraction(0)] * cols
    R, piv = rref(aug)
    if cols in piv:
        return None
    x = [Fraction(0)] * cols
    for i, c in enumerate(piv):
        x[c] = R[i][cols]
    return x


def nullspace(A: Sequence[Sequence], cols: int | None = None) -> Matrix:
    """Basis of the right kernel of ``A``."""
    if cols is None:
        cols = len(A[0])
    if not A:
        return identity(cols)
    R, piv = rref(A)
    basis = []
    for f in range(cols):
        if f in piv:
            continue
        v = [Fraction(0)] * cols
        v[f] = Fraction(1)
        for i, c in enumerate(piv):
            v[c] = -R[i][f]
        basis.append(v)
    return basis


def is_identity(A: Sequence[Sequence]) -> bool:
    return to_matrix(A) == identity(len(A))


def format_fraction(c: Fraction) -> str:
    return f"{c.numerator}/{c.denominator}"
