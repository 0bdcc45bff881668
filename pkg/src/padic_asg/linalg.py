"""Exact linear algebra over Q, number fields and Z.

Matrices are lists of rows.  Entries may be ints, Fractions or any field
element type supporting + - * / and comparison with 0.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Sequence


def _is_zero(x) -> bool:
    return x == 0


def rref(M: Sequence[Sequence]):
    """Reduced row echelon form.  Returns (rows, pivot_columns)."""
    A = [[x if not isinstance(x, int) else Fraction(x) for x in row] for row in M]
    if not A:
        return [], []
    nrows, ncols = len(A), len(A[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if not _is_zero(A[i][c])), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(nrows):
            if i != r and not _is_zero(A[i][c]):
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return A[:r], pivots


def rank(M: Sequence[Sequence]) -> int:
    return len(rref(M)[1]) if M else 0


def nullspace(M: Sequence[Sequence], ncols: int = None) -> list[list]:
    """Basis of {x : M x = 0}, one basis vector per free column."""
    if not M:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    R, pivots = rref(M)
    n = len(M[0])
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for row, pc in zip(R, pivots):
            v[pc] = -row[f]
        basis.append(v)
    return basis


def independent_rows(M: Sequence[Sequence]) -> list[int]:
    """Indices of a maximal linearly independent subset of rows, greedily."""
    chosen, basis = [], []
    for i, row in enumerate(M):
        if rank(basis + [list(row)]) > len(basis):
            basis.append(list(row))
            chosen.append(i)
    return chosen


def primitive(v: Sequence) -> list[int]:
    """Scale a nonzero rational vector to a primitive integer vector whose
    first nonzero entry is positive."""
    v = [Fraction(x) for x in v]
    den = reduce(lambda a, b: a * b // gcd(a, b), (x.denominator for x in v), 1)
    w = [int(x * den) for x in v]
    g = reduce(gcd, w, 0)
    if g == 0:
        raise ValueError("zero vector has no primitive form")
    w = [x // g for x in w]
    lead = next(x for x in w if x)
    return [-x for x in w] if lead < 0 else w


def integer_kernel(C: Sequence[Sequence[int]], n: int = None) -> list[list[int]]:
    """Z-basis of {x in Z^n : C x = 0} by unimodular column operations.

    The result is saturated (it is the full kernel lattice, not a sublattice).
    """
    C = [[int(x) for x in row] for row in C]
    if n is None:
        n = len(C[0]) if C else 0
    A = [row[:] for row in C]
    U = [[int(i == j) for j in range(n)] for i in range(n)]  # columns track transform
    col0 = 0
    for r in range(len(A)):
        # gcd-reduce row r over columns col0.. into column col0
        while True:
            nz = [c for c in range(col0, n) if A[r][c] != 0]
            if len(nz) <= 1:
                break
            c_min = min(nz, key=lambda c: abs(A[r][c]))
            for c in nz:
                if c != c_min:
                    q = A[r][c] // A[r][c_min]
                    _col_axpy(A, U, c, c_min, -q)
        nz = [c for c in range(col0, n) if A[r][c] != 0]
        if nz:
            c = nz[0]
            _col_swap(A, U, c, col0)
            col0 += 1
    return [[U[i][c] for i in range(n)] for c in range(col0, n)]


def _col_axpy(A, U, dst, src, k):
    for row in A:
        row[dst] += k * row[src]
    for row in U:
        row[dst] += k * row[src]


def _col_swap(A, U, a, b):
    if a == b:
        return
    for row in A:
        row[a], row[b] = row[b], row[a]
    for row in U:
        row[a], row[b] = row[b], row[a]


def saturate(rows: Sequence[Sequence], n: int = None) -> list[list[int]]:
    """Z-basis of span_Q(rows) intersected with Z^n."""
    rows = [list(r) for r in rows]
    if n is None:
        n = len(rows[0])
    if not rows or rank(rows) == 0:
        return []
    annihilator = [primitive(v) for v in nullspace(rows)]
    if not annihilator:
        return [[int(i == j) for j in range(n)] for i in range(n)]
    return integer_kernel(annihilator, n)


def mat_vec(M, v):
    return [sum((a * b for a, b in zip(row, v)), 0) for row in M]


def mat_mul(A, B):
    Bt = list(zip(*B))
    return [[sum((a * b for a, b in zip(row, col)), 0) for col in Bt] for row in A]


def det(M) -> Fraction:
    """Determinant by fraction-free-enough Gaussian elimination."""
    A = [[Fraction(x) for x in row] for row in M]
    n = len(A)
    d = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if A[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            d = -d
        d *= A[c][c]
        for i in range(c + 1, n):
            if A[i][c]:
                f = A[i][c] / A[c][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[c])]
    return d
