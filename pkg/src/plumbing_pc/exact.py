"""Small exact linear algebra over the integers and rationals.

Matrices are lists of rows.  Everything here is tiny (a plumbing tree rarely
has more than a few dozen vertices), so plain Python with ``Fraction`` is fast
enough and keeps every result exact.
"""
from fractions import Fraction
from typing import List, Sequence, Tuple

Matrix = List[List[int]]


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def leading_minors(M: Sequence[Sequence[int]]) -> List[int]:
    """Leading principal minors of an integer matrix.

    Uses fraction-free Bareiss elimination without pivoting, so the k-th
    pivot is exactly the k-th leading minor.  Stops (filling with 0) at the
    first vanishing minor.
    """
    n = len(M)
    a = [list(map(int, row)) for row in M]
    minors = []
    prev = 1
    for k in range(n):
        piv = a[k][k]
        minors.append(piv)
        if piv == 0:
            minors.extend([0] * (n - k - 1))
            break
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * piv - a[i][k] * a[k][j]) // prev
        prev = piv
    return minors


def determinant(M: Sequence[Sequence[int]]) -> int:
    """Determinant of an integer matrix (fraction-free, with row pivoting)."""
    n = len(M)
    a = [list(map(int, row)) for row in M]
    sign, prev = 1, 1
    for k in range(n):
        p = next((i for i in range(k, n) if a[i][k] != 0), None)
        if p is None:
            return 0
        if p != k:
            a[k], a[p] = a[p], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1] if n else 1


def solve(M: Sequence[Sequence], rhs: Sequence[Sequence]) -> List[List[Fraction]]:
    """Solve ``M X = rhs`` exactly for a square nonsingular ``M``.

    ``rhs`` is a list of rows (one row per equation), so several right hand
    sides are solved at once.  Raises ``ValueError`` if ``M`` is singular.
    """
    n = len(M)
    a = [[Fraction(x) for x in row] + [Fraction(y) for y in r]
         for row, r in zip(M, rhs)]
    width = len(a[0]) if a else 0
    for col in range(n):
        p = next((i for i in range(col, n) if a[i][col] != 0), None)
        if p is None:
            raise ValueError("singular matrix")
        a[col], a[p] = a[p], a[col]
        inv = 1 / a[col][col]
        pivot_row = [x * inv for x in a[col]]
        a[col] = pivot_row
        for i in range(n):
            if i != col and a[i][col] != 0:
                f = a[i][col]
                row = a[i]
                a[i] = [x - f * y for x, y in zip(row, pivot_row)]
    return [row[n:width] for row in a]


def inverse(M: Sequence[Sequence]) -> List[List[Fraction]]:
    return solve(M, identity(len(M)))


def matmul(A: Sequence[Sequence], B: Sequence[Sequence]) -> list:
    cols = list(zip(*B))
    return [[sum(x * y for x, y in zip(row, col)) for col in cols] for row in A]


def matvec(A: Sequence[Sequence], v: Sequence) -> list:
    return [sum(x * y for x, y in zip(row, v)) for row in A]


def smith_normal_form(M: Sequence[Sequence[int]]) -> Tuple[Matrix, Matrix, Matrix]:
    """Smith normal form of a square integer matrix.

    Returns ``(U, D, V)`` with ``U @ M @ V == D``, ``U`` and ``V`` unimodular
    and ``D`` diagonal with nonnegative entries d_1 | d_2 | ... .
    """
    n = len(M)
    a = [list(map(int, row)) for row in M]
    U, V = identity(n), identity(n)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):
        # row_dst += q * row_src
        a[dst] = [x + q * y for x, y in zip(a[dst], a[src])]
        U[dst] = [x + q * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, q):
        for row in a:
            row[dst] += q * row[src]
        for row in V:
            row[dst] += q * row[src]

    for t in range(n):
        while True:
            entries = [(abs(a[i][j]), i, j) for i in range(t, n) for j in range(t, n) if a[i][j]]
            if not entries:
                break
            _, i, j = min(entries)
            swap_rows(t, i)
            swap_cols(t, j)
            clean = True
            for i in range(t + 1, n):
                q = a[i][t] // a[t][t]
                if q:
                    add_row(i, t, -q)
                clean &= a[i][t] == 0
            for j in range(t + 1, n):
                q = a[t][j] // a[t][t]
                if q:
                    add_col(j, t, -q)
                clean &= a[t][j] == 0
            if not clean:
                continue
            bad = next((i for i in range(t + 1, n)
                        for j in range(t + 1, n) if a[i][j] % a[t][t]), None)
            if bad is None:
                break
            add_row(t, bad, 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            U[t] = [-x for x in U[t]]
    return U, a, V
