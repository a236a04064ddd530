"""Small exact linear-algebra helpers over Z and Q (lists of Python ints)."""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Sequence


def det(rows: Sequence[Sequence[int]]) -> int:
    """Determinant of a square integer matrix by fraction-free Bareiss elimination."""
    m = [list(map(int, r)) for r in rows]
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k]:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def extends_to_basis(vectors: Sequence[Sequence[int]], dim: int) -> bool:
    """True iff the integer vectors are part of a Z-basis of Z^dim.

    Equivalent to the maximal minors having gcd 1.
    """
    k = len(vectors)
    if k == 0:
        return True
    if k > dim:
        return False
    g = 0
    for cols in combinations(range(dim), k):
        g = gcd(g, det([[v[c] for c in cols] for v in vectors]))
        if g == 1:
            return True
    return False


def integer_kernel(rows: Sequence[Sequence[int]], ncols: int) -> list[list[int]]:
    """Saturated Z-basis of ``{c in Z^ncols : rows . c = 0}``.

    Column-style Hermite reduction: unimodular column operations bring the
    matrix to echelon form while the same operations act on an identity
    matrix; the columns over zero pivots span the kernel lattice.
    """
    a = [list(map(int, r)) for r in rows]
    nrows = len(a)
    u = [[int(i == j) for j in range(ncols)] for i in range(ncols)]  # columns of u track ops

    def col_op(dst: int, src: int, k: int):
        # column dst += k * column src
        for r in range(nrows):
            a[r][dst] += k * a[r][src]
        for r in range(ncols):
            u[r][dst] += k * u[r][src]

    def col_swap(i: int, j: int):
        for r in range(nrows):
            a[r][i], a[r][j] = a[r][j], a[r][i]
        for r in range(ncols):
            u[r][i], u[r][j] = u[r][j], u[r][i]

    pivot_col = 0
    for r in range(nrows):
        if pivot_col >= ncols:
            break
        while True:
            nz = [c for c in range(pivot_col, ncols) if a[r][c]]
            if not nz:
                break
            c_min = min(nz, key=lambda c: abs(a[r][c]))
            if c_min != pivot_col:
                col_swap(pivot_col, c_min)
            p = a[r][pivot_col]
            done = True
            for c in range(pivot_col + 1, ncols):
                if a[r][c]:
                    col_op(c, pivot_col, -(a[r][c] // p))
                    if a[r][c]:
                        done = False
            if done:
                break
        if any(a[r][c] for c in range(pivot_col, ncols)):
            pivot_col += 1
    return [[u[r][c] for r in range(ncols)] for c in range(pivot_col, ncols)]


def solve_rational(matrix: Sequence[Sequence[int]], rhs: Sequence[int]) -> list[Fraction] | None:
    """Solve a square system exactly; ``None`` when singular."""
    n = len(matrix)
    aug = [[Fraction(x) for x in row] + [Fraction(b)] for row, b in zip(matrix, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col]), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [aug[r][n] for r in range(n)]


def rank(rows: Sequence[Sequence[int]]) -> int:
    """Rank over Q by exact elimination."""
    m = [[Fraction(x) for x in r] for r in rows if any(r)]
    if not m:
        return 0
    ncols = len(m[0])
    rk = 0
    for col in range(ncols):
        piv = next((r for r in range(rk, len(m)) if m[r][col]), None)
        if piv is None:
            continue
        m[rk], m[piv] = m[piv], m[rk]
        p = m[rk][col]
        for r in range(rk + 1, len(m)):
            if m[r][col]:
                f = m[r][col] / p
                m[r] = [x - f * y for x, y in zip(m[r], m[rk])]
        rk += 1
        if rk == len(m):
            break
    return rk
