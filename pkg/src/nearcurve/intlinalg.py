"""Exact integer linear algebra on small matrices.

Everything here runs on Python ints, so determinants, kernels and minors are
exact regardless of entry size.  Matrices are given as sequences of rows.
"""

from __future__ import annotations

import math
from itertools import combinations
from typing import Iterable, Sequence


def _as_rows(mat) -> list[list[int]]:
    return [[int(v) for v in row] for row in mat]


def det_int(mat) -> int:
    """Exact determinant via fraction-free (Bareiss) elimination."""
    a = _as_rows(mat)
    n = len(a)
    if n == 0:
        return 1
    if any(len(row) != n for row in a):
        raise ValueError("determinant needs a square matrix")
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def rank_int(mat) -> int:
    """Exact rank over Q (fraction-free row elimination)."""
    a = _as_rows(mat)
    if not a:
        return 0
    rows, cols = len(a), len(a[0])
    rank = 0
    pivot_col = 0
    while rank < rows and pivot_col < cols:
        pivot = next((i for i in range(rank, rows) if a[i][pivot_col] != 0), None)
        if pivot is None:
            pivot_col += 1
            continue
        a[rank], a[pivot] = a[pivot], a[rank]
        pr = a[rank]
        for i in range(rank + 1, rows):
            if a[i][pivot_col] != 0:
                f1, f2 = pr[pivot_col], a[i][pivot_col]
                a[i] = [f1 * a[i][j] - f2 * pr[j] for j in range(cols)]
        rank += 1
        pivot_col += 1
    return rank


def kernel_basis_int(mat) -> list[list[int]]:
    """Basis of the integer kernel {x in Z^cols : mat @ x = 0}.

    Column reduction with unimodular operations; the returned vectors form a
    primitive basis of the kernel lattice (every integer kernel vector is an
    integer combination of them).
    """
    a = _as_rows(mat)
    if not a:
        return []
    rows, cols = len(a), len(a[0])
    # column-major copies of the matrix and the accumulated transform
    A = [[a[i][j] for i in range(rows)] for j in range(cols)]
    U = [[1 if i == j else 0 for i in range(cols)] for j in range(cols)]
    pivot_col = 0
    for row in range(rows):
        while True:
            live = [j for j in range(pivot_col, cols) if A[j][row] != 0]
            if not live:
                break
            if len(live) == 1:
                j0 = live[0]
                A[pivot_col], A[j0] = A[j0], A[pivot_col]
                U[pivot_col], U[j0] = U[j0], U[pivot_col]
                pivot_col += 1
                break
            jmin = min(live, key=lambda j: abs(A[j][row]))
            for j in live:
                if j == jmin:
                    continue
                q = A[j][row] // A[jmin][row]
                if q:
                    A[j] = [x - q * y for x, y in zip(A[j], A[jmin])]
                    U[j] = [x - q * y for x, y in zip(U[j], U[jmin])]
    return [U[j] for j in range(pivot_col, cols)]


def maximal_minors(mat) -> list[int]:
    """All r x r minors of an N x r matrix, row combinations in lex order.

    These are the Grassmann coordinates of the wedge of the columns.
    """
    a = _as_rows(mat)
    if not a:
        return []
    n, r = len(a), len(a[0])
    if r > n:
        raise ValueError("more columns than rows")
    out = []
    for rows_idx in combinations(range(n), r):
        out.append(det_int([a[i] for i in rows_idx]))
    return out


def gcd_list(values: Iterable[int]) -> int:
    g = 0
    for v in values:
        g = math.gcd(g, int(v))
        if g == 1:
            return 1
    return g


def is_unimodular(mat) -> bool:
    return abs(det_int(mat)) == 1
