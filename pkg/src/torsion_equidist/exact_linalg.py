"""Gaussian elimination over the rationals."""

from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce
from typing import Sequence

Matrix = list[list[Fraction]]


def _as_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [[Fraction(v) for v in r] for r in rows]


def rref(rows: Sequence[Sequence]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and the pivot columns."""
    M = _as_matrix(rows)
    if not M:
        return M, []
    ncols = len(M[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        pv = M[r][c]
        M[r] = [v / pv for v in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    return M, pivots


def rank(rows: Sequence[Sequence]) -> int:
    if not rows:
        return 0
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Sequence], ncols: int | None = None) -> list[list[Fraction]]:
    """Basis of {x : rows . x = 0}."""
    if not rows:
        if ncols is None:
            raise ValueError("need ncols for an empty matrix")
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    R, piv = rref(rows)
    n = len(R[0])
    free = [c for c in range(n) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for i, pc in enumerate(piv):
            v[pc] = -R[i][f]
        basis.append(v)
    return basis


def det(rows: Sequence[Sequence]) -> Fraction:
    M = _as_matrix(rows)
    n = len(M)
    result = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if M[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            M[c], M[p] = M[p], M[c]
            result = -result
        pv = M[c][c]
        result *= pv
        for i in range(c + 1, n):
            if M[i][c] != 0:
                f = M[i][c] / pv
                M[i] = [a - f * b for a, b in zip(M[i], M[c])]
    return result


def inverse(rows: Sequence[Sequence]) -> Matrix:
    n = len(rows)
    aug = [list(r) + [int(i == j) for j in range(n)] for i, r in enumerate(rows)]
    R, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [r[n:] for r in R]


def matmul(A: Sequence[Sequence], B: Sequence[Sequence]) -> list[list]:
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


def primitive_integer(v: Sequence[Fraction]) -> tuple[int, ...]:
    """Scale a nonzero rational vector to the primitive integer vector on its ray."""
    v = [Fraction(x) for x in v]
    den = reduce(lambda a, b: a * b // math.gcd(a, b), (x.denominator for x in v), 1)
    ints = [int(x * den) for x in v]
    g = reduce(math.gcd, (abs(i) for i in ints), 0)
    if g == 0:
        raise ValueError("zero vector has no primitive form")
    return tuple(i // g for i in ints)
