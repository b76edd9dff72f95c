"""Exact rational linear programming: two-phase tableau simplex, Bland's rule.

Small dense problems only (a few dozen constraints); everything is a
``Fraction`` so optimal vertices and values are exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


class LPError(RuntimeError):
    pass


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: tuple[Fraction, ...] | None
    value: Fraction | None


def _pivot(T: list[list[Fraction]], basis: list[int], row: int, col: int) -> None:
    piv = T[row][col]
    T[row] = [v / piv for v in T[row]]
    prow = T[row]
    for i, r in enumerate(T):
        if i != row and r[col] != 0:
            f = r[col]
            T[i] = [a - f * b for a, b in zip(r, prow)]
    basis[row] = col


def _run(T: list[list[Fraction]], basis: list[int], cost: Sequence[Fraction], allowed: int) -> str:
    """Minimise cost . z over the tableau; only columns < allowed may enter."""
    while True:
        entering = None
        for j in range(allowed):
            if j in basis:
                continue
            rc = cost[j] - sum(cost[basis[i]] * T[i][j] for i in range(len(T)))
            if rc < 0:
                entering = j
                break
        if entering is None:
            return "optimal"
        best = None
        for i, r in enumerate(T):
            a = r[entering]
            if a > 0:
                key = (r[-1] / a, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            return "unbounded"
        _pivot(T, basis, best[1], entering)


def linprog(
    c: Sequence,
    A_ub: Sequence[Sequence] = (),
    b_ub: Sequence = (),
    A_eq: Sequence[Sequence] = (),
    b_eq: Sequence = (),
    maximize: bool = False,
) -> LPResult:
    """Optimise c . x over {A_ub x <= b_ub, A_eq x = b_eq}, x free."""
    n = len(c)
    rows: list[tuple[list[Fraction], Fraction]] = []
    n_ub = len(A_ub)
    # columns: x+ (n), x- (n), slacks (n_ub)
    ncols = 2 * n + n_ub
    for k, (a, b) in enumerate(zip(A_ub, b_ub)):
        a = [Fraction(v) for v in a]
        row = a + [-v for v in a] + [Fraction(0)] * n_ub
        row[2 * n + k] = Fraction(1)
        rows.append((row, Fraction(b)))
    for a, b in zip(A_eq, b_eq):
        a = [Fraction(v) for v in a]
        rows.append((a + [-v for v in a] + [Fraction(0)] * n_ub, Fraction(b)))
    m = len(rows)
    T: list[list[Fraction]] = []
    for i, (row, b) in enumerate(rows):
        if b < 0:
            row, b = [-v for v in row], -b
        art = [Fraction(0)] * m
        art[i] = Fraction(1)
        T.append(row + art + [b])
    basis = [ncols + i for i in range(m)]
    phase1 = [Fraction(0)] * ncols + [Fraction(1)] * m
    status = _run(T, basis, phase1, ncols + m)
    if status != "optimal":
        raise LPError("phase one did not terminate at an optimum")
    if sum(T[i][-1] for i in range(m) if basis[i] >= ncols) != 0:
        return LPResult("infeasible", None, None)
    # drive artificials out of the basis, dropping redundant rows
    i = 0
    while i < len(T):
        if basis[i] >= ncols:
            col = next((j for j in range(ncols) if T[i][j] != 0), None)
            if col is None:
                del T[i]
                del basis[i]
                continue
            _pivot(T, basis, i, col)
        i += 1
    T = [r[:ncols] + [r[-1]] for r in T]
    sign = -1 if maximize else 1
    cost = [sign * Fraction(v) for v in c] + [-sign * Fraction(v) for v in c] + [Fraction(0)] * n_ub
    status = _run(T, basis, cost, ncols)
    if status == "unbounded":
        return LPResult("unbounded", None, None)
    z = [Fraction(0)] * ncols
    for i, b in enumerate(basis):
        z[b] = T[i][-1]
    x = tuple(z[j] - z[n + j] for j in range(n))
    value = sum(Fraction(ci) * xi for ci, xi in zip(c, x))
    return LPResult("optimal", x, value)
