"""Exact replay of the recursion producing gamma(d, k), C(d, k) and kappa(d, k),
together with two lattice utilities: completing a primitive vector to a
unimodular matrix and checking the norm bound on a unimodular inverse.

Every quantity is kept as an exact Fraction while that is feasible.  The
C values grow like n^(1/(2 eps^(n-1))) and are carried as ``Big`` numbers;
for d >= 3 this makes eps and gamma non-materialisable as well.

The recursion writes ``min`` when combining the C candidates, while the
inequalities C is meant to satisfy are all lower bounds.  ``c_rule="max"``
(the default) takes the largest candidate; ``c_rule="min"`` replays the
literal text.  The trace records both at every C step.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import exact_linalg as la
from .magnitude import Big, Real, bmax, bmin
from .rationals import fraction_str, to_fraction


def _s(x) -> str:
    if isinstance(x, Fraction):
        return fraction_str(x)
    if isinstance(x, Big) and x.is_exact:
        return fraction_str(x.q)
    return str(x)


def _unwrap(x: Big):
    """Fraction when exact, otherwise the Big itself."""
    return x.q if x.is_exact else x


@dataclass
class ConstantsResult:
    d: int
    k: int
    eps0: Fraction
    c_rule: str
    gamma: object  # Fraction, or Big when not materialisable
    C: Big
    C_other_rule: Big
    epsilon: object
    v: list
    kappa: object
    epsilon_candidates: list = field(default_factory=list)
    C_candidates: list = field(default_factory=list)
    trace: dict = field(default_factory=dict)

    @property
    def gamma_exact(self) -> bool:
        return isinstance(self.gamma, Fraction)

    def log2_C(self) -> Real:
        return self.C.log2()

    def to_json(self) -> str:
        return json.dumps(self.trace, indent=2)


def _v_sequence(n: int) -> list[Big]:
    """v_n = 1/(128 n^2) and the downward recursion for v_{n-1}, ..., v_1."""
    v = [None] * (n + 1)
    v[n] = Big.exact(Fraction(1, 128 * n * n))
    for j in range(1, n):
        v[j] = Big.exact(1)
    s = n - 1
    while s >= 1:
        prod = Big.exact(1)
        for t in range(s + 2, n + 1):
            prod = prod * (v[t] ** n)
        denom = Big.exact(2 * (4 * n * 160 * n) ** (n - s - 1))
        factor = _one_minus(prod / denom)
        v[s] = (v[s + 1] ** n) / Big.exact(5 * s * 80 * n) * factor
        s -= 1
    return v[1:]


def _one_minus(x: Big) -> Big:
    if x.is_exact:
        return Big.exact(1 - x.q)
    # x is far below 1 here (a product of tiny v's); 1 - x rounds to 1
    if x.log2() < -64:
        return Big.exact(1)
    raise ArithmeticError("1 - x with x not exactly representable and not negligible")


def _combine(cands: list[Big], rule: str) -> Big:
    return bmax(cands) if rule == "max" else bmin(cands)


def _c_candidates(n: int, eps: Big, prev_C: list[Big], rule: str) -> tuple[list[tuple[str, Big]], Big, Big]:
    e1 = eps ** (n - 1)
    e2 = eps ** (n - 2)
    N = Big.exact(n)
    c1_parts = []
    for Cl in prev_C:
        expo = Big.exact(4 * (n ** 3 + 2)) * Cl
        c1_parts.append((Cl ** 4) * _pow_big_exponent(N, expo))
    c2_parts = [Big.exact(4) * Cl for Cl in prev_C]
    C1 = _combine(c1_parts, rule)
    C2 = _combine(c2_parts, rule)
    named = [
        ("n^(1/(2 eps^(n-1))) + 1", _pow_big_exponent(N, e1.reciprocal() / 2).add(1)),
        ("1/eps^(n-1) + 1", e1.reciprocal().add(1)),
        ("n^(2 n^3/eps^(n-2))", _pow_big_exponent(N, Big.exact(2 * n ** 3) / e2)),
        ("2/eps^(n-2)", Big.exact(2) / e2),
        ("C_1", C1),
        ("C_2", C2),
    ]
    values = [v for _, v in named]
    return named, bmax(values), bmin(values)


def _pow_big_exponent(base: Big, expo: Big) -> Big:
    """base ** expo for a positive exponent given as a Big."""
    if expo.is_exact:
        return base ** expo.q
    return Big(lg=base.log2() * Real.from_big(expo))


def gamma_C(d: int, k: int, eps0="1/2", c_rule: str = "max") -> ConstantsResult:
    """Run the recursion for gamma(d, k) and C(d, k) with base cases gamma(1, .) = 1 - eps0, C(1, .) = 1."""
    if not isinstance(d, int) or not isinstance(k, int) or d < 2 or k < 2:
        raise ValueError("the recursion needs integers d >= 2 and k >= 2")
    eps0 = to_fraction(eps0)
    if not (0 < eps0 < 1):
        raise ValueError("eps0 must lie strictly between 0 and 1")
    if c_rule not in ("max", "min"):
        raise ValueError("c_rule must be 'max' or 'min'")

    # tables indexed by (n, exponent j) meaning argument k^(2^j)
    gamma_tab: dict[tuple[int, int], Big] = {}
    C_tab: dict[tuple[int, int], Big] = {}
    for j in range(0, d):
        gamma_tab[(1, j)] = Big.exact(1 - eps0)
        C_tab[(1, j)] = Big.exact(1)

    trace: dict = {
        "inputs": {"d": d, "k": k, "eps0": fraction_str(eps0), "c_rule": c_rule},
        "note": (
            "C candidates are combined by max (default) or min; the inequalities C must satisfy "
            "are lower bounds, so the literal min reading is recorded alongside as C_min"
        ),
        "inner": [],
        "loop_extents": {"n": [2, d - 1], "m_per_n": {str(n): [1, d - n] for n in range(2, d)}},
    }

    for n in range(2, d):
        for m in range(1, d - n + 1):
            K = k ** (2 ** m)
            K2 = k ** (2 ** (m + 1))
            v = _v_sequence(n)
            prev_C = [C_tab[(l, m + 1)] for l in range(1, n)]
            prev_g = [gamma_tab[(l, m + 1)] for l in range(1, n)]
            eps1 = bmin([Big.exact(1) / (Big.exact(8 * n) * c) for c in prev_C])
            eps2 = bmin([g / Big.exact(2 ** 7 * n ** 3) for g in prev_g])
            eps_list = [
                (v[0] ** n) / Big.exact(2 ** 6 * 5 * n * n),
                Big.exact(Fraction(1, 2 ** 10 * n ** 3 * K)),
                Big.exact(Fraction(1, 2 ** 7 * 3 * 5 ** 2 * n * (n + 1) * K2)),
                eps1,
                eps2,
            ]
            eps = bmin(eps_list)
            g = (eps ** (n - 1)) / Big.exact(16 * (K - 1))
            named, cmax, cmin = _c_candidates(n, eps, prev_C, c_rule)
            C = cmax if c_rule == "max" else cmin
            gamma_tab[(n, m)] = g
            C_tab[(n, m)] = C
            trace["inner"].append(
                {
                    "n": n,
                    "m": m,
                    "argument": f"k^{2 ** m}",
                    "v": [_s(x) for x in v],
                    "epsilon_candidates": [_s(x) for x in eps_list],
                    "epsilon": _s(eps),
                    "gamma": _s(g),
                    "C_candidates": {name: _s(x) for name, x in named},
                    "C_max": _s(cmax),
                    "C_min": _s(cmin),
                    "C": _s(C),
                    "log2_C": str(C.log2()),
                }
            )

    v = _v_sequence(d)
    prev_C = [C_tab[(l, 1)] for l in range(1, d)]
    prev_g = [gamma_tab[(l, 1)] for l in range(1, d)]
    named_eps = (
        [
            ("v_1^d/(2^7 5 d^2)", (v[0] ** d) / Big.exact(2 ** 7 * 5 * d * d)),
            ("1/(2^10 d^3 k)", Big.exact(Fraction(1, 2 ** 10 * d ** 3 * k))),
            ("1/(2^6 3 5^2 d(d+1) k^2)", Big.exact(Fraction(1, 2 ** 6 * 3 * 5 ** 2 * d * (d + 1) * k * k))),
        ]
        + [(f"1/(2^3 d C({l},k^2))", Big.exact(1) / (Big.exact(8 * d) * c)) for l, c in enumerate(prev_C, 1)]
        + [(f"gamma({l},k^2)/(2^7 d^3)", g / Big.exact(2 ** 7 * d ** 3)) for l, g in enumerate(prev_g, 1)]
    )
    eps = bmin([x for _, x in named_eps])
    gamma = (eps ** (d - 1)) / Big.exact(16 * (k - 1))
    named_C, cmax, cmin = _c_candidates(d, eps, prev_C, c_rule)
    C = cmax if c_rule == "max" else cmin
    other = cmin if c_rule == "max" else cmax
    cap = Big.exact(Fraction(1, 64 * k * (d + 1)))
    kappa = bmin([gamma, cap])

    trace["final"] = {
        "v": [_s(x) for x in v],
        "epsilon_candidates": {name: _s(x) for name, x in named_eps},
        "epsilon": _s(eps),
        "gamma": _s(gamma),
        "C_candidates": {name: _s(x) for name, x in named_C},
        "C_max": _s(cmax),
        "C_min": _s(cmin),
        "C": _s(C),
        "log2_C": str(C.log2()),
        "kappa": _s(kappa),
        "kappa_cap_1/(64k(d+1))": _s(cap),
    }
    return ConstantsResult(
        d=d,
        k=k,
        eps0=eps0,
        c_rule=c_rule,
        gamma=_unwrap(gamma),
        C=C,
        C_other_rule=other,
        epsilon=_unwrap(eps),
        v=[_unwrap(x) for x in v],
        kappa=_unwrap(kappa),
        epsilon_candidates=named_eps,
        C_candidates=named_C,
        trace=trace,
    )


def kappa(d: int, k: int, eps0="1/2", c_rule: str = "max"):
    """min(gamma(d, k), 1/(64 k (d + 1)))."""
    return gamma_C(d, k, eps0, c_rule).kappa


def epsilon_constraints(res: ConstantsResult) -> dict[str, bool]:
    """Re-check that the final eps is at most every entry of the list it was taken from."""
    eps = Big.of(res.epsilon)
    return {name: eps <= value for name, value in res.epsilon_candidates}


def delta_threshold_log2(C: Big, c: int, deg: int) -> Real:
    """log2 of C * max(c, deg)^C, the strictness threshold attached to C."""
    base = max(c, deg)
    if base < 1:
        raise ValueError("max(c, deg P) must be positive")
    if base == 1:
        return C.log2()
    return C.log2() + Real.from_big(C) * Real.of(math.log2(base))


# ---- unimodular matrices ---------------------------------------------------


def max_norm_matrix(A: Sequence[Sequence]) -> Fraction:
    return max(abs(Fraction(x)) for row in A for x in row)


@dataclass(frozen=True)
class InverseNormCheck:
    exact_norm: Fraction
    bound: Fraction
    ok: bool


def inverse_norm_check(A: Sequence[Sequence[int]]) -> InverseNormCheck:
    """Compare |A^-1| with d^(2d-2) |A|^(d-1) for a unimodular integer matrix."""
    d = len(A)
    if any(len(r) != d for r in A):
        raise ValueError("matrix must be square")
    if la.det(A) not in (1, -1):
        raise ValueError("matrix is not unimodular")
    inv = la.inverse(A)
    exact = max_norm_matrix(inv)
    bound = Fraction(d) ** (2 * d - 2) * max_norm_matrix(A) ** (d - 1)
    return InverseNormCheck(exact, bound, exact <= bound)


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, x, y) with a x + b y = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def complete_primitive(a: Sequence[int]) -> list[list[int]]:
    """Unimodular integer matrix with first column a and |A| <= 2^max(0, d-2) |a|.

    Split a = (a_1, g b') with b' primitive.  Complete b' recursively to B',
    then glue with a 2x2 block [[a_1, u], [g, w]] of determinant +-1 where
    w is the residue of a_1^-1 mod g closest to 0, which keeps |w b'| <= |a|/2.
    """
    a = [int(x) for x in a]
    d = len(a)
    if d == 0 or all(x == 0 for x in a):
        raise ValueError("need a nonzero vector")
    if math.gcd(*a) != 1:
        raise ValueError(f"{a} is not primitive")
    if d == 1:
        return [[a[0]]]
    a1, rest = a[0], a[1:]
    g = math.gcd(*rest) if len(rest) > 1 else abs(rest[0])
    A = [[0] * d for _ in range(d)]
    if g == 0:
        for i in range(d):
            A[i][i] = 1
        A[0][0] = a1
        return A
    b = [x // g for x in rest]
    B = complete_primitive(b)
    if g == 1:
        w, u = 0, -1  # a1*0 - u*1 = 1
    else:
        _, inv, _ = _ext_gcd(a1 % g, g)
        w = inv % g
        if w > g // 2:
            w -= g
        u = (a1 * w - 1) // g  # a1 w - u g = 1
    A[0][0], A[0][1] = a1, u
    for i in range(1, d):
        A[i][0] = g * b[i - 1]
        A[i][1] = w * b[i - 1]
        for j in range(2, d):
            A[i][j] = B[i - 1][j - 1]
    return A


def random_unimodular(rng: random.Random, d: int, max_entry: int = 50, steps: int = 12) -> list[list[int]]:
    """Product of random elementary matrices, kept within |A| <= max_entry."""
    A = [[int(i == j) for j in range(d)] for i in range(d)]
    for _ in range(steps):
        if d == 1:
            break
        i, j = rng.sample(range(d), 2)
        c = rng.choice([-3, -2, -1, 1, 2, 3])
        trial = [row[:] for row in A]
        trial[i] = [x + c * y for x, y in zip(trial[i], trial[j])]
        if max(abs(x) for row in trial for x in row) <= max_entry:
            A = trial
    if rng.random() < 0.5:
        A[0] = [-x for x in A[0]]
    return A
