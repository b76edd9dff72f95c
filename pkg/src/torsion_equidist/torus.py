"""Torsion points of the algebraic torus, stored as exact angle vectors.

A torsion point ``omega = e(q)`` is kept as the rational vector ``q`` in
``[0,1)^d``; the group law, the relation ``omega^a = 1`` and the Galois
action ``omega -> omega^k`` all become exact integer arithmetic on ``q``.
"""

from __future__ import annotations

import functools
import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .pointset import PointSet
from .rationals import fraction_str, frac_mod1, lcm_all, to_fraction


@dataclass(frozen=True)
class TorsionPoint:
    angles: tuple[Fraction, ...]
    order: int

    @property
    def d(self) -> int:
        return len(self.angles)

    def numerators(self) -> tuple[int, ...]:
        """Integers m_i with q_i = m_i / order."""
        return tuple(int(q * self.order) for q in self.angles)

    def power(self, k: int) -> "TorsionPoint":
        return make_torsion([k * q for q in self.angles])

    def is_identity(self) -> bool:
        return self.order == 1

    def to_json(self) -> str:
        return json.dumps({"angles": [fraction_str(q) for q in self.angles]})

    @classmethod
    def from_json(cls, text: str) -> "TorsionPoint":
        data = json.loads(text)
        return make_torsion(data["angles"])

    def __str__(self) -> str:
        return "(" + ",".join(fraction_str(q) for q in self.angles) + ")"


def make_torsion(q: Sequence) -> TorsionPoint:
    """Build a torsion point from rational angles, reducing them mod 1."""
    if len(q) == 0:
        raise ValueError("a torsion point needs at least one coordinate")
    angles = tuple(frac_mod1(to_fraction(x)) for x in q)
    order = lcm_all(a.denominator for a in angles)
    return TorsionPoint(angles, order)


def subgroup_member(omega: TorsionPoint, a: Sequence[int]) -> bool:
    """True iff omega^a = 1, i.e. <a, q> is an integer."""
    if len(a) != omega.d:
        raise ValueError("lattice vector has wrong dimension")
    total = sum(int(ai) * m for ai, m in zip(a, omega.numerators()))
    return total % omega.order == 0


def max_norm_shell(d: int, r: int) -> Iterator[tuple[int, ...]]:
    """Integer vectors with max-norm exactly r, in lexicographic order."""
    if r == 0:
        yield (0,) * d
        return

    def rec(prefix: tuple[int, ...], hit: bool) -> Iterator[tuple[int, ...]]:
        left = d - len(prefix)
        if left == 0:
            yield prefix
            return
        if left == 1 and not hit:
            # the last coordinate has to reach the shell
            yield prefix + (-r,)
            yield prefix + (r,)
            return
        for x in range(-r, r + 1):
            yield from rec(prefix + (x,), hit or abs(x) == r)

    yield from rec((), False)


@functools.lru_cache(maxsize=512)
def _shell_array(d: int, r: int) -> np.ndarray:
    return np.array(list(max_norm_shell(d, r)), dtype=np.int64).reshape(-1, d)


def strictness_witness(omega: TorsionPoint) -> tuple[int, tuple[int, ...]]:
    """Smallest max-norm of a nonzero a with omega^a = 1, and the first such a.

    Shells |a| = 1, 2, ... are scanned in lexicographic order; (order, 0, ..., 0)
    always qualifies, so the loop stops at r = order at the latest.
    """
    m = omega.numerators()
    n = omega.order
    d = omega.d
    small = n < 2**31 // (d + 1)
    mv = np.array(m, dtype=np.int64) if small else None
    for r in range(1, n + 1):
        if small and (2 * r + 1) ** d <= 1 << 22:
            A = _shell_array(d, r)
            hits = np.flatnonzero((A @ mv) % n == 0)
            if hits.size:
                return r, tuple(int(x) for x in A[hits[0]])
            continue
        for a in max_norm_shell(d, r):
            if sum(ai * mi for ai, mi in zip(a, m)) % n == 0:
                return r, a
    raise AssertionError("unreachable: (order, 0, ..., 0) is always a witness")


def strictness_degree(omega: TorsionPoint) -> int:
    return strictness_witness(omega)[0]


def euler_phi(n: int) -> int:
    result = n
    p = 2
    m = n
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def units(n: int) -> list[int]:
    """(Z/nZ)^x as ascending representatives in [1, n]; [1] for n = 1."""
    if n == 1:
        return [1]
    return [k for k in range(1, n) if math.gcd(k, n) == 1]


def galois_orbit(omega: TorsionPoint) -> list[TorsionPoint]:
    """Conjugates omega^k, gcd(k, order) = 1, in ascending k."""
    return [omega.power(k) for k in units(omega.order)]


def orbit_angles(omega: TorsionPoint) -> PointSet:
    pts = tuple(w.angles for w in galois_orbit(omega))
    return PointSet(omega.d, pts, exact=True)


def orbit_angle_array(omega: TorsionPoint) -> np.ndarray:
    """Float copy of the orbit angles, shape (phi(order), d)."""
    n = omega.order
    m = np.array(omega.numerators(), dtype=np.int64)
    ks = np.array(units(n), dtype=np.int64)
    return ((ks[:, None] * m[None, :]) % n) / n


def embed(x) -> np.ndarray:
    """e(x) = (exp(2 pi i x_1), ..., exp(2 pi i x_d)).

    Rational inputs are reduced mod 1 exactly before the float conversion,
    which keeps e(1/4) = i accurate to machine precision.
    """
    vals = []
    for c in np.atleast_1d(np.asarray(x, dtype=object)):
        if isinstance(c, (Fraction, int)):
            t = float(frac_mod1(Fraction(c)))
        else:
            t = float(c)
            if not math.isfinite(t):
                raise ValueError("embed needs finite input")
            t = t - math.floor(t)
        vals.append(complex(math.cos(2 * math.pi * t), math.sin(2 * math.pi * t)))
    return np.array(vals, dtype=complex)
