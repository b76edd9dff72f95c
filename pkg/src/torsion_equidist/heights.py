"""Heights of the point [w2^-1 - w1^-1 : 1 - w2^-1 : w1^-1 - 1] attached to a torsion point w of the plane.

The archimedean part averages log max(|w2^k - w1^k|, |w2^k - 1|, |w1^k - 1|)
over the Galois orbit; the finite places contribute -Lambda(n)/phi(n).  The
limit value 2 zeta(3) / (3 zeta(2)) is the integral of the same log-max over
the unit square, which splits into twelve triangles on each of which one of
T1 - 1, T2 - 1, T1 - T2 realises the maximum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from .laurent import LaurentPolynomial, QuadratureConfig, evaluate_on_torus, parse_polynomial, polytope_log_integral
from .polytope import BoundaryCollision, Polytope, from_vertices
from .torus import TorsionPoint, euler_phi, make_torsion, strictness_degree, units

TARGET = float(2 * mpmath.zeta(3) / (3 * mpmath.zeta(2)))


def _require_planar(omega: TorsionPoint) -> None:
    if omega.d != 2:
        raise ValueError("heights are defined for torsion points of the plane (d = 2)")
    if omega.is_identity():
        raise ValueError("the identity (1, 1) gives no projective point")


def intersection_point(omega: TorsionPoint, check: bool = True) -> tuple[complex, complex, complex]:
    """(w2^-1 - w1^-1, 1 - w2^-1, w1^-1 - 1), checked against both linear forms."""
    _require_planar(omega)
    q1, q2 = (float(q) for q in omega.angles)
    w1i = complex(math.cos(2 * math.pi * q1), -math.sin(2 * math.pi * q1))
    w2i = complex(math.cos(2 * math.pi * q2), -math.sin(2 * math.pi * q2))
    x, y, z = w2i - w1i, 1 - w2i, w1i - 1
    if check:
        scale = max(abs(x), abs(y), abs(z))
        if abs(x + y + z) > 1e-12 * scale or abs(x + w1i * y + w2i * z) > 1e-12 * scale:
            raise ArithmeticError("intersection point fails its defining equations")
    return x, y, z


def _chord(m: int, n: int) -> float:
    """|e(m/n) - 1| = 2 |sin(pi m/n)|, with m reduced mod n first."""
    return 2.0 * abs(math.sin(math.pi * (m % n) / n))


def orbit_log_max(omega: TorsionPoint) -> list[float]:
    """Per conjugate k (ascending): log max(|w2^k - w1^k|, |w2^k - 1|, |w1^k - 1|)."""
    _require_planar(omega)
    n = omega.order
    m1, m2 = omega.numerators()
    out = []
    for k in units(n):
        a, b = k * m1, k * m2
        top = max(_chord(b - a, n), _chord(b, n), _chord(a, n))
        if top == 0:
            raise ArithmeticError(f"conjugate k={k} is the identity")
        out.append(math.log(top))
    return out


def archimedean_height(omega: TorsionPoint) -> float:
    vals = orbit_log_max(omega)
    return math.fsum(vals) / len(vals)


def prime_power(n: int) -> tuple[int, int] | None:
    """(p, e) when n = p^e with e >= 1, else None."""
    if n < 2:
        return None
    p = 2
    while p * p <= n:
        if n % p == 0:
            break
        p += 1
    else:
        return n, 1
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return (p, e) if n == 1 else None


def von_mangoldt(n: int) -> float:
    pe = prime_power(n)
    return math.log(pe[0]) if pe else 0.0


def nonarchimedean_height(omega: TorsionPoint) -> float:
    """-Lambda(n)/phi(n) for n the order of omega."""
    _require_planar(omega)
    n = omega.order
    pe = prime_power(n)
    if pe is None:
        return 0.0
    p, e = pe
    return -math.log(p) / (p ** (e - 1) * (p - 1))


@dataclass(frozen=True)
class HeightReport:
    omega: TorsionPoint
    order: int
    delta: int
    h_arch: float
    h_nonarch: float
    h_total: float
    target_gap: float


def total_height(omega: TorsionPoint) -> HeightReport:
    arch = archimedean_height(omega)
    non = nonarchimedean_height(omega)
    total = arch + non
    return HeightReport(omega, omega.order, strictness_degree(omega), arch, non, total, abs(total - TARGET))


# ---- the twelve triangles ------------------------------------------------

# Lattice coordinates (to be divided by 6) and the binomial that realises the
# maximum on each triangle, verified by sampling in the test suite.
_TRIANGLES = [
    ("Omega_11", [(3, 0), (0, 0), (4, 2)], "T1 - 1"),
    ("Omega_12", [(4, 2), (0, 0), (3, 3)], "T1 - 1"),
    ("Omega_13", [(6, 6), (2, 4), (3, 6)], "T1 - 1"),
    ("Omega_14", [(2, 4), (3, 3), (6, 6)], "T1 - 1"),
    ("Omega_21", [(6, 0), (4, 2), (6, 3)], "T1 - T2"),
    ("Omega_22", [(6, 3), (4, 2), (6, 6)], "T2 - 1"),
    ("Omega_23", [(0, 0), (2, 4), (0, 3)], "T2 - 1"),
    ("Omega_24", [(0, 3), (2, 4), (0, 6)], "T1 - T2"),
    ("Omega_31", [(3, 0), (6, 0), (4, 2)], "T1 - T2"),
    ("Omega_32", [(4, 2), (6, 6), (3, 3)], "T2 - 1"),
    ("Omega_33", [(3, 3), (0, 0), (2, 4)], "T2 - 1"),
    ("Omega_34", [(0, 6), (2, 4), (3, 6)], "T1 - T2"),
]


@dataclass(frozen=True)
class Triangle:
    name: str
    polytope: Polytope
    binomial: LaurentPolynomial
    label: str


def triangle_partition() -> list[Triangle]:
    out = []
    for name, pts, poly in _TRIANGLES:
        P = from_vertices([(Fraction(a, 6), Fraction(b, 6)) for a, b in pts])
        out.append(Triangle(name, P, parse_polynomial(poly, 2), poly))
    return out


def log_max_distances(X) -> np.ndarray:
    """log max(|e(x2) - e(x1)|, |e(x2) - 1|, |e(x1) - 1|) for rows x of X."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    d12 = 2 * np.abs(np.sin(np.pi * (X[:, 1] - X[:, 0])))
    d2 = 2 * np.abs(np.sin(np.pi * X[:, 1]))
    d1 = 2 * np.abs(np.sin(np.pi * X[:, 0]))
    with np.errstate(divide="ignore"):
        return np.log(np.maximum(np.maximum(d12, d2), d1))


def limit_integral(cfg: QuadratureConfig | None = None) -> tuple[float, float, list[tuple[str, float]]]:
    """Sum over the twelve triangles of the integral of log|binomial|; (total, error bar, parts)."""
    parts = []
    total = err = 0.0
    for tri in triangle_partition():
        res = polytope_log_integral(tri.binomial, tri.polytope, cfg)
        parts.append((tri.name, res.estimate))
        total += res.estimate
        err += res.error_bar
    return total, err, parts


def triangle_decomposition(omega: TorsionPoint, triangles: Sequence[Triangle] | None = None) -> dict[str, float]:
    """Per triangle: (1/n) sum of log|binomial(e(x))| over orbit angles x inside it.

    Raises BoundaryCollision when an orbit angle sits on a triangle boundary,
    since the closed triangles overlap there.
    """
    _require_planar(omega)
    triangles = triangles if triangles is not None else triangle_partition()
    n = omega.order
    m1, m2 = omega.numerators()
    sums: dict[str, list[float]] = {t.name: [] for t in triangles}
    for k in units(n):
        x = (Fraction(k * m1 % n, n), Fraction(k * m2 % n, n))
        home = None
        for t in triangles:
            if t.polytope.contains(x):
                if not t.polytope.contains_strict(x):
                    raise BoundaryCollision(f"orbit angle {x[0]},{x[1]} lies on the boundary of {t.name}")
                home = t
                break
        if home is None:
            raise AssertionError(f"orbit angle {x} not covered by the partition")
        val = evaluate_on_torus(home.binomial, [[float(x[0]), float(x[1])]])[0]
        sums[home.name].append(math.log(abs(val)))
    return {name: math.fsum(v) / len(units(n)) for name, v in sums.items()}


# ---- sequences --------------------------------------------------------------


def primes_between(lo: int, hi: int) -> list[int]:
    if hi < 2:
        return []
    sieve = np.ones(hi + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(hi ** 0.5) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return [int(p) for p in np.nonzero(sieve)[0] if p >= lo]


def golden_sequence(primes: Sequence[int], ratio: float = 0.618) -> list[TorsionPoint]:
    """w_p = (1/p, round(ratio p)/p) for each prime p."""
    return [make_torsion([Fraction(1, p), Fraction(int(round(ratio * p)), p)]) for p in primes]


def strict_subsequence(points: Sequence[TorsionPoint]) -> list[TorsionPoint]:
    """Keep the points whose strictness degree exceeds every earlier one."""
    out, best = [], 0
    for w in points:
        delta = strictness_degree(w)
        if delta > best:
            out.append(w)
            best = delta
    return out


def check_strictly_increasing(deltas: Sequence[int]) -> None:
    for a, b in zip(deltas, deltas[1:]):
        if b <= a:
            raise ValueError(f"strictness degrees must increase strictly along the sequence ({a} then {b})")


def height_convergence_experiment(points: Sequence[TorsionPoint], decompose: bool = True, kappa=None) -> dict:
    """Rows (order, delta, h_arch, h_nonarch, h_total, gap) plus the per-triangle split.

    ``kappa`` adds a delta^-kappa column; for the tiny exponents that arise it
    is 1 to within double precision.
    """
    reports = [total_height(w) for w in points]
    check_strictly_increasing([r.delta for r in reports])
    rows = []
    for r in reports:
        row = {
            "omega": str(r.omega),
            "order": r.order,
            "delta": r.delta,
            "h_arch": r.h_arch,
            "h_nonarch": r.h_nonarch,
            "h_total": r.h_total,
            "gap": r.target_gap,
        }
        if kappa is not None:
            row["kappa_shape"] = float(mpmath.power(r.delta, -mpmath.mpf(kappa.numerator) / kappa.denominator))
        if decompose:
            try:
                parts = triangle_decomposition(r.omega)
                row["split_sum"] = math.fsum(parts.values())
                row.update({f"split_{k}": v for k, v in parts.items()})
            except BoundaryCollision as exc:
                row["split_sum"] = None
                row["boundary_collision"] = str(exc)
        rows.append(row)
    trend = len(rows) < 2 or rows[-1]["gap"] < rows[0]["gap"]
    return {"rows": rows, "target": TARGET, "trend_ok": trend}


def nonarch_bound(n: int) -> float:
    """2 log(n)/n, the size bound for the finite-place contribution."""
    return 2 * math.log(n) / n


__all__ = [
    "TARGET",
    "HeightReport",
    "Triangle",
    "BoundaryCollision",
    "archimedean_height",
    "nonarchimedean_height",
    "total_height",
    "intersection_point",
    "triangle_partition",
    "triangle_decomposition",
    "limit_integral",
    "golden_sequence",
    "strict_subsequence",
    "primes_between",
    "height_convergence_experiment",
    "euler_phi",
]
