"""Koksma-type error bounds for averages over point sets, and the log|P| equidistribution error."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .discrepancy import box_discrepancy
from .laurent import (
    LaurentPolynomial,
    QuadratureConfig,
    evaluate_on_torus,
    exact_zero_on_orbit,
    polytope_log_integral,
)
from .magnitude import Big
from .polytope import BoundaryCollision, Polytope, inradius_and_center, surface_area
from .torus import TorsionPoint, orbit_angles, strictness_degree, units


@dataclass(frozen=True)
class ModulusEstimate:
    value: float
    t: float
    n_pairs: int
    lower_bound: bool = True  # sampled pairs only ever under-estimate the sup


def modulus_estimate(f: Callable[[np.ndarray], np.ndarray], t: float, d: int, n_pairs: int = 4096, seed: int = 0) -> ModulusEstimate:
    """Sampled sup of |f(x) - f(y)| over pairs in [0,1]^d with max-norm distance <= t.

    ``f`` maps an (m, d) array to m values.  Half the pairs sit at distance
    exactly t along a random sign vector, the other half uniformly inside
    the t-ball; both are clipped to the cube.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t == 0:
        return ModulusEstimate(0.0, 0.0, 0)
    rng = np.random.default_rng(seed)
    X = rng.random((n_pairs, d))
    half = n_pairs // 2
    step = np.empty((n_pairs, d))
    step[:half] = t * rng.choice([-1.0, 1.0], size=(half, d))
    step[half:] = t * (2 * rng.random((n_pairs - half, d)) - 1)
    # pull x back so that x + step stays in the cube without shortening the step
    X = np.clip(X, np.maximum(0, -step), np.minimum(1, 1 - step))
    Y = np.clip(X + step, 0.0, 1.0)
    diff = np.abs(np.asarray(f(X), dtype=float) - np.asarray(f(Y), dtype=float))
    return ModulusEstimate(float(diff.max()), float(t), n_pairs)


def hypercube_koksma_bound(rho_at: float, d: int) -> float:
    if rho_at < 0:
        raise ValueError("modulus of continuity must be nonnegative")
    return (1 + 2 ** (d + 1)) * rho_at


@dataclass(frozen=True)
class PolytopeStats:
    d: int
    inradius: Fraction
    n_facets: int
    surface_upper: Fraction
    diameter: Fraction

    @classmethod
    def of(cls, delta: Polytope) -> "PolytopeStats":
        if not delta.full_dimensional:
            raise ValueError("the bound needs a full-dimensional polytope")
        return cls(delta.d, inradius_and_center(delta)[0], delta.n_facets, surface_area(delta).upper, delta.diameter)


@dataclass(frozen=True)
class KoksmaBoundReport:
    rho_term: float
    inradius_term: float
    isotropic_term: float
    shell_term: float
    total: float
    D: float
    M: float
    rho_at: float
    stats: PolytopeStats
    rho_source: str = "analytic"


def polytope_koksma_bound(delta: Polytope | PolytopeStats, D, M: float, rho_at: float, rho_source: str = "analytic") -> KoksmaBoundReport:
    """Error bound for (1/n) sum_{x_i in delta} f(x_i) - int_delta f at box discrepancy D.

    ``rho_at`` is the modulus of continuity of f at D^(1/(d+1)) and M bounds |f|.
    """
    D = float(D)
    if not 0 <= D <= 1:
        raise ValueError(f"discrepancy must lie in [0, 1] (got {D})")
    if M < 0 or rho_at < 0:
        raise ValueError("M and rho_at must be nonnegative")
    st = delta if isinstance(delta, PolytopeStats) else PolytopeStats.of(delta)
    d = st.d
    a = 1 + 2 ** (d + 1)
    root = D ** (1.0 / (2 * d + 2))
    rho_term = a * rho_at
    inr = a * root / float(st.inradius)
    iso = (4 * d * math.sqrt(d) + 1) * D ** (1.0 / d) * st.n_facets
    shell = 2 * float(st.diameter) * float(st.surface_upper) * root / math.sqrt(d)
    total = rho_term + M * (inr + iso + shell)
    return KoksmaBoundReport(rho_term, inr, iso, shell, total, D, float(M), float(rho_at), st, rho_source)


# ---- equidistribution of log|P| --------------------------------------------


class ZeroOnOrbit(ValueError):
    pass


@dataclass
class EquidistResult:
    error: float
    lhs_sum: float
    integral: float
    integral_error_bar: float
    count: int
    n: int
    boundary: list = field(default_factory=list)


def orbit_members(delta: Polytope, omega: TorsionPoint, on_boundary: str = "error"):
    """Orbit angles (exact) lying in delta, plus those found on its boundary.

    on_boundary: "error" raises, "include" counts them as inside, "exclude" drops them.
    """
    if on_boundary not in ("error", "include", "exclude"):
        raise ValueError("on_boundary must be error, include or exclude")
    inside, edge = [], []
    for x in orbit_angles(omega).points:
        if delta.contains(x):
            if delta.contains_strict(x):
                inside.append(x)
            else:
                edge.append(x)
    if edge and on_boundary == "error":
        x = edge[0]
        raise BoundaryCollision(f"orbit angle ({', '.join(str(c) for c in x)}) lies on the polytope boundary")
    if on_boundary == "include":
        inside = inside + edge
    return inside, edge


def _check_no_zero(P: LaurentPolynomial, omega: TorsionPoint) -> None:
    if exact_zero_on_orbit(P, omega):
        raise ZeroOnOrbit(f"a Galois conjugate of {omega} is a zero of {P}")


def orbit_lhs(P: LaurentPolynomial, delta: Polytope, omega: TorsionPoint, on_boundary: str = "error") -> tuple[float, int, list]:
    """(1/n) sum of log|P(e(x))| over orbit angles x in delta; also the count and boundary hits."""
    if P.d != omega.d or delta.d != omega.d:
        raise ValueError("dimensions of P, polytope and torsion point differ")
    _check_no_zero(P, omega)
    inside, edge = orbit_members(delta, omega, on_boundary)
    n = len(units(omega.order))
    if not inside:
        return 0.0, 0, edge
    X = np.array([[float(c) for c in x] for x in inside])
    vals = np.log(np.abs(evaluate_on_torus(P, X)))
    return math.fsum(vals.tolist()) / n, len(inside), edge


def equidist_error(
    P: LaurentPolynomial,
    delta: Polytope,
    omega: TorsionPoint,
    cfg: QuadratureConfig | None = None,
    on_boundary: str = "error",
    integral=None,
) -> EquidistResult:
    """|(1/n) sum_{conjugates in delta} log|P| - int_delta log|P(e(x))| dx|.

    ``integral`` may pass a precomputed QuadratureResult for delta.
    """
    lhs, count, edge = orbit_lhs(P, delta, omega, on_boundary)
    q = integral if integral is not None else polytope_log_integral(P, delta, cfg)
    n = len(units(omega.order))
    return EquidistResult(abs(lhs - q.estimate), lhs, q.estimate, q.error_bar, count, n, edge)


def log_r_koksma_total(P: LaurentPolynomial, stats: PolytopeStats, D: float) -> float:
    """The polytope bound applied to log_r|P(e(x))| with r = D^(1/(4d+4)).

    log_r|P| is bounded by max(|log r|, |log sum|c||) and is Lipschitz with
    constant Lip(|P|)/r, so its modulus at D^(1/(d+1)) is at most that times
    D^(1/(d+1)).
    """
    D = float(D)
    if D <= 0:
        return 0.0
    d = stats.d
    r = D ** (1.0 / (4 * d + 4))
    M = max(abs(math.log(r)), abs(math.log(P.coeff_abs_sum())))
    rho = P.lipschitz_abs() / r * D ** (1.0 / (d + 1))
    return polytope_koksma_bound(stats, D, M, rho).total


def kappa_shape(delta: int, kappa) -> float:
    """delta^(-kappa); kappa may be a Fraction or a Big too small to write down."""
    if isinstance(kappa, Big):
        lg = kappa.log2()
        k = 0.0 if lg.huge or float(lg) < -1000 else 2.0 ** float(lg)
    else:
        k = float(kappa)
    return math.exp(-k * math.log(delta))


def default_kappa(P: LaurentPolynomial):
    from .constants import kappa

    return kappa(P.d, max(2, len(P.terms)))


CSV_COLUMNS = ["order", "delta", "n", "count_in_polytope", "lhs_sum", "integral", "error", "D", "koksma_total", "kappa_shape"]

CONSTANT_NOTE = "decay trend only: the implied constant depending on the polytope and P is not explicit"


def convergence_experiment(
    P: LaurentPolynomial,
    delta: Polytope,
    points: Sequence[TorsionPoint],
    cfg: QuadratureConfig | None = None,
    kappa=None,
    on_boundary: str = "error",
    seed: int = 0,
) -> dict:
    """One row per torsion point; the strictness degrees must increase strictly."""
    deltas = [strictness_degree(w) for w in points]
    for a, b in zip(deltas, deltas[1:]):
        if b <= a:
            raise ValueError(f"strictness degrees must increase strictly along the sequence ({a} then {b})")
    q = polytope_log_integral(P, delta, cfg)
    stats = PolytopeStats.of(delta)
    if kappa is None:
        kappa = default_kappa(P)
    rows = []
    for w, dw in zip(points, deltas):
        res = equidist_error(P, delta, w, on_boundary=on_boundary, integral=q)
        rep = box_discrepancy(orbit_angles(w), with_isotropic=False, seed=seed)
        rows.append(
            {
                "order": w.order,
                "delta": dw,
                "n": res.n,
                "count_in_polytope": res.count,
                "lhs_sum": res.lhs_sum,
                "integral": res.integral,
                "error": res.error,
                "D": float(rep.D),
                "koksma_total": log_r_koksma_total(P, stats, float(rep.D)),
                "kappa_shape": kappa_shape(dw, kappa),
            }
        )
    trend = len(rows) < 2 or rows[-1]["error"] < rows[0]["error"]
    return {
        "rows": rows,
        "trend_ok": trend,
        "integral_error_bar": q.error_bar,
        "kappa": str(kappa),
        "note": CONSTANT_NOTE,
    }
