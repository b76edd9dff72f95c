"""Laurent polynomials with Gaussian-rational coefficients, evaluated on the unit torus.

Integrals of log|P(e(x))| are estimated by scrambled Sobol quasi-Monte Carlo
with a truncation ladder: log is replaced by log max(r, .) for r = 2^-j and
j is increased until consecutive estimates agree.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from scipy.stats import qmc

from .polytope import Polytope
from .rationals import fraction_str, to_fraction
from .torus import TorsionPoint, orbit_angle_array, units

Coeff = tuple[Fraction, Fraction]  # (real, imaginary)
Exponent = tuple[int, ...]


@dataclass(frozen=True)
class LaurentPolynomial:
    d: int
    terms: tuple[tuple[Exponent, Coeff], ...]

    @classmethod
    def from_terms(cls, d: int, terms: Iterable) -> "LaurentPolynomial":
        """Accepts (exponent, coeff) pairs; coeff is a rational, a (re, im) pair or a complex."""
        acc: dict[Exponent, Coeff] = {}
        for exp, c in terms:
            exp = tuple(int(e) for e in exp)
            if len(exp) != d:
                raise ValueError(f"exponent {exp} does not have {d} entries")
            re_, im_ = _coeff(c)
            old = acc.get(exp, (Fraction(0), Fraction(0)))
            acc[exp] = (old[0] + re_, old[1] + im_)
        kept = tuple(sorted((e, c) for e, c in acc.items() if c != (0, 0)))
        return cls(d, kept)

    @classmethod
    def constant(cls, c, d: int = 1) -> "LaurentPolynomial":
        return cls.from_terms(d, [((0,) * d, c)])

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def exponents(self) -> np.ndarray:
        return np.array([e for e, _ in self.terms], dtype=np.int64).reshape(len(self.terms), self.d)

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([complex(float(a), float(b)) for _, (a, b) in self.terms], dtype=complex)

    def coeff_abs_sum(self) -> float:
        return float(np.abs(self.coefficients).sum())

    def times_monomial(self, a: Sequence[int]) -> "LaurentPolynomial":
        return LaurentPolynomial.from_terms(self.d, [(tuple(x + y for x, y in zip(e, a)), c) for e, c in self.terms])

    def scaled(self, c) -> "LaurentPolynomial":
        cr, ci = _coeff(c)
        return LaurentPolynomial.from_terms(self.d, [(e, (a * cr - b * ci, a * ci + b * cr)) for e, (a, b) in self.terms])

    def lipschitz_abs(self) -> float:
        """Lipschitz constant of x -> |P(e(x))| for the max-norm on x."""
        return 2 * math.pi * sum(abs(complex(float(a), float(b))) * sum(abs(x) for x in e) for e, (a, b) in self.terms)

    def to_json(self) -> str:
        return json.dumps(
            {
                "d": self.d,
                "terms": [
                    {"exp": list(e), "re": fraction_str(a), "im": fraction_str(b)} for e, (a, b) in self.terms
                ],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "LaurentPolynomial":
        data = json.loads(text)
        return cls.from_terms(
            int(data["d"]),
            [(t["exp"], (t.get("re", "0"), t.get("im", "0"))) for t in data["terms"]],
        )

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, (a, b) in self.terms:
            c = fraction_str(a) if b == 0 else f"({fraction_str(a)}{'+' if b >= 0 else '-'}{fraction_str(abs(b))}i)"
            mono = "*".join(f"T{i + 1}" + (f"^{k}" if k != 1 else "") for i, k in enumerate(e) if k)
            if not mono:
                parts.append(c)
            elif c == "1":
                parts.append(mono)
            elif c == "-1":
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def _coeff(c) -> Coeff:
    if isinstance(c, tuple):
        return to_fraction(c[0]), to_fraction(c[1])
    if isinstance(c, complex):
        return to_fraction(c.real), to_fraction(c.imag)
    return to_fraction(c), Fraction(0)


_TERM = re.compile(r"([+-]?)\s*([^+-]+)")


def parse_polynomial(text: str, d: int | None = None) -> LaurentPolynomial:
    """Parse strings such as "T1 - 1", "T1 - T2", "2", "3/2*T1^2*T2^-1 + 1".

    Only real rational coefficients are accepted here; use JSON for complex ones.
    """
    src = text.replace(" ", "")
    if not src:
        raise ValueError("empty polynomial")
    # protect negative exponents from the term splitter
    src = src.replace("^-", "^~")
    terms = []
    max_var = 0
    for sign, body in _TERM.findall(src):
        coeff = Fraction(-1 if sign == "-" else 1)
        powers: dict[int, int] = {}
        for factor in body.split("*"):
            m = re.fullmatch(r"T(\d+)(?:\^(~?\d+))?", factor)
            if m:
                var = int(m.group(1))
                if var < 1:
                    raise ValueError(f"variables are numbered from T1, got {factor}")
                k = int(m.group(2).replace("~", "-")) if m.group(2) else 1
                powers[var] = powers.get(var, 0) + k
                max_var = max(max_var, var)
            else:
                try:
                    coeff *= Fraction(factor)
                except ValueError as exc:
                    raise ValueError(f"cannot parse factor {factor!r} in {text!r}") from exc
        terms.append((powers, coeff))
    if d is None:
        d = max(max_var, 1)
    elif max_var > d:
        raise ValueError(f"polynomial uses T{max_var} but d = {d}")
    return LaurentPolynomial.from_terms(
        d, [(tuple(p.get(i + 1, 0) for i in range(d)), c) for p, c in terms]
    )


# ---- evaluation -------------------------------------------------------


def evaluate(P: LaurentPolynomial, z: Sequence[complex]) -> complex:
    """sum c_a z^a, with real and imaginary parts summed by math.fsum."""
    z = [complex(v) for v in z]
    if len(z) != P.d:
        raise ValueError("point has wrong dimension")
    re_parts, im_parts = [], []
    for e, (a, b) in P.terms:
        mono = complex(1.0)
        for zi, k in zip(z, e):
            if k < 0 and zi == 0:
                raise ZeroDivisionError("negative exponent at a zero coordinate")
            mono *= zi ** k
        v = complex(float(a), float(b)) * mono
        re_parts.append(v.real)
        im_parts.append(v.imag)
    return complex(math.fsum(re_parts), math.fsum(im_parts))


def evaluate_on_torus(P: LaurentPolynomial, X) -> np.ndarray:
    """P(e(x)) for each row x of X (angles), shape (m, d) -> (m,).

    Phases <a, x> are reduced mod 1 before the trigonometric call.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if not P.terms:
        return np.zeros(len(X), dtype=complex)
    phase = X @ P.exponents.T.astype(float)
    phase -= np.floor(phase)
    return np.exp(2j * np.pi * phase) @ P.coefficients


def log_abs_on_torus(P: LaurentPolynomial, X) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(np.abs(evaluate_on_torus(P, X)))


def log_r(r: float, v) -> np.ndarray | float:
    """log max(r, v)."""
    if r <= 0:
        raise ValueError("r must be positive")
    if np.ndim(v) == 0:
        return math.log(max(r, float(v)))
    return np.log(np.maximum(r, v))


# ---- atorality and zeros on Galois orbits ------------------------------


def binomial_atoral(P: LaurentPolynomial) -> bool | None:
    """True for nonzero constants and equal-modulus binomials in d >= 2; None means unknown."""
    if len(P.terms) == 1 and all(k == 0 for k in P.terms[0][0]):
        return True
    if P.d >= 2 and len(P.terms) == 2:
        (_, (a1, b1)), (_, (a2, b2)) = P.terms
        if a1 * a1 + b1 * b1 == a2 * a2 + b2 * b2:
            return True
    return None


_UNIT_ANGLES = {
    (Fraction(1), Fraction(0)): Fraction(0),
    (Fraction(0), Fraction(1)): Fraction(1, 4),
    (Fraction(-1), Fraction(0)): Fraction(1, 2),
    (Fraction(0), Fraction(-1)): Fraction(3, 4),
}


def _root_of_unity_angle(c: Coeff) -> Fraction | None:
    """Angle t with c = e(t) when the Gaussian rational c is a root of unity.

    The only Gaussian rationals that are roots of unity are 1, i, -1, -i.
    """
    return _UNIT_ANGLES.get((Fraction(c[0]), Fraction(c[1])))


def _cdiv(x: Coeff, y: Coeff) -> Coeff:
    a, b = x
    c, d = y
    den = c * c + d * d
    return ((a * c + b * d) / den, (b * c - a * d) / den)


def exact_zero_on_orbit(P: LaurentPolynomial, omega: TorsionPoint, floor: float = 1e-12) -> bool:
    """Whether some Galois conjugate of omega is a zero of P.

    For a binomial c1 T^m + c2 T^n the test is exact: a zero needs
    e(<m - n, k q>) = -c2/c1, which forces -c2/c1 to be a root of unity.
    Other polynomials fall back to |P| < floor on the orbit.
    """
    if P.is_zero:
        return True
    if len(P.terms) == 1:
        return False
    if len(P.terms) == 2:
        (m, c1), (n_, c2) = P.terms
        ratio = _cdiv((-c2[0], -c2[1]), c1)
        theta = _root_of_unity_angle(ratio)
        if theta is None:
            return False
        diff = [a - b for a, b in zip(m, n_)]
        nums = omega.numerators()
        order = omega.order
        t = sum(a * x for a, x in zip(diff, nums))
        for k in units(order):
            if Fraction(k * t, order) - theta == int(Fraction(k * t, order) - theta):
                return True
        return False
    return bool(np.min(np.abs(evaluate_on_torus(P, orbit_angle_array(omega)))) < floor)


# ---- quadrature -------------------------------------------------------


@dataclass
class QuadratureConfig:
    n_points: int = 2 ** 14  # per replicate and per simplex; rounded to a power of two
    replicates: int = 8
    seed: int = 0
    tol: float = 1e-3
    j_min: int = 4
    j_max: int = 20


@dataclass
class QuadratureResult:
    estimate: float
    stderr: float
    ladder: list[tuple[float, float]] = field(default_factory=list)
    converged: bool = True
    r_final: float | None = None

    @property
    def error_bar(self) -> float:
        """Conservative half-width: three standard errors plus the last ladder step."""
        step = abs(self.ladder[-1][1] - self.ladder[-2][1]) if len(self.ladder) > 1 else 0.0
        return 3 * self.stderr + step


def _sobol(d: int, n: int, seed: int) -> np.ndarray:
    m = max(0, int(math.ceil(math.log2(max(n, 1)))))
    return qmc.Sobol(d, scramble=True, seed=seed).random_base2(m)


def simplex_map(U: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Push uniform points of [0,1]^k onto the simplex with vertex rows V (k+1 of them).

    Sorted coordinates give uniform spacings, which are uniform barycentric weights.
    """
    S = np.sort(U, axis=1)
    k = U.shape[1]
    lam = np.empty((len(U), k + 1))
    lam[:, 0] = S[:, 0]
    lam[:, 1:k] = np.diff(S, axis=1)
    lam[:, k] = 1.0 - S[:, -1]
    return lam @ V


def _ladder(values_by_rep: list[tuple[np.ndarray, np.ndarray]], cfg: QuadratureConfig) -> QuadratureResult:
    """values_by_rep: per replicate (|P| samples, weights summing to the region volume)."""

    def est(r: float | None) -> np.ndarray:
        out = []
        for absP, w in values_by_rep:
            with np.errstate(divide="ignore"):
                vals = np.log(absP) if r is None else np.log(np.maximum(r, absP))
            out.append(float(np.dot(w, vals)))
        return np.array(out)

    if all(np.all(a > 0) and np.min(a) > 2.0 ** -cfg.j_min for a, _ in values_by_rep):
        reps = est(None)
        mean = float(reps.mean())
        se = float(reps.std(ddof=1) / math.sqrt(len(reps))) if len(reps) > 1 else 0.0
        return QuadratureResult(mean, se, [(0.0, mean)], True, None)
    ladder = []
    prev = None
    converged = False
    reps = None
    r = None
    for j in range(cfg.j_min, cfg.j_max + 1):
        r = 2.0 ** -j
        reps = est(r)
        mean = float(reps.mean())
        ladder.append((r, mean))
        if prev is not None and abs(mean - prev) < cfg.tol / 2:
            converged = True
            break
        prev = mean
    se = float(reps.std(ddof=1) / math.sqrt(len(reps))) if len(reps) > 1 else 0.0
    return QuadratureResult(ladder[-1][1], se, ladder, converged, r)


def mahler_measure(P: LaurentPolynomial, cfg: QuadratureConfig | None = None) -> QuadratureResult:
    """Estimate of m(P), the mean of log|P(e(x))| over the unit cube."""
    cfg = cfg or QuadratureConfig()
    if P.is_zero:
        raise ValueError("the zero polynomial has no Mahler measure")
    if len(P.terms) == 1:
        a, b = P.terms[0][1]
        return QuadratureResult(0.5 * math.log(float(a * a + b * b)), 0.0, [], True, None)
    data = []
    for rep in range(cfg.replicates):
        X = _sobol(P.d, cfg.n_points, cfg.seed + rep)
        data.append((np.abs(evaluate_on_torus(P, X)), np.full(len(X), 1.0 / len(X))))
    return _ladder(data, cfg)


def polytope_log_integral(P: LaurentPolynomial, delta: Polytope, cfg: QuadratureConfig | None = None) -> QuadratureResult:
    """Estimate of the integral of log|P(e(x))| over a full-dimensional polytope."""
    cfg = cfg or QuadratureConfig()
    if P.is_zero:
        raise ValueError("log|0| is not integrable")
    if not delta.full_dimensional:
        raise ValueError("integration needs a full-dimensional polytope")
    if delta.d != P.d:
        raise ValueError("polytope and polynomial dimensions differ")
    vol = float(delta.volume)
    if len(P.terms) == 1:
        a, b = P.terms[0][1]
        return QuadratureResult(0.5 * math.log(float(a * a + b * b)) * vol, 0.0, [], True, None)
    simplices = []
    for s in delta.triangulation:
        V = np.array([[float(c) for c in delta.vertices[i]] for i in s])
        E = V[1:] - V[0]
        simplices.append((V, abs(np.linalg.det(E)) / math.factorial(delta.d)))
    data = []
    for rep in range(cfg.replicates):
        U = _sobol(delta.d, cfg.n_points, cfg.seed + rep)
        absP, w = [], []
        for V, sv in simplices:
            X = simplex_map(U, V)
            absP.append(np.abs(evaluate_on_torus(P, X)))
            w.append(np.full(len(X), sv / len(X)))
        data.append((np.concatenate(absP), np.concatenate(w)))
    return _ladder(data, cfg)
