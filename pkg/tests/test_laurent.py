import math
from fractions import Fraction as F

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torsion_equidist.laurent import (
    LaurentPolynomial,
    QuadratureConfig,
    binomial_atoral,
    evaluate,
    evaluate_on_torus,
    exact_zero_on_orbit,
    log_r,
    mahler_measure,
    parse_polynomial,
    polytope_log_integral,
    simplex_map,
)
from torsion_equidist.polytope import from_vertices
from torsion_equidist.torus import make_torsion, orbit_angle_array

SQUARE = from_vertices([(0, 0), (1, 0), (1, 1), (0, 1)])
TRIANGLE = from_vertices([(0, 0), (1, 0), (0, 1)])
FAST = QuadratureConfig(n_points=2 ** 12, replicates=6)


def test_evaluate_examples():
    assert evaluate(parse_polynomial("T1 - 1", 2), (1, 5)) == 0
    assert evaluate(parse_polynomial("T1 - T2"), (1j, 1j)) == 0
    assert evaluate(parse_polynomial("T1 - 1", 2), (-1, 5)) == -2
    with pytest.raises(ZeroDivisionError):
        evaluate(parse_polynomial("T1^-1 + 1"), (0,))


def test_parse_and_json():
    P = parse_polynomial("3/2*T1^2*T2^-1 + 1")
    assert P.terms == (((0, 0), (F(1), F(0))), ((2, -1), (F(3, 2), F(0))))
    assert LaurentPolynomial.from_json(P.to_json()) == P
    Q = LaurentPolynomial.from_json('{"d":2, "terms":[{"exp":[1,0],"re":"1","im":"0"},{"exp":[0,0],"re":"-1","im":"0"}]}')
    assert Q == parse_polynomial("T1 - 1", 2)
    assert parse_polynomial("T1 - T1").is_zero
    with pytest.raises(ValueError):
        parse_polynomial("T3", 2)
    with pytest.raises(ValueError):
        parse_polynomial("x + 1")


def test_torus_evaluation_matches_pointwise():
    P = LaurentPolynomial.from_terms(2, [((1, -2), (F(1, 2), F(3))), ((0, 3), 2), ((0, 0), -1)])
    X = np.random.default_rng(1).random((20, 2))
    vals = evaluate_on_torus(P, X)
    for x, v in zip(X, vals):
        assert v == pytest.approx(evaluate(P, np.exp(2j * np.pi * x)), abs=1e-12)


def test_log_r_examples():
    assert log_r(0.5, 0) == math.log(0.5)
    assert log_r(0.5, 2) == math.log(2)
    assert log_r(1, 1) == 0
    with pytest.raises(ValueError):
        log_r(0, 1)


def test_binomial_atoral_examples():
    assert binomial_atoral(parse_polynomial("T1 - 1", 2)) is True
    assert binomial_atoral(parse_polynomial("T1 - T2")) is True
    assert binomial_atoral(parse_polynomial("T1 + T2 + 1")) is None
    assert binomial_atoral(parse_polynomial("T1 - 2", 2)) is None
    assert binomial_atoral(parse_polynomial("5", 2)) is True
    assert binomial_atoral(parse_polynomial("T1 - 1")) is None  # d = 1
    # |3 + 4i| = 5
    assert binomial_atoral(LaurentPolynomial.from_terms(2, [((1, 0), (3, 4)), ((0, 0), 5)])) is True


def test_zero_on_orbit_examples():
    P = parse_polynomial("T1 - 1", 2)
    assert not exact_zero_on_orbit(P, make_torsion([F(1, 5), F(2, 5)]))
    assert exact_zero_on_orbit(P, make_torsion([0, F(1, 3)]))
    assert exact_zero_on_orbit(parse_polynomial("T1 - T2"), make_torsion([F(1, 5), F(1, 5)]))
    # T1 + 1 vanishes at -1, i.e. angle 1/2
    assert exact_zero_on_orbit(parse_polynomial("T1 + 1", 2), make_torsion([F(1, 2), F(1, 3)]))
    assert not exact_zero_on_orbit(parse_polynomial("T1 - 2", 2), make_torsion([F(1, 2), F(1, 3)]))


@settings(max_examples=80, deadline=None)
@given(
    st.integers(2, 30), st.integers(0, 29), st.integers(0, 29),
    st.sampled_from(["T1 - 1", "T1 - T2", "T2 - 1", "T1 + T2", "T1*T2 - 1", "T1^2 + 1", "T1 - T2^-1"]),
)
def test_zero_on_orbit_matches_numeric(N, m1, m2, text):
    w = make_torsion([F(m1, N), F(m2, N)])
    P = parse_polynomial(text, 2)
    numeric = np.min(np.abs(evaluate_on_torus(P, orbit_angle_array(w)))) < 1e-9
    assert exact_zero_on_orbit(P, w) == numeric


def test_mahler_examples():
    assert mahler_measure(parse_polynomial("2")).estimate == math.log(2)
    for text in ("T1 - 1", "T1 - T2"):
        res = mahler_measure(parse_polynomial(text, 2))
        assert res.converged
        assert abs(res.estimate) < 2e-3
    with pytest.raises(ValueError):
        mahler_measure(parse_polynomial("0"))


def test_mahler_trinomial_against_one_dimensional_oracle():
    # m(1 + x + y) = int_0^1 log max(1, |1 + e(t)|) dt, by Jensen in y
    with mpmath.workdps(30):
        f = lambda t: mpmath.log(max(1, abs(1 + mpmath.expjpi(2 * t))))
        ref = float(mpmath.quad(f, [0, mpmath.mpf(1) / 3, mpmath.mpf(2) / 3, 1]))
    res = mahler_measure(parse_polynomial("T1 + T2 + 1"))
    assert abs(res.estimate - ref) <= res.error_bar + 1e-4


def test_polytope_integral_examples():
    assert abs(polytope_log_integral(parse_polynomial("T1 - 1", 2), SQUARE).estimate) < 2e-3
    assert polytope_log_integral(parse_polynomial("2", 2), TRIANGLE).estimate == pytest.approx(math.log(2) / 2)
    with pytest.raises(ValueError):
        polytope_log_integral(parse_polynomial("T1 - 1", 2), from_vertices([(0, 0), (1, 1)]))
    with pytest.raises(ValueError):
        polytope_log_integral(parse_polynomial("T1 - 1"), SQUARE)


def test_polytope_integral_against_cubature():
    P = parse_polynomial("T1 + T2 + 3")  # no zeros on the torus: smooth integrand
    T = from_vertices([(0, 0), (F(1, 2), 0), (0, F(3, 4))])
    with mpmath.workdps(20):
        g = lambda x, y: mpmath.log(abs(3 + mpmath.expjpi(2 * x) + mpmath.expjpi(2 * y)))
        ref = float(mpmath.quad(lambda x: mpmath.quad(lambda y: g(x, y), [0, 0.75 * (1 - 2 * x)]), [0, 0.5]))
    res = polytope_log_integral(P, T, FAST)
    assert res.estimate == pytest.approx(ref, abs=1e-5)


def test_simplex_map_is_uniform():
    U = np.random.default_rng(0).random((200000, 2))
    V = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    X = simplex_map(U, V)
    assert np.all(X.sum(axis=1) <= 1 + 1e-12) and np.all(X >= 0)
    assert X.mean(axis=0) == pytest.approx([1 / 3, 1 / 3], abs=5e-3)


def test_deterministic():
    P = parse_polynomial("T1 + T2 + 1")
    a = polytope_log_integral(P, TRIANGLE, FAST)
    b = polytope_log_integral(P, TRIANGLE, FAST)
    assert a.estimate == b.estimate and a.ladder == b.ladder


def test_ladder_monotone_in_r():
    res = mahler_measure(parse_polynomial("T1 - T2"))
    vals = [v for _, v in res.ladder]
    assert all(a >= b for a, b in zip(vals, vals[1:]))
    assert all(r1 > r2 for (r1, _), (r2, _) in zip(res.ladder, res.ladder[1:]))


def test_additivity_over_triangulation():
    P = parse_polynomial("T1 + T2 + 1")
    whole = polytope_log_integral(P, SQUARE, FAST)
    lower = polytope_log_integral(P, TRIANGLE, FAST)
    upper = polytope_log_integral(P, from_vertices([(1, 0), (1, 1), (0, 1)]), FAST)
    assert abs(whole.estimate - lower.estimate - upper.estimate) <= whole.error_bar + lower.error_bar + upper.error_bar


@settings(max_examples=10, deadline=None)
@given(st.integers(-3, 3), st.integers(-3, 3), st.sampled_from(["T1 + T2 + 1", "T1 - T2", "2*T1 + T2 - 1"]))
def test_monomial_invariance(a1, a2, text):
    P = parse_polynomial(text, 2)
    base = polytope_log_integral(P, TRIANGLE, FAST)
    moved = polytope_log_integral(P.times_monomial((a1, a2)), TRIANGLE, FAST)
    assert abs(base.estimate - moved.estimate) <= base.error_bar + moved.error_bar + 1e-9


@settings(max_examples=10, deadline=None)
@given(st.sampled_from([F(1, 3), F(2), F(-5, 2)]), st.sampled_from(["T1 + T2 + 1", "T1 - 1", "T1 + 3"]))
def test_scaling(c, text):
    P = parse_polynomial(text, 2)
    base = mahler_measure(P, FAST)
    scaled = mahler_measure(P.scaled(c), FAST)
    assert scaled.estimate - base.estimate == pytest.approx(math.log(abs(c)), abs=base.error_bar + scaled.error_bar + 1e-9)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_log_r_dominates_log(seed):
    P = parse_polynomial("T1 + T2 + 1")
    X = np.random.default_rng(seed).random((50, 2))
    v = np.abs(evaluate_on_torus(P, X))
    with np.errstate(divide="ignore"):
        assert np.all(log_r(0.01, v) >= np.log(v))
