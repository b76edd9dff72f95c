import csv
import io
import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torsion_equidist.discrepancy import box_discrepancy_value, isotropic_upper
from torsion_equidist.koksma import (
    CSV_COLUMNS,
    PolytopeStats,
    ZeroOnOrbit,
    convergence_experiment,
    equidist_error,
    hypercube_koksma_bound,
    kappa_shape,
    modulus_estimate,
    orbit_members,
    polytope_koksma_bound,
)
from torsion_equidist.laurent import QuadratureConfig, parse_polynomial
from torsion_equidist.polytope import BoundaryCollision, continuous_characteristic_array, from_vertices, shrink
from torsion_equidist.torus import make_torsion, orbit_angles

SQUARE = from_vertices([(0, 0), (1, 0), (1, 1), (0, 1)])
LOWER = from_vertices([(0, 0), (1, 0), (0, 1)])
FAST = QuadratureConfig(n_points=2 ** 12, replicates=6)


def golden(p):
    return make_torsion([F(1, p), F(round(0.618 * p), p)])


def test_modulus_examples():
    const = lambda X: np.zeros(len(X))
    assert modulus_estimate(const, 0.1, 2).value == 0
    est = modulus_estimate(lambda X: X[:, 0], 0.25, 1)
    assert est.lower_bound and est.value == pytest.approx(0.25, abs=1e-9)
    res = shrink(SQUARE, F(1, 2))
    chi = lambda X: continuous_characteristic_array(SQUARE, F(1, 2), X, res.center)
    for t in (0.01, 0.05, 0.1):
        v = modulus_estimate(chi, t, 2, seed=3).value
        assert 0 < v <= 4 * t + 1e-12


def test_hypercube_bound():
    assert hypercube_koksma_bound(0, 2) == 0
    assert hypercube_koksma_bound(1, 1) == 5
    assert hypercube_koksma_bound(0.1, 2) == pytest.approx(0.9)


def test_polytope_bound_unit_square():
    D = 1e-4
    rep = polytope_koksma_bound(SQUARE, D, 1.0, 0.0)
    assert rep.rho_term == 0
    assert rep.inradius_term == pytest.approx(9 * D ** (1 / 6) / 0.5)
    assert rep.isotropic_term == pytest.approx((8 * math.sqrt(2) + 1) * 1e-2 * 4)
    assert rep.shell_term == pytest.approx(2 * 1 * 4 * D ** (1 / 6) / math.sqrt(2))
    assert rep.total == pytest.approx(rep.rho_term + rep.M * (rep.inradius_term + rep.isotropic_term + rep.shell_term))


def test_polytope_bound_degenerate_inputs():
    assert polytope_koksma_bound(SQUARE, 0, 5.0, 0.0).total == 0
    assert polytope_koksma_bound(SQUARE, 0.3, 0.0, 0.0).total == 0
    for D in (-0.1, 1.5):
        with pytest.raises(ValueError):
            polytope_koksma_bound(SQUARE, D, 1.0, 0.0)


@settings(max_examples=60, deadline=None)
@given(
    st.floats(0, 1), st.floats(0, 1), st.floats(0, 10), st.floats(0, 10), st.floats(0, 10), st.floats(0, 10)
)
def test_polytope_bound_monotone(D1, D2, M1, M2, r1, r2):
    stats = PolytopeStats.of(LOWER)
    lo = polytope_koksma_bound(stats, min(D1, D2), min(M1, M2), min(r1, r2))
    hi = polytope_koksma_bound(stats, max(D1, D2), max(M1, M2), max(r1, r2))
    assert lo.total <= hi.total
    for rep in (lo, hi):
        assert min(rep.rho_term, rep.inradius_term, rep.isotropic_term, rep.shell_term) >= 0


def test_equidist_fifth_roots():
    res = equidist_error(parse_polynomial("T1 - 1", 2), SQUARE, make_torsion([F(1, 5), F(2, 5)]), FAST)
    assert res.lhs_sum == pytest.approx(math.log(5) / 4, abs=1e-12)
    assert res.count == 4 and res.n == 4
    assert abs(res.integral) < 2e-3
    assert res.error == pytest.approx(math.log(5) / 4, abs=2e-3)


def test_equidist_identity_point():
    P = parse_polynomial("T1 + T2 + 1")
    w = make_torsion([0, 0])
    with pytest.raises(BoundaryCollision):
        equidist_error(P, SQUARE, w, FAST)
    res = equidist_error(P, SQUARE, w, FAST, on_boundary="include")
    assert res.lhs_sum == pytest.approx(math.log(3)) and res.n == 1
    assert res.boundary


def test_equidist_zero_on_orbit():
    with pytest.raises(ZeroOnOrbit):
        equidist_error(parse_polynomial("T1 - T2"), SQUARE, make_torsion([F(1, 7), F(1, 7)]), FAST)


def test_orbit_members_boundary_modes():
    w = make_torsion([F(1, 4), F(3, 4)])  # (1/4, 3/4) lies on x + y = 1
    with pytest.raises(BoundaryCollision):
        orbit_members(LOWER, w)
    inside, edge = orbit_members(LOWER, w, on_boundary="exclude")
    assert edge and not set(inside) & set(edge)
    assert len(orbit_members(LOWER, w, on_boundary="include")[0]) == len(inside) + len(edge)


@pytest.mark.parametrize("p", [11, 31, 61, 101])
def test_constant_polynomial_control(p):
    c = F(2)
    P = parse_polynomial("2", 2)
    w = golden(p)
    res = equidist_error(P, LOWER, w)
    D = float(box_discrepancy_value(orbit_angles(w))[0])
    deviation = abs(res.count / res.n - 0.5)
    assert res.error == pytest.approx(math.log(c) * deviation, abs=1e-12)
    assert res.error <= math.log(c) * isotropic_upper(D, 2)
    assert res.error <= math.log(c) * (4 * 2 * math.sqrt(2) + 1) * D ** 0.5


def test_convergence_experiment_triangle():
    pts = [golden(p) for p in (5, 11, 23, 61, 127, 263, 487)]
    out = convergence_experiment(parse_polynomial("T1 - 1", 2), LOWER, pts, FAST)
    rows = out["rows"]
    assert [list(r) for r in rows] == [CSV_COLUMNS] * len(rows)
    assert out["trend_ok"] and rows[-1]["error"] < rows[0]["error"]
    assert all(r["kappa_shape"] == pytest.approx(1.0, abs=1e-15) for r in rows)
    assert "not explicit" in out["note"]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS)
    writer.writeheader()
    writer.writerows(rows)
    assert buf.getvalue().splitlines()[0] == ",".join(CSV_COLUMNS)


def test_convergence_experiment_single_and_rejects():
    P = parse_polynomial("T1 - 1", 2)
    out = convergence_experiment(P, LOWER, [golden(11)], FAST)
    assert len(out["rows"]) == 1 and out["trend_ok"]
    with pytest.raises(ValueError):
        convergence_experiment(P, LOWER, [golden(11), golden(11)], FAST)
    with pytest.raises(ValueError):
        convergence_experiment(P, LOWER, [golden(61), golden(11)], FAST)


def test_constant_polynomial_experiment_rows():
    P = parse_polynomial("3", 2)
    out = convergence_experiment(P, LOWER, [golden(p) for p in (11, 23, 61)], FAST)
    for r in out["rows"]:
        assert r["error"] == pytest.approx(math.log(3) * abs(r["count_in_polytope"] / r["n"] - 0.5), abs=1e-12)


def test_kappa_shape():
    assert kappa_shape(10, F(1, 2)) == pytest.approx(10 ** -0.5)
    assert kappa_shape(10 ** 6, F(1, 2 ** 61 * 5 ** 5)) == pytest.approx(1.0)
