"""Box discrepancy of finite point sets, plus bounds on the isotropic discrepancy.

The supremum over half-open boxes prod [a_i, b_i) is reached in the limit by
one of two extremal families, with endpoints drawn from {0, 1} and the point
coordinates:

* closed boxes prod [a_i, b_i] (a_i = b_i allowed), maximising count/n - vol;
* open boxes prod (a_i, b_i), maximising vol - count/n.

Coordinates are scaled by a common denominator L so every comparison is an
exact integer comparison of L^d * count - n * L^d * vol.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .pointset import PointSet
from .torus import TorsionPoint, orbit_angles, strictness_degree

EXACT_MAX_N = 1100
EXACT_MAX_N_3D = 40
EXACT_MAX_D = 3


class DiscrepancySizeError(ValueError):
    pass


@dataclass
class DiscrepancyReport:
    D: object  # Fraction for exact rational input, float otherwise
    witness_box: tuple | None
    J_lower: float
    J_upper: float
    exact: bool
    mode: str
    n: int
    d: int
    meta: dict = field(default_factory=dict)


# ---- grids and histograms ------------------------------------------------


def _grids(S: PointSet):
    """Per-axis sorted candidate endpoints, histogram over grid indices, scale L."""
    if S.exact:
        L = S.denominator()
        raw = [[int(p[i] * L) for p in S.points] for i in range(S.d)]
        top = L
    else:
        L = 1
        raw = [[float(p[i]) for p in S.points] for i in range(S.d)]
        top = 1.0
    grids, index = [], []
    for col in raw:
        g = sorted(set(col) | {0 * top, top})
        pos = {v: k for k, v in enumerate(g)}
        grids.append(g)
        index.append([pos[v] for v in col])
    H = np.zeros(tuple(len(g) for g in grids), dtype=np.int64)
    for idx in zip(*index):
        H[idx] += 1
    return grids, H, L


def _dtype_for(n: int, L, d: int):
    if isinstance(L, int) and 4 * (n + 1) * (L ** d) < 2 ** 62:
        return np.int64
    return object


def _line_closed(P: np.ndarray, G: np.ndarray, K, V: np.ndarray):
    """Per row s: max over a <= b of K*(P[b]-P[a-1]) - V*(G[b]-G[a]).

    P holds prefix counts along the line.  Returns values and (a, b) pairs.
    """
    Pm1 = np.concatenate([np.zeros_like(P[:, :1]), P[:, :-1]], axis=1)
    VG = V[:, None] * G[None, :]
    return _max_diff(K * P - VG, K * Pm1 - VG)


def _line_open(P: np.ndarray, G: np.ndarray, K, V: np.ndarray):
    """Per row s: max over a < b of V*(G[b]-G[a]) - K*(P[b-1]-P[a])."""
    VG = V[:, None] * G[None, :]
    KP = K * P
    # shift b by one: row t of A is b = t + 1, and a < b becomes a <= t
    return _max_diff(VG[:, 1:] - KP[:, :-1], VG[:, :-1] - KP[:, :-1], offset=1)


def _max_diff(A: np.ndarray, B: np.ndarray, offset: int = 0):
    """Row-wise max over a <= b of A[b] - B[a], with the (a, b + offset) attaining it."""
    run_min = np.minimum.accumulate(B, axis=1)
    diff = A - run_min
    b = np.argmax(diff, axis=1)
    rows = np.arange(A.shape[0])
    val = diff[rows, b]
    # first position where the running minimum reaches its value at b
    a = np.argmax(run_min == run_min[rows, b][:, None], axis=1)
    return val, np.stack([a, b + offset], axis=1)


def _scan_2d(H: np.ndarray, G1, G2, K, V, dtype):
    """Best closed/open values over 2-d boxes of histogram H with volume factor V."""
    m1, m2 = H.shape
    G1 = np.asarray(G1, dtype=dtype)
    G2 = np.asarray(G2, dtype=dtype)
    # Q[i, j] = sum of H[:i, :j+1]; a slab of rows [lo, hi) has prefix Q[hi] - Q[lo]
    Q = np.zeros((m1 + 1, m2), dtype=dtype)
    Q[1:] = np.cumsum(np.cumsum(H, axis=0), axis=1)
    KQ = K * Q
    best = {"closed": None, "open": None}
    for a1 in range(m1):
        # rows t <-> b1 = a1 + t; closed slab [a1, b1] and open slab (a1, b1) share the width
        VG = np.multiply.outer(V * (G1[a1:] - G1[a1]), G2)
        # closed: max over a2 <= b2 of K(P[b2] - P[a2-1]) - (VG[b2] - VG[a2])
        KP = KQ[a1 + 1 :] - KQ[a1]
        A = KP - VG
        B = np.empty_like(A)
        B[:, 0] = -VG[:, 0]
        np.subtract(KP[:, :-1], VG[:, 1:], out=B[:, 1:])
        _update(best, "closed", a1, a1, A, np.minimum.accumulate(B, axis=1), 0)
        if a1 + 1 < m1:
            # open: max over a2 < b2 of VG[b2] - VG[a2] - K(P[b2-1] - P[a2]), P over rows a1+1..b1-1
            KP = KQ[a1 + 1 : m1] - KQ[a1 + 1]
            W = VG[1:]
            A = W[:, 1:] - KP[:, :-1]
            B = W[:, :-1] - KP[:, :-1]
            _update(best, "open", a1, a1 + 1, A, np.minimum.accumulate(B, axis=1), 1)
    return best


def _update(best: dict, kind: str, a1: int, row0: int, A: np.ndarray, run_min: np.ndarray, offset: int):
    """Fold the row-wise maxima of A - run_min into best[kind], with a witness for the best row only."""
    diff = A - run_min
    vals = diff.max(axis=1)
    j = int(np.argmax(vals))
    if best[kind] is not None and not vals[j] > best[kind][0]:
        return
    b = int(np.argmax(diff[j]))
    a = int(np.argmax(run_min[j] == run_min[j, b]))
    best[kind] = (vals[j], ((a1, row0 + j), (a, b + offset)))


def _scan(H: np.ndarray, grids, n: int, L, dtype):
    d = H.ndim
    K = L ** d
    Gs = [np.asarray(g, dtype=dtype) for g in grids]
    if d == 1:
        P = np.cumsum(H).astype(dtype)[None, :]
        V = np.array([n], dtype=dtype)
        cv, carg = _line_closed(P, Gs[0], K, V)
        ov, oarg = _line_open(P, Gs[0], K, V)
        return {
            "closed": (cv[0], (tuple(int(x) for x in carg[0]),)),
            "open": (ov[0], (tuple(int(x) for x in oarg[0]),)),
        }
    if d == 2:
        return _scan_2d(H, Gs[0], Gs[1], K, n, dtype)
    best = {"closed": None, "open": None}
    m1 = H.shape[0]
    for a1 in range(m1):
        closed_slab = np.zeros(H.shape[1:], dtype=np.int64)
        open_slab = np.zeros(H.shape[1:], dtype=np.int64)
        for b1 in range(a1, m1):
            closed_slab = closed_slab + H[b1]
            W = Gs[0][b1] - Gs[0][a1]
            r = _scan_2d(closed_slab, Gs[1], Gs[2], K, n * W, dtype)
            v, box = r["closed"]
            if best["closed"] is None or v > best["closed"][0]:
                best["closed"] = (v, ((a1, b1),) + box)
            if b1 > a1:
                r = _scan_2d(open_slab, Gs[1], Gs[2], K, n * W, dtype)
                v, box = r["open"]
                if best["open"] is None or v > best["open"][0]:
                    best["open"] = (v, ((a1, b1),) + box)
                open_slab = open_slab + H[b1]
    return best


def _exact_limits(n: int, d: int) -> str | None:
    if d > EXACT_MAX_D:
        return f"exact mode needs d <= {EXACT_MAX_D} (got d={d})"
    limit = EXACT_MAX_N_3D if d == 3 else EXACT_MAX_N
    if n > limit:
        return f"exact mode needs n <= {limit} in dimension {d} (got n={n})"
    return None


def box_discrepancy_value(S: PointSet) -> tuple[object, tuple]:
    """Exact sup of |count/n - vol| over half-open boxes, with a witness box.

    The witness is (kind, a, b) with kind "closed" or "open".
    """
    n = len(S)
    if n == 0:
        raise ValueError("discrepancy of an empty point set is undefined")
    problem = _exact_limits(n, S.d)
    if problem:
        raise DiscrepancySizeError(problem)
    grids, H, L = _grids(S)
    dtype = _dtype_for(n, L, S.d) if S.exact else float
    best = _scan(H, grids, n, L, dtype)
    kind = "closed" if best["closed"][0] >= best["open"][0] else "open"
    val, idx = best[kind]
    scale = n * (L ** S.d)
    if S.exact:
        D = Fraction(int(val), scale)
        a = tuple(Fraction(grids[i][ab[0]], L) for i, ab in enumerate(idx))
        b = tuple(Fraction(grids[i][ab[1]], L) for i, ab in enumerate(idx))
    else:
        D = float(val) / scale
        a = tuple(float(grids[i][ab[0]]) for i, ab in enumerate(idx))
        b = tuple(float(grids[i][ab[1]]) for i, ab in enumerate(idx))
    return D, (kind, a, b)


def halfopen_count(X: np.ndarray, a, b) -> int:
    return int(np.all((X >= a) & (X < b), axis=1).sum())


def sampled_lower_bound(S: PointSet, n_boxes: int = 2000, seed: int = 0) -> float:
    """max |count/n - vol| over random half-open boxes; a lower bound on D."""
    rng = np.random.default_rng(seed)
    X = S.as_array()
    n, d = X.shape
    coords = [np.unique(np.concatenate([X[:, i], [0.0, 1.0]])) for i in range(d)]
    best = 0.0
    for t in range(n_boxes):
        if t % 2:
            ends = np.sort(rng.random((d, 2)), axis=1)
        else:
            ends = np.sort(np.array([rng.choice(c, 2) for c in coords]), axis=1)
        a, b = ends[:, 0], ends[:, 1]
        vol = float(np.prod(b - a))
        best = max(best, abs(halfopen_count(X, a, b) / n - vol))
    return best


def box_discrepancy(S: PointSet, with_isotropic: bool = True, seed: int = 0, mc_boxes: int = 20000) -> DiscrepancyReport:
    n, d = len(S), S.d
    if n == 0:
        raise ValueError("discrepancy of an empty point set is undefined")
    problem = _exact_limits(n, d)
    if problem is None:
        D, witness = box_discrepancy_value(S)
        exact, mode = S.exact, "exact"
        meta = {}
    else:
        D = sampled_lower_bound(S, mc_boxes, seed)
        witness, exact, mode = None, False, "monte-carlo"
        meta = {"note": "Monte-Carlo lower estimate: " + problem}
    if with_isotropic:
        lo, hi = isotropic_bounds(S, D=D, seed=seed)
    else:
        lo, hi = float(D), isotropic_upper(float(D), d)
    return DiscrepancyReport(D, witness, lo, hi, exact, mode, n, d, meta)


# ---- isotropic discrepancy ----------------------------------------------


def isotropic_upper(D: float, d: int) -> float:
    return (4 * d * math.sqrt(d) + 1) * float(D) ** (1.0 / d)


def _hull_deviation(X: np.ndarray, V: np.ndarray, tol: float = 1e-12) -> float:
    try:
        hull = ConvexHull(V)
    except (QhullError, ValueError):
        return 0.0
    eq = hull.equations
    s = X @ eq[:, :-1].T + eq[:, -1]
    n = len(X)
    closed = np.all(s <= tol, axis=1).sum() / n
    interior = np.all(s < -tol, axis=1).sum() / n
    return max(closed - hull.volume, hull.volume - interior)


def isotropic_bounds(S: PointSet, D=None, n_hulls: int = 300, seed: int = 0) -> tuple[float, float]:
    """Lower bound from D and random convex hulls; upper bound (4d sqrt d + 1) D^(1/d)."""
    if D is None:
        D = box_discrepancy_value(S)[0]
    d = S.d
    upper = isotropic_upper(float(D), d)
    if d == 1:
        return float(D), upper
    rng = np.random.default_rng(seed)
    X = S.as_array()
    n = len(X)
    best = float(D)
    for t in range(n_hulls):
        if t % 2 == 0 and n >= d + 1:
            k = int(rng.integers(d + 1, max(d + 2, min(n, 12)) + 1))
            V = X[rng.choice(n, size=min(k, n), replace=False)]
        else:
            V = rng.random((int(rng.integers(d + 1, 10)), d))
        best = max(best, _hull_deviation(X, V))
    return best, upper


# ---- orbit discrepancy -----------------------------------------------------


def orbit_discrepancy_shape(delta: int, d: int) -> float:
    """(log 2 delta)^(d-1) * log log 3 delta / delta^(1/2), without any constant."""
    if delta < 1:
        raise ValueError("strictness degree must be positive")
    return math.log(2 * delta) ** (d - 1) * math.log(math.log(3 * delta)) / math.sqrt(delta)


SHAPE_NOTE = "shape only: the implied dimension-dependent constant is unknown"


def orbit_discrepancy_rows(points: Sequence[TorsionPoint], with_isotropic: bool = True, seed: int = 0) -> list[dict]:
    """One CSV-ready row (n, delta, D, J_lower, J_upper, shape) per torsion point."""
    rows = []
    for omega in points:
        S = orbit_angles(omega)
        rep = box_discrepancy(S, with_isotropic=with_isotropic, seed=seed)
        delta = strictness_degree(omega)
        rows.append(
            {
                "n": len(S),
                "delta": delta,
                "D": float(rep.D),
                "J_lower": rep.J_lower,
                "J_upper": rep.J_upper,
                "shape": orbit_discrepancy_shape(delta, omega.d),
            }
        )
    return rows
