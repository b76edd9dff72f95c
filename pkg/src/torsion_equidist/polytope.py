"""Exact rational polytopes in dimension at most 4.

Hulls are found by brute force over d-subsets of the input points, which is
plenty for the small vertex counts used here.  Facets are stored as
``<u, x> <= c`` with ``u`` a primitive integer outward normal.  Volumes use a
pulling triangulation driven by vertex-index sets of faces.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from . import exact_linalg as la
from .lp import linprog
from .rationals import fraction_str, to_fraction

MAX_DIM = 4

Point = tuple[Fraction, ...]
Halfspace = tuple[tuple[int, ...], Fraction]


def _dot(u, x) -> Fraction:
    return sum((a * b for a, b in zip(u, x)), Fraction(0))


def _sub(x, y) -> list[Fraction]:
    return [a - b for a, b in zip(x, y)]


def _affine_rank(points: Sequence[Sequence[Fraction]]) -> int:
    if len(points) <= 1:
        return 0
    p0 = points[0]
    return la.rank([_sub(p, p0) for p in points[1:]])


@dataclass(frozen=True, eq=False)
class Polytope:
    """Convex hull of finitely many rational points.

    ``halfspaces[:n_facets]`` are the facets (relative to the affine hull when
    ``dim < d``); any remaining entries come in +/- pairs and pin down the
    affine hull.  ``facet_vertices[i]`` holds the indices of the vertices on
    facet ``i``.
    """

    d: int
    vertices: tuple[Point, ...]
    halfspaces: tuple[Halfspace, ...]
    facet_vertices: tuple[frozenset, ...]
    dim: int

    @property
    def n_facets(self) -> int:
        return len(self.facet_vertices)

    @property
    def facets(self) -> tuple[Halfspace, ...]:
        return self.halfspaces[: self.n_facets]

    @property
    def in_box(self) -> bool:
        return all(0 <= c <= 1 for v in self.vertices for c in v)

    @property
    def full_dimensional(self) -> bool:
        return self.dim == self.d

    def contains(self, x: Sequence) -> bool:
        x = [to_fraction(c) for c in x]
        return all(_dot(u, x) <= c for u, c in self.halfspaces)

    def contains_strict(self, x: Sequence) -> bool:
        """Relative interior membership."""
        x = [to_fraction(c) for c in x]
        if not all(_dot(u, x) <= c for u, c in self.halfspaces):
            return False
        return all(_dot(u, x) < c for u, c in self.facets)

    def facet_points(self, i: int) -> list[Point]:
        return [self.vertices[j] for j in sorted(self.facet_vertices[i])]

    # ---- triangulation -------------------------------------------------
    def _subfaces(self, face: frozenset, k: int) -> set[frozenset]:
        out = set()
        for G in self.facet_vertices:
            inter = face & G
            if len(inter) >= k and inter != face:
                if _affine_rank([self.vertices[i] for i in sorted(inter)]) == k - 1:
                    out.add(frozenset(inter))
        return out

    def _pull(self, face: frozenset, k: int) -> list[tuple[int, ...]]:
        if k == 0:
            return [(min(face),)]
        apex = min(face)
        simplices = []
        for sub in sorted(self._subfaces(face, k), key=sorted):
            if apex in sub:
                continue
            simplices.extend(s + (apex,) for s in self._pull(sub, k - 1))
        return simplices

    @cached_property
    def triangulation(self) -> list[tuple[int, ...]]:
        """Vertex-index d-simplices covering a full-dimensional polytope."""
        if not self.full_dimensional:
            return []
        return self._pull(frozenset(range(len(self.vertices))), self.d)

    def facet_triangulation(self, i: int) -> list[tuple[int, ...]]:
        return self._pull(self.facet_vertices[i], self.d - 1)

    # ---- metrics -------------------------------------------------------
    @cached_property
    def volume(self) -> Fraction:
        if not self.full_dimensional:
            return Fraction(0)
        total = Fraction(0)
        for s in self.triangulation:
            p0 = self.vertices[s[0]]
            total += abs(la.det([_sub(self.vertices[j], p0) for j in s[1:]]))
        return total / math.factorial(self.d)

    @cached_property
    def diameter(self) -> Fraction:
        best = Fraction(0)
        for a, b in itertools.combinations(self.vertices, 2):
            best = max(best, max(abs(x - y) for x, y in zip(a, b)))
        return best

    # ---- serialisation -------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "vertices": [[fraction_str(c) for c in v] for v in self.vertices],
            "halfspaces": [
                {"normal": list(u), "offset": fraction_str(c)} for u, c in self.halfspaces
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "Polytope":
        return from_vertices(json.loads(text)["vertices"])


def _full_hull(pts: list[Point]) -> tuple[list[Point], list[Halfspace], list[frozenset]]:
    d = len(pts[0])
    found: dict[Halfspace, None] = {}
    for combo in itertools.combinations(range(len(pts)), d):
        p0 = pts[combo[0]]
        rows = [_sub(pts[i], p0) for i in combo[1:]]
        ns = la.nullspace(rows, d)
        if len(ns) != 1:
            continue
        u = la.primitive_integer(ns[0])
        c = _dot(u, p0)
        vals = [_dot(u, p) for p in pts]
        if all(v <= c for v in vals):
            found[(u, c)] = None
        elif all(v >= c for v in vals):
            found[(tuple(-a for a in u), -c)] = None
    halfspaces = sorted(found)
    tight = [{i for i, p in enumerate(pts) if _dot(u, p) == c} for u, c in halfspaces]
    vert_idx = [
        i
        for i in range(len(pts))
        if la.rank([list(halfspaces[h][0]) for h in range(len(halfspaces)) if i in tight[h]] or [[0] * d]) == d
    ]
    order = sorted(vert_idx, key=lambda i: pts[i])
    new_index = {old: new for new, old in enumerate(order)}
    vertices = [pts[i] for i in order]
    facet_sets = [frozenset(new_index[i] for i in t if i in new_index) for t in tight]
    return vertices, halfspaces, facet_sets


def from_vertices(points: Sequence[Sequence]) -> Polytope:
    """Exact convex hull of rational points, reduced to its extreme points."""
    if len(points) == 0:
        raise ValueError("cannot build a polytope from no points")
    pts = sorted({tuple(to_fraction(c) for c in p) for p in points})
    d = len(pts[0])
    if d < 1 or any(len(p) != d for p in pts):
        raise ValueError("points must share a positive dimension")
    if d > MAX_DIM:
        raise ValueError(f"dimension {d} not supported (exact hulls are limited to d <= {MAX_DIM})")
    p0 = pts[0]
    diffs = [_sub(p, p0) for p in pts[1:]]
    k = la.rank(diffs) if diffs else 0
    if k == d:
        vertices, halfspaces, facet_sets = _full_hull(pts)
        return Polytope(d, tuple(vertices), tuple(halfspaces), tuple(facet_sets), d)

    # lower-dimensional: pin the affine hull, then take the hull in a
    # coordinate projection that is injective on it
    equalities: list[Halfspace] = []
    for n in la.nullspace(diffs, d):
        u = la.primitive_integer(n)
        c = _dot(u, p0)
        equalities += [(u, c), (tuple(-a for a in u), -c)]
    if k == 0:
        return Polytope(d, (p0,), tuple(equalities), (), 0)
    coords = next(S for S in itertools.combinations(range(d), k) if la.rank([[r[i] for i in S] for r in diffs]) == k)
    proj = {tuple(p[i] for i in coords): p for p in pts}
    sub_vertices, sub_half, facet_sets = _full_hull(sorted(proj))
    vertices = tuple(proj[v] for v in sub_vertices)
    lifted = []
    for u, c in sub_half:
        full = [0] * d
        for i, a in zip(coords, u):
            full[i] = a
        lifted.append((tuple(full), c))
    # sub_vertices is sorted in projected order; the lift keeps that order
    return Polytope(d, vertices, tuple(lifted + equalities), tuple(facet_sets), k)


class BoundaryCollision(ValueError):
    """A rational point sits exactly on the boundary, where closed membership is ambiguous."""


def _require_full(P: Polytope, what: str) -> None:
    if not P.full_dimensional:
        raise ValueError(f"{what} needs a full-dimensional polytope (dim {P.dim} < {P.d})")


# ---- surface area -----------------------------------------------------


@dataclass(frozen=True)
class SurfaceArea:
    """sum_i coeff_i * sqrt(radicand_i), with a rational enclosure [lower, upper]."""

    terms: tuple[tuple[Fraction, int], ...]
    lower: Fraction
    upper: Fraction

    @property
    def value(self) -> float:
        return float(sum(float(q) * math.sqrt(n) for q, n in self.terms))

    def __float__(self) -> float:
        return self.value


def sqrt_enclosure(n: int, bits: int = 64) -> tuple[Fraction, Fraction]:
    """Rational bounds lo <= sqrt(n) <= hi, tight when n is a perfect square."""
    scale = 1 << bits
    s = math.isqrt(n * scale * scale)
    lo = Fraction(s, scale)
    hi = lo if s * s == n * scale * scale else Fraction(s + 1, scale)
    return lo, hi


def facet_area_terms(P: Polytope) -> list[tuple[Fraction, int]]:
    """Per facet, (q, N) with facet (d-1)-volume q * sqrt(N).

    The facet is projected along the coordinate where its normal is largest;
    the projected volume is rational and the projection scales area by
    |u_k| / |u|.
    """
    _require_full(P, "surface area")
    d = P.d
    out = []
    for i, (u, _) in enumerate(P.facets):
        k = max(range(d), key=lambda j: abs(u[j]))
        keep = [j for j in range(d) if j != k]
        proj_vol = Fraction(0)
        for s in P.facet_triangulation(i):
            q0 = [P.vertices[s[0]][j] for j in keep]
            rows = [_sub([P.vertices[t][j] for j in keep], q0) for t in s[1:]]
            proj_vol += abs(la.det(rows))
        proj_vol /= math.factorial(d - 1)
        out.append((proj_vol / abs(u[k]), sum(a * a for a in u)))
    return out


def surface_area(P: Polytope, bits: int = 64) -> SurfaceArea:
    grouped: dict[int, Fraction] = {}
    for q, n in facet_area_terms(P):
        grouped[n] = grouped.get(n, Fraction(0)) + q
    terms = tuple(sorted((q, n) for n, q in grouped.items()))
    lo = hi = Fraction(0)
    for q, n in terms:
        a, b = sqrt_enclosure(n, bits)
        lo += q * a
        hi += q * b
    return SurfaceArea(terms, lo, hi)


def diameter(P: Polytope) -> Fraction:
    return P.diameter


def volume(P: Polytope) -> Fraction:
    return P.volume


def contains(P: Polytope, x) -> bool:
    return P.contains(x)


# ---- inradius ---------------------------------------------------------


def inradius_and_center(P: Polytope) -> tuple[Fraction, Point]:
    """Largest max-norm ball inside P; ties broken by the lexicographically smallest center."""
    _require_full(P, "inradius")
    d = P.d
    A = [list(u) + [sum(abs(a) for a in u)] for u, _ in P.facets]
    b = [c for _, c in P.facets]
    res = linprog([0] * d + [1], A, b, maximize=True)
    if res.status != "optimal":
        raise RuntimeError(f"inradius LP ended with status {res.status}")
    r = res.value
    A_eq: list[list] = [[0] * d + [1]]
    b_eq: list = [r]
    center: list[Fraction] = []
    for i in range(d):
        cost = [0] * (d + 1)
        cost[i] = 1
        res = linprog(cost, A, b, A_eq, b_eq)
        if res.status != "optimal":
            raise RuntimeError(f"center LP ended with status {res.status}")
        center.append(res.x[i])
        row = [0] * (d + 1)
        row[i] = 1
        A_eq.append(row)
        b_eq.append(res.x[i])
    return r, tuple(center)


# ---- shrink map and the continuous characteristic function -------------


@dataclass(frozen=True)
class ShrinkResult:
    center: Point
    epsilon: Fraction
    inner: Polytope
    shell_pieces: tuple[Polytope, ...]


def _check_eps(eps) -> Fraction:
    eps = to_fraction(eps)
    if not (0 < eps < 1):
        raise ValueError(f"epsilon must lie strictly between 0 and 1, got {eps}")
    return eps


def shrink_point(x, center, eps) -> Point:
    return tuple((1 - eps) * a + eps * c for a, c in zip(x, center))


def shrink(P: Polytope, eps, center: Sequence | None = None) -> ShrinkResult:
    eps = _check_eps(eps)
    _require_full(P, "shrink")
    if center is None:
        center = inradius_and_center(P)[1]
    center = tuple(to_fraction(c) for c in center)
    inner_vertices = tuple(shrink_point(v, center, eps) for v in P.vertices)
    inner_half = tuple((u, (1 - eps) * c + eps * _dot(u, center)) for u, c in P.facets)
    inner = Polytope(P.d, inner_vertices, inner_half, P.facet_vertices, P.d)
    pieces = []
    for i, (u, c) in enumerate(P.facets):
        outer_f = P.facet_points(i)
        inner_f = [shrink_point(v, center, eps) for v in outer_f]
        levels = {_dot(u, v) for v in inner_f}
        if levels != {inner_half[i][1]}:
            raise AssertionError("shrunken facet is not parallel to the original")
        pieces.append(from_vertices(outer_f + inner_f))
    return ShrinkResult(center, eps, inner, tuple(pieces))


@dataclass(frozen=True)
class ShellVolume:
    exact: Fraction
    bound: float
    bound_lower: Fraction  # rigorous lower bound on the real-valued bound

    @property
    def holds(self) -> bool:
        return self.exact <= self.bound_lower


def shell_volume_bound(P: Polytope, eps) -> ShellVolume:
    """vol(P) - vol(P_eps) next to eps * S(P) * diam(P) / sqrt(d)."""
    res = shrink(P, eps)
    exact = P.volume - res.inner.volume
    S = surface_area(P)
    eps = res.epsilon
    bound = float(eps) * S.value * float(P.diameter) / math.sqrt(P.d)
    _, sqrt_d_hi = sqrt_enclosure(P.d)
    return ShellVolume(exact, bound, eps * S.lower * P.diameter / sqrt_d_hi)


def gauge(P: Polytope, y: Sequence, center: Sequence) -> Fraction:
    """max_j <u_j, y - x_c> / (c_j - <u_j, x_c>); P = {gauge <= 1}."""
    diff = [to_fraction(a) - b for a, b in zip(y, center)]
    return max(_dot(u, diff) / (c - _dot(u, center)) for u, c in P.facets)


def continuous_characteristic(P: Polytope, eps, y: Sequence, center: Sequence | None = None) -> Fraction:
    """Exact value of the piecewise affine cutoff: 0 off P, 1 on P_eps, delta_y/eps between.

    Along the ray from the center through y, the boundary is reached at
    lambda_y = 1/gauge(y), so delta_y = 1 - gauge(y).
    """
    eps = _check_eps(eps)
    _require_full(P, "the continuous characteristic function")
    if center is None:
        center = inradius_and_center(P)[1]
    y = tuple(to_fraction(c) for c in y)
    if y == tuple(center):
        return Fraction(1)
    s = gauge(P, y, center)
    if s > 1:
        return Fraction(0)
    return min(Fraction(1), (1 - s) / eps)


def continuous_characteristic_array(P: Polytope, eps, Y, center: Sequence | None = None) -> np.ndarray:
    """Float evaluation on a batch of points, shape (m, d) -> (m,)."""
    eps = float(_check_eps(eps))
    if center is None:
        center = inradius_and_center(P)[1]
    xc = np.array([float(c) for c in center])
    U = np.array([u for u, _ in P.facets], dtype=float)
    h = np.array([float(c - _dot(u, center)) for u, c in P.facets])
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    s = ((Y - xc) @ U.T / h).max(axis=1)
    return np.clip((1.0 - s) / eps, 0.0, 1.0)


def shell_piece_index(P: Polytope, y: Sequence, center: Sequence) -> int:
    """Index of the facet whose cone (from the center) contains y."""
    diff = [to_fraction(a) - b for a, b in zip(y, center)]
    vals = [_dot(u, diff) / (c - _dot(u, center)) for u, c in P.facets]
    return max(range(len(vals)), key=lambda j: (vals[j], -j))


def random_polytope(rng: np.random.Generator, d: int, n_points: int, denom: int = 12) -> Polytope:
    """Hull of random grid points k/denom in [0,1]^d, resampled until full-dimensional."""
    while True:
        raw = rng.integers(0, denom + 1, size=(n_points, d))
        P = from_vertices([[Fraction(int(a), denom) for a in row] for row in raw])
        if P.full_dimensional:
            return P
