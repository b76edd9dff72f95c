"""Finite point sets in the half-open unit cube."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .rationals import common_denominator, to_fraction


@dataclass(frozen=True)
class PointSet:
    """Ordered points of [0,1)^d, either all exact rationals or all floats.

    Duplicates are kept: they count with multiplicity in every statistic.
    """

    d: int
    points: tuple[tuple, ...]
    exact: bool = True
    stats: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("dimension must be positive")
        for p in self.points:
            if len(p) != self.d:
                raise ValueError(f"point {p} has wrong dimension (expected {self.d})")
            for c in p:
                if not (0 <= c < 1):
                    raise ValueError(f"coordinate {c} of {p} outside [0,1)")

    @classmethod
    def from_rationals(cls, points: Sequence[Sequence], d: int | None = None) -> "PointSet":
        pts = tuple(tuple(to_fraction(c) for c in p) for p in points)
        if d is None:
            if not pts:
                raise ValueError("cannot infer dimension of an empty point set")
            d = len(pts[0])
        return cls(d, pts, exact=True)

    @classmethod
    def from_floats(cls, points, d: int | None = None) -> "PointSet":
        arr = np.asarray(points, dtype=float)
        if arr.ndim == 1:
            arr = arr[:, None]
        if d is None:
            d = arr.shape[1]
        return cls(d, tuple(tuple(float(c) for c in row) for row in arr), exact=False)

    @classmethod
    def equispaced(cls, n: int, d: int = 1) -> "PointSet":
        """The grid {i/n} in dimension 1, or its d-fold product."""
        if n < 1:
            raise ValueError("n must be positive")
        axis = [Fraction(i, n) for i in range(n)]
        if d == 1:
            return cls(1, tuple((a,) for a in axis))
        import itertools

        return cls(d, tuple(itertools.product(axis, repeat=d)))

    def __len__(self) -> int:
        return len(self.points)

    def as_array(self) -> np.ndarray:
        return np.array([[float(c) for c in p] for p in self.points], dtype=float).reshape(len(self.points), self.d)

    def denominator(self) -> int:
        """Common denominator of all coordinates (exact point sets only)."""
        if not self.exact:
            raise ValueError("float point set has no common denominator")
        return common_denominator(self.points)

    def permuted(self, order: Sequence[int]) -> "PointSet":
        return PointSet(self.d, tuple(self.points[i] for i in order), self.exact)

    def doubled(self) -> "PointSet":
        """Every point with multiplicity two."""
        return PointSet(self.d, self.points + self.points, self.exact)
