"""Point configurations on the non-negative integers and rationals.

``PointSet`` is the workhorse: a strictly increasing integer configuration,
optionally rooted at 0, with a gap-sequence view.  ``RealPointSet`` holds
continuous configurations; samplers produce points on the dyadic grid with
denominator 2**64 (documented fixed-point scale) and arithmetic on them
stays exact by closing over rationals.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

DYADIC_LOG2_DEN = 64
DYADIC_DEN = 1 << DYADIC_LOG2_DEN


class PointSet:
    """Sorted integer point configuration with an optional root at 0."""

    __slots__ = ("points", "rooted")

    def __init__(self, points, rooted=None):
        pts = np.asarray(points, dtype=np.int64)
        if pts.ndim != 1 or len(pts) == 0:
            raise ValueError("a point set needs at least one point")
        if pts[0] < 0:
            raise ValueError("points must be non-negative")
        if len(pts) > 1 and not (np.diff(pts) >= 1).all():
            raise ValueError("points must be strictly increasing")
        if rooted is None:
            rooted = bool(pts[0] == 0)
        if rooted and pts[0] != 0:
            raise ValueError("rooted point set must start at 0")
        self.points = pts
        self.rooted = bool(rooted)

    @classmethod
    def from_gaps(cls, gaps, rooted=True):
        gaps = np.asarray(gaps, dtype=np.int64)
        if len(gaps) and gaps.min() < 1:
            raise ValueError("gaps must be >= 1")
        pts = np.empty(len(gaps) + 1, dtype=np.int64)
        pts[0] = 0
        np.cumsum(gaps, out=pts[1:])
        return cls(pts, rooted=rooted)

    @property
    def gaps(self):
        return np.diff(self.points)

    def __len__(self):
        return len(self.points)

    def __eq__(self, other):
        return (
            isinstance(other, PointSet)
            and self.rooted == other.rooted
            and len(self.points) == len(other.points)
            and bool((self.points == other.points).all())
        )

    def __repr__(self):
        head = ", ".join(str(int(p)) for p in self.points[:6])
        tail = ", ..." if len(self.points) > 6 else ""
        return f"PointSet([{head}{tail}], rooted={self.rooted})"

    def prefix(self, n):
        """First n points."""
        if n < 1 or n > len(self.points):
            raise ValueError("prefix length out of range")
        return PointSet(self.points[:n], rooted=self.rooted)

    def to_json(self):
        return {"rooted": self.rooted, "points": [int(p) for p in self.points]}

    @classmethod
    def from_json(cls, obj):
        return cls(obj["points"], rooted=obj["rooted"])


class RealPointSet:
    """Strictly increasing non-negative rational points.

    Sampled sets live on the 2**-64 dyadic grid; derived sets (rescalings)
    may carry arbitrary exact rationals.
    """

    __slots__ = ("points",)

    def __init__(self, points):
        pts = tuple(Fraction(p) for p in points)
        if len(pts) == 0:
            raise ValueError("a point set needs at least one point")
        if pts[0] < 0:
            raise ValueError("points must be non-negative")
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise ValueError("points must be strictly increasing")
        self.points = pts

    @classmethod
    def from_dyadic(cls, numerators):
        return cls(Fraction(int(n), DYADIC_DEN) for n in numerators)

    def __len__(self):
        return len(self.points)

    def __eq__(self, other):
        return isinstance(other, RealPointSet) and self.points == other.points

    def __repr__(self):
        head = ", ".join(str(p) for p in self.points[:4])
        tail = ", ..." if len(self.points) > 4 else ""
        return f"RealPointSet([{head}{tail}])"

    def to_json(self):
        return {"points": [f"{p.numerator}/{p.denominator}" for p in self.points]}

    @classmethod
    def from_json(cls, obj):
        pts = []
        for s in obj["points"]:
            num, den = s.split("/")
            pts.append(Fraction(int(num), int(den)))
        return cls(pts)
