"""Rough-isometry checkers, constant conversions, cut points, restriction.

A rough isometry T between subsets of the line with constants (M, D, R)
satisfies, for all x1, x2 in the domain,

    (1/M) |x1 - x2| - D  <=  |T(x1) - T(x2)|  <=  M |x1 - x2| + D

and every codomain point lies within R of the image.  A Markov rough
isometry is a rooted weakly monotone map with the distortion bound imposed
only on adjacent pairs with distinct images, a fiber-diameter bound F, and
the same R-density.

All constants are exact rationals and every comparison is exact; D = 1/2
is a working value in this theory and float ties would corrupt verdicts.
On integer instances with monotone images the pair condition is checked in
O(n) by prefix/suffix extrema of denominator-scaled int64 arrays; the
general case runs the quadratic pair scan in exact rational arithmetic.
Violations carry the lexicographically smallest witness.
"""

from __future__ import annotations

import warnings
from bisect import bisect_left
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np

from .errors import ImageNotInCodomain, HorizonTooSmall, PreconditionViolated
from .pointsets import PointSet


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class RiConstants:
    """Multiplicative M >= 1, additive D >= 0, density radius R >= 0."""

    M: Fraction
    D: Fraction
    R: Fraction

    def __post_init__(self):
        object.__setattr__(self, "M", _frac(self.M))
        object.__setattr__(self, "D", _frac(self.D))
        object.__setattr__(self, "R", _frac(self.R))
        if self.M < 1:
            # Bounds with M < 1 only strengthen; normalizing weakens nothing.
            warnings.warn("M < 1 normalized to M = 1", stacklevel=3)
            object.__setattr__(self, "M", Fraction(1))
        if self.D < 0 or self.R < 0:
            raise ValueError("D and R must be >= 0")

    def to_json(self):
        return {"M": str(self.M), "D": str(self.D), "R": str(self.R)}


@dataclass(frozen=True)
class MarkovConstants:
    """Adjacent-gap distortion M, fiber diameter F, density radius R."""

    M: Fraction
    F: Fraction
    R: Fraction

    def __post_init__(self):
        object.__setattr__(self, "M", _frac(self.M))
        object.__setattr__(self, "F", _frac(self.F))
        object.__setattr__(self, "R", _frac(self.R))
        if self.M < 1:
            warnings.warn("M < 1 normalized to M = 1", stacklevel=3)
            object.__setattr__(self, "M", Fraction(1))
        if self.F < 0 or self.R < 0:
            raise ValueError("F and R must be >= 0")

    def to_json(self):
        return {"M": str(self.M), "F": str(self.F), "R": str(self.R)}


class Mapping:
    """A map T from a domain point set into a codomain, one image per point.

    Image values are integers in the discrete setting; the Poisson
    couplings carry exact rational images, which all checkers handle
    through the same exact-arithmetic paths.
    """

    __slots__ = ("domain", "image", "codomain")

    def __init__(self, domain: PointSet, image, codomain):
        if len(image) != len(domain.points):
            raise ValueError("image length must match domain length")
        self.domain = domain
        self.image = list(image)
        self.codomain = codomain

    def codomain_values(self):
        pts = getattr(self.codomain, "points", self.codomain)
        return list(pts)

    def is_integer(self):
        return all(isinstance(v, (int, np.integer)) for v in self.image) and all(
            isinstance(v, (int, np.integer)) for v in self.codomain_values()
        )

    def __repr__(self):
        return f"Mapping({len(self.image)} points)"

    def to_json(self):
        def enc(v):
            return int(v) if isinstance(v, (int, np.integer)) else str(v)

        return {
            "domain": [int(p) for p in self.domain.points],
            "image": [enc(v) for v in self.image],
            "codomain": [enc(v) for v in self.codomain_values()],
        }

    @classmethod
    def from_json(cls, obj):
        return cls(
            PointSet(obj["domain"]),
            [int(v) for v in obj["image"]],
            PointSet(obj["codomain"]),
        )


class ViolationKind(Enum):
    DistortionLow = "DistortionLow"
    DistortionHigh = "DistortionHigh"
    Density = "Density"
    NotRooted = "NotRooted"
    NotMonotone = "NotMonotone"
    AdjacencyDistortion = "AdjacencyDistortion"
    FiberWidth = "FiberWidth"


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    witness: tuple

    def to_json(self):
        return {"kind": self.kind.value, "witness": list(self.witness)}


# ------------------------------------------------------------------
# condition (i): the pairwise distortion bounds
# ------------------------------------------------------------------

def _first_pair_exceeding(u, thresh):
    """Smallest (i, j) with i < j and u[j] - u[i] > thresh, else None."""
    sufmax = np.maximum.accumulate(u[::-1])[::-1]
    cand = np.flatnonzero(sufmax[1:] - u[:-1] > thresh)
    if len(cand) == 0:
        return None
    i = int(cand[0])
    js = np.flatnonzero(u[i + 1:] - u[i] > thresh)
    return (i, i + 1 + int(js[0]))


def _pair_violation_monotone_int(xs, ys, M, D):
    """O(n) check of condition (i) for integer, monotone-image instances."""
    mn, md = M.numerator, M.denominator
    dn, dd = D.numerator, D.denominator
    top = max(int(abs(xs).max()), int(abs(ys).max()), 1)
    if top * max(mn, md) * dd >= 2**61 or top * max(mn, md) * dn >= 2**61:
        return _pair_violation_exact(xs, ys, M, D)
    # upper: md*dd*dy - mn*dd*dx > dn*md   with dy = y_j - y_i >= 0
    hi = _first_pair_exceeding(ys * (md * dd) - xs * (mn * dd), dn * md)
    # lower: md*dd*dx - mn*dd*dy > dn*mn
    lo = _first_pair_exceeding(xs * (md * dd) - ys * (mn * dd), dn * mn)
    if hi is not None and (lo is None or hi <= lo):
        return Violation(ViolationKind.DistortionHigh, hi)
    if lo is not None:
        return Violation(ViolationKind.DistortionLow, lo)
    return None


def _pair_violation_exact(xs, ys, M, D):
    """Quadratic exact scan; first violating pair in (i, j) order."""
    n = len(xs)
    for i in range(n):
        xi, yi = _frac(int(xs[i]) if isinstance(xs[i], np.integer) else xs[i]), _frac(
            int(ys[i]) if isinstance(ys[i], np.integer) else ys[i]
        )
        for j in range(i + 1, n):
            dx = _frac(int(xs[j]) if isinstance(xs[j], np.integer) else xs[j]) - xi
            dy = abs(
                _frac(int(ys[j]) if isinstance(ys[j], np.integer) else ys[j]) - yi
            )
            if dy > M * dx + D:
                return Violation(ViolationKind.DistortionHigh, (i, j))
            if dy < dx / M - D:
                return Violation(ViolationKind.DistortionLow, (i, j))
    return None


def _condition_i_violation(xs, ys, M, D):
    monotone = all(b >= a for a, b in zip(ys, ys[1:]))
    integer = all(isinstance(v, (int, np.integer)) for v in ys) and all(
        isinstance(v, (int, np.integer)) for v in xs
    )
    if monotone and integer:
        return _pair_violation_monotone_int(
            np.asarray(xs, dtype=np.int64), np.asarray(ys, dtype=np.int64), M, D
        )
    return _pair_violation_exact(list(xs), list(ys), M, D)


# ------------------------------------------------------------------
# density: every codomain point within R of the image
# ------------------------------------------------------------------

def _density_violation(image, codomain_values, R):
    integer = all(isinstance(v, (int, np.integer)) for v in image) and all(
        isinstance(v, (int, np.integer)) for v in codomain_values
    )
    if integer and isinstance(R, Fraction) and len(codomain_values) > 2:
        img = np.unique(np.asarray(image, dtype=np.int64))
        cod = np.asarray(codomain_values, dtype=np.int64)
        rn, rd = R.numerator, R.denominator
        pos = np.searchsorted(img, cod)
        left = img[np.clip(pos - 1, 0, len(img) - 1)]
        right = img[np.clip(pos, 0, len(img) - 1)]
        dist = np.minimum(np.abs(cod - left), np.abs(cod - right))
        bad = np.flatnonzero(dist * rd > rn)
        if len(bad) == 0:
            return None
        k = int(bad[0])
        return Violation(ViolationKind.Density, (k, int(cod[k])))
    imgs = sorted(_frac(v) for v in set(image))
    for k, b in enumerate(codomain_values):
        b = _frac(b)
        i = bisect_left(imgs, b)
        best = None
        for cand in (i - 1, i):
            if 0 <= cand < len(imgs):
                d = abs(imgs[cand] - b)
                best = d if best is None else min(best, d)
        if best is None or best > R:
            return Violation(ViolationKind.Density, (k, b))
    return None


# ------------------------------------------------------------------
# verifiers
# ------------------------------------------------------------------

def _points_of(b):
    pts = getattr(b, "points", b)
    return [int(v) if isinstance(v, np.integer) else v for v in pts]


def _ensure_image_in_codomain(t: Mapping, b):
    cod = set(_points_of(b))
    for v in t.image:
        if (int(v) if isinstance(v, np.integer) else v) not in cod:
            raise ImageNotInCodomain(f"image value {v} not in codomain")


def verify_rough_isometry(a: PointSet, b, t: Mapping, c: RiConstants):
    """None when T is a rough isometry from a to b with constants c.

    Checks the pairwise distortion bounds and R-density; raises
    ImageNotInCodomain when T leaves the codomain.
    """
    _ensure_image_in_codomain(t, b)
    xs = _points_of(a)
    v = _condition_i_violation(xs, t.image, c.M, c.D)
    if v is not None:
        return v
    return _density_violation(t.image, _points_of(b), c.R)


def verify_rooted(a: PointSet, b, t: Mapping, c: RiConstants):
    """verify_rough_isometry plus T(0) = 0."""
    if not a.rooted or int(a.points[0]) != 0 or _frac(t.image[0]) != 0:
        return Violation(ViolationKind.NotRooted, (0,))
    return verify_rough_isometry(a, b, t, c)


def verify_increasing(t: Mapping):
    """None when the image list is weakly non-decreasing in domain order."""
    for i in range(1, len(t.image)):
        if _frac(t.image[i]) < _frac(t.image[i - 1]):
            return Violation(ViolationKind.NotMonotone, (i,))
    return None


def verify_markov(a: PointSet, b, t: Mapping, mc: MarkovConstants):
    """Markov rough isometry check, properties in definition order.

    (i) T(0)=0; (ii) weakly monotone; (iii) adjacent pairs with distinct
    images distorted by at most M either way; (iv) fiber diameter <= F;
    (v) R-density.  Linear scan; first failing property wins, smallest
    witness within it.
    """
    _ensure_image_in_codomain(t, b)
    if not a.rooted or int(a.points[0]) != 0 or _frac(t.image[0]) != 0:
        return Violation(ViolationKind.NotRooted, (0,))
    v = verify_increasing(t)
    if v is not None:
        return v

    xs = a.points
    integer = t.is_integer()
    M, F, R = mc.M, mc.F, mc.R
    if integer and len(xs) > 1:
        ys = np.asarray(t.image, dtype=np.int64)
        dx = np.diff(xs).astype(np.int64)
        dy = np.diff(ys)
        mn, md = M.numerator, M.denominator
        moved = dy != 0
        bad = moved & ((dy * md > dx * mn) | (dy * mn < dx * md))
        idx = np.flatnonzero(bad)
        if len(idx):
            i = int(idx[0])
            return Violation(ViolationKind.AdjacencyDistortion, (i, i + 1))
        # fibers: maximal runs of equal image values
        fn, fd = F.numerator, F.denominator
        bounds = np.flatnonzero(moved)
        starts = np.concatenate(([0], bounds + 1))
        ends = np.concatenate((bounds, [len(ys) - 1]))
        width = xs[ends] - xs[starts]
        badf = np.flatnonzero(width * fd > fn)
        if len(badf):
            k = int(badf[0])
            return Violation(ViolationKind.FiberWidth, (int(starts[k]), int(ends[k])))
    else:
        ys = t.image
        for i in range(1, len(ys)):
            dyv = _frac(ys[i]) - _frac(ys[i - 1])
            dxv = _frac(int(xs[i]) - int(xs[i - 1]))
            if dyv != 0 and (dyv > M * dxv or dyv < dxv / M):
                return Violation(ViolationKind.AdjacencyDistortion, (i - 1, i))
        start = 0
        for i in range(1, len(ys) + 1):
            if i == len(ys) or _frac(ys[i]) != _frac(ys[start]):
                if _frac(int(xs[i - 1]) - int(xs[start])) > F:
                    return Violation(ViolationKind.FiberWidth, (start, i - 1))
                start = i
    return _density_violation(t.image, _points_of(b), R)


# ------------------------------------------------------------------
# constant conversions
# ------------------------------------------------------------------

def markov_to_increasing_constants(mc: MarkovConstants) -> RiConstants:
    """(M, F, R) Markov constants give a rooted increasing rough isometry
    with constants (2F + M, 1/2, R)."""
    return RiConstants(2 * mc.F + mc.M, Fraction(1, 2), mc.R)


def increasing_to_markov_constants(c: RiConstants) -> MarkovConstants:
    """(M, D, R) rooted increasing constants give Markov constants
    (MD + M + D, MD, R)."""
    return MarkovConstants(c.M * c.D + c.M + c.D, c.M * c.D, c.R)


# ------------------------------------------------------------------
# cut points, restriction, big-gap predicates
# ------------------------------------------------------------------

def find_cut_point(a: PointSet, b, t: Mapping):
    """Smallest x in the domain after which T never crosses back over T(x).

    x qualifies when all later points map weakly above T(x), or all map
    weakly below.  On finite sets the last point qualifies vacuously, so a
    cut point always exists; the smallest is returned.
    """
    ys = [_frac(v) for v in t.image]
    n = len(ys)
    suf_min = [None] * (n + 1)
    suf_max = [None] * (n + 1)
    for i in range(n - 1, -1, -1):
        suf_min[i] = ys[i] if suf_min[i + 1] is None else min(ys[i], suf_min[i + 1])
        suf_max[i] = ys[i] if suf_max[i + 1] is None else max(ys[i], suf_max[i + 1])
    for i in range(n):
        later_min, later_max = suf_min[i + 1], suf_max[i + 1]
        if later_min is None or later_min >= ys[i] or later_max <= ys[i]:
            return int(a.points[i])
    return int(a.points[-1])


def restrict(a: PointSet, b: PointSet, t: Mapping, n: int, L, c: RiConstants):
    """Restrict T to the first n domain points, cutting the codomain.

    The codomain is cut at B(m) with m minimal such that the restricted
    image fits, and the candidate constants (M, D, L) are returned; the
    verifier decides validity downstream.
    """
    if n < 1 or n > len(a.points):
        raise PreconditionViolated("n out of range")
    a_n = a.prefix(n)
    image = t.image[:n]
    maxv = max(int(v) for v in image)
    bpts = b.points
    m = int(np.searchsorted(bpts, maxv)) + 1
    b_m = b.prefix(m)
    t_r = Mapping(a_n, image, b_m)
    return a_n, b_m, t_r, RiConstants(c.M, c.D, _frac(L))


def event_Ew(a: PointSet, w: int, L, M, horizon: int) -> bool:
    """Is there a z > w whose gap clears max(L/4M^3, (z - w)/2M^2)?

    Scans points z in (w, horizon] that have a successor in a.  The answer
    is exact for the whole configuration when a trigger is found, when
    L/4M^3 exceeds every gap of a, or when horizon >= w + 2 M^2 max_gap(a)
    (beyond that distance the (z - w)/2M^2 arm exceeds every gap); raises
    HorizonTooSmall otherwise.
    """
    if horizon < w:
        raise PreconditionViolated("horizon < w")
    L, M = _frac(L), _frac(M)
    thr = L / (4 * M**3)
    pts = a.points
    gaps = a.gaps
    max_gap = int(gaps.max()) if len(gaps) else 0
    for i in range(len(pts) - 1):
        z = int(pts[i])
        if z <= w or z > horizon:
            continue
        g = _frac(int(gaps[i]))
        if g >= thr and g >= _frac(z - w) / (2 * M**2):
            return True
    if max_gap < thr:
        return False
    if _frac(horizon) >= _frac(w) + 2 * M**2 * max_gap:
        return False
    raise HorizonTooSmall(
        f"horizon {horizon} cannot certify absence; need >= w + 2M^2*max_gap"
    )


def l_min_big_gap(M, D) -> Fraction:
    """Smallest back-jump size the big-gap conclusion supports.

    L >= 2D makes (L - D)/M >= L/2M, and L >= 8DM^2 lets the gap bound
    absorb the 2D/M loss; the max of the two is the tightest rational the
    argument supports.
    """
    M, D = _frac(M), _frac(D)
    return max(2 * D, 8 * D * M**2)


def big_gap_conclusion(a: PointSet, t: Mapping, x: int, y: int, c: RiConstants, L):
    """Locate the large-gap point forced by a back-jump of size L.

    Given x < y in the domain with T(y) <= T(x) - L and L at least
    l_min_big_gap(M, D), returns the largest z with T(z) <= T(x); it
    satisfies z - x >= L/2M and Gap(z) >= (z - x)/2M^2.  None signals the
    re-checked inequalities failed (hypothesis violated).
    """
    L = _frac(L)
    pts = [int(p) for p in a.points]
    if x not in pts or y not in pts or not x < y:
        raise PreconditionViolated("x < y must both lie in the domain")
    if L < l_min_big_gap(c.M, c.D) or L <= 0:
        raise PreconditionViolated("L below the supported minimum")
    ix, iy = pts.index(x), pts.index(y)
    tx, ty = _frac(t.image[ix]), _frac(t.image[iy])
    if ty > tx - L:
        raise PreconditionViolated("need T(y) <= T(x) - L")
    iz = max(i for i in range(len(pts)) if _frac(t.image[i]) <= tx)
    z = pts[iz]
    if _frac(z - x) < L / (2 * c.M):
        return None
    if iz + 1 < len(pts):
        gap = _frac(pts[iz + 1] - z)
        if gap < _frac(z - x) / (2 * c.M**2):
            return None
    return z
