"""Percolation and point-process samplers plus the explicit couplings.

Gap laws:

* rooted Bernoulli percolation with parameter p: 0 is a point, gaps are
  i.i.d. Geometric(p) on {1, 2, ...};
* Geom_{<=M}(1/2): Geometric(1/2) conditioned to be at most M;
* Geom_{>M}(1/2): conditioned to exceed M, equivalently M + Geometric(1/2).

p = 1/2 draws use exact integer inverse-CDF bit arithmetic (leading-zero
counts of 64-bit words), so they are reproducible bit for bit on every
platform; other parameters use the float inverse CDF on the top 53 bits of
the same words.  All draws are counter based, keyed by purpose label, so
adding a sampler never perturbs existing streams.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from . import _kernels as K
from ._rng import Seed, uniform01, value_at
from .errors import EmptyWindow, PreconditionViolated
from .pointsets import DYADIC_DEN, PointSet, RealPointSet
from .verify import Mapping, RiConstants


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


HALF = Fraction(1, 2)


# ------------------------------------------------------------------
# basic samplers
# ------------------------------------------------------------------

def sample_bernoulli_rooted(count_points: int, p, seed: Seed) -> PointSet:
    """Rooted percolation prefix with exactly count_points points."""
    if count_points < 1:
        raise PreconditionViolated("count_points must be >= 1")
    p = _frac(p)
    if not 0 < p < 1:
        raise PreconditionViolated("p must be in (0, 1)")
    n = count_points - 1
    key = seed.key("bernoulli-gaps")
    if p == HALF:
        gaps = K.geom_half_block(key, 0, n)
    else:
        u = K.u64_block(key, 0, n)
        u53 = (u >> np.uint64(11)).astype(np.float64) * (1.0 / 2**53)
        gaps = np.floor(np.log1p(-u53) / math.log1p(-float(p))).astype(np.int64) + 1
    return PointSet.from_gaps(gaps, rooted=True)


def sample_geom_truncated(M: int, seed: Seed) -> int:
    """One draw of Geometric(1/2) conditioned to be <= M (inverse CDF)."""
    if M < 1:
        raise PreconditionViolated("M must be >= 1")
    s = seed.stream("geom-truncated")
    return int(K.geom_trunc_block(s.key, s.counter, 1, M)[0])


def sample_geom_shifted(M: int, seed: Seed) -> int:
    """One draw of M + Geometric(1/2)."""
    if M < 0:
        raise PreconditionViolated("M must be >= 0")
    s = seed.stream("geom-shifted")
    return int(K.geom_shifted_block(s.key, s.counter, 1, M)[0])


def couple_dominance(M: int, seed: Seed):
    """Monotone coupling of Geom_{<=M}(1/2) below Geometric(1/2).

    Draws i.i.d. Geometric(1/2) values Z1, Z2, ...; y = Z1 and x = the
    first Z_i <= M, so x <= y on every draw while the marginals are exact.
    """
    if M < 1:
        raise PreconditionViolated("M must be >= 1")
    key = seed.key("dominance")
    i = 0
    y = None
    while True:
        z = int(K.geom_half_block(key, i, 1)[0])
        if y is None:
            y = z
        if z <= M:
            return z, y
        i += 1


def couple_dominance_block(M: int, count: int, seed: Seed):
    """Vectorized equivalent of couple_dominance over count trials.

    Where Z1 > M the first later Z_i <= M is a fresh truncated draw by
    independence, so (x, y) has the same joint law as the sequential
    algorithm.
    """
    ky = seed.key("dominance-y")
    kx = seed.key("dominance-x")
    y = K.geom_half_block(ky, 0, count)
    x_alt = K.geom_trunc_block(kx, 0, count, M)
    x = np.where(y <= M, y, x_alt)
    return x, y


def sample_with_initial_short_gaps(
    L: int, M: int, horizon_points: int, seed: Seed
) -> PointSet:
    """Percolation conditioned on L short gaps followed by one long gap.

    The first L gaps are i.i.d. Geom_{<=M}(1/2), gap L+1 is Geom_{>M}(1/2)
    and later gaps are plain Geometric(1/2): the conditioning event only
    constrains the first L+1 gaps, so the tail is unconditioned.  Sampled
    run-wise, never by rejection.
    """
    if horizon_points <= L + 1:
        raise PreconditionViolated("horizon_points must exceed L + 1")
    trunc = K.geom_trunc_block(seed.key("initial-short"), 0, L, M)
    long_gap = K.geom_shifted_block(seed.key("initial-long"), 0, 1, M)
    rest = K.geom_half_block(
        seed.key("initial-rest"), 0, horizon_points - 1 - (L + 1)
    )
    return PointSet.from_gaps(np.concatenate([trunc, long_gap, rest]), rooted=True)


# ------------------------------------------------------------------
# continuous processes and couplings
# ------------------------------------------------------------------

def sample_poisson(alpha, horizon, seed: Seed) -> RealPointSet:
    """Poisson(alpha) on (0, horizon], points on the 2**-64 dyadic grid.

    Exponential spacings are drawn by inverse CDF and snapped to the grid
    (at least one grid unit, keeping strict increase).
    """
    alpha = _frac(alpha)
    horizon = _frac(horizon)
    if alpha <= 0 or horizon <= 0:
        raise PreconditionViolated("alpha and horizon must be positive")
    limit = (horizon.numerator * DYADIC_DEN) // horizon.denominator
    key = seed.key("poisson")
    nums = []
    pos = 0
    i = 0
    rate = float(alpha)
    while True:
        u = uniform01(value_at(key, i))
        i += 1
        step = max(1, round(-math.log1p(-u) / rate * DYADIC_DEN))
        pos += step
        if pos > limit:
            break
        nums.append(pos)
    if not nums:
        raise EmptyWindow("no Poisson points before the horizon")
    return RealPointSet.from_dyadic(nums)


def percolation_coupling_scale(alpha, p) -> Fraction:
    """Interval width c = -log(1-p)/alpha, snapped exactly.

    -log(1-p) is rounded to the 2**-64 grid and then divided by alpha in
    exact rational arithmetic, so the returned c and the derived constants
    are exact rationals.
    """
    alpha, p = _frac(alpha), _frac(p)
    c_log = Fraction(round(-math.log1p(-float(p)) * DYADIC_DEN), DYADIC_DEN)
    return c_log / alpha


def couple_poisson_percolation(alpha, p, horizon, seed: Seed):
    """Couple Poisson(alpha) with Bernoulli(p) percolation on one window.

    The percolation keeps n exactly when the Poisson set meets
    [n c, (n+1) c) with c = -log(1-p)/alpha; T sends n to the smallest
    Poisson point of its interval.  Returns (poisson window, percolation,
    mapping, constants (max(c, 1/c), c, c)); the window is cut at the last
    complete interval so the density radius c is exact.
    """
    alpha, p, horizon = _frac(alpha), _frac(p), _frac(horizon)
    c = percolation_coupling_scale(alpha, p)
    n_intervals = int(horizon / c)
    if n_intervals < 1:
        raise EmptyWindow("horizon shorter than one interval")
    pois = sample_poisson(alpha, horizon, seed)
    cut = n_intervals * c
    window = [q for q in pois.points if q < cut]
    if not window:
        raise EmptyWindow("no Poisson points in the complete-interval window")
    perc_idx = sorted({int(q / c) for q in window})
    first_point = {}
    for q in window:
        n = int(q / c)
        if n not in first_point:
            first_point[n] = q
    codomain = RealPointSet(window)
    domain = PointSet(perc_idx, rooted=(perc_idx[0] == 0))
    mapping = Mapping(domain, [first_point[n] for n in perc_idx], codomain)
    consts = RiConstants(max(c, 1 / c), c, c)
    return codomain, domain, mapping, consts


def rescale_coupling(alpha, gamma, a: RealPointSet):
    """Intensity rescaling x -> (alpha/gamma) x, exact on rationals.

    Returns the scaled set, the mapping, and constants
    (max(alpha/gamma, gamma/alpha), 0, 0).
    """
    alpha, gamma = _frac(alpha), _frac(gamma)
    if alpha <= 0 or gamma <= 0:
        raise PreconditionViolated("alpha and gamma must be positive")
    if len(a.points) == 0:
        raise EmptyWindow("empty input set")
    r = alpha / gamma
    image = [r * x for x in a.points]
    scaled = RealPointSet(image)
    mapping = Mapping(a, image, scaled)
    consts = RiConstants(max(r, 1 / r), Fraction(0), Fraction(0))
    return scaled, mapping, consts
