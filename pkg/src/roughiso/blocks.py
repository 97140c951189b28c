"""Block decomposition of a percolation into blue/red segments.

A gap is short when it is at most M, long otherwise.  Scanning from the
root, each block is a blue segment (short gaps only) from T_{k-1} up to
S_k, the first point at/after T_{k-1} carrying a long gap, followed by a
red segment from S_k up to T_k, the first point after S_k that opens K
consecutive short gaps.  Consecutive blocks share the endpoint T_k; the
scan never emits a partial block, so anything after the last complete T_k
is returned as leftover.

The red segment starts with a long gap and ends immediately after a long
gap; it may contain exactly one long gap (T_k = S_k + gap is allowed).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from ._rng import Seed
from .errors import PreconditionViolated
from .pointsets import PointSet
from .verify import Violation, ViolationKind


@dataclass(frozen=True)
class BlockParams:
    M: int
    K: int

    def __post_init__(self):
        if self.M < 1 or self.K < 1:
            raise ValueError("M and K must be >= 1")


@dataclass(frozen=True)
class Block:
    blue: PointSet      # slice [T_{k-1}, S_k], short gaps only
    red: PointSet       # slice [S_k, T_k], opens and closes with a long gap
    s_time: int
    t_time: int


@dataclass(frozen=True)
class BlockDecomposition:
    blocks: tuple
    leftover: PointSet  # trailing partial segment, shares the last T_k

    def to_json(self):
        return {
            "blocks": [
                {
                    "s_time": b.s_time,
                    "t_time": b.t_time,
                    "blue_gaps": [int(g) for g in b.blue.gaps],
                    "red_gaps": [int(g) for g in b.red.gaps],
                }
                for b in self.blocks
            ],
            "leftover_gaps": [int(g) for g in self.leftover.gaps],
        }


def decompose(a: PointSet, bp: BlockParams) -> BlockDecomposition:
    """Deterministic single pass computing the block times.

    If no complete block fits the data, everything lands in leftover.
    """
    if not a.rooted:
        raise PreconditionViolated("decompose expects a rooted point set")
    gaps = a.gaps
    s_idx, t_idx = K.decompose_scan(gaps, bp.M, bp.K)
    pts = a.points
    blocks = []
    prev_t = 0
    for s, t in zip(s_idx, t_idx):
        s, t = int(s), int(t)
        blue = PointSet(pts[prev_t : s + 1] - pts[prev_t], rooted=True)
        red = PointSet(pts[s : t + 1] - pts[s], rooted=True)
        blocks.append(Block(blue=blue, red=red, s_time=int(pts[s]), t_time=int(pts[t])))
        prev_t = t
    leftover = PointSet(pts[prev_t:] - pts[prev_t], rooted=True)
    return BlockDecomposition(blocks=tuple(blocks), leftover=leftover)


def event_E0(a: PointSet, bp: BlockParams) -> bool:
    """Does the configuration start with at least K short gaps?"""
    gaps = a.gaps
    if len(gaps) < bp.K:
        raise PreconditionViolated(f"need at least K={bp.K} gaps to decide")
    return bool((gaps[: bp.K] <= bp.M).all())


def sample_rooted_blue(L: int, M: int, seed: Seed) -> PointSet:
    """Rooted segment with L i.i.d. Geom_{<=M}(1/2) gaps."""
    if L < 1:
        raise PreconditionViolated("L must be >= 1")
    gaps = K.geom_trunc_block(seed.key("blue-gaps"), 0, L, M)
    return PointSet.from_gaps(gaps, rooted=True)


def sample_rooted_red(M: int, Kparam: int, seed: Seed) -> PointSet:
    """Rooted red segment sampled by its exact structural law.

    First gap Geom_{>M}(1/2); then N ~ Geom((1 - 2^-M)^K) - 1 i.i.d.
    subsequences, each made of Z ~ (Geom(2^-M) - 1 | < K) short gaps that
    are i.i.d. Geom_{<=M}(1/2), closed by one Geom_{>M}(1/2) long gap.
    Sampled run-wise, never by rejection.
    """
    if M < 1 or Kparam < 1:
        raise PreconditionViolated("M and K must be >= 1")
    p_all_short = (1.0 - 0.5**M) ** Kparam
    s_n = seed.stream("red-subseq-count")
    s_z = seed.stream("red-run-length")
    s_short = seed.stream("red-short-gaps")
    s_long = seed.stream("red-long-gaps")

    n_subseq = _geom_from_u(s_n.next_u64(), p_all_short) - 1
    gaps = [int(K.geom_shifted_block(s_long.key, 0, 1, M)[0])]
    long_counter = 1
    for j in range(n_subseq):
        # run length Geom(2^-M) - 1 conditioned to be < K, by inverse CDF of
        # the renormalized law (never rejection)
        z = _geom_conditioned_below(s_z.next_u64(), 0.5**M, Kparam)
        if z:
            gaps.extend(
                int(g)
                for g in K.geom_trunc_block(s_short.key, s_short.counter, z, M)
            )
            s_short.counter += z
        gaps.append(int(K.geom_shifted_block(s_long.key, long_counter, 1, M)[0]))
        long_counter += 1
    return PointSet.from_gaps(np.array(gaps, dtype=np.int64), rooted=True)


def _geom_from_u(u64: int, p: float) -> int:
    """Geometric(p) on {1, 2, ...} by float inverse CDF of a 64-bit draw."""
    import math

    u = (u64 >> 11) * (1.0 / 2**53)
    if p >= 1.0:
        return 1
    return int(math.log1p(-u) // math.log1p(-p)) + 1


def _geom_conditioned_below(u64: int, p: float, k: int) -> int:
    """(Geom(p) - 1) conditioned to be < k, exact renormalized inverse CDF."""
    u = (u64 >> 11) * (1.0 / 2**53)
    q = 1.0 - p
    # CDF of Geom(p)-1 at j (j failures) is 1 - q^(j+1); renormalize to < k.
    total = 1.0 - q**k
    x = u * total
    j = 0
    acc = p
    while j < k - 1 and x >= acc:
        j += 1
        acc += p * q**j
    return j


def structure_check(dec: BlockDecomposition, bp: BlockParams):
    """Shape invariants of a decomposition; None when sound.

    Blue segments carry only short gaps; red segments open with a long gap,
    close immediately after a long gap, and contain no K-run of short gaps
    before their end; blocks after the first have blue length >= K.
    """
    for k, blk in enumerate(dec.blocks):
        bg = blk.blue.gaps
        rg = blk.red.gaps
        if len(bg) and (bg > bp.M).any():
            return Violation(ViolationKind.AdjacencyDistortion, ("blue-long-gap", k))
        if len(rg) == 0 or rg[0] <= bp.M or rg[-1] <= bp.M:
            return Violation(ViolationKind.AdjacencyDistortion, ("red-ends", k))
        run = 0
        for g in rg[:-1]:
            run = run + 1 if g <= bp.M else 0
            if run >= bp.K:
                return Violation(
                    ViolationKind.AdjacencyDistortion, ("red-short-run", k)
                )
        if k > 0 and len(bg) < bp.K:
            return Violation(ViolationKind.AdjacencyDistortion, ("blue-short", k))
    # leftover never contains a complete red segment: no long gap in the
    # leftover may be followed by a K-run of short gaps within the data
    lg = dec.leftover.gaps
    s_idx, _t = K.decompose_scan(lg, bp.M, bp.K)
    if len(_t):
        return Violation(ViolationKind.AdjacencyDistortion, ("leftover-block",))
    return None
