"""Counter-based deterministic random streams.

Every random draw in the package is a pure function of
``(master seed, stream label, counter)``.  The mixing function is the
splitmix64 finalizer, so draws are reproducible bit for bit across runs,
platforms and thread counts, and adding a new sampler (a new label) never
perturbs existing streams.

Specified hashes (also used for per-trial seed derivation):

    mix64(x)        = splitmix64 finalizer of (x + GOLDEN)
    label_key(s)    = mix64(master ^ mix64(fnv1a64(s)))
    value(key, i)   = mix64(key ^ (i * GOLDEN))          for counter i >= 0
    hash64(a, b)    = mix64(a ^ mix64(b ^ 0xA5A5A5A5A5A5A5A5))

Per-trial masters are ``hash64(master, trial_index)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN = 0x9E3779B97F4A7C15


def mix64(x: int) -> int:
    """splitmix64 output function on a 64-bit state."""
    z = (x + GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return (z ^ (z >> 31)) & MASK64


def fnv1a64(s: str) -> int:
    h = 0xCBF29CE484222325
    for b in s.encode("utf-8"):
        h = ((h ^ b) * 0x100000001B3) & MASK64
    return h


def hash64(a: int, b: int) -> int:
    """Combine two 64-bit values; used to derive per-trial masters."""
    return mix64((a & MASK64) ^ mix64((b & MASK64) ^ 0xA5A5A5A5A5A5A5A5))


def label_key(master: int, label: str) -> int:
    return mix64((master & MASK64) ^ mix64(fnv1a64(label)))


def value_at(key: int, index: int) -> int:
    """The index-th 64-bit draw of the stream with the given key."""
    return mix64((key & MASK64) ^ ((index * GOLDEN) & MASK64))


def uniform01(u: int) -> float:
    """Map a 64-bit draw to a double in [0, 1) using the top 53 bits."""
    return (u >> 11) * (1.0 / 9007199254740992.0)


@dataclass(frozen=True)
class Seed:
    """Master seed plus the labelled-stream bookkeeping.

    ``streams`` records (label, counter) pairs of sequential streams handed
    out so far; identical (master, labels) reproduce identical draws.
    """

    master: int
    streams: tuple = field(default_factory=tuple)

    def key(self, label: str) -> int:
        return label_key(self.master, label)

    def stream(self, label: str) -> "Stream":
        return Stream(self.key(label))

    def for_trial(self, index: int) -> "Seed":
        return Seed(hash64(self.master, index))


class Stream:
    """Sequential view over a counter-based stream (random access via at)."""

    __slots__ = ("key", "counter")

    def __init__(self, key: int, counter: int = 0):
        self.key = key
        self.counter = counter

    def at(self, index: int) -> int:
        return value_at(self.key, index)

    def next_u64(self) -> int:
        v = value_at(self.key, self.counter)
        self.counter += 1
        return v

    def next_float(self) -> float:
        return uniform01(self.next_u64())
