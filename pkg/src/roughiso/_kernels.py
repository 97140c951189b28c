"""Hot numeric kernels with a numba backend and a pure-numpy fallback.

The backend is chosen at import time from the ``ROUGHISO_BACKEND``
environment variable (``numba`` or ``numpy``); default is numba when it
imports, numpy otherwise.  ``use_backend`` switches at runtime (used by the
benchmark and the backend-equivalence tests).

All randomness is counter based: the value of draw ``i`` of a stream with
64-bit ``key`` is ``mix64(key ^ (i * GOLDEN))``, identical to
:mod:`roughiso._rng`.  Geometric(1/2) and its truncation to {1..M} are
sampled by exact integer bit arithmetic (no floating point), so both
backends produce identical gap sequences bit for bit.
"""

from __future__ import annotations

import os

import numpy as np

U64 = np.uint64
_GOLDEN = U64(0x9E3779B97F4A7C15)
_M1 = U64(0xBF58476D1CE4E5B9)
_M2 = U64(0x94D049BB133111EB)
_ONE = U64(1)
_ZERO = U64(0)


# ------------------------------------------------------------------
# numpy (fallback) implementations
# ------------------------------------------------------------------

def _u64_block_np(key, start, count):
    idx = np.arange(start, start + count, dtype=np.uint64) * _GOLDEN
    z = (U64(key) ^ idx) + _GOLDEN
    z = (z ^ (z >> U64(30))) * _M1
    z = (z ^ (z >> U64(27))) * _M2
    return z ^ (z >> U64(31))


def _clz64_np(x):
    x = x.copy()
    out = np.zeros(x.shape, dtype=np.int64)
    zero = x == _ZERO
    for s in (32, 16, 8, 4, 2, 1):
        small = x < (_ONE << U64(64 - s))
        out += np.where(small, s, 0)
        x = np.where(small, x << U64(s), x)
    out[zero] = 64
    return out


def _geom_half_block_np(key, start, count):
    u = _u64_block_np(key, start, count)
    return _clz64_np(u) + 1


def _geom_trunc_block_np(key, start, count, m):
    u = _u64_block_np(key, start, count)
    ceil_part = (u >> U64(m)) + ((u & ((_ONE << U64(m)) - _ONE)) != _ZERO)
    x = u - ceil_part
    return _clz64_np(~x) + 1


def _geom_shifted_block_np(key, start, count, m):
    return _geom_half_block_np(key, start, count) + m


def _subsegment_labels_np(gaps, z):
    # Greedy maximal ranges of diameter <= z; labels are 1-based per point.
    n = len(gaps)
    pos = np.empty(n + 1, dtype=np.int64)
    pos[0] = 0
    np.cumsum(gaps, out=pos[1:])
    marks = np.zeros(n + 1, dtype=np.int64)
    cur = 0
    count = 1
    while True:
        j = int(np.searchsorted(pos, pos[cur] + z, side="right"))
        if j > n:
            break
        marks[j] = 1
        cur = j
        count += 1
    labels = np.cumsum(marks) + 1
    return labels, count


def _decompose_scan_np(gaps, m, k):
    # Point index p carries gap gaps[p]. Emits (s_idx, t_idx) per block.
    # S_k is the first point at/after T_{k-1} with a long gap (the k >= 2
    # case never sees equality because T_{k-1} opens k short gaps).
    n = len(gaps)
    longs = np.flatnonzero(gaps > m)
    s_list, t_list = [], []
    if len(longs) == 0:
        return (np.array(s_list, dtype=np.int64), np.array(t_list, dtype=np.int64))
    runs = np.diff(longs) - 1          # short runs strictly between longs
    tail_run = n - longs[-1] - 1       # short gaps after the last long
    t_prev = 0
    li = 0
    while True:
        while li < len(longs) and longs[li] < t_prev:
            li += 1
        if li >= len(longs):
            break
        s = int(longs[li])
        # first long at/after position li whose following short run has >= k gaps
        j = li
        t = -1
        while j < len(longs):
            run = runs[j] if j < len(longs) - 1 else tail_run
            if run >= k:
                t = int(longs[j]) + 1
                break
            j += 1
        if t < 0:
            break
        s_list.append(s)
        t_list.append(t)
        t_prev = t
        li = j + 1
    return (np.array(s_list, dtype=np.int64), np.array(t_list, dtype=np.int64))


def _comb_first_valid_np(h, a, d, limit):
    if limit <= 0:
        return -1
    offs = np.zeros(len(a), dtype=np.int64)
    for j in range(1, len(a)):
        offs[j] = offs[j - 1] + 1 + d[j - 1]
    valid = np.ones(limit, dtype=bool)
    for j in range(len(a)):
        o = int(offs[j])
        valid &= h[o:o + limit] >= a[j]
    hits = np.flatnonzero(valid)
    return int(hits[0]) + 1 if len(hits) else -1


def _comb_tail_exceed_np(keys, m, a, d, cap):
    # Number of trials whose first valid comb position exceeds cap.
    trials = len(keys)
    offs = np.zeros(len(a), dtype=np.int64)
    for j in range(1, len(a)):
        offs[j] = offs[j - 1] + 1 + d[j - 1]
    span = int(offs[-1]) + 1
    alive = np.arange(trials)
    kvec = keys.astype(np.uint64)
    exceed = 0
    base = 0
    block = 4096
    while len(alive) and base <= cap:
        npos = min(block, cap - base + 1)
        width = npos + span - 1
        idx = (np.arange(base, base + width, dtype=np.uint64) * _GOLDEN)
        u = (kvec[alive, None] ^ idx[None, :]) + _GOLDEN
        u = (u ^ (u >> U64(30))) * _M1
        u = (u ^ (u >> U64(27))) * _M2
        u = u ^ (u >> U64(31))
        ceil_part = (u >> U64(m)) + ((u & ((_ONE << U64(m)) - _ONE)) != _ZERO)
        g = _clz64_np(~(u - ceil_part).ravel()).reshape(u.shape) + 1
        ok = np.ones((len(alive), npos), dtype=bool)
        for j in range(len(a)):
            o = int(offs[j])
            ok &= g[:, o:o + npos] >= a[j]
        found = ok.any(axis=1)
        alive = alive[~found]
        base += npos
    exceed = len(alive)
    return exceed


_NUMPY_IMPL = {
    "u64_block": _u64_block_np,
    "geom_half_block": _geom_half_block_np,
    "geom_trunc_block": _geom_trunc_block_np,
    "geom_shifted_block": _geom_shifted_block_np,
    "subsegment_labels": _subsegment_labels_np,
    "decompose_scan": _decompose_scan_np,
    "comb_first_valid": _comb_first_valid_np,
    "comb_tail_exceed": _comb_tail_exceed_np,
}


# ------------------------------------------------------------------
# numba implementations
# ------------------------------------------------------------------

_NUMBA_IMPL = None
try:  # pragma: no cover - exercised when numba is installed
    from numba import njit

    @njit(cache=True)
    def _mix64_nb(x):
        z = x + U64(0x9E3779B97F4A7C15)
        z = (z ^ (z >> U64(30))) * U64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> U64(27))) * U64(0x94D049BB133111EB)
        return z ^ (z >> U64(31))

    @njit(cache=True)
    def _value_at_nb(key, i):
        return _mix64_nb(key ^ (U64(i) * U64(0x9E3779B97F4A7C15)))

    @njit(cache=True)
    def _clz64_nb(x):
        if x == U64(0):
            return 64
        n = 0
        if x >> U64(32) == U64(0):
            n += 32
            x <<= U64(32)
        if x >> U64(48) == U64(0):
            n += 16
            x <<= U64(16)
        if x >> U64(56) == U64(0):
            n += 8
            x <<= U64(8)
        if x >> U64(60) == U64(0):
            n += 4
            x <<= U64(4)
        if x >> U64(62) == U64(0):
            n += 2
            x <<= U64(2)
        if x >> U64(63) == U64(0):
            n += 1
        return n

    @njit(cache=True)
    def _geom_half_nb(u):
        return _clz64_nb(u) + 1

    @njit(cache=True)
    def _geom_trunc_nb(u, m):
        ceil_part = u >> U64(m)
        if u & ((U64(1) << U64(m)) - U64(1)) != U64(0):
            ceil_part += U64(1)
        x = u - ceil_part
        return _clz64_nb(~x) + 1

    @njit(cache=True)
    def _u64_block_nb(key, start, count):
        out = np.empty(count, dtype=np.uint64)
        k = U64(key)
        for i in range(count):
            out[i] = _value_at_nb(k, start + i)
        return out

    @njit(cache=True)
    def _geom_half_block_nb(key, start, count):
        out = np.empty(count, dtype=np.int64)
        k = U64(key)
        for i in range(count):
            out[i] = _geom_half_nb(_value_at_nb(k, start + i))
        return out

    @njit(cache=True)
    def _geom_trunc_block_nb(key, start, count, m):
        out = np.empty(count, dtype=np.int64)
        k = U64(key)
        for i in range(count):
            out[i] = _geom_trunc_nb(_value_at_nb(k, start + i), m)
        return out

    @njit(cache=True)
    def _geom_shifted_block_nb(key, start, count, m):
        out = np.empty(count, dtype=np.int64)
        k = U64(key)
        for i in range(count):
            out[i] = m + _geom_half_nb(_value_at_nb(k, start + i))
        return out

    @njit(cache=True)
    def _subsegment_labels_nb(gaps, z):
        n = len(gaps)
        labels = np.empty(n + 1, dtype=np.int64)
        labels[0] = 1
        lab = 1
        pos = 0
        start_pos = 0
        for i in range(n):
            pos += gaps[i]
            if pos - start_pos > z:
                lab += 1
                start_pos = pos
            labels[i + 1] = lab
        return labels, lab

    @njit(cache=True)
    def _decompose_scan_nb(gaps, m, k):
        n = len(gaps)
        s_buf = np.empty(n + 1, dtype=np.int64)
        t_buf = np.empty(n + 1, dtype=np.int64)
        nb = 0
        t_prev = 0
        while True:
            # S: first point at/after t_prev carrying a long gap
            s = -1
            p = t_prev
            while p < n:
                if gaps[p] > m:
                    s = p
                    break
                p += 1
            if s < 0:
                break
            # T: first point after s opening k consecutive short gaps
            t = -1
            run = 0
            q = s + 1
            while q < n:
                if gaps[q] <= m:
                    run += 1
                    if run == k:
                        t = q - k + 1
                        break
                else:
                    run = 0
                q += 1
            if t < 0:
                break
            s_buf[nb] = s
            t_buf[nb] = t
            nb += 1
            t_prev = t
        return s_buf[:nb], t_buf[:nb]

    @njit(cache=True)
    def _comb_first_valid_nb(h, a, d, limit):
        m = len(a)
        offs = np.zeros(m, dtype=np.int64)
        for j in range(1, m):
            offs[j] = offs[j - 1] + 1 + d[j - 1]
        for l in range(1, limit + 1):
            ok = True
            for j in range(m):
                if h[l - 1 + offs[j]] < a[j]:
                    ok = False
                    break
            if ok:
                return l
        return -1

    @njit(cache=True)
    def _comb_tail_exceed_nb(keys, m, a, d, cap):
        nt = len(keys)
        mm = len(a)
        offs = np.zeros(mm, dtype=np.int64)
        for j in range(1, mm):
            offs[j] = offs[j - 1] + 1 + d[j - 1]
        exceed = 0
        for t in range(nt):
            key = U64(keys[t])
            found = False
            for l in range(1, cap + 1):
                ok = True
                for j in range(mm):
                    g = _geom_trunc_nb(_value_at_nb(key, l - 1 + offs[j]), m)
                    if g < a[j]:
                        ok = False
                        break
                if ok:
                    found = True
                    break
            if not found:
                exceed += 1
        return exceed

    _NUMBA_IMPL = {
        "u64_block": _u64_block_nb,
        "geom_half_block": _geom_half_block_nb,
        "geom_trunc_block": _geom_trunc_block_nb,
        "geom_shifted_block": _geom_shifted_block_nb,
        "subsegment_labels": _subsegment_labels_nb,
        "decompose_scan": _decompose_scan_nb,
        "comb_first_valid": _comb_first_valid_nb,
        "comb_tail_exceed": _comb_tail_exceed_nb,
    }
except ImportError:  # pragma: no cover
    _NUMBA_IMPL = None


_env = os.environ.get("ROUGHISO_BACKEND", "").strip().lower()
if _env == "numpy" or _NUMBA_IMPL is None:
    _active_name, _active = "numpy", _NUMPY_IMPL
else:
    _active_name, _active = "numba", _NUMBA_IMPL


def backend_name() -> str:
    return _active_name


def use_backend(name: str) -> None:
    """Switch kernel backend at runtime ('numba' or 'numpy')."""
    global _active, _active_name
    if name == "numpy":
        _active, _active_name = _NUMPY_IMPL, "numpy"
    elif name == "numba":
        if _NUMBA_IMPL is None:
            raise RuntimeError("numba backend unavailable")
        _active, _active_name = _NUMBA_IMPL, "numba"
    else:
        raise ValueError(f"unknown backend {name!r}")


def u64_block(key, start, count):
    return _active["u64_block"](U64(key), start, count)


def geom_half_block(key, start, count):
    """count i.i.d. Geometric(1/2) values on {1,2,...} from stream counters."""
    return _active["geom_half_block"](U64(key), start, count)


def geom_trunc_block(key, start, count, m):
    """count i.i.d. Geometric(1/2) values conditioned to be <= m."""
    return _active["geom_trunc_block"](U64(key), start, count, m)


def geom_shifted_block(key, start, count, m):
    """count i.i.d. values of m + Geometric(1/2)."""
    return _active["geom_shifted_block"](U64(key), start, count, m)


def subsegment_labels(gaps, z):
    """Greedy division into maximal diameter-<=z ranges.

    Returns (labels, count): 1-based range label per point (len(gaps)+1
    points), and the number of ranges.
    """
    gaps = np.ascontiguousarray(gaps, dtype=np.int64)
    labels, count = _active["subsegment_labels"](gaps, int(z))
    return labels, int(count)


def decompose_scan(gaps, m, k):
    """Block boundary scan; returns (s_idx, t_idx) point-index arrays."""
    gaps = np.ascontiguousarray(gaps, dtype=np.int64)
    return _active["decompose_scan"](gaps, int(m), int(k))


def comb_first_valid(h, a, d, limit):
    """Smallest 1-based position l <= limit where every tooth fits, or -1."""
    h = np.ascontiguousarray(h, dtype=np.int64)
    a = np.ascontiguousarray(a, dtype=np.int64)
    d = np.ascontiguousarray(d, dtype=np.int64)
    return int(_active["comb_first_valid"](h, a, d, int(limit)))


def comb_tail_exceed(keys, m, a, d, cap):
    """Count of trial streams whose first valid comb position exceeds cap."""
    keys = np.ascontiguousarray(keys, dtype=np.uint64)
    a = np.ascontiguousarray(a, dtype=np.int64)
    d = np.ascontiguousarray(d, dtype=np.int64)
    return int(_active["comb_tail_exceed"](keys, int(m), a, d, int(cap)))
