"""Bijective vectorization layouts for lower-triangular factors.

Three layouts map the entries of an order-h lower-triangular matrix into a
flat vector:

* rowwise: lower-triangle entries in row-major order, length h(h+1)/2.
  Reading it from a column-major factor touches memory with stride h, so
  packing is one scattered gather.
* fullmatrix: the whole h*h column-major buffer, zeros included. Packing
  is a single contiguous copy but every downstream per-entry operation
  pays for the zero half.
* recursive: divide and conquer. The square off-diagonal block (rows
  ceil(h/2)..h-1, columns 0..ceil(h/2)-1) is emitted first in column-major
  order, then the two diagonal triangles recursively, until blocks of
  order <= h0 fall back to rowwise. Length h(h+1)/2, and almost all of the
  vector is long contiguous column segments of the source buffer.

Each layout precomputes its permutation into the column-major buffer, and
for the recursive and fullmatrix layouts a copy plan that moves coalesced
runs as slice copies, so packing many factors stays memory-bound instead
of gather-bound.
"""

import time

import numpy as np

from .errors import DimensionMismatch, InvalidThreshold
from .linalg import CholeskyFactor

ROWWISE = "rowwise"
FULLMATRIX = "fullmatrix"
RECURSIVE = "recursive"
KINDS = (ROWWISE, FULLMATRIX, RECURSIVE)

# source runs at least this long are copied as slices; shorter ones are
# batched into one gather
_RUN_THRESHOLD = 32


def _rowwise_perm(h):
    p, q = np.tril_indices(h)
    return q * h + p


def _recursive_perm(h, h0):
    out = []

    def rec(r0, c0, n):
        if n <= h0:
            p, q = np.tril_indices(n)
            out.append((c0 + q) * h + (r0 + p))
            return
        m = (n + 1) // 2
        rows = np.arange(r0 + m, r0 + n)
        cols = np.arange(c0, c0 + m)
        out.append((cols[:, None] * h + rows[None, :]).reshape(-1))
        rec(r0, c0, m)
        rec(r0 + m, c0 + m, n - m)

    rec(0, 0, h)
    return np.concatenate(out)


class VecLayout:
    """A fixed bijection between triangle positions and vector indices."""

    def __init__(self, kind, h, h0=64):
        if kind not in KINDS:
            raise DimensionMismatch(f"unknown layout kind {kind!r}")
        if h < 1:
            raise DimensionMismatch(f"matrix order must be >= 1, got {h}")
        if kind == RECURSIVE and h0 < 1:
            raise InvalidThreshold(f"recursion threshold must be >= 1, got {h0}")
        self.kind = kind
        self.h = h
        self.h0 = h0 if kind == RECURSIVE else None
        if kind == FULLMATRIX:
            self.length = h * h
            self.perm = None
        else:
            self.length = h * (h + 1) // 2
            self.perm = _rowwise_perm(h) if kind == ROWWISE else _recursive_perm(h, h0)
        self._plan = None
        self._inverse = None

    def index_of(self, p, q):
        """Vector index of triangle position (p, q), p >= q."""
        if not 0 <= q <= p < self.h:
            raise DimensionMismatch(f"({p}, {q}) is not a lower-triangle position of order {self.h}")
        if self.kind == FULLMATRIX:
            return q * self.h + p
        if self._inverse is None:
            inv = np.empty(self.h * self.h, dtype=np.int64)
            inv.fill(-1)
            inv[self.perm] = np.arange(self.length)
            self._inverse = inv
        return int(self._inverse[q * self.h + p])

    def copy_plan(self):
        """Runs of consecutive source indices, split into slice-copy and
        gather halves. Only meaningful for permutation layouts."""
        if self._plan is None:
            perm = self.perm
            d = np.diff(perm)
            breaks = np.nonzero(d != 1)[0] + 1
            starts = np.concatenate(([0], breaks))
            ends = np.concatenate((breaks, [len(perm)]))
            lens = ends - starts
            big = lens >= _RUN_THRESHOLD
            big_dst = starts[big]
            big_len = lens[big]
            big_src = perm[big_dst]
            covered = np.zeros(self.length, dtype=bool)
            for s, n in zip(big_dst, big_len):
                covered[s : s + n] = True
            small_dst = np.nonzero(~covered)[0]
            small_src = perm[small_dst]
            self._plan = (big_src, big_dst, big_len, small_dst, small_src)
        return self._plan


def build_layout(kind, h, h0=64):
    """Construct a layout; `h0` applies to the recursive kind only."""
    return VecLayout(kind, h, h0)


def _dense(L):
    if isinstance(L, CholeskyFactor):
        L = L.matrix
    return np.asarray(L, dtype=float)


def _flat(L):
    # column-major view when possible, copy otherwise
    return _dense(L).reshape(-1, order="F")


def vectorize(L, layout):
    """Pack a lower-triangular matrix into a vector under `layout`."""
    M = _dense(L)
    if M.shape[0] != layout.h:
        raise DimensionMismatch(f"factor order {M.shape[0]} vs layout order {layout.h}")
    flat = _flat(M)
    if layout.kind == FULLMATRIX:
        return flat.copy()
    return np.take(flat, layout.perm)


def unvectorize(v, layout, lam=None, interpolated=False):
    """Invert vectorize: rebuild the dense lower-triangular factor."""
    v = np.asarray(v, dtype=float)
    if v.shape[0] != layout.length:
        raise DimensionMismatch(f"vector length {v.shape[0]} vs layout length {layout.length}")
    h = layout.h
    if layout.kind == FULLMATRIX:
        M = v.reshape((h, h), order="F").copy(order="F")
    else:
        flat = np.zeros(h * h)
        flat[layout.perm] = v
        M = flat.reshape((h, h), order="F")
    return CholeskyFactor(np.asfortranarray(M), lam=lam, interpolated=interpolated)


def bulk_gather(factors, layout):
    """Stack vectorizations of several factors into a (g, length) matrix.

    The fullmatrix layout is one buffer copy per factor, and the recursive
    layout moves its long runs as slice copies with a single batched
    gather for the leftovers. The rowwise layout is the scattered-gather
    baseline.
    """
    for f in factors:
        if _dense(f).shape[0] != layout.h:
            raise DimensionMismatch(f"factor order {_dense(f).shape[0]} vs layout order {layout.h}")
    out = np.empty((len(factors), layout.length))
    if layout.kind == FULLMATRIX:
        for s, f in enumerate(factors):
            out[s] = _flat(f)
    elif layout.kind == ROWWISE:
        for s, f in enumerate(factors):
            np.take(_flat(f), layout.perm, out=out[s])
    else:
        big_src, big_dst, big_len, small_dst, small_src = layout.copy_plan()
        for s, f in enumerate(factors):
            flat = _flat(f)
            row = out[s]
            for src, dst, n in zip(big_src, big_dst, big_len):
                row[dst : dst + n] = flat[src : src + n]
            row[small_dst] = flat[small_src]
    return out


def time_gather(factors, layout, reps=3):
    """Median wall seconds of bulk_gather over `reps` runs."""
    times = []
    for _ in range(reps):
        t0 = time.perf_counter()
        bulk_gather(factors, layout)
        times.append(time.perf_counter() - t0)
    return float(np.median(times))
