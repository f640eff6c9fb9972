"""Pure numpy implementations of the hot kernels.

Semantics match ``_kernels.pyx`` exactly; histogram bin indices are computed
with the same floating-point expression so both backends agree bit for bit.
"""

import numpy as np


def interference_sums(a, b):
    """Return ``(sum |a|^2, sum |b|^2, sum conj(a) b)`` over all elements."""
    a = np.ascontiguousarray(a, dtype=np.complex128).ravel()
    b = np.ascontiguousarray(b, dtype=np.complex128).ravel()
    if a.shape != b.shape:
        raise ValueError("arrays must have the same size")
    return float(np.vdot(a, a).real), float(np.vdot(b, b).real), complex(np.vdot(a, b))


def coincidence_pairs(t1, t2, window, bin_width):
    """Histogram every D2 - D1 time difference within [-window, window].

    ``t1`` and ``t2`` must be sorted. Returns ``(counts, n_pairs)`` where
    ``counts`` has ``round(2 window / bin_width)`` int64 bins starting at
    ``-window``; a difference of exactly ``+window`` goes to the last bin.
    """
    t1 = np.ascontiguousarray(t1, dtype=np.float64)
    t2 = np.ascontiguousarray(t2, dtype=np.float64)
    nbins = int(round(2.0 * window / bin_width))
    counts = np.zeros(nbins, dtype=np.int64)
    if t1.size == 0 or t2.size == 0:
        return counts, 0
    # widen the search, then apply the exact dt test used by the compiled kernel
    pad = 1e-6 * window + 8.0 * np.spacing(max(abs(t1).max(), abs(t2).max()))
    lo = np.searchsorted(t2, t1 - window - pad, side="left")
    hi = np.searchsorted(t2, t1 + window + pad, side="right")
    n = hi - lo
    total = int(n.sum())
    if total == 0:
        return counts, 0
    owner = np.repeat(np.arange(t1.size), n)
    offsets = np.arange(total) - np.repeat(np.cumsum(n) - n, n)
    dt = t2[lo[owner] + offsets] - t1[owner]
    keep = (dt >= -window) & (dt <= window)
    dt = dt[keep]
    idx = np.floor((dt + window) / bin_width).astype(np.int64)
    np.clip(idx, 0, nbins - 1, out=idx)
    np.add.at(counts, idx, 1)
    return counts, int(dt.size)
