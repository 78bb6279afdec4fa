"""Numpy fallback for the hot kernels.

Semantics must match the compiled extension in ``_kernels.pyx`` exactly:
integer accumulators throughout, the same per-mask histogram statistics,
and the same distance-shell pair counts.  All code arrays use the
canonical base-q encoding (coordinate 0 least significant).
"""

from __future__ import annotations

import numpy as np

NAME = "python"


def family_stats(out_codes, coords, add_table, mul_table, q, n):
    """Histogram statistics of g_k = f + k*x for every mask code k.

    For each of the N = q^n masks: the sum of squared fiber sizes
    (int64), the sum of c*log2(c) over fiber sizes c (float64), and the
    image size (int64).  ``out_codes`` holds f's output codes in input
    order, ``coords`` the (N, n) base-q digit matrix of all codes.
    """
    out_codes = np.ascontiguousarray(out_codes, dtype=np.int64)
    coords = np.ascontiguousarray(coords, dtype=np.int64)
    add_table = np.ascontiguousarray(add_table, dtype=np.int64)
    mul_table = np.ascontiguousarray(mul_table, dtype=np.int64)
    size = out_codes.shape[0]
    fcoords = coords[out_codes]
    powq = np.int64(q) ** np.arange(n, dtype=np.int64)
    sumsq = np.zeros(size, dtype=np.int64)
    clog = np.zeros(size, dtype=np.float64)
    image = np.zeros(size, dtype=np.int64)
    masked = np.zeros(size, dtype=np.int64)
    for k in range(size):
        kd = coords[k]
        masked[:] = 0
        for i in range(n):
            masked += add_table[fcoords[:, i], mul_table[kd[i], coords[:, i]]] * powq[i]
        fibers = np.bincount(masked, minlength=size)
        fibers = fibers[fibers > 0]
        sumsq[k] = int(np.sum(fibers * fibers))
        clog[k] = float(np.sum(fibers * np.log2(fibers)))
        image[k] = fibers.size
    return sumsq, clog, image


def pair_stats(out_codes, coords, q, n):
    """Counts of ordered input pairs by input Hamming distance.

    Returns (pairs, compatible), both int64 of length n+1.  pairs[d]
    counts ordered pairs (x, x') with dist(x, x') = d; compatible[d]
    counts those with f(x)_i = f(x')_i on every coordinate where
    x_i = x'_i.  A compatible pair at distance d collides under exactly
    q^(n-d) masks, an incompatible one under none.
    """
    out_codes = np.ascontiguousarray(out_codes, dtype=np.int64)
    coords = np.ascontiguousarray(coords, dtype=np.int64)
    size = out_codes.shape[0]
    fcoords = coords[out_codes]
    pairs = np.zeros(n + 1, dtype=np.int64)
    compatible = np.zeros(n + 1, dtype=np.int64)
    for a in range(size):
        out_diff = fcoords != fcoords[a]
        in_diff = coords != coords[a]
        dist = np.sum(in_diff, axis=1)
        ok = np.all(in_diff >= out_diff, axis=1)
        pairs += np.bincount(dist, minlength=n + 1).astype(np.int64)
        compatible += np.bincount(dist[ok], minlength=n + 1).astype(np.int64)
    return pairs, compatible
