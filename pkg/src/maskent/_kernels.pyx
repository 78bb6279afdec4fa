# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled hot kernels.

Must match ``_kernels_py`` exactly: same signatures, same integer
accumulators, same results to the last bit (the only floats are the
c*log2(c) sums, computed with the same libm log2).
"""

import numpy as np

from libc.math cimport log2

NAME = "cython"


def family_stats(out_codes, coords, add_table, mul_table, long long q, long long n):
    """Histogram statistics of g_k = f + k*x for every mask code k.

    See ``_kernels_py.family_stats``; identical contract.
    """
    cdef const long long[::1] f_codes = np.ascontiguousarray(out_codes, dtype=np.int64)
    cdef const long long[:, ::1] xy = np.ascontiguousarray(coords, dtype=np.int64)
    cdef const long long[:, ::1] add = np.ascontiguousarray(add_table, dtype=np.int64)
    cdef const long long[:, ::1] mul = np.ascontiguousarray(mul_table, dtype=np.int64)
    cdef Py_ssize_t size = f_codes.shape[0]
    sumsq_arr = np.zeros(size, dtype=np.int64)
    clog_arr = np.zeros(size, dtype=np.float64)
    image_arr = np.zeros(size, dtype=np.int64)
    cdef long long[::1] sumsq = sumsq_arr
    cdef double[::1] clog = clog_arr
    cdef long long[::1] image = image_arr
    fibers_arr = np.zeros(size, dtype=np.int64)
    cdef long long[::1] fibers = fibers_arr
    powq_arr = np.int64(q) ** np.arange(n, dtype=np.int64)
    cdef long long[::1] powq = powq_arr
    cdef Py_ssize_t k, x, i
    cdef long long code, c, ssq, img
    cdef double cl
    for k in range(size):
        for x in range(size):
            fibers[x] = 0
        for x in range(size):
            code = 0
            for i in range(n):
                code += add[xy[f_codes[x], i], mul[xy[k, i], xy[x, i]]] * powq[i]
            fibers[code] += 1
        ssq = 0
        img = 0
        cl = 0.0
        for x in range(size):
            c = fibers[x]
            if c > 0:
                ssq += c * c
                img += 1
                if c > 1:
                    cl += c * log2(<double> c)
        sumsq[k] = ssq
        clog[k] = cl
        image[k] = img
    return sumsq_arr, clog_arr, image_arr


def pair_stats(out_codes, coords, long long q, long long n):
    """Counts of ordered input pairs by input Hamming distance.

    See ``_kernels_py.pair_stats``; identical contract.
    """
    cdef const long long[::1] f_codes = np.ascontiguousarray(out_codes, dtype=np.int64)
    cdef const long long[:, ::1] xy = np.ascontiguousarray(coords, dtype=np.int64)
    cdef Py_ssize_t size = f_codes.shape[0]
    pairs_arr = np.zeros(n + 1, dtype=np.int64)
    compat_arr = np.zeros(n + 1, dtype=np.int64)
    cdef long long[::1] pairs = pairs_arr
    cdef long long[::1] compat = compat_arr
    cdef Py_ssize_t a, b, i
    cdef long long d
    cdef bint ok
    cdef long long fa, fb
    for a in range(size):
        fa = f_codes[a]
        for b in range(size):
            fb = f_codes[b]
            d = 0
            ok = True
            for i in range(n):
                if xy[a, i] != xy[b, i]:
                    d += 1
                elif xy[fa, i] != xy[fb, i]:
                    ok = False
            pairs[d] += 1
            if ok:
                compat[d] += 1
    return pairs_arr, compat_arr
