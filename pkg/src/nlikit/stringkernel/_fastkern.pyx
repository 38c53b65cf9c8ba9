# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Gram backend: merge-join over sorted hashed p-gram profiles.

Rows are computed in parallel (OpenMP); every entry is a fixed integer
merge, so output is bit-identical regardless of thread count.
"""

import numpy as np

cimport numpy as cnp
from cython.parallel cimport prange

cnp.import_array()


cdef inline cnp.int64_t _pair_value(const cnp.uint64_t* h1, const cnp.int64_t* c1,
                                    Py_ssize_t n1,
                                    const cnp.uint64_t* h2, const cnp.int64_t* c2,
                                    Py_ssize_t n2, int kind_code) noexcept nogil:
    cdef Py_ssize_t a = 0, b = 0
    cdef cnp.int64_t acc = 0
    while a < n1 and b < n2:
        if h1[a] == h2[b]:
            if kind_code == 0:
                acc += 1
            else:
                acc += c1[a] if c1[a] < c2[b] else c2[b]
            a += 1
            b += 1
        elif h1[a] < h2[b]:
            a += 1
        else:
            b += 1
    return acc


def gram_counts(const cnp.uint64_t[::1] ha, const cnp.int64_t[::1] ca,
                const cnp.int64_t[::1] oa,
                const cnp.uint64_t[::1] hb, const cnp.int64_t[::1] cb,
                const cnp.int64_t[::1] ob,
                int kind_code, bint symmetric):
    cdef Py_ssize_t n = oa.shape[0] - 1
    cdef Py_ssize_t m = ob.shape[0] - 1
    out_arr = np.zeros((n, m), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] out = out_arr
    if n == 0 or m == 0 or (ha.shape[0] == 0 and hb.shape[0] == 0):
        return out_arr

    cdef const cnp.uint64_t* hap = &ha[0] if ha.shape[0] else NULL
    cdef const cnp.int64_t* cap = &ca[0] if ca.shape[0] else NULL
    cdef const cnp.uint64_t* hbp = &hb[0] if hb.shape[0] else NULL
    cdef const cnp.int64_t* cbp = &cb[0] if cb.shape[0] else NULL

    cdef Py_ssize_t i, j, j0, s1, s2
    cdef cnp.int64_t v
    for i in prange(n, nogil=True, schedule='static'):
        j0 = i if symmetric else 0
        s1 = oa[i]
        for j in range(j0, m):
            s2 = ob[j]
            v = _pair_value(hap + s1, cap + s1, oa[i + 1] - s1,
                            hbp + s2, cbp + s2, ob[j + 1] - s2, kind_code)
            out[i, j] = v
            if symmetric:
                out[j, i] = v
    return out_arr
