# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled twins of the hot kernels in ``_pure``.

Candidate orders and accumulation association are kept identical to the pure
backend so both produce bit-identical results.
"""

import numpy as np

cimport numpy as cnp

cdef double INF = float("inf")
cdef double NAN = float("nan")


def maxaffine_grid_sup(double[::1] a, double[::1] b, double dom_lo, double dom_hi,
                       double[::1] xs, double[::1] vs):
    cdef Py_ssize_t nx = xs.shape[0]
    cdef Py_ssize_t nv = vs.shape[0]
    cdef Py_ssize_t npieces = a.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(nv, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] fx = np.empty(nx, dtype=np.float64)
    cdef double[::1] fxv = fx
    cdef Py_ssize_t i, j, k
    cdef double x, m, t, v, best, val
    for i in range(nx):
        x = xs[i]
        m = a[0] * x + b[0]
        for k in range(1, npieces):
            t = a[k] * x + b[k]
            if t > m:
                m = t
        fxv[i] = m
    for j in range(nv):
        v = vs[j]
        best = -INF
        for i in range(nx):
            x = xs[i]
            if x >= dom_lo and x <= dom_hi:
                val = v * x - fxv[i]
                if val > best:
                    best = val
        out[j] = best
    return out


cdef inline double _term_value(double y, double[::1] pa, double[::1] pb,
                               Py_ssize_t p0, Py_ssize_t p1) nogil:
    cdef double m = pa[p0] * y + pb[p0]
    cdef double t
    cdef Py_ssize_t k
    for k in range(p0 + 1, p1):
        t = pa[k] * y + pb[k]
        if t > m:
            m = t
    return m


cdef inline double _objective(double y, Py_ssize_t i, double[::1] c,
                              long long[::1] term_ptr, double[::1] term_w,
                              long long[::1] piece_ptr, double[::1] pa,
                              double[::1] pb) nogil:
    cdef double val = c[i] * y
    cdef Py_ssize_t j
    for j in range(term_ptr[i], term_ptr[i + 1]):
        val -= term_w[j] * _term_value(y, pa, pb, piece_ptr[j], piece_ptr[j + 1])
    return val


def node_lp_batch(double[::1] c, double[::1] lo, double[::1] hi,
                  long long[::1] term_ptr, double[::1] term_w,
                  long long[::1] piece_ptr, double[::1] pa, double[::1] pb):
    cdef Py_ssize_t n = c.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] vals = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ys = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t i, j, k
    cdef double s, x, val, best, ybest, loi, hii
    cdef bint have_cand, unbounded
    for i in range(n):
        loi = lo[i]
        hii = hi[i]
        unbounded = False
        if loi == -INF:
            s = c[i]
            for j in range(term_ptr[i], term_ptr[i + 1]):
                s -= term_w[j] * pa[piece_ptr[j]]
            if s < 0.0:
                unbounded = True
        if not unbounded and hii == INF:
            s = c[i]
            for j in range(term_ptr[i], term_ptr[i + 1]):
                s -= term_w[j] * pa[piece_ptr[j + 1] - 1]
            if s > 0.0:
                unbounded = True
        if unbounded:
            vals[i] = INF
            ys[i] = NAN
            continue
        best = -INF
        ybest = NAN
        have_cand = False
        if loi != -INF:
            have_cand = True
            val = _objective(loi, i, c, term_ptr, term_w, piece_ptr, pa, pb)
            if val > best:
                best = val
                ybest = loi
        if hii != INF:
            have_cand = True
            val = _objective(hii, i, c, term_ptr, term_w, piece_ptr, pa, pb)
            if val > best:
                best = val
                ybest = hii
        for j in range(term_ptr[i], term_ptr[i + 1]):
            for k in range(piece_ptr[j], piece_ptr[j + 1] - 1):
                x = (pb[k] - pb[k + 1]) / (pa[k + 1] - pa[k])
                if x >= loi and x <= hii:
                    have_cand = True
                    val = _objective(x, i, c, term_ptr, term_w, piece_ptr, pa, pb)
                    if val > best:
                        best = val
                        ybest = x
        if not have_cand:
            best = _objective(0.0, i, c, term_ptr, term_w, piece_ptr, pa, pb)
            ybest = 0.0
        vals[i] = best
        ys[i] = ybest
    return vals, ys


def product_table_max(long long[::1] ptr, double[::1] table_vals):
    cdef Py_ssize_t n = ptr.shape[0] - 1
    cdef Py_ssize_t i
    for i in range(n):
        if ptr[i + 1] == ptr[i]:
            return -INF
    cdef cnp.ndarray[cnp.int64_t, ndim=1] idx_arr = np.zeros(n, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] partial_arr = np.zeros(n + 1, dtype=np.float64)
    cdef long long[::1] ix = idx_arr
    cdef double[::1] ps = partial_arr
    cdef double best = -INF
    cdef double v
    cdef Py_ssize_t level = 0
    cdef Py_ssize_t pos
    ps[0] = 0.0
    while True:
        # fill partial sums down to the leaf (left-to-right association)
        while level < n:
            ps[level + 1] = ps[level] + table_vals[ptr[level] + ix[level]]
            level += 1
        v = ps[n]
        if v > best:
            best = v
        # odometer increment
        pos = n - 1
        while pos >= 0:
            ix[pos] += 1
            if ptr[pos] + ix[pos] < ptr[pos + 1]:
                break
            ix[pos] = 0
            pos -= 1
        if pos < 0:
            return best
        level = pos
