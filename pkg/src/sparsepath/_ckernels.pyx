# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled coordinate-descent kernels (see _pykernels for the reference)."""

from libc.math cimport sqrt, fabs
from libc.stdlib cimport malloc, free
from scipy.linalg.cython_blas cimport ddot, daxpy


def cd_sweep(const double[::1, :] X, double[::1] r, double[::1] beta,
             const Py_ssize_t[::1] idx, double l1, double denom, double inv_n):
    cdef int n = <int>X.shape[0]
    cdef int one = 1
    cdef Py_ssize_t t, j
    cdef double old, z, new, delta, neg
    cdef double max_change = 0.0
    cdef double *xj
    for t in range(idx.shape[0]):
        j = idx[t]
        xj = <double *>&X[0, j]
        old = beta[j]
        z = ddot(&n, xj, &one, &r[0], &one) * inv_n + old
        if z > l1:
            new = (z - l1) / denom
        elif z < -l1:
            new = (z + l1) / denom
        else:
            new = 0.0
        if new != old:
            delta = new - old
            neg = -delta
            daxpy(&n, &neg, xj, &one, &r[0], &one)
            beta[j] = new
            if fabs(delta) > max_change:
                max_change = fabs(delta)
    return max_change


def group_sweep(const double[::1, :] X, double[::1] r, double[::1] beta,
                const Py_ssize_t[::1] starts, const Py_ssize_t[::1] sizes,
                const Py_ssize_t[::1] gidx, double lam, double inv_n):
    cdef int n = <int>X.shape[0]
    cdef int one = 1
    cdef Py_ssize_t t, g, s, w, k
    cdef double norm, thr, factor, delta, neg
    cdef double max_change = 0.0
    cdef Py_ssize_t wmax = 1
    cdef double *z
    for t in range(sizes.shape[0]):
        if sizes[t] > wmax:
            wmax = sizes[t]
    z = <double *>malloc(wmax * sizeof(double))
    if z == NULL:
        raise MemoryError()
    try:
        for t in range(gidx.shape[0]):
            g = gidx[t]
            s = starts[g]
            w = sizes[g]
            norm = 0.0
            for k in range(w):
                z[k] = ddot(&n, <double *>&X[0, s + k], &one, &r[0], &one) * inv_n + beta[s + k]
                norm += z[k] * z[k]
            norm = sqrt(norm)
            thr = lam * sqrt(<double>w)
            if norm > thr:
                factor = 1.0 - thr / norm
            else:
                factor = 0.0
            for k in range(w):
                delta = factor * z[k] - beta[s + k]
                if delta != 0.0:
                    neg = -delta
                    daxpy(&n, &neg, <double *>&X[0, s + k], &one, &r[0], &one)
                    beta[s + k] = factor * z[k]
                    if fabs(delta) > max_change:
                        max_change = fabs(delta)
    finally:
        free(z)
    return max_change


def col_dots(const double[::1, :] X, const double[::1] r, const Py_ssize_t[::1] idx,
             double[::1] out, double inv_n):
    cdef int n = <int>X.shape[0]
    cdef int one = 1
    cdef Py_ssize_t t, j
    for t in range(idx.shape[0]):
        j = idx[t]
        out[j] = ddot(&n, <double *>&X[0, j], &one, <double *>&r[0], &one) * inv_n


def group_norms(const double[::1, :] X, const double[::1] r,
                const Py_ssize_t[::1] starts, const Py_ssize_t[::1] sizes,
                const Py_ssize_t[::1] gidx, double[::1] out, double inv_n):
    cdef int n = <int>X.shape[0]
    cdef int one = 1
    cdef Py_ssize_t t, g, s, k
    cdef double acc, d
    for t in range(gidx.shape[0]):
        g = gidx[t]
        s = starts[g]
        acc = 0.0
        for k in range(sizes[g]):
            d = ddot(&n, <double *>&X[0, s + k], &one, <double *>&r[0], &one)
            acc += d * d
        out[g] = sqrt(acc) * inv_n
