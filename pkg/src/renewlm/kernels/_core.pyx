# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled pair kernels (OpenMP + vectorized pow); see fastpow.h."""

import numpy as np

from libc.stdint cimport int64_t

cdef extern from "fastpow.h" nogil:
    double rlm_fastpow(double x, double w)
    double rlm_pairwise_pow_sum(const double *x, int64_t n, double w,
                                int64_t min_sep, double *rows)
    double rlm_pairwise_acov_sum(const double *t, int64_t n,
                                 const double *table, int64_t tlen,
                                 double coef, double w, double *rows)
    void rlm_scatter_add_reversed(double *out, const int64_t *pos,
                                  int64_t npos, const double *arev,
                                  int64_t la, int64_t base)


def pairwise_pow_sum(double[::1] x, double w, Py_ssize_t min_sep=1):
    """sum over pairs j - i >= min_sep of (x[j] - x[i])**w."""
    cdef Py_ssize_t n = x.shape[0]
    if n - min_sep <= 0:
        return 0.0
    rows_arr = np.empty(n - min_sep, dtype=np.float64)
    cdef double[::1] rows = rows_arr
    cdef double s
    with nogil:
        s = rlm_pairwise_pow_sum(&x[0], n, w, min_sep, &rows[0])
    return s


def pairwise_acov_sum(double[::1] t, double[::1] table, double coef, double w):
    """sum over pairs i < j of gamma(t[j]-t[i]) with gamma(h) = table[h] for
    h < len(table), else coef * h**w (coef 0 means zero beyond the table)."""
    cdef Py_ssize_t n = t.shape[0]
    if n < 2:
        return 0.0
    rows_arr = np.empty(n - 1, dtype=np.float64)
    cdef double[::1] rows = rows_arr
    cdef double s
    with nogil:
        s = rlm_pairwise_acov_sum(&t[0], n, &table[0], table.shape[0],
                                  coef, w, &rows[0])
    return s


def scatter_add_reversed(double[::1] out, int64_t[::1] pos,
                         double[::1] a_rev, int64_t base):
    """out[p - base - (la-1) : p - base + 1] += a_rev for each p in pos."""
    cdef Py_ssize_t npos = pos.shape[0]
    cdef Py_ssize_t la = a_rev.shape[0]
    if npos == 0 or la == 0:
        return
    cdef int64_t lo = pos[0] - base - (la - 1)
    cdef int64_t hi = pos[npos - 1] - base
    if lo < 0 or hi >= out.shape[0]:
        raise ValueError("scatter_add_reversed: slice out of range")
    with nogil:
        rlm_scatter_add_reversed(&out[0], &pos[0], npos, &a_rev[0], la, base)


def fastpow(double x, double w):
    """Scalar probe of the vector pow (accuracy tests)."""
    return rlm_fastpow(x, w)
