# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel backend: fused transform/sort and column evaluation.

Mirrors _mc_fallback semantics; see that module for the contract. Power
columns whose exponent is a small rational k/r with r in {1,2,3,4,6,12}
(every QoS-exponent/share combination on the default grids) are computed
with root + integer-power chains instead of pow, which is where this
backend beats the vectorized fallback.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport cbrt, fabs, llround, log1p, log2, pow as cpow, sqrt

cnp.import_array()

NAME = "cython"

DEF MAX_NUM = 48  # largest |numerator| taken off the pow path


cdef inline double powi(double y, long long kk) nogil:
    """y**kk by squaring; kk = 0 gives 1, negative kk reciprocates."""
    cdef double acc = 1.0
    cdef long long e = kk if kk > 0 else -kk
    while e:
        if e & 1:
            acc *= y
        y *= y
        e >>= 1
    return acc if kk >= 0 else 1.0 / acc


def sorted_gains(double[:, ::1] u):
    # the transform leans on the vectorized log1p (scalar libm loses to
    # SIMD there); the per-row sort is where C wins over generic sort
    # dispatch. Insertion sort is stable, matching the fallback's order.
    out_arr = np.negative(np.log1p(np.negative(u)))
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t n = out.shape[0]
    cdef Py_ssize_t m = out.shape[1]
    cdef Py_ssize_t i, j, p
    cdef double v
    with nogil:
        for i in range(n):
            for j in range(1, m):
                v = out[i, j]
                p = j
                while p > 0 and out[i, p - 1] > v:
                    out[i, p] = out[i, p - 1]
                    p -= 1
                out[i, p] = v
    return out_arr


def eval_columns(double[:, ::1] g,
                 cnp.uint8_t[::1] kind, int[::1] user,
                 double[::1] base, double[::1] num, double[::1] expo,
                 double[::1] d0, int[::1] dptr, int[::1] didx,
                 double[::1] dcoef):
    cdef Py_ssize_t n = g.shape[0]
    cdef Py_ssize_t k = kind.shape[0]
    out_arr = np.empty((n, k), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    # per-column fast-path classification: expo ~ numer/root within one
    # part in 1e9 switches pow(arg, expo) to root chains + powi
    roots_arr = np.zeros(k, dtype=np.int32)
    numer_arr = np.zeros(k, dtype=np.int64)
    cdef int[::1] roots = roots_arr
    cdef long long[::1] numer = numer_arr
    cdef Py_ssize_t i, j, p
    cdef int r
    cdef long long kr
    cdef double t
    for j in range(k):
        if kind[j] != 0:
            continue
        for r in (1, 2, 3, 4, 6, 12):
            t = expo[j] * r
            kr = llround(t)
            if fabs(t - kr) <= 1e-9 and -MAX_NUM <= kr <= MAX_NUM:
                roots[j] = r
                numer[j] = kr
                break
    cdef double den, arg, y
    with nogil:
        for i in range(n):
            for j in range(k):
                den = d0[j]
                for p in range(dptr[j], dptr[j + 1]):
                    den += dcoef[p] * g[i, didx[p]]
                arg = base[j] + num[j] * g[i, user[j]] / den
                if kind[j] != 0:
                    out[i, j] = expo[j] * log2(arg)
                elif roots[j] == 0:
                    out[i, j] = cpow(arg, expo[j])
                else:
                    r = roots[j]
                    if r == 1:
                        y = arg
                    elif r == 2:
                        y = sqrt(arg)
                    elif r == 3:
                        y = cbrt(arg)
                    elif r == 4:
                        y = sqrt(sqrt(arg))
                    elif r == 6:
                        y = cbrt(sqrt(arg))
                    else:
                        y = cbrt(sqrt(sqrt(arg)))
                    out[i, j] = powi(y, numer[j])
    return out_arr
