# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementation of the hot integrand kernels.

Same contract as hypflats._kernels_py; selected at import time by
hypflats._backend when present.

The curvature factor 1 + K r^2 z^2 is evaluated as (1-g)(1+g) + g^2 (1-z^2)
with g = sqrt(-K) r; see _kernels_py for why the naive log1p form loses
half the digits near the Klein-ball boundary.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, cos, log, sin, sqrt

cnp.import_array()


def log_kernel(double d, double q, double K, double r, z):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] zz = np.ascontiguousarray(z, dtype=np.float64)
    cdef Py_ssize_t n = zz.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef double e = 0.5 * (d - q) - 1.0
    cdef double cexp = -0.5 * (d + 1.0)
    cdef double g = sqrt(-K) * r
    cdef double base = (1.0 - g) * (1.0 + g)
    cdef double g2 = g * g
    cdef bint curved = K != 0.0
    cdef double zi, omz2, v
    cdef Py_ssize_t i
    for i in range(n):
        zi = zz[i]
        if zi <= 0.0:
            out[i] = -INFINITY
            continue
        omz2 = (1.0 - zi) * (1.0 + zi)
        v = q * log(zi)
        if e != 0.0:
            v += e * log(omz2)
        if curved:
            v += cexp * log(base + g2 * omz2)
        out[i] = v
    return out


def log_kernel_theta(double d, double q, double K, double r, theta):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] tt = np.ascontiguousarray(theta, dtype=np.float64)
    cdef Py_ssize_t n = tt.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef double e = d - q - 1.0
    cdef double cexp = -0.5 * (d + 1.0)
    cdef double g = sqrt(-K) * r
    cdef double base = (1.0 - g) * (1.0 + g)
    cdef bint curved = K != 0.0
    cdef double s, c, gc, v
    cdef Py_ssize_t i
    for i in range(n):
        s = sin(tt[i])
        if s <= 0.0:
            out[i] = -INFINITY
            continue
        c = cos(tt[i])
        v = q * log(s)
        if e != 0.0:
            v += e * log(c)
        if curved:
            gc = g * c
            v += cexp * log(base + gc * gc)
        out[i] = v
    return out
