# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled versions of the contractions in ``_pykernels``; same signatures."""
import numpy as np


cdef inline void _axpy(double complex x, const double complex *src, double complex *dst,
                       Py_ssize_t len) noexcept nogil:
    # dst += x * src on interleaved (re, im) doubles
    cdef const double *s = <const double *> src
    cdef double *d = <double *> dst
    cdef double xr = x.real, xi = x.imag
    cdef Py_ssize_t i
    for i in range(len):
        d[2 * i] += xr * s[2 * i] - xi * s[2 * i + 1]
        d[2 * i + 1] += xr * s[2 * i + 1] + xi * s[2 * i]


def pi_full(const double complex[:, ::1] E, const double complex[:, :, ::1] C):
    # loops ordered so the innermost index is contiguous; zero coefficients skipped
    cdef Py_ssize_t m = C.shape[0]
    cdef Py_ssize_t c, a, d
    cdef double complex x
    out = np.zeros((m, m, m), dtype=np.complex128)
    cdef double complex[:, :, ::1] o = out
    with nogil:
        for c in range(m):
            for d in range(m):
                x = E[c, d]
                if x != 0:
                    _axpy(x, &C[d, 0, 0], &o[c, 0, 0], m * m)
            for a in range(m):
                for d in range(m):
                    x = E[d, a]
                    if x != 0:
                        _axpy(-x, &C[c, d, 0], &o[c, a, 0], m)
                for d in range(m):
                    x = C[c, a, d]
                    if x != 0:
                        _axpy(-x, &E[d, 0], &o[c, a, 0], m)
    return out


def act_full(const double complex[:, ::1] F, const double complex[:, ::1] Finv, const double complex[:, :, ::1] C):
    # f mu(f^-1 ., f^-1 .) as three successive single-index contractions
    cdef Py_ssize_t m = C.shape[0]
    cdef Py_ssize_t c, a, d
    cdef double complex x
    t1 = np.zeros((m, m, m), dtype=np.complex128)
    t2 = np.zeros((m, m, m), dtype=np.complex128)
    out = np.zeros((m, m, m), dtype=np.complex128)
    cdef double complex[:, :, ::1] u = t1
    cdef double complex[:, :, ::1] v = t2
    cdef double complex[:, :, ::1] o = out
    with nogil:
        for c in range(m):
            for d in range(m):
                x = F[c, d]
                if x != 0:
                    _axpy(x, &C[d, 0, 0], &u[c, 0, 0], m * m)
            for a in range(m):
                for d in range(m):
                    x = u[c, a, d]
                    if x != 0:
                        _axpy(x, &Finv[d, 0], &v[c, a, 0], m)
            for d in range(m):
                for a in range(m):
                    x = Finv[d, a]
                    if x != 0:
                        _axpy(x, &v[c, d, 0], &o[c, a, 0], m)
    return out


def theta_form(const double complex[:, :, ::1] C, Py_ssize_t n):
    cdef Py_ssize_t j, k, s, r
    cdef double complex h1, h2
    out = np.empty((n, n), dtype=np.complex128)
    cdef double complex[:, ::1] o = out
    for j in range(n):
        for k in range(n):
            h1 = 0
            h2 = 0
            for s in range(n):
                for r in range(n):
                    h1 = h1 + C[n + j, s, n + r] * C[k, n + s, r]
                    h2 = h2 + C[n + j, n + s, n + r] * C[k, s, r]
            o[j, k] = h1 + 0.5 * h2
    return out


def ricci_form(const double complex[:, :, ::1] C, Py_ssize_t n):
    cdef Py_ssize_t j, k, s, r
    cdef double complex t1, t2, t3, t4, t5
    out = np.empty((n, n), dtype=np.complex128)
    cdef double complex[:, ::1] o = out
    for j in range(n):
        for k in range(n):
            t1 = 0
            t2 = 0
            t3 = 0
            t4 = 0
            t5 = 0
            for r in range(n):
                for s in range(n):
                    t1 = t1 + C[r, j, s] * C[n + r, n + s, n + k]
                    t2 = t2 + C[n + j, r, n + s] * C[k, n + r, s]
                    t3 = t3 + C[n + r, n + s, j] * C[r, s, n + k]
                    t4 = t4 + C[s, j, n + r] * C[n + s, n + k, r]
                    t5 = t5 + C[n + j, n + r, n + s] * C[k, r, s]
            o[j, k] = 0.5 * (t1 + t2 - t3 - t4) + 0.25 * t5
    return out


def norm2(const double complex[:, :, ::1] C):
    cdef Py_ssize_t m = C.shape[0]
    cdef Py_ssize_t c, a, b
    cdef double acc = 0.0
    for c in range(m):
        for a in range(m):
            for b in range(m):
                acc += C[c, a, b].real * C[c, a, b].real + C[c, a, b].imag * C[c, a, b].imag
    return acc
