# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled quadrature kernels.  Same API as ``_kernels_py``."""
import numpy as np

from libc.math cimport fabs, sqrt
from libc.stdlib cimport malloc, free

cdef enum:
    MAXM = 8


cdef double _pairwise(double* buf, Py_ssize_t m) noexcept nogil:
    # same tree as the Python fallback: repeatedly add neighbours, carrying an odd tail
    cdef Py_ssize_t i, half
    if m == 0:
        return 0.0
    while m > 1:
        half = m // 2
        for i in range(half):
            buf[i] = buf[2 * i] + buf[2 * i + 1]
        if m % 2:
            buf[half] = buf[m - 1] + 0.0
            m = half + 1
        else:
            m = half
    return buf[0]


cdef inline double _cabs(double complex z) noexcept nogil:
    return sqrt(z.real * z.real + z.imag * z.imag)


cdef double complex _det(const double complex* h, Py_ssize_t n,
                         const long long* rows, const long long* cols, Py_ssize_t m) noexcept nogil:
    # h points at one n x n sample in row-major order
    cdef double complex a[MAXM * MAXM]
    cdef double complex det = 1.0, t, f
    cdef Py_ssize_t i, j, k, piv
    cdef double best, v
    if m == 0:
        return 1.0
    if m == 1:
        return h[rows[0] * n + cols[0]]
    if m == 2:
        return (h[rows[0] * n + cols[0]] * h[rows[1] * n + cols[1]]
                - h[rows[0] * n + cols[1]] * h[rows[1] * n + cols[0]])
    for i in range(m):
        for j in range(m):
            a[i * m + j] = h[rows[i] * n + cols[j]]
    if m == 3:
        return (a[0] * (a[4] * a[8] - a[5] * a[7])
                - a[1] * (a[3] * a[8] - a[5] * a[6])
                + a[2] * (a[3] * a[7] - a[4] * a[6]))
    for k in range(m):
        piv = k
        best = _cabs(a[k * m + k])
        for i in range(k + 1, m):
            v = _cabs(a[i * m + k])
            if v > best:
                best = v
                piv = i
        if best == 0.0:
            return 0.0
        if piv != k:
            for j in range(m):
                t = a[k * m + j]
                a[k * m + j] = a[piv * m + j]
                a[piv * m + j] = t
            det = -det
        det = det * a[k * m + k]
        for i in range(k + 1, m):
            f = a[i * m + k] / a[k * m + k]
            for j in range(k + 1, m):
                a[i * m + j] = a[i * m + j] - f * a[k * m + j]
    return det


def pairwise_sum(values):
    cdef double[::1] src = np.ascontiguousarray(values, dtype=np.float64).ravel()
    cdef Py_ssize_t m = src.shape[0], i
    cdef double* buf
    cdef double out
    if m == 0:
        return 0.0
    buf = <double*> malloc(m * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    try:
        with nogil:
            for i in range(m):
                buf[i] = src[i]
            out = _pairwise(buf, m)
    finally:
        free(buf)
    return out


def minor_abs_sums(H, rows, cols, scales):
    """For each pair q: pairwise sum over samples s of |scales[q] * det(H[s][rows[q]][:, cols[q]])|."""
    cdef const double complex[:, :, ::1] h = np.ascontiguousarray(H, dtype=np.complex128)
    cdef const long long[:, ::1] r = np.ascontiguousarray(rows, dtype=np.int64)
    cdef const long long[:, ::1] c = np.ascontiguousarray(cols, dtype=np.int64)
    cdef const double[::1] sc = np.ascontiguousarray(scales, dtype=np.float64)
    cdef Py_ssize_t N = h.shape[0], P = r.shape[0], m = r.shape[1], n = h.shape[1]
    cdef Py_ssize_t q, s
    cdef const double complex* base
    cdef double* buf
    out = np.zeros(P, dtype=np.float64)
    cdef double[::1] o = out
    if m > MAXM:
        raise ValueError(f"minor size {m} exceeds compiled limit {MAXM}")
    if N == 0 or P == 0:
        return out
    if m == 0:
        for q in range(P):
            o[q] = pairwise_sum(np.full(N, fabs(sc[q])))
        return out
    buf = <double*> malloc(P * N * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    try:
        with nogil:
            # sample-major: each H[s] is read once for all pairs
            for s in range(N):
                base = &h[s, 0, 0]
                for q in range(P):
                    buf[q * N + s] = fabs(sc[q]) * _cabs(_det(base, n, &r[q, 0], &c[q, 0], m))
            for q in range(P):
                o[q] = _pairwise(buf + q * N, N)
    finally:
        free(buf)
    return out


def minor_values(H, rows, cols):
    """det(H[s][rows][:, cols]) for every sample s (complex array)."""
    cdef const double complex[:, :, ::1] h = np.ascontiguousarray(H, dtype=np.complex128)
    cdef const long long[::1] r = np.ascontiguousarray(rows, dtype=np.int64)
    cdef const long long[::1] c = np.ascontiguousarray(cols, dtype=np.int64)
    cdef Py_ssize_t N = h.shape[0], m = r.shape[0], n = h.shape[1], s
    out = np.empty(N, dtype=np.complex128)
    if m == 0:
        out[:] = 1.0
        return out
    cdef double complex[::1] o = out
    if m > MAXM:
        raise ValueError(f"minor size {m} exceeds compiled limit {MAXM}")
    with nogil:
        for s in range(N):
            o[s] = _det(&h[s, 0, 0], n, &r[0], &c[0], m)
    return out
