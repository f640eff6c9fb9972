# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. See ``_kernels_py.py`` for the reference semantics."""

import numpy as np
cimport numpy as cnp
from libc.math cimport floor

cnp.import_array()


def interference_sums(a, b):
    cdef double complex[::1] av = np.ascontiguousarray(a, dtype=np.complex128).ravel()
    cdef double complex[::1] bv = np.ascontiguousarray(b, dtype=np.complex128).ravel()
    cdef Py_ssize_t n = av.shape[0]
    cdef Py_ssize_t i
    cdef double na = 0.0, nb = 0.0, xr = 0.0, xi = 0.0
    cdef double ar, ai, br, bi
    if bv.shape[0] != n:
        raise ValueError("arrays must have the same size")
    with nogil:
        for i in range(n):
            ar = av[i].real
            ai = av[i].imag
            br = bv[i].real
            bi = bv[i].imag
            na += ar * ar + ai * ai
            nb += br * br + bi * bi
            xr += ar * br + ai * bi
            xi += ar * bi - ai * br
    return na, nb, complex(xr, xi)


def coincidence_pairs(t1, t2, double window, double bin_width):
    cdef double[::1] a = np.ascontiguousarray(t1, dtype=np.float64)
    cdef double[::1] b = np.ascontiguousarray(t2, dtype=np.float64)
    cdef Py_ssize_t nbins = <Py_ssize_t>round(2.0 * window / bin_width)
    counts_arr = np.zeros(nbins, dtype=np.int64)
    cdef cnp.int64_t[::1] counts = counts_arr
    cdef Py_ssize_t n1 = a.shape[0], n2 = b.shape[0]
    cdef Py_ssize_t i, j, start = 0, idx
    cdef long long total = 0
    cdef double dt
    with nogil:
        for i in range(n1):
            while start < n2 and b[start] - a[i] < -window:
                start += 1
            j = start
            while j < n2:
                dt = b[j] - a[i]
                if dt > window:
                    break
                idx = <Py_ssize_t>floor((dt + window) / bin_width)
                if idx >= nbins:
                    idx = nbins - 1
                elif idx < 0:
                    idx = 0
                counts[idx] += 1
                total += 1
                j += 1
    return counts_arr, int(total)
