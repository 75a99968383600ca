"""Compiled inner-loop kernels for the SPADE solvers.

Mirrors ``_kernels_py`` exactly; the two backends must agree bit for bit.
"""
from libcpp.vector cimport vector
from libcpp.algorithm cimport nth_element

import numpy as np


def hard_threshold_half(const double complex[::1] c, Py_ssize_t k):
    """Keep the ``k`` largest entries of ``c`` by squared modulus.

    Ties at the cut-off value go to the lower index.
    """
    cdef Py_ssize_t n = c.shape[0]
    cdef Py_ssize_t i, n_gt = 0, need
    cdef double t, re, im
    out = np.zeros(n, dtype=np.complex128)
    cdef double complex[::1] o = out
    if k <= 0:
        return out
    if k >= n:
        o[:] = c
        return out

    cdef vector[double] mag = vector[double](n)
    for i in range(n):
        re = c[i].real
        im = c[i].imag
        mag[i] = re * re + im * im
    cdef vector[double] work = mag
    nth_element(work.begin(), work.begin() + (n - k), work.end())
    t = work[n - k]

    for i in range(n):
        if mag[i] > t:
            n_gt += 1
    need = k - n_gt
    for i in range(n):
        if mag[i] > t:
            o[i] = c[i]
        elif mag[i] == t and need > 0:
            o[i] = c[i]
            need -= 1
    return out


def project_gamma_codes(const double[::1] v, const signed char[::1] codes,
                        const double[::1] y, const double[::1] thr):
    """Elementwise projection onto the clipping-consistent set.

    ``codes`` is 0 for reliable, +1 for high-clipped, -1 for low-clipped samples.
    """
    cdef Py_ssize_t n = v.shape[0]
    cdef Py_ssize_t i
    cdef signed char code
    cdef double a, b
    if codes.shape[0] != n or y.shape[0] != n or thr.shape[0] != n:
        raise ValueError("length mismatch in project_gamma")
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    for i in range(n):
        code = codes[i]
        if code == 0:
            o[i] = y[i]
        elif code > 0:
            a = v[i]
            b = thr[i]
            o[i] = a if a > b else b
        else:
            a = v[i]
            b = -thr[i]
            o[i] = a if a < b else b
    return out
