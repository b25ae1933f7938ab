# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled jet kernels; same contract as ``_kernels_py``."""
import numpy as np

BACKEND = "cython"


cdef void _fill6(double[:, :, ::1] t, Py_ssize_t i, Py_ssize_t j,
                 Py_ssize_t k, double v) nogil:
    t[i, j, k] = v
    t[i, k, j] = v
    t[j, i, k] = v
    t[j, k, i] = v
    t[k, i, j] = v
    t[k, j, i] = v


def mul(double a0, double[::1] a1, double[:, ::1] a2, a3,
        double b0, double[::1] b1, double[:, ::1] b2, b3):
    cdef Py_ssize_t m = a1.shape[0]
    cdef Py_ssize_t i, j, k
    cdef double v
    grad = np.empty(m)
    hess = np.empty((m, m))
    cdef double[::1] g = grad
    cdef double[:, ::1] h = hess
    for i in range(m):
        g[i] = a0 * b1[i] + b0 * a1[i]
    for i in range(m):
        for j in range(i, m):
            v = a0 * b2[i, j] + b0 * a2[i, j] + (a1[i] * b1[j] + b1[i] * a1[j])
            h[i, j] = v
            h[j, i] = v
    if a3 is None or b3 is None:
        return grad, hess, None
    cdef double[:, :, ::1] A3 = a3
    cdef double[:, :, ::1] B3 = b3
    third = np.empty((m, m, m))
    cdef double[:, :, ::1] t = third
    for i in range(m):
        for j in range(i, m):
            for k in range(j, m):
                v = (a0 * B3[i, j, k] + b0 * A3[i, j, k]
                     + (a1[i] * b2[j, k] + a1[j] * b2[i, k] + a1[k] * b2[i, j])
                     + (b1[i] * a2[j, k] + b1[j] * a2[i, k] + b1[k] * a2[i, j]))
                _fill6(t, i, j, k, v)
    return grad, hess, third


def chain(double f1, double f2, double f3, double[::1] a1, double[:, ::1] a2, a3):
    cdef Py_ssize_t m = a1.shape[0]
    cdef Py_ssize_t i, j, k
    cdef double v
    grad = np.empty(m)
    hess = np.empty((m, m))
    cdef double[::1] g = grad
    cdef double[:, ::1] h = hess
    for i in range(m):
        g[i] = f1 * a1[i]
    for i in range(m):
        for j in range(i, m):
            v = f2 * (a1[i] * a1[j]) + f1 * a2[i, j]
            h[i, j] = v
            h[j, i] = v
    if a3 is None:
        return grad, hess, None
    cdef double[:, :, ::1] A3 = a3
    third = np.empty((m, m, m))
    cdef double[:, :, ::1] t = third
    for i in range(m):
        for j in range(i, m):
            for k in range(j, m):
                v = (f3 * (a1[i] * a1[j] * a1[k])
                     + f2 * (a1[i] * a2[j, k] + a1[j] * a2[i, k] + a1[k] * a2[i, j])
                     + f1 * A3[i, j, k])
                _fill6(t, i, j, k, v)
    return grad, hess, third
