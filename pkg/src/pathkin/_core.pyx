# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels for transport integration.

Mirrors :mod:`pathkin._pycore` exactly in signature and semantics; the
selection between the two happens in :mod:`pathkin.kernels`.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def contract_connection(const double[:, :, :, ::1] gamma, const double[:, ::1] tangent):
    """A[n, i, k] = sum_j gamma[n, i, j, k] * tangent[n, j]."""
    cdef Py_ssize_t n = gamma.shape[0], d = gamma.shape[1]
    cdef Py_ssize_t a, i, j, k
    cdef double acc
    out = np.zeros((n, d, d), dtype=np.float64)
    cdef double[:, :, ::1] A = out
    for a in range(n):
        for i in range(d):
            for k in range(d):
                acc = 0.0
                for j in range(d):
                    acc += gamma[a, i, j, k] * tangent[a, j]
                A[a, i, k] = acc
    return out


cdef inline void _apply(double[:, ::1] dst, const double[:, ::1] F,
                        double[:, ::1] Y, double sign, bint left, Py_ssize_t d) noexcept nogil:
    # dst = sign * F @ Y  (right action) or sign * Y @ F (left action)
    cdef Py_ssize_t i, j, k
    cdef double acc
    for i in range(d):
        for k in range(d):
            acc = 0.0
            if left:
                for j in range(d):
                    acc += Y[i, j] * F[j, k]
            else:
                for j in range(d):
                    acc += F[i, j] * Y[j, k]
            dst[i, k] = sign * acc


def rk4_propagate(const double[:, :, ::1] A, double h, bint left=False, bint keep=False):
    """Classical RK4 for the fundamental matrix of a linear system.

    ``A`` holds the coefficient matrix at half-step spacing (2*steps + 1
    samples).  With ``left`` false the system is dY/du = -A Y, otherwise
    dZ/du = Z A.  Both start from the identity.
    """
    cdef Py_ssize_t samples = A.shape[0], d = A.shape[1]
    if samples < 3 or samples % 2 == 0:
        raise ValueError("A must hold 2*steps + 1 samples")
    cdef Py_ssize_t steps = (samples - 1) // 2
    cdef double sign = 1.0 if left else -1.0
    cdef Py_ssize_t n, i, k
    cdef double half = 0.5 * h, sixth = h / 6.0

    Y_arr = np.eye(d, dtype=np.float64)
    work = np.empty((5, d, d), dtype=np.float64)
    cdef double[:, ::1] Y = Y_arr
    cdef double[:, :, ::1] W = work
    cdef double[:, ::1] k1 = W[0], k2 = W[1], k3 = W[2], k4 = W[3], tmp = W[4]

    hist = None
    cdef double[:, :, ::1] H
    if keep:
        hist = np.empty((steps + 1, d, d), dtype=np.float64)
        H = hist
        H[0, :, :] = Y

    with nogil:
        for n in range(steps):
            _apply(k1, A[2 * n], Y, sign, left, d)
            for i in range(d):
                for k in range(d):
                    tmp[i, k] = Y[i, k] + half * k1[i, k]
            _apply(k2, A[2 * n + 1], tmp, sign, left, d)
            for i in range(d):
                for k in range(d):
                    tmp[i, k] = Y[i, k] + half * k2[i, k]
            _apply(k3, A[2 * n + 1], tmp, sign, left, d)
            for i in range(d):
                for k in range(d):
                    tmp[i, k] = Y[i, k] + h * k3[i, k]
            _apply(k4, A[2 * n + 2], tmp, sign, left, d)
            for i in range(d):
                for k in range(d):
                    Y[i, k] = Y[i, k] + sixth * (k1[i, k] + 2.0 * k2[i, k]
                                                 + 2.0 * k3[i, k] + k4[i, k])
            if keep:
                H[n + 1, :, :] = Y
    return hist if keep else Y_arr


def simpson_transported(const double[:, :, ::1] Z, const double[:, ::1] T, double h):
    """Composite Simpson of u -> Z(u) @ T(u) over equally spaced nodes."""
    cdef Py_ssize_t m = Z.shape[0], d = Z.shape[1]
    if m < 3 or m % 2 == 0:
        raise ValueError("Simpson needs an odd number (>= 3) of nodes")
    cdef Py_ssize_t n, i, j
    cdef double w, acc
    out = np.zeros(d, dtype=np.float64)
    cdef double[::1] res = out
    for n in range(m):
        if n == 0 or n == m - 1:
            w = 1.0
        elif n % 2 == 1:
            w = 4.0
        else:
            w = 2.0
        for i in range(d):
            acc = 0.0
            for j in range(d):
                acc += Z[n, i, j] * T[n, j]
            res[i] += w * acc
    for i in range(d):
        res[i] *= h / 3.0
    return out
