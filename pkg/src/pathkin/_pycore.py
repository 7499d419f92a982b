"""Pure-numpy versions of the transport kernels (fallback for ``_core``)."""

import numpy as np


def contract_connection(gamma, tangent):
    """A[n, i, k] = sum_j gamma[n, i, j, k] * tangent[n, j]."""
    return np.einsum("nijk,nj->nik", gamma, tangent)


def rk4_propagate(A, h, left=False, keep=False):
    A = np.asarray(A, dtype=float)
    samples, d = A.shape[0], A.shape[1]
    if samples < 3 or samples % 2 == 0:
        raise ValueError("A must hold 2*steps + 1 samples")
    steps = (samples - 1) // 2
    F = A if left else -A
    Y = np.eye(d)
    hist = np.empty((steps + 1, d, d)) if keep else None
    if keep:
        hist[0] = Y

    if left:
        def rhs(M, Y):
            return Y @ M
    else:
        def rhs(M, Y):
            return M @ Y

    for n in range(steps):
        F0, Fm, F1 = F[2 * n], F[2 * n + 1], F[2 * n + 2]
        k1 = rhs(F0, Y)
        k2 = rhs(Fm, Y + 0.5 * h * k1)
        k3 = rhs(Fm, Y + 0.5 * h * k2)
        k4 = rhs(F1, Y + h * k3)
        Y = Y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if keep:
            hist[n + 1] = Y
    return hist if keep else Y


def simpson_transported(Z, T, h):
    Z = np.asarray(Z, dtype=float)
    m = Z.shape[0]
    if m < 3 or m % 2 == 0:
        raise ValueError("Simpson needs an odd number (>= 3) of nodes")
    w = np.full(m, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    vals = np.einsum("nij,nj->ni", Z, T)
    return (h / 3.0) * (w @ vals)
