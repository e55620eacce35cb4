# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled simultaneous-iteration root finder for batches of polynomials.

Mirrors :func:`compop._kernels_py.aberth_batch` step for step (Jacobi-style
updates, same initial guesses, same stopping rule) so the two backends agree
to rounding.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, pow, fabs, sqrt, M_PI

cnp.import_array()

cdef double EPS = 2.220446049250313e-16


cdef inline double cabs(double complex z) nogil:
    return sqrt(z.real * z.real + z.imag * z.imag)


def aberth_batch(cnp.ndarray coeffs_in, double tol=1e-14, int maxiter=200):
    """Roots of each row of ``coeffs`` (ascending powers, nonzero leading term).

    Returns ``(roots, iterations, converged)`` with shapes ``(P, d)``,
    ``(P,)``, ``(P,)``.
    """
    cdef double complex[:, ::1] c = np.ascontiguousarray(coeffs_in, dtype=np.complex128)
    cdef Py_ssize_t P = c.shape[0]
    cdef Py_ssize_t d = c.shape[1] - 1
    if d < 1:
        raise ValueError("polynomials must have degree >= 1")

    roots_arr = np.empty((P, d), dtype=np.complex128)
    iters_arr = np.zeros(P, dtype=np.int64)
    conv_arr = np.zeros(P, dtype=bool)
    cdef double complex[:, ::1] z = roots_arr
    cdef long long[::1] iters = iters_arr
    cdef cnp.npy_bool[::1] conv = conv_arr.view(np.uint8)

    cdef double complex[::1] a = np.empty(d + 1, dtype=np.complex128)
    cdef double complex[::1] w = np.empty(d, dtype=np.complex128)
    cdef double[::1] absa = np.empty(d + 1, dtype=np.float64)
    cdef Py_ssize_t p, i, j, k, it
    cdef double complex lead, pv, dp, ratio, s, diff
    cdef double radius, az, bound, azk, ang
    cdef bint done

    with nogil:
        for p in range(P):
            lead = c[p, d]
            for k in range(d + 1):
                a[k] = c[p, k] / lead
                absa[k] = cabs(a[k])
            radius = pow(absa[0], 1.0 / d)
            if radius == 0.0:
                radius = 1.0
            for i in range(d):
                ang = 2.0 * M_PI * i / d + 0.4
                z[p, i] = radius * (cos(ang) + 1j * sin(ang))

            for it in range(maxiter):
                done = True
                for i in range(d):
                    pv = a[d]
                    dp = 0.0
                    for k in range(d - 1, -1, -1):
                        dp = dp * z[p, i] + pv
                        pv = pv * z[p, i] + a[k]
                    az = cabs(z[p, i])
                    bound = 0.0
                    azk = 1.0
                    for k in range(d + 1):
                        bound = bound + absa[k] * azk
                        azk = azk * az
                    if cabs(pv) <= 8.0 * EPS * bound or dp == 0.0:
                        w[i] = 0.0
                        continue
                    ratio = pv / dp
                    s = 0.0
                    for j in range(d):
                        if j != i:
                            diff = z[p, i] - z[p, j]
                            if diff != 0.0:
                                s = s + 1.0 / diff
                    w[i] = ratio / (1.0 - ratio * s)
                    if cabs(w[i]) > tol * (1.0 + az):
                        done = False
                for i in range(d):
                    z[p, i] = z[p, i] - w[i]
                iters[p] = it + 1
                if done:
                    conv[p] = True
                    break
    return roots_arr, iters_arr, conv_arr
