"""Pure NumPy implementations of the hot kernels.

These are the reference versions of the routines in ``_ckernels.pyx``; the
compiled module is preferred when it imports.
"""
import numpy as np

EPS = np.finfo(float).eps


def aberth_batch(coeffs, tol=1e-14, maxiter=200):
    """Roots of each row of ``coeffs`` (ascending powers, nonzero leading term).

    Vectorized over rows; rows stop updating once every correction is below
    ``tol * (1 + |z|)`` or the residual is at roundoff level.

    Returns
    -------
    roots : (P, d) complex ndarray
    iterations : (P,) int ndarray
    converged : (P,) bool ndarray
    """
    c = np.ascontiguousarray(coeffs, dtype=np.complex128)
    if c.ndim != 2:
        raise ValueError("coeffs must be two-dimensional")
    P, d1 = c.shape
    d = d1 - 1
    if d < 1:
        raise ValueError("polynomials must have degree >= 1")

    a = c / c[:, -1:]
    absa = np.abs(a)
    radius = absa[:, 0] ** (1.0 / d)
    radius[radius == 0.0] = 1.0
    ang = 2.0 * np.pi * np.arange(d) / d + 0.4
    z = radius[:, None] * (np.cos(ang) + 1j * np.sin(ang))[None, :]

    iters = np.zeros(P, dtype=np.int64)
    conv = np.zeros(P, dtype=bool)
    active = np.arange(P)
    offdiag = ~np.eye(d, dtype=bool)
    for it in range(maxiter):
        if active.size == 0:
            break
        za = z[active]
        aa = a[active]
        pv = np.broadcast_to(aa[:, d:d + 1], za.shape).copy()
        dp = np.zeros_like(za)
        for k in range(d - 1, -1, -1):
            dp = dp * za + pv
            pv = pv * za + aa[:, k:k + 1]
        az = np.abs(za)
        bound = np.zeros_like(az)
        azk = np.ones_like(az)
        for k in range(d + 1):
            bound += absa[active, k:k + 1] * azk
            azk = azk * az
        small = (np.abs(pv) <= 8.0 * EPS * bound) | (dp == 0)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(small, 0.0, pv / np.where(dp == 0, 1.0, dp))
            diff = za[:, :, None] - za[:, None, :]
            inv = np.where(offdiag & (diff != 0), 1.0 / np.where(diff == 0, 1.0, diff), 0.0)
        s = inv.sum(axis=2)
        w = np.where(small, 0.0, ratio / (1.0 - ratio * s))
        z[active] = za - w
        iters[active] = it + 1
        done = np.all(np.abs(w) <= tol * (1.0 + az), axis=1)
        conv[active[done]] = True
        active = active[~done]
    return z, iters, conv
