"""Quadrature on the unit disk and polynomial root finding.

All area integrals use the normalized measure ``dA = dx dy / pi``, so the
disk has total mass one.  Radial discretization is geometric toward the
boundary: annulus ``k`` covers ``[1 - 2**-k, 1 - 2**-(k+1)]`` and carries its
own Gauss-Legendre nodes; a final annulus ``[1 - 2**-K, 1]`` closes the rule.
Nodes near ``r = 1`` are generated in the complementary variable ``x = 1 - r``
to keep the small distances to the boundary exact.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.special import roots_jacobi

from . import kernels
from .errors import (
    IntegrationDomainError,
    InvalidInputError,
    RootFinderError,
    ToleranceNotMetError,
)

# smallest distance to the boundary used for nodes given as radii
_X_FLOOR = 2.0 ** -52

DEFAULT_ABS_TOL = 1e-10
DEFAULT_REL_TOL = 1e-8
SWEEP_REL_TOL = 1e-6


@lru_cache(maxsize=None)
def gauss_legendre(n: int):
    """Gauss-Legendre nodes and weights on [-1, 1] (cached, read-only)."""
    t, w = np.polynomial.legendre.leggauss(n)
    t.flags.writeable = False
    w.flags.writeable = False
    return t, w


@lru_cache(maxsize=None)
def _gauss_jacobi(n: int, c: float):
    # weight (1 + t)**c on [-1, 1]
    t, w = roots_jacobi(n, 0.0, c)
    t.flags.writeable = False
    w.flags.writeable = False
    return t, w


def _panel_nodes_x(xa, xb, n):
    """Nodes/weights of an n-point rule on the x-interval [xb, xa] (xa > xb)."""
    t, w = gauss_legendre(n)
    mid, half = 0.5 * (xa + xb), 0.5 * (xa - xb)
    return mid + half * t, half * w


def _boundary_panel_x(xk, n, hint):
    """Rule on [0, xk]; Gauss-Jacobi in x when a power-law exponent is known."""
    if hint is None or hint == 0:
        return _panel_nodes_x(xk, 0.0, n)
    if hint <= -1:
        raise InvalidInputError("weight_exponent_hint must exceed -1")
    t, w = _gauss_jacobi(n, float(hint))
    x = 0.5 * xk * (1.0 + t)
    # integrand f = h * x**c is divided back out so the weights act on f itself
    return x, 0.5 * xk * w * (1.0 + t) ** (-hint)


def radial_panels(n_panels: int, order: int, hint: float | None = None):
    """Geometric rule for ``int_0^1 g(r) dr`` expressed in ``x = 1 - r``.

    Returns ``(x, w)``: nodes in the complementary variable and weights for
    ``dr``.  Panels are ``[2**-(k+1), 2**-k]`` for ``k < n_panels`` plus the
    boundary panel ``[0, 2**-n_panels]``.
    """
    xs, ws = [], []
    for k in range(n_panels):
        x, w = _panel_nodes_x(2.0 ** -k, 2.0 ** -(k + 1), order)
        xs.append(x)
        ws.append(w)
    x, w = _boundary_panel_x(2.0 ** -n_panels, order, hint)
    xs.append(x)
    ws.append(w)
    return np.concatenate(xs), np.concatenate(ws)


@dataclass(frozen=True)
class IntegrationResult:
    """Quadrature value with the level-to-level difference as error estimate."""

    value: float
    error: float
    level: int
    nodes: int = 0

    def __float__(self):
        return float(self.value)


@dataclass(frozen=True)
class Annulus:
    radii: np.ndarray
    weights: np.ndarray  # area weights: 2 r dr, summing to the annulus' mass
    angular_count: int

    def points(self):
        theta = 2.0 * np.pi * np.arange(self.angular_count) / self.angular_count
        return (self.radii[:, None] * np.exp(1j * theta)[None, :]).ravel()


@dataclass(frozen=True)
class DiskLevel:
    annuli: tuple

    @property
    def radial_nodes(self):
        return [(float(r), float(w)) for a in self.annuli for r, w in zip(a.radii, a.weights)]

    @property
    def node_count(self):
        return sum(a.radii.size * a.angular_count for a in self.annuli)

    def contributions(self, f):
        """Per-annulus integrals of ``f``, in annulus order."""
        pts = [a.points() for a in self.annuli]
        values = _evaluate(f, np.concatenate(pts))
        out, start = [], 0
        for a, p in zip(self.annuli, pts):
            v = values[start:start + p.size].reshape(a.radii.size, a.angular_count)
            start += p.size
            out.append(float(np.dot(a.weights, v.mean(axis=1))))
        return out

    def integrate(self, f):
        return float(sum(self.contributions(f)))


def _evaluate(f, z):
    values = np.asarray(f(z), dtype=float)
    if values.shape != z.shape:
        values = np.broadcast_to(values, z.shape)
    if not np.all(np.isfinite(values)):
        bad = z[~np.isfinite(values)][:5]
        raise IntegrationDomainError(f"integrand is not finite at nodes {bad!r}")
    return values


@dataclass(frozen=True)
class QuadratureRule:
    """Geometric-annulus rule for the disk, refined level by level.

    Level ``L`` uses ``base_annuli + L * annuli_step`` geometric annuli plus the
    boundary annulus, ``radial_order + L * order_step`` radial nodes per
    annulus, and ``min(base_angular * 2**k, max_angular) * 2**L`` equispaced
    angles on annulus ``k``.  Integration stops at the first level that agrees
    with its predecessor to ``max(abs_tol, rel_tol * |I|)``.
    """

    base_annuli: int = 20
    annuli_step: int = 8
    radial_order: int = 8
    order_step: int = 4
    base_angular: int = 8
    max_angular: int = 256
    refinement_levels: int = 4
    abs_tol: float = DEFAULT_ABS_TOL
    rel_tol: float = DEFAULT_REL_TOL
    boundary_exponent: float | None = None

    def __post_init__(self):
        if self.refinement_levels < 2:
            raise InvalidInputError("at least two refinement levels are needed for an error estimate")
        if self.base_angular < 1 or self.max_angular < self.base_angular:
            raise InvalidInputError("angular counts must be positive and max_angular >= base_angular")
        if self.base_annuli + (self.refinement_levels - 1) * self.annuli_step > 52:
            raise InvalidInputError("annuli beyond 1 - 2**-52 are not representable")

    def with_tolerances(self, abs_tol=None, rel_tol=None):
        return replace(
            self,
            abs_tol=self.abs_tol if abs_tol is None else abs_tol,
            rel_tol=self.rel_tol if rel_tol is None else rel_tol,
        )

    def level(self, L: int) -> DiskLevel:
        K = self.base_annuli + L * self.annuli_step
        n = self.radial_order + L * self.order_step
        annuli = []
        for k in range(K + 1):
            if k < K:
                x, w = _panel_nodes_x(2.0 ** -k, 2.0 ** -(k + 1), n)
            else:
                x, w = _boundary_panel_x(2.0 ** -K, n, self.boundary_exponent)
            order = np.argsort(-x)
            r = 1.0 - np.maximum(x[order], _X_FLOOR)
            m = min(self.base_angular * 2 ** min(k, 30), self.max_angular) * 2 ** L
            annuli.append(Annulus(r, 2.0 * r * w[order], int(m)))
        return DiskLevel(tuple(annuli))

    @property
    def radial_nodes(self):
        """(radius, area weight) pairs of the finest level."""
        return self.level(self.refinement_levels - 1).radial_nodes

    @property
    def angular_count(self):
        return [a.angular_count for a in self.level(self.refinement_levels - 1).annuli]


def _converge(estimate, levels, abs_tol, rel_tol, what):
    prev = None
    nodes = 0
    for L in range(levels):
        val, n = estimate(L)
        nodes += n
        if prev is not None:
            err = abs(val - prev)
            if err <= max(abs_tol, rel_tol * abs(val)):
                return IntegrationResult(val, err, L, nodes)
        prev_prev, prev = prev, val
    raise ToleranceNotMetError(
        f"{what} did not converge after {levels} levels (last estimates {prev_prev!r}, {prev!r})",
        (prev_prev, prev),
    )


def integrate_disk(f: Callable, rule: QuadratureRule | None = None) -> IntegrationResult:
    """Integrate a vectorized real integrand over the disk against ``dA``.

    ``f`` receives a 1-D complex array of nodes and must return an array of
    the same length.
    """
    rule = rule or QuadratureRule()

    def estimate(L):
        lev = rule.level(L)
        return lev.integrate(f), lev.node_count

    return _converge(estimate, rule.refinement_levels, rule.abs_tol, rule.rel_tol, "disk integral")


@dataclass(frozen=True)
class CapRegion:
    """The set ``{|z - e^{i angle}| < radius}`` intersected with the disk."""

    angle: float
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise InvalidInputError("cap radius must be positive")
        if not np.isfinite(self.angle):
            raise InvalidInputError("cap angle must be finite")

    @property
    def center(self) -> complex:
        return complex(np.exp(1j * self.angle))

    def contains(self, z):
        z = np.asarray(z)
        return (np.abs(z - self.center) < self.radius) & (np.abs(z) < 1.0)


def _cap_nodes(cap: CapRegion, L: int, rule: QuadratureRule):
    """Nodes/weights for ``int_cap f dA`` in polar coordinates about the center.

    At distance ``rho`` from ``zeta`` the cap occupies directions within
    ``arccos(rho / 2)`` of the inward normal; the angular variable is mapped
    through ``sin(pi u / 2)`` so the nodes cluster at the unit circle.
    """
    delta = cap.radius
    J = 8 + 4 * L
    n = rule.radial_order + L * rule.order_step
    m = 16 * 2 ** L
    rhos, rws = [], []
    for j in range(J):
        x, w = _panel_nodes_x(delta * 2.0 ** -j, delta * 2.0 ** -(j + 1), n)
        rhos.append(x)
        rws.append(w)
    x, w = _panel_nodes_x(delta * 2.0 ** -J, 0.0, n)
    rhos.append(x)
    rws.append(w)
    rho = np.concatenate(rhos)
    rw = np.concatenate(rws)
    u, uw = gauss_legendre(m)
    beta = np.arccos(np.clip(rho / 2.0, -1.0, 1.0))
    alpha = np.pi + beta[:, None] * np.sin(0.5 * np.pi * u)[None, :]
    dalpha = beta[:, None] * (0.5 * np.pi * np.cos(0.5 * np.pi * u))[None, :] * uw[None, :]
    z = cap.center * (1.0 + rho[:, None] * np.exp(1j * alpha))
    wts = (rw * rho)[:, None] * dalpha / np.pi
    z, wts = z.ravel(), wts.ravel()
    keep = np.abs(z) < 1.0
    return z[keep], wts[keep]


def integrate_cap(f: Callable, cap: CapRegion, rule: QuadratureRule | None = None) -> IntegrationResult:
    """Integrate ``f`` over the cap ``D ∩ {|z - zeta| < delta}`` against ``dA``."""
    rule = rule or QuadratureRule()
    if cap.radius >= 2.0:
        return integrate_disk(f, rule)

    def estimate(L):
        z, w = _cap_nodes(cap, L, rule)
        return float(np.dot(w, _evaluate(f, z))), z.size

    return _converge(estimate, rule.refinement_levels, rule.abs_tol, rule.rel_tol, "cap integral")


def integrate_subdisk(f: Callable, center: complex, radius: float,
                      rule: QuadratureRule | None = None) -> IntegrationResult:
    """Integrate ``f`` over the closed sub-disk ``D(center, radius)`` against ``dA``."""
    rule = rule or QuadratureRule()
    if abs(center) + radius > 1.0:
        raise InvalidInputError("sub-disk must lie inside the unit disk")

    def estimate(L):
        n = 2 * (rule.radial_order + L * rule.order_step)
        t, w = gauss_legendre(n)
        rho = 0.5 * radius * (1.0 + t)
        m = 32 * 2 ** L
        theta = 2.0 * np.pi * (np.arange(m) + 0.5) / m
        z = (center + rho[:, None] * np.exp(1j * theta)[None, :]).ravel()
        vals = _evaluate(f, z).reshape(n, m).mean(axis=1)
        return float(np.dot(0.5 * radius * w * 2.0 * rho, vals)), z.size

    return _converge(estimate, rule.refinement_levels, rule.abs_tol, rule.rel_tol, "sub-disk integral")


_R_LEVELS = ((16, 8), (24, 12), (32, 16), (40, 20), (48, 24))
_X_LEVELS = ((30, 10), (60, 14), (120, 16), (240, 16), (480, 16), (960, 16))


def integrate_radial(g: Callable, weight_exponent_hint: float | None = None, *,
                     complement: bool = False, abs_tol: float = DEFAULT_ABS_TOL,
                     rel_tol: float = DEFAULT_REL_TOL) -> IntegrationResult:
    """Compute ``int_0^1 g(r) dr`` on geometric panels toward ``r = 1``.

    Parameters
    ----------
    g : callable
        Vectorized integrand of ``r``; with ``complement=True`` it is a
        function of ``x = 1 - r`` instead, which allows panels far below the
        resolution of ``1 - r`` in floating point.
    weight_exponent_hint : float, optional
        Exponent ``c > -1`` with ``g(r) ~ (1 - r)**c`` near the boundary.  The
        boundary panel then uses Gauss-Jacobi nodes for that power.
    """
    levels = _X_LEVELS if complement else _R_LEVELS

    def estimate(L):
        K, n = levels[L]
        x, w = radial_panels(K, n, weight_exponent_hint)
        arg = x if complement else 1.0 - np.maximum(x, _X_FLOOR)
        return float(np.dot(w, _evaluate(g, arg))), x.size

    return _converge(estimate, len(levels), abs_tol, rel_tol, "radial integral")


# --------------------------------------------------------------------------
# polynomial roots

CLUSTER_RADIUS = 1e-7


def _trim(coeffs):
    c = np.atleast_1d(np.asarray(coeffs, dtype=complex))
    if c.ndim != 1 or c.size == 0:
        raise InvalidInputError("coefficients must be a non-empty 1-D sequence")
    if not np.all(np.isfinite(c)):
        raise InvalidInputError("coefficients must be finite")
    scale = np.max(np.abs(c))
    if scale == 0:
        raise InvalidInputError("zero polynomial has no well-defined roots")
    nz = np.nonzero(np.abs(c) > 1e-15 * scale)[0]
    return c[: nz[-1] + 1]


def _residual_scale(c, z):
    # floored at the coefficient scale so roots at (or near) 0 are judged absolutely
    return max(float(np.polynomial.polynomial.polyval(np.abs(z), np.abs(c))),
               float(np.max(np.abs(c))))


def cluster_roots(roots, radius_factor: float = CLUSTER_RADIUS):
    """Group approximations within ``radius_factor * (1 + |root|)``.

    Returns (mean root, multiplicity) pairs sorted by real then imaginary part.
    """
    roots = list(np.asarray(roots, dtype=complex))
    out = []
    used = [False] * len(roots)
    for i, r in enumerate(roots):
        if used[i]:
            continue
        group = [r]
        used[i] = True
        for j in range(i + 1, len(roots)):
            if not used[j] and abs(roots[j] - r) <= radius_factor * (1.0 + abs(r)):
                group.append(roots[j])
                used[j] = True
        out.append((complex(np.mean(group)), len(group)))
    out.sort(key=lambda p: (round(p[0].real, 12), round(p[0].imag, 12)))
    return out


def polynomial_roots(coeffs: Sequence[complex], abs_tol: float = DEFAULT_ABS_TOL):
    """All complex roots of ``sum(coeffs[k] * z**k)`` with multiplicities.

    Coefficients are in ascending order of power.  Simultaneous iteration is
    tried first; rows that fail to converge fall back to companion-matrix
    eigenvalues.  The result is a list of ``(root, multiplicity)``.
    """
    c = _trim(coeffs)
    d = c.size - 1
    if d < 1:
        raise InvalidInputError("polynomial of degree 0 has no roots")
    roots, _, conv = kernels.aberth_batch(c[None, :])
    roots = roots[0]
    if not conv[0]:
        roots = np.polynomial.polynomial.polyroots(c)
    pairs = cluster_roots(roots)
    for z, _m in pairs:
        res = abs(np.polynomial.polynomial.polyval(z, c))
        if res > abs_tol * _residual_scale(c, z):
            raise RootFinderError(
                f"root {z!r} has residual {res:.3e} above tolerance", iterates=roots
            )
    return pairs


def batch_roots(coeffs) -> np.ndarray:
    """Roots of many polynomials of common degree (rows, ascending order).

    Each row must have a nonzero leading coefficient.  Rows where the
    simultaneous iteration stalls are recomputed from companion matrices.
    """
    c = np.ascontiguousarray(coeffs, dtype=complex)
    roots, _, conv = kernels.aberth_batch(c)
    bad = np.nonzero(~conv)[0]
    if bad.size:
        d = c.shape[1] - 1
        monic = c[bad] / c[bad, -1:]
        comp = np.zeros((bad.size, d, d), dtype=complex)
        comp[:, 1:, :-1] = np.eye(d - 1)
        comp[:, :, -1] = -monic[:, :-1]
        roots[bad] = np.linalg.eigvals(comp)
        if not np.all(np.isfinite(roots[bad])):
            raise RootFinderError("companion fallback produced non-finite roots", iterates=roots[bad])
    return roots
