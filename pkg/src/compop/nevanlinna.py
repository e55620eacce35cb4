"""Generalized Nevanlinna counting functions and their structural checks.

``N_{phi,omega}(z)`` sums ``omega(|a|)`` over the preimages ``a`` of ``z``
in the disk, counted with multiplicity, and is zero at ``z = phi(0)``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from . import numerics
from .errors import InvalidInputError, InvalidRegionError, ToleranceNotMetError
from .numerics import QuadratureRule, integrate_disk, integrate_radial, integrate_subdisk
from .symbol import PHI0_TOL, SymbolSpec, preimages, q_lambda
from .weight import WeightProfile, make_log_weight, radius_weight

_LOG_WEIGHT = make_log_weight()


@dataclass
class CountingSample:
    z: complex
    value: float
    preimage_count: int
    truncated: bool
    points: list = field(default_factory=list)

    def recompute(self, w: WeightProfile) -> float:
        if not self.points:
            return 0.0
        mods = np.array([abs(a) for a, _ in self.points])
        mult = np.array([m for _, m in self.points], dtype=float)
        return float(np.dot(mult, radius_weight(w, mods)))


def counting(phi: SymbolSpec, w: WeightProfile, z: complex) -> CountingSample:
    """``N_{phi,omega}(z)`` with the preimages that produced it."""
    pre = preimages(phi, z)
    if pre.at_phi0:
        return CountingSample(complex(z), 0.0, 0, bool(pre.rejected), [])
    sample = CountingSample(complex(z), 0.0, pre.count, bool(pre.rejected), pre.points)
    sample.value = sample.recompute(w)
    return sample


def classical_counting(phi: SymbolSpec, z: complex) -> float:
    """Classical Nevanlinna counting function: weight ``log(1/|a|)``."""
    return counting(phi, _LOG_WEIGHT, z).value


def preimage_arrays(phi: SymbolSpec, zs):
    """Preimage approximations for many targets at once.

    Returns ``(roots, inside)`` with ``roots`` of shape ``(len(zs), degree)``
    and ``inside`` marking roots kept inside the disk (outside the
    rejection band).  A third array counts rejected boundary-grazing roots.
    """
    zs = np.atleast_1d(np.asarray(zs, dtype=complex)).ravel()
    d = phi.degree
    P = np.zeros(d + 1, dtype=complex)
    Q = np.zeros(d + 1, dtype=complex)
    P[: phi.numerator.size] = phi.numerator
    Q[: phi.denominator.size] = phi.denominator
    rows = P[None, :] - zs[:, None] * Q[None, :]
    lead = np.abs(rows[:, -1])
    degenerate = lead <= 1e-13 * np.max(np.abs(rows), axis=1)
    roots = np.full((zs.size, d), np.inf + 0j)
    ok = ~degenerate
    if np.any(ok):
        roots[ok] = numerics.batch_roots(rows[ok])
    for i in np.nonzero(degenerate)[0]:
        pts = preimages(phi, zs[i]).points
        flat = [a for a, m in pts for _ in range(m)]
        roots[i, : len(flat)] = flat
    band = np.minimum(1e-9, 1e-3 * (1.0 - np.abs(zs)))
    mods = np.abs(roots)
    inside = mods < 1.0 - band[:, None]
    grazing = (~inside) & (mods < 1.0)
    return roots, inside, grazing.sum(axis=1)


def counting_values(phi: SymbolSpec, w: WeightProfile, zs):
    """Vectorized ``N_{phi,omega}`` on an array of targets (same shape out)."""
    shape = np.shape(zs)
    zf = np.asarray(zs, dtype=complex).ravel()
    if np.any(np.abs(zf) >= 1.0):
        from .errors import DomainError

        raise DomainError("counting function targets must lie in the open disk")
    roots, inside, _ = preimage_arrays(phi, zf)
    vals = np.zeros(roots.shape)
    mods = np.abs(roots[inside])
    vals[inside] = radius_weight(w, mods)
    out = vals.sum(axis=1)
    out[np.abs(zf - phi.phi0) <= PHI0_TOL] = 0.0
    return out.reshape(shape)


def counting_multiplicity(phi: SymbolSpec, zs):
    """``n_phi(z)``: number of disk preimages counted with multiplicity."""
    shape = np.shape(zs)
    zf = np.asarray(zs, dtype=complex).ravel()
    _, inside, _ = preimage_arrays(phi, zf)
    return inside.sum(axis=1).reshape(shape)


# --------------------------------------------------------------------------
# ratio field


@dataclass
class RatioField:
    ks: np.ndarray
    radii: np.ndarray
    angles: np.ndarray
    counting: np.ndarray   # (K, M)
    omega: np.ndarray      # (K,)
    ratios: np.ndarray     # (K, M)
    per_radius_sup: np.ndarray
    truncated: int = 0
    symbol_label: str = ""
    weight_label: str = ""

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh, lineterminator="\n")
            out.writerow(["k", "r", "theta", "N", "omega", "ratio"])
            for i, k in enumerate(self.ks):
                for j, th in enumerate(self.angles):
                    out.writerow([int(k), repr(float(self.radii[i])), repr(float(th)),
                                  repr(float(self.counting[i, j])), repr(float(self.omega[i])),
                                  repr(float(self.ratios[i, j]))])
        return path


def radial_ladder(k_max: int, k_min: int = 1):
    ks = np.arange(k_min, k_max + 1)
    return ks, 1.0 - 2.0 ** -ks.astype(float)


def ratio_field(phi: SymbolSpec, w: WeightProfile, k_max: int = 30,
                angular_count: int = 256, k_min: int = 1) -> RatioField:
    """``N_{phi,omega}(z) / omega(z)`` on ``r_k = 1 - 2**-k`` times a uniform angle grid."""
    if not 1 <= k_min <= k_max <= 40:
        raise InvalidInputError("need 1 <= k_min <= k_max <= 40")
    if angular_count < 1:
        raise InvalidInputError("angular_count must be positive")
    ks, radii = radial_ladder(k_max, k_min)
    angles = 2.0 * np.pi * np.arange(angular_count) / angular_count
    z = radii[:, None] * np.exp(1j * angles)[None, :]
    roots, inside, grazing = preimage_arrays(phi, z.ravel())
    vals = np.zeros(roots.shape)
    vals[inside] = radius_weight(w, np.abs(roots[inside]))
    N = vals.sum(axis=1)
    N[np.abs(z.ravel() - phi.phi0) <= PHI0_TOL] = 0.0
    N = N.reshape(z.shape)
    om = w.at_c(2.0 ** -ks.astype(float))
    ratios = N / om[:, None]
    return RatioField(ks, radii, angles, N, om, ratios, ratios.max(axis=1),
                      int(grazing.sum()), phi.label, w.label)


# --------------------------------------------------------------------------
# structural checks


@dataclass
class SubmeanResult:
    lhs: float
    rhs: float
    passed: bool
    error: float


def check_submean(phi: SymbolSpec, w: WeightProfile, z: complex, r: float,
                  rule: QuadratureRule | None = None) -> SubmeanResult:
    """Compare ``N(z)`` with ``(2 / r**2) int_{D(z, r)} N dA``.

    The sub-disk must avoid ``D(0, 1/2)`` and stay inside the unit disk.
    """
    z = complex(z)
    if not (r > 0 and abs(z) - r >= 0.5 and abs(z) + r < 1.0):
        raise InvalidRegionError("D(z, r) must lie inside the disk and outside D(0, 1/2)")
    rule = rule or QuadratureRule(rel_tol=1e-6, abs_tol=1e-12)
    lhs = counting(phi, w, z).value
    res = integrate_subdisk(lambda u: counting_values(phi, w, u), z, r, rule)
    rhs = 2.0 / (r * r) * res.value
    tol = max(rule.abs_tol, 10.0 * res.error / (r * r), 1e-12 * abs(rhs))
    return SubmeanResult(lhs, rhs, bool(lhs <= rhs + tol), tol)


def littlewood_grid(n_radii: int = 64, n_angles: int = 32):
    """Polar grid on ``1/2 <= |z| < 1``, geometrically refined toward the circle."""
    radii = 1.0 - 0.5 * 2.0 ** -np.linspace(0.0, 29.0, n_radii)
    angles = 2.0 * np.pi * np.arange(n_angles) / n_angles
    return (radii[:, None] * np.exp(1j * angles)[None, :]).ravel()


def check_littlewood(phi: SymbolSpec, w: WeightProfile, grid=None, tol: float = 1e-9):
    """Points where ``N_{phi,omega}(z) > 2 omega(z) + tol``.

    Returns a list of ``(z, N, 2 omega)`` triples; empty when the bound holds.
    """
    if abs(phi.phi0) > 1e-12:
        raise InvalidInputError("the bound is stated for normalized symbols (phi(0) = 0)")
    zs = littlewood_grid() if grid is None else np.asarray(grid, dtype=complex).ravel()
    N = counting_values(phi, w, zs)
    bound = 2.0 * radius_weight(w, np.abs(zs))
    bad = np.nonzero(N > bound + tol)[0]
    return [(complex(zs[i]), float(N[i]), float(bound[i])) for i in bad]


def laplacian(w: WeightProfile, rho):
    """Radial Laplacian ``omega''(rho) + omega'(rho) / rho``."""
    rho = np.asarray(rho, dtype=float)
    return w.d2(rho) + w.d1(rho) / rho


@dataclass
class AlemanResult:
    lhs: float
    rhs: float
    gap: float
    converged: bool


def green_sum(points, zeta):
    """``sum_a m log(1 / |q_zeta(a)|)`` for each node ``zeta``.

    This is the classical counting function of ``phi o q~_zeta`` at ``z``,
    where ``q~_zeta(u) = q_zeta(-u)``: its preimages are ``-q_zeta(a)``.
    """
    out = np.zeros(np.shape(zeta))
    for a, m in points:
        with np.errstate(divide="ignore"):
            out = out - m * np.log(np.abs(q_lambda(zeta, a)))
    return out


def check_aleman(phi: SymbolSpec, w: WeightProfile, z: complex,
                 rule: QuadratureRule | None = None) -> AlemanResult:
    """Compare ``N_{phi,omega}(z)`` with ``-1/2 int Delta omega(zeta) N_{phi o q~_zeta}(z) dA``."""
    sample = counting(phi, w, z)
    rule = rule or QuadratureRule(base_annuli=16, annuli_step=8, radial_order=12, order_step=6,
                                  base_angular=32, max_angular=512, refinement_levels=4,
                                  rel_tol=2e-3, abs_tol=1e-12)

    def f(zeta):
        rho = np.abs(zeta)
        g = green_sum(sample.points, zeta)
        lap = laplacian(w, rho)
        return -0.5 * lap * np.where(np.isfinite(g), g, 0.0)

    try:
        res = integrate_disk(f, rule)
        rhs, converged = res.value, True
    except ToleranceNotMetError as exc:
        rhs, converged = exc.estimates[-1], False
    lhs = sample.value
    gap = abs(lhs - rhs) / max(abs(lhs), 1e-300)
    return AlemanResult(lhs, float(rhs), float(gap), converged)


def aleman_radial(phi: SymbolSpec, w: WeightProfile, z: complex) -> float:
    """Right side of the Aleman identity after exact angular averaging.

    The mean of ``log(1/|q_zeta(a)|)`` over ``|zeta| = rho`` is
    ``log(1 / max(|a|, rho))``, leaving a radial integral.
    """
    sample = counting(phi, w, z)
    total = 0.0
    for a, m in sample.points:
        ra = abs(a)

        def g(rho, ra=ra):
            return -0.5 * laplacian(w, rho) * np.log(1.0 / np.maximum(ra, rho)) * 2.0 * rho

        # split at |a| where the integrand has a kink
        t, wt = numerics.gauss_legendre(60)
        rho = 0.5 * ra * (1.0 + t)
        inner = float(np.dot(0.5 * ra * wt, g(rho))) if ra > 0 else 0.0
        hint = None if w.boundary_exponent is None else w.boundary_exponent - 1.0
        outer = integrate_radial(lambda s: g(ra + (1.0 - ra) * s) * (1.0 - ra),
                                 hint, rel_tol=1e-9).value
        total += m * (inner + outer)
    return total


def dilation_integral(phi: SymbolSpec, w: WeightProfile, z: complex, method: str = "parts") -> float:
    """``int_0^1 N_{phi_r}(z) sigma(r) dr`` with ``phi_r(u) = phi(r u)``, ``sigma = omega''``.

    Preimages of ``z`` under ``phi_r`` are ``a / r`` for ``|a| < r``, so the
    integral is ``sum_a int_{|a|}^1 log(r / |a|) sigma(r) dr``.

    ``method="parts"`` integrates by parts twice (using ``omega(1) = 0``)::

        omega'(1-) log(1/|a|) + omega(|a|)/|a| - int_{|a|}^1 omega(r) / r**2 dr

    which only needs ``omega`` and stays accurate for densities with a
    non-power singularity at 1.  ``method="direct"`` integrates ``sigma``.
    """
    if method not in ("parts", "direct"):
        raise InvalidInputError("method must be 'parts' or 'direct'")
    slope = w.d1_at_one
    if method == "parts" and (slope is None or not math.isfinite(slope)):
        method = "direct"
    sample = counting(phi, w, z)
    total = 0.0
    for a, m in sample.points:
        ra = abs(a)
        if ra == 0:
            raise InvalidInputError("dilation integral diverges when z = phi(0)")
        span = 1.0 - ra
        if method == "parts":
            def g(xs, ra=ra, span=span):
                x = span * xs
                return w.at_c(x) / (1.0 - x) ** 2 * span

            hint = w.boundary_exponent if w.boundary_exponent is not None and w.boundary_exponent > -1 else None
            tail = integrate_radial(g, hint, complement=True, rel_tol=1e-10).value
            om = float(radius_weight(w, np.array([ra]))[0])
            total += m * (slope * math.log(1.0 / ra) + om / ra - tail)
        else:
            def g(s, ra=ra, span=span):
                r = ra + span * s
                return np.log(r / ra) * w.d2(r) * span

            c = None if w.boundary_exponent is None else w.boundary_exponent - 2.0
            hint = c if c is not None and -1.0 < c < 0.0 else None
            total += m * integrate_radial(g, hint, rel_tol=1e-9).value
    return total


def quasi_invariance_band(w: WeightProfile, lam: complex, zs):
    """Range of ``omega(q_lam(z)) / omega(z)`` over the probe points."""
    zs = np.asarray(zs, dtype=complex).ravel()
    ratio = radius_weight(w, np.abs(q_lambda(lam, zs))) / radius_weight(w, np.abs(zs))
    return float(np.min(ratio)), float(np.max(ratio))


def quasi_invariance_constant(lam: complex, delta: float) -> float:
    """``((1 + |lam|) / (1 - |lam|))**(1 + delta)``."""
    a = abs(lam)
    return ((1.0 + a) / (1.0 - a)) ** (1.0 + delta)


__all__ = [
    "CountingSample", "RatioField", "counting", "classical_counting", "counting_values",
    "counting_multiplicity", "ratio_field", "check_submean", "check_littlewood",
    "check_aleman", "aleman_radial", "dilation_integral", "laplacian", "green_sum",
    "quasi_invariance_band", "quasi_invariance_constant", "littlewood_grid", "radial_ladder",
]
