"""Radial weights, their moments, and admissibility certificates.

A weight is stored as three vectorized callables (value and two radial
derivatives).  Weights that decay at the boundary also carry ``value_c``,
the same function written in the complementary variable ``x = 1 - r``, so
that values at distances far below ``1e-16`` from the circle stay accurate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, InvalidInputError, InvalidWeightError
from .numerics import gauss_legendre, radial_panels

Array = np.ndarray

DELTA_GRID = tuple(2.0 ** k for k in range(-4, 3))  # 1/16 .. 4
MONOTONE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class WeightProfile:
    """Radial weight ``omega`` on ``[0, 1)`` with derivative access.

    Attributes
    ----------
    value, d1, d2 : callable
        ``omega``, ``omega'`` and ``omega''`` as vectorized functions of r.
    value_c : callable, optional
        ``x -> omega(1 - x)`` evaluated without forming ``1 - x``.
    d1_at_one : float, optional
        Known limit of ``omega'(r)`` as ``r -> 1``; ``None`` if unknown.
    boundary_exponent : float, optional
        ``c`` with ``omega(r) ~ (1 - r)**c`` near the circle (quadrature hint).
    tail_mass : callable, optional
        ``x -> int_0^x omega(1 - s) ds`` for small ``x``; only needed for
        densities whose boundary singularity is not a pure power.
    density : WeightProfile, optional
        The density ``sigma`` this weight was induced from, if any.
    """

    value: Callable[[Array], Array]
    d1: Callable[[Array], Array]
    d2: Callable[[Array], Array]
    label: str
    singular_at_zero: bool = False
    value_c: Callable[[Array], Array] | None = None
    d1_at_one: float | None = None
    boundary_exponent: float | None = None
    tail_mass: Callable[[float], float] | None = None
    density: "WeightProfile | None" = None
    key: str | None = None
    params: dict = field(default_factory=dict)

    def __call__(self, r):
        return eval_weight(self, r, 0)

    def at_c(self, x):
        """``omega(1 - x)`` for distances ``x`` to the boundary in (0, 1]."""
        x = np.asarray(x, dtype=float)
        if self.value_c is not None:
            return self.value_c(x)
        return self.value(1.0 - x)

    def __repr__(self):
        return f"WeightProfile({self.label!r})"


def eval_weight(w: WeightProfile, r, order: int = 0):
    """``omega``, ``omega'`` or ``omega''`` at radii ``r`` in ``[0, 1)``."""
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr >= 1.0) or np.any(r_arr < 0.0) or not np.all(np.isfinite(r_arr)):
        raise DomainError("weights are defined on [0, 1) only")
    fn = {0: w.value, 1: w.d1, 2: w.d2}.get(order)
    if fn is None:
        raise InvalidInputError("order must be 0, 1 or 2")
    out = fn(r_arr)
    return float(out) if np.ndim(r) == 0 else out


def radius_weight(w: WeightProfile, radii):
    """``omega(|a|)`` for moduli in ``[0, 1)``, using ``value_c`` near the circle."""
    radii = np.asarray(radii, dtype=float)
    out = np.empty_like(radii)
    near = radii > 0.5
    out[near] = w.at_c(1.0 - radii[near])
    out[~near] = w.value(radii[~near])
    return out


# --------------------------------------------------------------------------
# classical weights


def make_classical_weight(alpha: float) -> WeightProfile:
    """``omega_alpha(r) = (1 - r**2)**alpha`` with analytic derivatives."""
    alpha = float(alpha)
    if not alpha > -1:
        raise InvalidWeightError(f"alpha must exceed -1 for integrability (got {alpha})")
    a = alpha

    def value(r):
        return ((1.0 - r) * (1.0 + r)) ** a

    def value_c(x):
        return (x * (2.0 - x)) ** a

    def d1(r):
        u = (1.0 - r) * (1.0 + r)
        return -2.0 * a * r * u ** (a - 1.0) if a != 0 else np.zeros_like(r)

    def d2(r):
        if a == 0:
            return np.zeros_like(r)
        u = (1.0 - r) * (1.0 + r)
        return -2.0 * a * u ** (a - 1.0) + 4.0 * a * (a - 1.0) * r * r * u ** (a - 2.0)

    if a > 1 or a == 0:
        limit = 0.0
    elif a == 1:
        limit = -2.0
    else:
        limit = -math.inf if a > 0 else math.inf
    return WeightProfile(value, d1, d2, f"omega_{alpha:g}", value_c=value_c,
                         d1_at_one=limit, boundary_exponent=a, key=f"alpha:{alpha:g}",
                         params={"kind": "alpha", "alpha": a})


def make_log_weight() -> WeightProfile:
    """``log(1/r)``, the weight of the classical Nevanlinna counting function."""
    def value(r):
        with np.errstate(divide="ignore"):
            return -np.log(r)

    return WeightProfile(
        value, lambda r: -1.0 / r, lambda r: 1.0 / (r * r), "log(1/r)",
        singular_at_zero=True, value_c=lambda x: -np.log1p(-x), d1_at_one=-1.0,
        boundary_exponent=1.0, key="log", params={"kind": "log"},
    )


def _fd_derivatives(value_c):
    """First/second r-derivatives of a function given in ``x = 1 - r``."""
    def d1(r):
        x = 1.0 - np.asarray(r, dtype=float)
        h = 1e-4 * np.maximum(x, 1e-12)
        return -(value_c(x + h) - value_c(x - h)) / (2.0 * h)

    def d2(r):
        x = 1.0 - np.asarray(r, dtype=float)
        h = 1e-4 * np.maximum(x, 1e-12)
        return (value_c(x + h) - 2.0 * value_c(x) + value_c(x - h)) / (h * h)

    return d1, d2


def make_density_power(alpha: float) -> WeightProfile:
    """Density ``sigma_alpha(r) = (1 - r)**alpha``."""
    alpha = float(alpha)
    if not alpha > -1:
        raise InvalidWeightError("density exponent must exceed -1")
    a = alpha
    return WeightProfile(
        lambda r: (1.0 - r) ** a,
        lambda r: -a * (1.0 - r) ** (a - 1.0) if a != 0 else np.zeros_like(r),
        lambda r: a * (a - 1.0) * (1.0 - r) ** (a - 2.0) if a not in (0.0, 1.0) else np.zeros_like(r),
        f"sigma_{alpha:g}",
        value_c=lambda x: x ** a,
        boundary_exponent=a,
        tail_mass=lambda x: x ** (a + 1.0) / (a + 1.0),
        key=f"sigma:{alpha:g}",
        params={"kind": "sigma", "alpha": a},
    )


# --------------------------------------------------------------------------
# iterated-logarithm density

_E_TOWER = (1.0, math.e, math.exp(math.e), math.exp(math.exp(math.e)))


def _iterated_logs(ell, p):
    """Factors ``log_k(e_k / u)`` for k = 1..p, written in ``ell = log(1/u)``.

    ``log_k(e_k / u) = log_{k-1}(e_{k-1} + ell)``.
    """
    out = []
    for k in range(1, p + 1):
        v = _E_TOWER[k - 1] + ell
        for _ in range(k - 1):
            v = np.log(v)
        out.append(v)
    return out


def _logiter_integrand(ell, p):
    # sigma(u) du / u expressed in ell, without the 1/(2t) Jacobian
    logs = _iterated_logs(ell, p)
    with np.errstate(over="ignore"):
        prod = logs[-1] ** 2
        for v in logs[:-1]:
            prod = prod * v
    return 1.0 / prod


@lru_cache(maxsize=None)
def _logiter_tail_T(p: int, ell0: float) -> float:
    """``int_{ell0}^inf dl / (L_1 ... L_{p-1} L_p**2)``.

    Integrated in ``y = log(ell)`` up to ``ell = 1e300``; the remainder
    ``1 / L_p(1e300)`` is the exact antiderivative of the asymptotic integrand.
    """
    y0 = math.log(ell0)
    y_max = math.log(1e300)
    t, w = gauss_legendre(12)
    edges = np.arange(y0, y_max, 0.5)
    edges = np.append(edges, y_max)
    a, b = edges[:-1, None], edges[1:, None]
    y = 0.5 * (a + b) + 0.5 * (b - a) * t[None, :]
    wy = (0.5 * (b - a) * w[None, :]).ravel()
    ell = np.exp(y.ravel())
    body = float(np.dot(wy, ell * _logiter_integrand(ell, p)))
    far = 1.0 / float(_iterated_logs(np.array(1e300), p)[-1])
    return body + far


def _logiter_sigma_c(p):
    def sigma_c(x):
        x = np.asarray(x, dtype=float)
        u = x * (2.0 - x)
        ell = -(np.log(x) + np.log(2.0 - x))
        return _logiter_integrand(ell, p) / u

    return sigma_c


def make_log_iterated_weight(p: int):
    """Density ``sigma`` of the iterated-logarithm example and its weight.

    ``sigma(r) = [(1-r^2) log(e/(1-r^2)) ... (log_p(e_p/(1-r^2)))^2]^{-1}``
    with ``log_1 = log``, ``log_{k+1} = log o log_k``, ``e_1 = e``,
    ``e_{k+1} = exp(e_k)``.  Returns ``(density, weight)``.
    """
    if int(p) != p or p < 1:
        raise InvalidInputError("p must be a positive integer")
    p = int(p)
    if p > len(_E_TOWER):
        raise InvalidInputError(f"p > {len(_E_TOWER)} overflows the exponential tower e_p")
    sigma_c = _logiter_sigma_c(p)

    def tail_mass(x):
        x = float(x)
        u = x * (2.0 - x)
        ell0 = -(math.log(x) + math.log(2.0 - x))
        # ds = du / (2 sqrt(1 - u)); the square root is 1 to double precision here
        return 0.5 * _logiter_tail_T(p, ell0) / math.sqrt(1.0 - u)

    d1, d2 = _fd_derivatives(sigma_c)
    density = WeightProfile(
        lambda r: sigma_c(1.0 - np.asarray(r, dtype=float)), d1, d2,
        f"sigma_logiter_{p}", value_c=sigma_c, boundary_exponent=-1.0 + 1e-12,
        tail_mass=tail_mass, key=f"logiter-density:{p}",
        params={"kind": "logiter-density", "p": p},
    )
    weight = weight_from_density(density, key=f"logiter:{p}")
    return density, weight


# --------------------------------------------------------------------------
# density -> weight


class _DensityIntegrals:
    """Cumulative integrals ``F1(x) = int_0^x s~`` and ``F2(x) = int_0^x s s~``.

    ``s~(s) = sigma(1 - s)``.  Values are tabulated at ``x_j = 2**-j`` and
    completed with a Gauss-Legendre rule on the partial panel.
    """

    def __init__(self, sigma: WeightProfile, n_panels: int = 1000, order: int = 12):
        self.sigma = sigma
        self.J = n_panels
        self.order = order
        t, w = gauss_legendre(order)
        self.t, self.w = t, w
        xj = 2.0 ** -np.arange(n_panels + 1, dtype=float)
        a, b = xj[1:, None], xj[:-1, None]  # panel j = [x_{j+1}, x_j]
        s = 0.5 * (a + b) + 0.5 * (b - a) * t[None, :]
        ws = 0.5 * (b - a) * w[None, :]
        vals = sigma.at_c(s)
        if not np.all(np.isfinite(vals)) or np.any(vals < 0):
            raise InvalidWeightError("density must be finite and non-negative on (0, 1)")
        A = np.sum(ws * vals, axis=1)
        B = np.sum(ws * s * vals, axis=1)
        x_last = xj[-1]
        tail1 = self._tail_f1(x_last)
        tail2 = 0.5 * x_last * tail1
        # F at x_j = tail + sum over panels i >= j
        self.F1 = tail1 + np.concatenate([np.cumsum(A[::-1])[::-1], [0.0]])
        self.F2 = tail2 + np.concatenate([np.cumsum(B[::-1])[::-1], [0.0]])
        self.xj = xj
        if not np.isfinite(self.F1[0]):
            raise InvalidWeightError("density is not integrable on (0, 1)")

    def _tail_f1(self, x):
        if self.sigma.tail_mass is not None:
            return float(self.sigma.tail_mass(x))
        xs, ws = gauss_legendre(self.order)
        s = 0.5 * x * (1.0 + xs)
        return float(np.dot(0.5 * x * ws, self.sigma.at_c(s)))

    def __call__(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        F1 = np.empty_like(x)
        F2 = np.empty_like(x)
        deep = x < self.xj[-1]
        if np.any(deep):
            for i in np.nonzero(deep)[0]:
                F1[i] = self._tail_f1(x[i])
                F2[i] = 0.5 * x[i] * F1[i]
        ok = ~deep
        if np.any(ok):
            xo = x[ok]
            with np.errstate(divide="ignore"):
                j = np.floor(-np.log2(xo)).astype(int)
            j = np.clip(j, 0, self.J - 1)
            lo = self.xj[j + 1]
            s = lo[:, None] + (xo - lo)[:, None] * 0.5 * (1.0 + self.t[None, :])
            ws = (xo - lo)[:, None] * 0.5 * self.w[None, :]
            vals = self.sigma.at_c(s)
            F1[ok] = self.F1[j + 1] + np.sum(ws * vals, axis=1)
            F2[ok] = self.F2[j + 1] + np.sum(ws * s * vals, axis=1)
        return F1, F2


def weight_from_density(sigma: WeightProfile, key: str | None = None) -> WeightProfile:
    """``omega_sigma(r) = int_r^1 (t - r) sigma(t) dt``.

    ``omega_sigma' = -int_r^1 sigma`` and ``omega_sigma'' = sigma``; the
    derivative tends to zero at the boundary because ``sigma`` is integrable.
    """
    tables = _DensityIntegrals(sigma)

    def value_c(x):
        x = np.asarray(x, dtype=float)
        F1, F2 = tables(x)
        return (x * F1 - F2).reshape(x.shape)

    def d1(r):
        r = np.asarray(r, dtype=float)
        return (-tables(1.0 - r)[0]).reshape(r.shape)

    hint = None if sigma.boundary_exponent is None else sigma.boundary_exponent + 2.0
    return WeightProfile(
        lambda r: value_c(1.0 - np.asarray(r, dtype=float)),
        d1,
        sigma.value,
        f"omega[{sigma.label}]",
        value_c=value_c,
        d1_at_one=0.0,
        boundary_exponent=hint,
        density=sigma,
        key=key or (f"induced:{sigma.key}" if sigma.key else None),
        params={"kind": "induced", "density": dict(sigma.params)},
    )


def load_density_csv(path) -> WeightProfile:
    """Density sampled in a two-column CSV ``r, sigma(r)`` with increasing r."""
    path = Path(path)
    try:
        data = np.loadtxt(path, delimiter=",", ndmin=2, comments="#")
    except (OSError, ValueError) as exc:
        raise InvalidInputError(f"cannot read density file {path}: {exc}") from exc
    if data.shape[1] != 2 or data.shape[0] < 2:
        raise InvalidInputError("density file needs two columns and at least two rows")
    r, s = data[:, 0], data[:, 1]
    if np.any(np.diff(r) <= 0) or r[0] < 0 or r[-1] >= 1:
        raise InvalidInputError("density radii must be strictly increasing inside [0, 1)")
    if np.any(s < 0) or not np.all(np.isfinite(s)):
        raise InvalidInputError("density values must be finite and non-negative")
    value_c = lambda x: np.interp(1.0 - np.asarray(x, dtype=float), r, s)  # noqa: E731
    d1, d2 = _fd_derivatives(value_c)
    return WeightProfile(lambda rr: np.interp(rr, r, s), d1, d2, f"sigma[{path.name}]",
                         value_c=value_c, boundary_exponent=0.0,
                         key=f"density-file:{path}", params={"kind": "density-file", "path": str(path)})


def parse_weight_key(key: str) -> WeightProfile:
    """Build a weight from a catalog key.

    ``alpha:<a>``, ``logiter:<p>``, ``density-file:<path>`` and
    ``sigma:<a>`` (the weight induced by ``(1 - r)**a``).
    """
    if not isinstance(key, str) or ":" not in key:
        raise InvalidInputError(f"unknown weight key {key!r}")
    kind, _, arg = key.partition(":")
    kind = kind.strip().lower()
    try:
        if kind == "alpha":
            return make_classical_weight(float(arg))
        if kind == "logiter":
            p = float(arg)
            if p != int(p):
                raise InvalidInputError("logiter order must be an integer")
            return make_log_iterated_weight(int(p))[1]
        if kind == "sigma":
            return weight_from_density(make_density_power(float(arg)), key=key)
        if kind == "density-file":
            return weight_from_density(load_density_csv(arg), key=key)
    except ValueError as exc:
        if isinstance(exc, InvalidInputError):
            raise
        raise InvalidInputError(f"bad parameter in weight key {key!r}: {exc}") from exc
    raise InvalidInputError(f"unknown weight key {key!r}")


# --------------------------------------------------------------------------
# moments


@dataclass(frozen=True)
class MomentSequence:
    values: np.ndarray
    kind: str  # "omega_n" or "sigma_n"

    def __post_init__(self):
        v = self.values
        if v.size == 0 or not np.all(np.isfinite(v)) or np.any(v <= 0):
            raise InvalidWeightError("moments must be positive and finite")

    def __getitem__(self, n):
        return self.values[n]

    def __len__(self):
        return self.values.size


_MOMENT_LEVELS = ((40, 16), (60, 24), (80, 32))


def _power_moments(w: WeightProfile, exponents: np.ndarray, rel_tol: float,
                   use_tail_mass: bool = False) -> np.ndarray:
    """``int_0^1 r**e w(r) dr`` for each exponent, converged across levels."""
    prev = None
    for K, n in _MOMENT_LEVELS:
        hint = None if use_tail_mass else w.boundary_exponent
        if hint is not None and hint <= -1:
            hint = None
        x, wt = radial_panels(K, n, hint)
        if use_tail_mass:
            # replace the boundary panel by the exact mass of the density there
            x, wt = x[:-n], wt[:-n]
        vals = w.at_c(x) * wt
        log1m = np.log1p(-x)
        out = np.empty(exponents.size)
        for start in range(0, exponents.size, 256):
            e = exponents[start:start + 256]
            out[start:start + 256] = np.exp(np.outer(e, log1m)) @ vals
        if use_tail_mass:
            xk = 2.0 ** -K
            out += np.exp(exponents * math.log1p(-xk)) * w.tail_mass(xk)
        if prev is not None:
            err = np.abs(out - prev)
            if np.all(err <= rel_tol * np.abs(out) + 1e-300):
                return out
        prev = out
    from .errors import ToleranceNotMetError

    raise ToleranceNotMetError("moment quadrature did not converge", (None, None))


@lru_cache(maxsize=128)
def _moments_cached(w: WeightProfile, n_max: int) -> np.ndarray:
    n = np.arange(1, n_max + 1, dtype=float)
    integrals = _power_moments(w, 2.0 * n - 1.0, 1e-12)
    return np.concatenate([[1.0], 2.0 * n * n * integrals])


def moments(w: WeightProfile, n_max: int) -> MomentSequence:
    """``omega_0 = 1`` and ``omega_n = 2 n**2 int_0^1 r**(2n-1) omega(r) dr``."""
    if int(n_max) != n_max or n_max < 1:
        raise InvalidInputError("n_max must be a positive integer")
    vals = _moments_cached(w, int(n_max)).copy()
    return MomentSequence(vals, "omega_n")


def density_moments(sigma: WeightProfile, n_max: int) -> MomentSequence:
    """``sigma_n = 2 int_0^1 r**(2n+1) sigma(r) dr`` for ``n = 0..n_max``."""
    if int(n_max) != n_max or n_max < 0:
        raise InvalidInputError("n_max must be a non-negative integer")
    n = np.arange(0, int(n_max) + 1, dtype=float)
    use_tail = sigma.tail_mass is not None and (sigma.boundary_exponent is None
                                                or sigma.boundary_exponent <= -0.5)
    vals = 2.0 * _power_moments(sigma, 2.0 * n + 1.0, 1e-11, use_tail_mass=use_tail)
    return MomentSequence(vals, "sigma_n")


# --------------------------------------------------------------------------
# structure functions


def _check_r(r, allow_one=False):
    r = np.asarray(r, dtype=float)
    hi_bad = r > 1.0 if allow_one else r >= 1.0
    if np.any(hi_bad) or np.any(r < 0):
        raise DomainError("radius must lie in [0, 1)")
    return r


def eval_G(w: WeightProfile, r, extend: bool = False):
    """``G(r) = omega(r) / (1 - r)``; ``G(1) = 0`` when ``extend`` and ``omega'(1-) = 0``."""
    r_arr = _check_r(r, allow_one=extend)
    out = np.empty_like(r_arr)
    at_one = r_arr == 1.0
    if np.any(at_one):
        if w.d1_at_one != 0.0:
            raise DomainError("G extends continuously to r = 1 only when omega'(1-) = 0")
        out[at_one] = 0.0
    x = 1.0 - r_arr[~at_one]
    out[~at_one] = w.at_c(x) / x
    return float(out) if np.ndim(r) == 0 else out


def eval_G_c(w: WeightProfile, x):
    x = np.asarray(x, dtype=float)
    return w.at_c(x) / x


def eval_H(w: WeightProfile, delta: float, r):
    """``H(r) = omega(r) (1 - r)**-(1 + delta)``."""
    r_arr = _check_r(r)
    x = 1.0 - r_arr
    out = w.at_c(x) * x ** (-(1.0 + delta))
    return float(out) if np.ndim(r) == 0 else out


# --------------------------------------------------------------------------
# admissibility


@dataclass
class AdmissibilityReport:
    w1: bool
    w2_delta: float | None
    w3: bool
    w4_class: str  # "I", "II" or "neither"
    tail_radius: float
    probe_count: int
    violations: list = field(default_factory=list)
    w2_certified: tuple = ()

    @property
    def admissible(self) -> bool:
        return self.w1 and self.w2_delta is not None and self.w3 and self.w4_class != "neither"

    def to_dict(self):
        return {
            "w1": self.w1, "w2_delta": self.w2_delta, "w2_certified": list(self.w2_certified),
            "w3": self.w3, "w4_class": self.w4_class, "tail_radius": self.tail_radius,
            "probe_count": self.probe_count, "admissible": self.admissible,
            "violations": [[c, r] for c, r in self.violations],
        }


def probe_grid(n_uniform: int = 500, n_geometric: int = 1500, depth: int = 30):
    """Probe distances ``x = 1 - r`` ordered by increasing r."""
    r_lin = np.linspace(0.0, 0.5, n_uniform, endpoint=False)
    x_geo = 2.0 ** -np.linspace(1.0, depth, n_geometric)
    return np.concatenate([1.0 - r_lin, x_geo])


def _runs(bad: np.ndarray, min_run: int = 2):
    """Start indices of runs of at least ``min_run`` consecutive True values."""
    starts = []
    i, n = 0, bad.size
    while i < n:
        if bad[i]:
            j = i
            while j < n and bad[j]:
                j += 1
            if j - i >= min_run:
                starts.append(i)
            i = j
        else:
            i += 1
    return starts


def _non_increasing_violations(v, tol=MONOTONE_TOL):
    scale = np.maximum(np.abs(v[:-1]), np.abs(v[1:]))
    return _runs(v[1:] - v[:-1] > tol * scale)


def check_admissibility(w: WeightProfile, tail_radius: float = 0.0,
                        delta_grid: Sequence[float] = DELTA_GRID) -> AdmissibilityReport:
    """Certify (W1)-(W4) on the probe grid restricted to ``[tail_radius, 1)``."""
    delta_grid = sorted(float(d) for d in delta_grid)
    if not delta_grid:
        raise InvalidInputError("delta_grid must not be empty")
    if any(d <= 0 for d in delta_grid):
        raise InvalidInputError("W2 exponents must be positive")
    if not 0.0 <= tail_radius < 1.0:
        raise InvalidInputError("tail_radius must lie in [0, 1)")
    x_all = probe_grid()
    x = x_all[1.0 - x_all >= tail_radius]
    if w.singular_at_zero:
        x = x[x < 1.0]
    r = 1.0 - x
    v = w.at_c(x)
    violations = []

    bad = _non_increasing_violations(v)
    w1 = not bad
    violations += [("W1", float(r[i])) for i in bad]

    certified = []
    for d in delta_grid:
        H = v * x ** (-(1.0 + d))
        b = _non_increasing_violations(-H)
        if not b:
            certified.append(d)
    w2_delta = certified[0] if certified else None
    if w2_delta is None:
        H = v * x ** (-(1.0 + delta_grid[-1]))
        violations += [("W2", float(r[i])) for i in _non_increasing_violations(-H)]

    ref = float(v[0])
    edge = float(w.at_c(np.array([2.0 ** -30]))[0])
    w3 = bool(edge < 1e-3 * ref) and not _non_increasing_violations(v[-100:])
    if not w3:
        violations.append(("W3", float(1.0 - 2.0 ** -30)))

    d1 = np.asarray(w.d1(r), dtype=float)
    d2 = np.asarray(w.d2(r), dtype=float)
    scale2 = max(float(np.max(np.abs(d2))), 1e-300)
    convex = not _runs(d2 < -MONOTONE_TOL * scale2)
    concave = not _runs(d2 > MONOTONE_TOL * scale2)
    if w.d1_at_one is not None:
        d1_vanishes = w.d1_at_one == 0.0
    else:
        scale1 = max(float(np.max(np.abs(d1))), 1e-300)
        d1_vanishes = abs(float(d1[-1])) <= 1e-3 * scale1
    if convex and d1_vanishes:
        cls = "I"
    elif concave:
        cls = "II"
    else:
        cls = "neither"
        for i in _runs(d2 < -MONOTONE_TOL * scale2)[:1] + _runs(d2 > MONOTONE_TOL * scale2)[:1]:
            violations.append(("W4", float(r[i])))
        if convex and not d1_vanishes:
            violations.append(("W4", float(r[-1])))
    return AdmissibilityReport(w1, w2_delta, w3, cls, float(tail_radius), int(x.size),
                               violations, tuple(certified))


# --------------------------------------------------------------------------
# condition (kappa)


@dataclass
class KappaReport:
    etas: np.ndarray
    estimates: np.ndarray
    verdict: str  # "holds", "fails", "inconclusive"

    @property
    def holds(self):
        return self.verdict == "holds"


DEFAULT_ETAS = 2.0 ** -np.arange(1, 11, dtype=float)
DEFAULT_KAPPA_X = np.logspace(-12, -1, 111)


def check_kappa(w: WeightProfile, eta_grid=DEFAULT_ETAS, x_grid=DEFAULT_KAPPA_X) -> KappaReport:
    """Estimate ``limsup_{x->0} omega~(eta x) / (eta omega~(x))`` for each eta.

    ``omega~(x) = omega(1 - x)``.  The limsup is the maximum over the
    smallest decade of ``x_grid``.  Condition (kappa) is reported as holding
    when the estimates are non-increasing as eta decreases and the last one
    is at most 0.05, failing when the last one is at least 0.5.
    """
    etas = np.sort(np.asarray(eta_grid, dtype=float))[::-1]
    xs = np.sort(np.asarray(x_grid, dtype=float))
    if etas.size == 0 or np.any(etas <= 0) or np.any(etas >= 1):
        raise InvalidInputError("eta values must lie in (0, 1)")
    if xs.size < 2 or np.any(xs <= 0) or np.any(xs >= 1):
        raise InvalidInputError("x values must lie in (0, 1)")
    if math.log10(xs[-1] / xs[0]) < 8:
        raise InvalidInputError("x_grid must span at least 8 decades")
    small = xs[xs <= 10.0 * xs[0]]
    base = w.at_c(small)
    est = np.array([float(np.max(w.at_c(eta * small) / (eta * base))) for eta in etas])
    non_increasing = not np.any(np.diff(est) > 1e-9 * np.maximum(est[1:], est[:-1]))
    if non_increasing and est[-1] <= 0.05:
        verdict = "holds"
    elif est[-1] >= 0.5:
        verdict = "fails"
    else:
        verdict = "inconclusive"
    return KappaReport(etas, est, verdict)
