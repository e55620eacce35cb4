"""The Hilbert space ``H_omega`` of analytic functions on the disk.

``||f||^2 = |f(0)|^2 + int |f'|^2 omega dA``.  For radial weights this equals
``sum |a_n|^2 omega_n`` with the moments of :func:`compop.weight.moments`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import InvalidInputError, TruncationBudgetError
from .numerics import QuadratureRule, integrate_disk
from .symbol import SymbolSpec, eval_symbol, taylor_powers
from .weight import WeightProfile, moments, radius_weight

TEST_FUNCTION_TAIL = 1e-10
DEFAULT_DEGREE_BUDGET = 40000


@dataclass(frozen=True)
class AnalyticFunction:
    """Polynomial (or truncated series) ``sum a_n z**n``."""

    coefficients: np.ndarray
    label: str = "f"

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coefficients, dtype=complex))
        if c.ndim != 1 or c.size == 0 or not np.all(np.isfinite(c)):
            raise InvalidInputError("coefficients must be a finite non-empty 1-D sequence")
        object.__setattr__(self, "coefficients", c)

    @property
    def degree(self) -> int:
        return self.coefficients.size - 1

    def __call__(self, z):
        return npoly.polyval(np.asarray(z, dtype=complex), self.coefficients)

    def derivative(self) -> "AnalyticFunction":
        if self.coefficients.size == 1:
            return AnalyticFunction(np.zeros(1, dtype=complex), f"{self.label}'")
        return AnalyticFunction(npoly.polyder(self.coefficients), f"{self.label}'")


def monomial(n: int, coeff: complex = 1.0) -> AnalyticFunction:
    c = np.zeros(n + 1, dtype=complex)
    c[n] = coeff
    return AnalyticFunction(c, f"z^{n}")


def norm_coeff(f: AnalyticFunction, w: WeightProfile) -> float:
    """``sqrt(sum |a_n|^2 omega_n)``."""
    a = f.coefficients
    if a.size == 1:
        return float(abs(a[0]))
    om = moments(w, a.size - 1).values
    return math.sqrt(float(np.sum(np.abs(a) ** 2 * om)))


def _polynomial_rule(degree: int, w: WeightProfile) -> QuadratureRule:
    # |f'|^2 is a trigonometric polynomial of degree < 2 * degree in theta
    m = 2 * max(degree, 1) + 2
    hint = w.boundary_exponent if w.boundary_exponent is not None and w.boundary_exponent > -1 else None
    return QuadratureRule(base_annuli=16, annuli_step=6, radial_order=16, order_step=8,
                          base_angular=m, max_angular=m, refinement_levels=4,
                          rel_tol=1e-9, abs_tol=1e-14, boundary_exponent=hint)


def norm_integral(f: AnalyticFunction, w: WeightProfile, rule: QuadratureRule | None = None) -> float:
    """``sqrt(|f(0)|^2 + int |f'|^2 omega dA)`` by disk quadrature."""
    df = f.derivative()
    rule = rule or _polynomial_rule(f.degree, w)

    def integrand(z):
        return np.abs(df(z)) ** 2 * radius_weight(w, np.abs(z))

    val = abs(f.coefficients[0]) ** 2
    if f.degree >= 1:
        val += integrate_disk(integrand, rule).value
    return math.sqrt(val)


def _required_degree(lam_abs: float, delta: float, scale_sq: float, tol_sq: float,
                     budget: int) -> int:
    """Smallest N whose tail bound ``sum_{n>N} scale^2 n (e(n+1))^{2 delta} |lam|^{2n}`` is below tol.

    The bound uses ``omega_n <= n omega(0)`` (true for non-increasing weights)
    and ``binom(n + delta, n) <= (e (n + 1))**delta``.
    """
    log_l = math.log(lam_abs)

    def log_term(n):
        return (math.log(scale_sq) + math.log(n) + 2 * delta * (1 + math.log(n + 1))
                + 2 * n * log_l)

    n = 1
    while True:
        ratio = math.exp(2 * log_l + (2 * delta + 1) * math.log((n + 2) / (n + 1)))
        if ratio < 1:
            tail = math.exp(log_term(n + 1)) / (1.0 - ratio)
            if tail < tol_sq:
                return n
        if n > 64 * budget:
            return n
        n = max(n + 1, int(n * 1.1))


def test_function(lam: complex, w: WeightProfile, delta: float,
                  budget: int = DEFAULT_DEGREE_BUDGET) -> AnalyticFunction:
    """``f_lam(z) = omega(lam)**-1/2 (1 - |lam|^2)**(1+delta) (1 - conj(lam) z)**-(1+delta)``.

    Truncated where the binomial tail is below ``1e-10`` in norm.
    """
    lam = complex(lam)
    if not abs(lam) < 1:
        raise InvalidInputError("lambda must lie in the open disk")
    if not delta > 0:
        raise InvalidInputError("delta must be positive")
    a = abs(lam)
    om_lam = float(radius_weight(w, np.array([a]))[0])
    scale = (1.0 - a * a) ** (1.0 + delta) / math.sqrt(om_lam)
    if a == 0.0:
        return AnalyticFunction(np.array([scale], dtype=complex), "f_0")
    om0 = float(w.at_c(np.array([1.0]))[0]) if not w.singular_at_zero else 1.0
    N = _required_degree(a, delta, scale * scale * max(om0, 1.0), TEST_FUNCTION_TAIL ** 2, budget)
    if N > budget:
        raise TruncationBudgetError(f"|lambda| = {a} needs degree {N} > budget {budget}", N)
    n = np.arange(1, N + 1, dtype=float)
    mags = np.concatenate([[1.0], np.cumprod((n + delta) / n * a)])
    phase = np.exp(-1j * np.angle(lam) * np.arange(N + 1))
    return AnalyticFunction(scale * mags * phase, f"f_{lam}")


def compose(f: AnalyticFunction, phi: SymbolSpec, N: int) -> AnalyticFunction:
    """Taylor coefficients of ``f o phi`` up to ``z**N``."""
    if int(N) != N or N < 0:
        raise InvalidInputError("N must be a non-negative integer")
    powers = taylor_powers(phi, f.degree, int(N))
    return AnalyticFunction(powers @ f.coefficients, f"{f.label} o {phi.label}")


def change_of_variable_sides(f: AnalyticFunction, phi: SymbolSpec, w: WeightProfile,
                             rule: QuadratureRule | None = None):
    """``int |f'(phi)|^2 |phi'|^2 omega dA`` and ``int |f'|^2 N_{phi,omega} dA``."""
    from .nevanlinna import counting_values

    df = f.derivative()
    rule = rule or QuadratureRule(base_annuli=14, annuli_step=6, radial_order=12, order_step=6,
                                  base_angular=64, max_angular=512, refinement_levels=4,
                                  rel_tol=2e-6, abs_tol=1e-14)

    def left(z):
        return (np.abs(df(eval_symbol(phi, z))) ** 2 * np.abs(eval_symbol(phi, z, 1)) ** 2
                * radius_weight(w, np.abs(z)))

    def right(z):
        return np.abs(df(z)) ** 2 * counting_values(phi, w, z)

    return integrate_disk(left, rule).value, integrate_disk(right, rule).value


test_function.__test__ = False  # keep pytest from collecting it when imported
