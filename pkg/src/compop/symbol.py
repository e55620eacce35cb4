"""Rational self-maps of the unit disk.

A symbol is stored as ``phi = P / Q`` with ascending complex coefficient
arrays and ``Q(0) = 1``.  Compositions are expanded eagerly so that
preimage problems are single polynomial equations ``P(a) - z Q(a) = 0`` of
minimal degree.

Mini-language
-------------
``z``, ``z^k``, ``poly:[c0, c1, ...]``, ``blaschke:[a1, ...]`` (product of
``(z - a) / (1 - conj(a) z)``), ``mobius:lam`` (``q_lam(z) = (lam - z) /
(1 - conj(lam) z)``), and chains joined by ``∘`` or `` o `` where the
rightmost map is applied first.
"""
from __future__ import annotations

import ast
import math
import re
from dataclasses import dataclass, field, replace

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.signal import lfilter

from . import numerics
from .errors import DomainError, InvalidInputError, NotASelfMapError

CIRCLE_POINTS = 4096
CIRCLE_RADIUS = 1.0 - 1e-6
SELF_MAP_SLACK = 1e-9
BOUNDARY_BAND = 1e-9
PHI0_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SymbolSpec:
    """Rational self-map ``numerator / denominator`` of the unit disk."""

    numerator: np.ndarray
    denominator: np.ndarray
    kind: str
    degree: int
    certificate: float
    label: str
    lam: complex | None = None  # set when this is q_lam o phi for normalization

    def __call__(self, z):
        return eval_symbol(self, z)

    @property
    def phi0(self) -> complex:
        return complex(self.numerator[0] / self.denominator[0])

    @property
    def is_polynomial(self) -> bool:
        return self.denominator.size == 1

    def poles(self) -> np.ndarray:
        if self.denominator.size == 1:
            return np.empty(0, dtype=complex)
        return np.array([r for r, m in numerics.polynomial_roots(self.denominator)
                         for _ in range(m)])

    def __repr__(self):
        return f"SymbolSpec({self.label!r}, degree={self.degree})"


@dataclass(frozen=True)
class TaylorSeries:
    coefficients: np.ndarray
    truncation_degree: int


@dataclass
class PreimageSet:
    target: complex
    points: list            # (a, multiplicity)
    residual: float
    rejected: list = field(default_factory=list)
    at_phi0: bool = False

    @property
    def count(self) -> int:
        return sum(m for _, m in self.points)


# --------------------------------------------------------------------------
# rational arithmetic


def _trim(c, rel=1e-14):
    c = np.atleast_1d(np.asarray(c, dtype=complex))
    scale = np.max(np.abs(c)) if c.size else 0.0
    if scale == 0.0:
        return np.zeros(1, dtype=complex)
    nz = np.nonzero(np.abs(c) > rel * scale)[0]
    return c[: nz[-1] + 1].copy()


def _compose_rational(outer, inner):
    """Numerator and denominator of ``outer o inner``."""
    (P1, Q1), (P2, Q2) = outer, inner
    d1 = max(P1.size, Q1.size) - 1
    pw = [np.ones(1, dtype=complex)]
    qw = [np.ones(1, dtype=complex)]
    for _ in range(d1):
        pw.append(npoly.polymul(pw[-1], P2))
        qw.append(npoly.polymul(qw[-1], Q2))
    num = np.zeros(1, dtype=complex)
    den = np.zeros(1, dtype=complex)
    for k in range(d1 + 1):
        term = npoly.polymul(pw[k], qw[d1 - k])
        if k < P1.size:
            num = npoly.polyadd(num, P1[k] * term)
        if k < Q1.size:
            den = npoly.polyadd(den, Q1[k] * term)
    return _trim(num), _trim(den)


def _cancel_common(P, Q, tol=1e-9):
    """Divide out linear factors shared by numerator and denominator."""
    if Q.size == 1 or P.size == 1:
        return P, Q
    changed = True
    while changed and Q.size > 1 and P.size > 1:
        changed = False
        rp = np.polynomial.polynomial.polyroots(P)
        rq = np.polynomial.polynomial.polyroots(Q)
        for a in rp:
            close = np.abs(rq - a) <= tol * (1.0 + abs(a))
            if np.any(close):
                b = rq[np.argmax(close)]
                root = 0.5 * (a + b)
                P = _trim(npoly.polydiv(P, np.array([-root, 1.0]))[0])
                Q = _trim(npoly.polydiv(Q, np.array([-root, 1.0]))[0])
                changed = True
                break
    return P, Q


def _mobius_pair(lam: complex):
    return (np.array([lam, -1.0], dtype=complex),
            np.array([1.0, -np.conj(lam)], dtype=complex))


def _blaschke_pair(zeros):
    P = np.ones(1, dtype=complex)
    Q = np.ones(1, dtype=complex)
    for a in zeros:
        a = complex(a)
        if not abs(a) < 1:
            raise InvalidInputError(f"Blaschke zero {a!r} is not inside the disk")
        P = npoly.polymul(P, np.array([-a, 1.0]))
        Q = npoly.polymul(Q, np.array([1.0, -np.conj(a)]))
    return P, Q


# --------------------------------------------------------------------------
# parsing


def _literal(text, what):
    try:
        return ast.literal_eval(text.strip())
    except (ValueError, SyntaxError) as exc:
        raise InvalidInputError(f"cannot parse {what} {text!r}") from exc


def _parse_factor(text: str):
    t = text.strip()
    if t.startswith("(") and t.endswith(")"):
        t = t[1:-1].strip()
    if t == "z":
        return (np.array([0.0, 1.0], dtype=complex), np.ones(1, dtype=complex)), "polynomial"
    m = re.fullmatch(r"z\s*\^\s*(\d+)", t)
    if m:
        k = int(m.group(1))
        if k < 1:
            raise InvalidInputError("z^k needs k >= 1")
        c = np.zeros(k + 1, dtype=complex)
        c[k] = 1.0
        return (c, np.ones(1, dtype=complex)), "polynomial"
    kind, sep, arg = t.partition(":")
    kind = kind.strip().lower()
    if not sep:
        raise InvalidInputError(f"unknown symbol {text!r}")
    if kind == "poly":
        coeffs = _literal(arg, "polynomial coefficients")
        if not isinstance(coeffs, (list, tuple)) or not coeffs:
            raise InvalidInputError("poly: expects a non-empty list of coefficients")
        return (np.array([complex(c) for c in coeffs]), np.ones(1, dtype=complex)), "polynomial"
    if kind == "blaschke":
        zeros = _literal(arg, "Blaschke zeros")
        if not isinstance(zeros, (list, tuple)) or not zeros:
            raise InvalidInputError("blaschke: expects a non-empty list of zeros")
        return _blaschke_pair(zeros), "blaschke"
    if kind == "mobius":
        lam = complex(_literal(arg, "Mobius parameter"))
        if not abs(lam) < 1:
            raise InvalidInputError("mobius parameter must lie in the open disk")
        return _mobius_pair(lam), "mobius"
    raise InvalidInputError(f"unknown symbol kind {kind!r}")


def _split_chain(text: str):
    parts = re.split(r"\s*∘\s*|\s+o\s+", text.strip())
    if any(not p for p in parts):
        raise InvalidInputError(f"empty factor in composition {text!r}")
    return parts


def self_map_certificate(P, Q):
    """``max |phi|`` on the circle of radius ``1 - 1e-6`` (4096 points)."""
    t = np.exp(2j * np.pi * np.arange(CIRCLE_POINTS) / CIRCLE_POINTS) * CIRCLE_RADIUS
    return float(np.max(np.abs(npoly.polyval(t, P) / npoly.polyval(t, Q))))


def from_rational(P, Q, kind="composition", label=None, lam=None) -> SymbolSpec:
    """Validate ``P / Q`` as a non-constant self-map and wrap it."""
    P, Q = _trim(P), _trim(Q)
    P, Q = _cancel_common(P, Q)
    if Q[0] == 0:
        raise NotASelfMapError("denominator vanishes at 0", certificate=math.inf)
    P, Q = P / Q[0], Q / Q[0]
    degree = max(P.size, Q.size) - 1
    if degree < 1 or (P.size == 1 and Q.size == 1):
        raise InvalidInputError("symbol must be non-constant")
    if Q.size > 1:
        poles = np.polynomial.polynomial.polyroots(Q)
        if np.any(np.abs(poles) <= 1.0 + 1e-12):
            raise NotASelfMapError("denominator has a zero in the closed disk",
                                   certificate=math.inf)
    cert = self_map_certificate(P, Q)
    if not cert <= 1.0 + SELF_MAP_SLACK:
        raise NotASelfMapError(f"|phi| reaches {cert:.6g} > 1 near the circle", certificate=cert)
    if Q.size == 1 and kind not in ("polynomial",):
        kind = "polynomial" if kind == "composition" else kind
    return SymbolSpec(P, Q, kind, degree, cert, label or "phi", lam)


def make_symbol(spec: str) -> SymbolSpec:
    """Parse the symbol mini-language into a validated :class:`SymbolSpec`."""
    if not isinstance(spec, str) or not spec.strip():
        raise InvalidInputError("symbol spec must be a non-empty string")
    parts = _split_chain(spec)
    pairs = [_parse_factor(p) for p in parts]
    (P, Q), kind = pairs[-1]
    for (pair, _k) in reversed(pairs[:-1]):
        P, Q = _compose_rational(pair, (P, Q))
    if len(pairs) > 1:
        kind = "composition"
    return from_rational(P, Q, kind=kind, label=spec.strip())


def compose_symbols(outer: SymbolSpec, inner: SymbolSpec, label=None) -> SymbolSpec:
    P, Q = _compose_rational((outer.numerator, outer.denominator),
                             (inner.numerator, inner.denominator))
    return from_rational(P, Q, "composition", label or f"({outer.label}) o ({inner.label})")


def mobius(lam: complex) -> SymbolSpec:
    P, Q = _mobius_pair(complex(lam))
    return from_rational(P, Q, "mobius", f"mobius:{complex(lam)}")


def q_lambda(lam, z):
    """``(lam - z) / (1 - conj(lam) z)``, vectorized in z."""
    z = np.asarray(z, dtype=complex)
    return (lam - z) / (1.0 - np.conj(lam) * z)


# --------------------------------------------------------------------------
# evaluation and series


def eval_symbol(phi: SymbolSpec, z, order: int = 0):
    """``phi(z)`` or ``phi'(z)`` for ``|z| < 1``."""
    z_arr = np.asarray(z, dtype=complex)
    if np.any(np.abs(z_arr) >= 1.0) or not np.all(np.isfinite(z_arr)):
        raise DomainError("symbols are evaluated in the open unit disk only")
    P, Q = phi.numerator, phi.denominator
    p = npoly.polyval(z_arr, P)
    q = npoly.polyval(z_arr, Q)
    if order == 0:
        out = p / q
    elif order == 1:
        dp = npoly.polyval(z_arr, npoly.polyder(P)) if P.size > 1 else 0.0
        dq = npoly.polyval(z_arr, npoly.polyder(Q)) if Q.size > 1 else 0.0
        out = (dp * q - p * dq) / (q * q)
    else:
        raise InvalidInputError("order must be 0 or 1")
    return complex(out) if np.ndim(z) == 0 else out


def taylor_series(phi: SymbolSpec, N: int) -> TaylorSeries:
    """First ``N + 1`` Taylor coefficients of ``phi`` at 0."""
    if int(N) != N or N < 0:
        raise InvalidInputError("N must be a non-negative integer")
    impulse = np.zeros(int(N) + 1, dtype=complex)
    impulse[0] = 1.0
    return TaylorSeries(lfilter(phi.numerator, phi.denominator, impulse), int(N))


def taylor_powers(phi: SymbolSpec, n_max: int, N: int) -> np.ndarray:
    """Matrix whose column n holds the coefficients of ``phi**n`` up to ``z**N``."""
    if int(n_max) != n_max or n_max < 0 or int(N) != N or N < 0:
        raise InvalidInputError("n_max and N must be non-negative integers")
    s = taylor_series(phi, N).coefficients
    out = np.zeros((int(N) + 1, int(n_max) + 1), dtype=complex)
    out[0, 0] = 1.0
    col = out[:, 0].copy()
    for n in range(1, int(n_max) + 1):
        col = np.convolve(col, s)[: int(N) + 1]
        out[:, n] = col
    return out


def taylor_power_coeffs(phi: SymbolSpec, n: int, N: int) -> TaylorSeries:
    """First ``N + 1`` Taylor coefficients of ``phi**n``."""
    return TaylorSeries(taylor_powers(phi, n, N)[:, int(n)].copy(), int(N))


# --------------------------------------------------------------------------
# preimages


def preimage_polynomial(phi: SymbolSpec, z: complex) -> np.ndarray:
    d = phi.degree
    P = np.zeros(d + 1, dtype=complex)
    Q = np.zeros(d + 1, dtype=complex)
    P[: phi.numerator.size] = phi.numerator
    Q[: phi.denominator.size] = phi.denominator
    return P - z * Q


def default_band(z) -> float:
    """Width of the rejection band next to the circle for target ``z``.

    ``1e-9`` away from the boundary, shrinking to ``1e-3 (1 - |z|)`` for
    targets closer than ``1e-6`` to the circle.
    """
    return min(BOUNDARY_BAND, 1e-3 * (1.0 - abs(z)))


def preimages(phi: SymbolSpec, z: complex, band: float | None = None) -> PreimageSet:
    """All solutions of ``phi(a) = z`` in the disk, with multiplicities."""
    z = complex(z)
    if not abs(z) < 1.0:
        raise DomainError("target must lie in the open unit disk")
    band = default_band(z) if band is None else band
    poly = preimage_polynomial(phi, z)
    pts, rejected = [], []
    if np.count_nonzero(np.abs(poly[1:]) > 1e-15 * max(np.max(np.abs(poly)), 1e-300)):
        for a, m in numerics.polynomial_roots(poly):
            ra = abs(a)
            if ra < 1.0 - band:
                pts.append((a, m))
            elif ra < 1.0:
                rejected.append((a, m))
    residual = 0.0
    if pts:
        arr = np.array([a for a, _ in pts])
        residual = float(np.max(np.abs(eval_symbol(phi, arr) - z)))
    return PreimageSet(z, pts, residual, rejected, abs(z - phi.phi0) <= PHI0_TOL)


# --------------------------------------------------------------------------
# normalization and membership


def normalize(phi: SymbolSpec) -> SymbolSpec:
    """``q_lam o phi`` with ``lam = phi(0)``; ``phi`` itself when ``phi(0) = 0``.

    The returned symbol records ``lam`` so that ``phi = q_lam o psi``.
    """
    lam = phi.phi0
    if abs(lam) <= 1e-15:
        return phi
    P, Q = phi.numerator, phi.denominator
    n = max(P.size, Q.size)
    Pp = np.zeros(n, dtype=complex)
    Qp = np.zeros(n, dtype=complex)
    Pp[: P.size] = P
    Qp[: Q.size] = Q
    num = lam * Qp - Pp
    den = Qp - np.conj(lam) * Pp
    num[0] = 0.0
    psi = from_rational(num, den, "composition", f"q_({lam:.6g}) o ({phi.label})", lam=lam)
    return psi


@dataclass(frozen=True)
class SymbolNorm:
    in_space: bool
    norm_sq: float
    tail_bound: float
    inconclusive: bool


def symbol_in_space(phi: SymbolSpec, w, N: int = 512) -> SymbolNorm:
    """``||phi||^2 = sum |a_n|^2 omega_n`` with a geometric tail bound.

    Taylor coefficients of a rational map decay like ``n**(m-1) rho**-n``
    with ``rho`` the smallest pole modulus; the tail beyond ``N`` is bounded
    by a geometric series with that rate (inflated for pole multiplicity).
    """
    from .weight import moments

    a = taylor_series(phi, N).coefficients
    om = moments(w, N).values
    norm_sq = float(np.sum(np.abs(a) ** 2 * om))
    if phi.is_polynomial:
        tail = 0.0 if phi.degree <= N else math.inf
    else:
        rho = float(np.min(np.abs(phi.poles())))
        q = (1.0 / rho) * (1.0 + 2.0 * phi.degree / N)
        growth = (1.0 + 1.0 / N) ** 2
        ratio = q * q * growth
        head = float(np.max(np.abs(a[-16:]) ** 2)) * om[-1]
        tail = math.inf if ratio >= 1 else head * ratio / (1.0 - ratio) * (1.0 + 1.0 / N) ** (2 * 16)
    ok = tail <= 1e-10 * max(norm_sq, 1.0)
    return SymbolNorm(bool(np.isfinite(norm_sq) and ok), norm_sq, float(tail), not ok)


def with_label(phi: SymbolSpec, label: str) -> SymbolSpec:
    return replace(phi, label=label)
