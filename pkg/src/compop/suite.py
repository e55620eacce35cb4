"""Invariant checks run by ``compop verify`` and the ``verify`` analysis task.

Each check returns a :class:`CheckResult`; a suite passes when every check
does.  Random probes come from ``numpy.random.default_rng(seed)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .criteria import (SATISFIED, VIOLATED, angular_derivative_criterion, carleson_criterion,
                       check_integral_identity, check_lemma_estimation, compactness_criterion)
from .errors import CompopError
from .nevanlinna import (check_aleman, check_littlewood, check_submean,
                         quasi_invariance_band, quasi_invariance_constant, ratio_field)
from .operator import build_matrix, singular_values
from .space import AnalyticFunction, change_of_variable_sides, norm_coeff, norm_integral
from .symbol import SymbolSpec, make_symbol, normalize, preimages
from .weight import (WeightProfile, check_admissibility, check_kappa, make_classical_weight,
                     moments, parse_weight_key, radius_weight)

CATALOG_SYMBOLS = ("z", "poly:[0,0.5]", "z^2", "poly:[0.5,0.5]", "blaschke:[0,0.5,-0.3j]",
                   "poly:[0.2,0.3,0.25]")
SUITES = ("quick", "full")


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    value: float | None = None

    def to_dict(self):
        v = self.value
        if v is not None and not math.isfinite(v):
            v = repr(v)
        return {"name": self.name, "passed": bool(self.passed), "detail": self.detail, "value": v}


def _guard(name, fn):
    try:
        return fn()
    except CompopError as exc:
        return CheckResult(name, False, f"{type(exc).__name__}: {exc}")


def _random_points(rng, n, r_min=0.0, r_max=0.999):
    r = r_min + (r_max - r_min) * np.sqrt(rng.random(n))
    return r * np.exp(2j * np.pi * rng.random(n))


# --------------------------------------------------------------------------
# per-pair checks


def check_moment_bounds(w: WeightProfile, n_max: int = 200) -> CheckResult:
    """``0 < omega_n <= n omega(0)`` for a non-increasing weight."""
    om = moments(w, n_max).values[1:]
    n = np.arange(1, n_max + 1)
    top = float(radius_weight(w, np.array([0.0]))[0]) if not w.singular_at_zero else math.inf
    ok = bool(np.all(om > 0) and np.all(np.isfinite(om)) and np.all(om <= n * top * (1 + 1e-9)))
    return CheckResult("moment_bounds", ok, f"n <= {n_max}", float(np.max(om / n)))


def check_schwarz(phi: SymbolSpec, rng, count: int = 64) -> CheckResult:
    """Preimages ``a`` of ``z`` under a normalized symbol satisfy ``|a| >= |z|``."""
    psi = normalize(phi)
    worst = math.inf
    for z in _random_points(rng, count, 0.05, 0.99):
        for a, _ in preimages(psi, complex(z)).points:
            worst = min(worst, abs(a) - abs(z))
    ok = worst >= -1e-12
    return CheckResult("schwarz", bool(ok), f"{count} targets", float(worst) if math.isfinite(worst) else None)


def check_norm_equivalence(w: WeightProfile, rng, count: int = 5, degree: int = 12) -> CheckResult:
    worst = 0.0
    for _ in range(count):
        d = int(rng.integers(1, degree + 1))
        f = AnalyticFunction(rng.normal(size=d + 1) + 1j * rng.normal(size=d + 1))
        a, b = norm_coeff(f, w), norm_integral(f, w)
        worst = max(worst, abs(a - b) / a)
    return CheckResult("norm_equivalence", worst <= 1e-6, f"{count} random polynomials", worst)


def check_triangular(phi: SymbolSpec, w: WeightProfile, N: int = 32) -> CheckResult:
    """For ``phi(0) = 0`` the matrix has zeros above the diagonal."""
    M = build_matrix(normalize(phi), w, N).entries
    upper = float(np.max(np.abs(np.triu(M, 1)))) if N > 0 else 0.0
    scale = max(float(np.max(np.abs(M))), 1e-300)
    return CheckResult("lower_triangular", upper <= 1e-12 * scale, f"N = {N}", upper)


def check_quasi_invariance(phi: SymbolSpec, w: WeightProfile, delta: float, rng) -> CheckResult:
    lam = phi.phi0
    if abs(lam) < 1e-12:
        return CheckResult("quasi_invariance", True, "phi(0) = 0", 1.0)
    C = quasi_invariance_constant(lam, delta)
    lo, hi = quasi_invariance_band(w, lam, _random_points(rng, 256, 0.0, 1.0 - 1e-6))
    ok = lo >= 1.0 / C * (1 - 1e-9) and hi <= C * (1 + 1e-9)
    return CheckResult("quasi_invariance", bool(ok), f"band [{lo:.4g}, {hi:.4g}], C = {C:.4g}", hi)


def check_littlewood_pair(phi: SymbolSpec, w: WeightProfile) -> CheckResult:
    bad = check_littlewood(normalize(phi), w)
    return CheckResult("littlewood", not bad, f"{len(bad)} violations", float(len(bad)))


def check_submean_pair(phi: SymbolSpec, w: WeightProfile, rng, count: int = 8) -> CheckResult:
    fails = 0
    for _ in range(count):
        rho = 0.55 + 0.4 * rng.random()
        r = min(rho - 0.5, 1.0 - rho) * (0.2 + 0.7 * rng.random())
        z = rho * np.exp(2j * np.pi * rng.random())
        if not check_submean(phi, w, z, r).passed:
            fails += 1
    return CheckResult("submean", fails == 0, f"{fails}/{count} failures", float(fails))


def pair_checks(phi: SymbolSpec, w: WeightProfile, seed: int = 0, full: bool = False):
    """Invariants for one (symbol, weight) pair."""
    rng = np.random.default_rng(seed)
    adm = check_admissibility(w)
    delta = adm.w2_delta or 1.0
    out = [
        _guard("moment_bounds", lambda: check_moment_bounds(w)),
        _guard("schwarz", lambda: check_schwarz(phi, rng)),
        _guard("norm_equivalence", lambda: check_norm_equivalence(w, rng, 3)),
        _guard("lower_triangular", lambda: check_triangular(phi, w)),
        _guard("quasi_invariance", lambda: check_quasi_invariance(phi, w, delta, rng)),
    ]
    if adm.w4_class == "I":
        out.append(_guard("littlewood", lambda: check_littlewood_pair(phi, w)))
    if full and adm.admissible:
        out.append(_guard("submean", lambda: check_submean_pair(phi, w, rng)))
    return out


# --------------------------------------------------------------------------
# catalog suites


def _moment_oracles():
    n = np.arange(201, dtype=float)
    cases = {
        "alpha:0": n,
        "alpha:1": n / (n + 1),
        "alpha:2": 2 * n / ((n + 1) * (n + 2)),
    }
    worst = 0.0
    for key, exact in cases.items():
        got = moments(parse_weight_key(key), 200).values
        worst = max(worst, float(np.max(np.abs(got[1:] - exact[1:]) / exact[1:])))
    return CheckResult("moment_oracles", worst <= 1e-10, "Dirichlet, Hardy, Bergman", worst)


def _spectrum_oracles():
    h = make_classical_weight(1.0)
    s_id = singular_values(build_matrix(make_symbol("z"), h, 32)).values
    s_half = singular_values(build_matrix(make_symbol("poly:[0,0.5]"), h, 32)).values
    exact = 2.0 ** -np.arange(33)
    err = max(float(np.max(np.abs(s_id - 1))), float(np.max(np.abs(s_half - exact) / exact)))
    return CheckResult("spectrum_oracles", err <= 1e-10, "identity and 0.5z", err)


def _verdict_oracles():
    h = make_classical_weight(1.0)
    checks = []
    for spec, want in (("z", VIOLATED), ("poly:[0,0.5]", SATISFIED), ("z^2", VIOLATED)):
        phi = make_symbol(spec)
        v = compactness_criterion(phi, h, ratio_field(phi, h, 30, 64))
        checks.append(v.verdict == want)
    ang = angular_derivative_criterion(make_symbol("poly:[0.5,0.5]"), 30, 64)
    ok = all(checks) and ang.verdict == VIOLATED and abs(ang.estimate - 0.5) < 1e-3
    return CheckResult("verdict_oracles", ok, "z, 0.5z, z^2, (1+z)/2", ang.estimate)


def _ratio_closed_form():
    phi, h = make_symbol("z^2"), make_classical_weight(1.0)
    f = ratio_field(phi, h, 30, 64)
    err = float(np.max(np.abs(f.per_radius_sup - 2 / (1 + f.radii)) / (2 / (1 + f.radii))))
    return CheckResult("ratio_closed_form", err <= 1e-6, "z^2 on Hardy", err)


def _kappa():
    a = check_kappa(make_classical_weight(2.0)).verdict
    b = check_kappa(make_classical_weight(1.0)).verdict
    return CheckResult("kappa", a == "holds" and b == "fails", f"omega_2 {a}, omega_1 {b}")


def _bands():
    reports = [check_integral_identity(0.0, 1.0), check_integral_identity(1.0, 2.0),
               check_lemma_estimation(make_classical_weight(1.0), 1.0),
               check_lemma_estimation(make_classical_weight(2.0), 1.0)]
    worst = max(r.band_ratio for r in reports)
    return CheckResult("kernel_bands", all(r.passed for r in reports), "four sweeps", worst)


def _change_of_variables():
    f = AnalyticFunction(np.array([0, 1, 0, 1], dtype=complex))
    lhs, rhs = change_of_variable_sides(f, make_symbol("z^2"), make_classical_weight(1.0))
    gap = abs(lhs - rhs) / abs(lhs)
    return CheckResult("change_of_variables", gap <= 1e-4, "z^3 + z, z^2, Hardy", gap)


def _aleman():
    r = check_aleman(make_symbol("z^2"), make_classical_weight(0.5), 0.5 + 0.2j)
    return CheckResult("aleman", r.converged and r.gap < 0.05, "z^2 on omega_1/2", r.gap)


def _carleson():
    w = make_classical_weight(0.5)
    ok = True
    for spec in ("z", "poly:[0,0.5]"):
        phi = make_symbol(spec)
        a = carleson_criterion(phi, w).compact.verdict
        b = compactness_criterion(phi, w, ratio_field(phi, w, 30, 64)).verdict
        ok = ok and a == b
    return CheckResult("carleson_consistency", ok, "z, 0.5z on omega_1/2")


def _catalog_pairs(seed, full):
    out = []
    weights = [make_classical_weight(1.0), make_classical_weight(2.0),
               parse_weight_key("sigma:0")]
    for spec in CATALOG_SYMBOLS:
        phi = make_symbol(spec)
        for w in weights:
            for c in pair_checks(phi, w, seed, full=False):
                c.name = f"{c.name}[{spec}, {w.label}]"
                out.append(c)
    if full:
        rng = np.random.default_rng(seed)
        for spec in ("z^2", "blaschke:[0,0.5,-0.3j]"):
            for w in (make_classical_weight(0.5), make_classical_weight(3.0)):
                c = _guard("submean", lambda: check_submean_pair(make_symbol(spec), w, rng, 4))
                c.name = f"submean[{spec}, {w.label}]"
                out.append(c)
    return out


def run_suite(name: str = "quick", seed: int = 0):
    """Run a named suite; returns the list of check results."""
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    full = name == "full"
    steps = [_moment_oracles, _spectrum_oracles, _verdict_oracles, _ratio_closed_form, _kappa]
    if full:
        steps += [_bands, _change_of_variables, _aleman, _carleson]
    out = [_guard(fn.__name__.lstrip("_"), fn) for fn in steps]
    out += _catalog_pairs(seed, full)
    return out


__all__ = ["CheckResult", "pair_checks", "run_suite", "SUITES", "CATALOG_SYMBOLS"]
