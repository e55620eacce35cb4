"""Boundedness and compactness diagnostics for composition operators.

Limits as ``|z| -> 1`` are judged from sequences sampled on the radial
ladder ``r_k = 1 - 2**-k``.  A verdict is ``satisfied``, ``violated`` or
``inconclusive``; thresholds are module constants.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import hyp2f1

from .errors import InvalidInputError, ToleranceNotMetError
from .nevanlinna import RatioField, counting_values, radial_ladder, ratio_field
from .numerics import CapRegion, QuadratureRule, _cap_nodes, integrate_disk
from .symbol import SymbolSpec, eval_symbol, symbol_in_space
from .weight import (WeightProfile, check_admissibility, eval_G_c, radius_weight,
                     weight_from_density)

SATISFIED, VIOLATED, INCONCLUSIVE = "satisfied", "violated", "inconclusive"
LIMIT_ZERO = 1e-3
LIMIT_POSITIVE = 1e-2
STABLE_CHANGE = 0.05
GROWTH_FACTOR = 2.0
BAND_WIDTH = 100.0
BAND_STABILITY = 1.25
DEFAULT_ANGLES = 256
DEFAULT_K_MAX = 30
CARLESON_DELTAS = tuple(2.0 ** -k for k in range(1, 11))
CARLESON_CENTERS = 64

CRITERIA = ("boundedness_sup", "compactness_limit", "angular_derivative", "weight_ratio",
            "G_ratio", "carleson_sup", "carleson_limit")


@dataclass
class CriterionVerdict:
    criterion: str
    estimate: float
    verdict: str
    radial_values: list
    metadata: dict = field(default_factory=dict)

    def to_dict(self):
        return {"criterion": self.criterion, "estimate": _json_float(self.estimate),
                "verdict": self.verdict,
                "radial_values": [_json_float(v) for v in self.radial_values],
                "metadata": self.metadata}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d):
        return cls(d["criterion"], _from_json_float(d["estimate"]), d["verdict"],
                   [_from_json_float(v) for v in d["radial_values"]], dict(d.get("metadata", {})))

    @classmethod
    def from_json(cls, text: str):
        return cls.from_dict(json.loads(text))


def _json_float(v):
    v = float(v)
    if math.isfinite(v):
        return v
    return "inf" if v > 0 else ("-inf" if v < 0 else "nan")


def _from_json_float(v):
    return float(v)


# --------------------------------------------------------------------------
# sequence analysis


def aitken_limit(values) -> float:
    """Aitken extrapolation of the last three values, or the last value.

    The extrapolated value is used only when consecutive differences shrink
    geometrically (ratio in ``(-1, 1)``) and it stays non-negative.
    """
    v = np.asarray(values, dtype=float)
    if v.size < 3:
        return float(v[-1])
    a, b, c = v[-3:]
    d1, d2 = b - a, c - b
    if d1 == 0.0 or d2 == 0.0:
        return float(c)
    q = d2 / d1
    if not -1.0 < q < 1.0:
        return float(c)
    est = c + d2 * q / (1.0 - q)
    return float(est) if est >= 0 and math.isfinite(est) else float(c)


def _limit_verdict(values):
    v = np.asarray(values, dtype=float)
    est = aitken_limit(v)
    tail = v[-3:]
    non_increasing = bool(np.all(np.diff(tail) <= 1e-12 * max(float(np.max(tail)), 1e-300)))
    if est < LIMIT_ZERO and non_increasing and tail[-1] < LIMIT_ZERO * 10:
        return est, SATISFIED
    stable = abs(tail[-1] - tail[0]) <= STABLE_CHANGE * max(abs(tail[-1]), 1e-300)
    growing = tail[-1] > tail[0]
    if est > LIMIT_POSITIVE and (stable or growing):
        return est, VIOLATED
    return est, INCONCLUSIVE


def _growth(values):
    v = np.asarray(values, dtype=float)
    return v.size >= 3 and v[-3] > 0 and v[-1] >= GROWTH_FACTOR * v[-3]


# --------------------------------------------------------------------------
# criteria from the ratio field


def _field_meta(field: RatioField, **extra):
    meta = {"k_min": int(field.ks[0]), "k_max": int(field.ks[-1]),
            "angular_count": int(field.angles.size), "truncated_roots": int(field.truncated),
            "symbol": field.symbol_label, "weight": field.weight_label}
    meta.update(extra)
    return meta


def boundedness_criterion(phi: SymbolSpec, w: WeightProfile, field: RatioField,
                          w4_class: str | None = None) -> CriterionVerdict:
    """``sup N_{phi,omega} / omega`` over the field, with a growth check."""
    vals = [float(v) for v in field.per_radius_sup]
    sup = float(np.max(vals))
    if w4_class is None:
        w4_class = check_admissibility(w).w4_class
    if w4_class == "I":
        return CriterionVerdict("boundedness_sup", sup, SATISFIED, vals,
                                _field_meta(field, reason="Littlewood", w4_class="I"))
    if _growth(vals):
        verdict, est = VIOLATED, math.inf
    else:
        v = np.asarray(vals)
        increasing = bool(np.all(np.diff(v[-3:]) > 0))
        est = max(sup, aitken_limit(vals))
        settled = abs(v[-1] - v[-2]) <= STABLE_CHANGE * max(v[-1], 1e-300)
        verdict = SATISFIED if (settled or not increasing) else INCONCLUSIVE
    return CriterionVerdict("boundedness_sup", est, verdict, vals,
                            _field_meta(field, w4_class=w4_class))


def compactness_criterion(phi: SymbolSpec, w: WeightProfile, field: RatioField) -> CriterionVerdict:
    """Limit of the per-radius suprema of ``N_{phi,omega} / omega``."""
    vals = [float(v) for v in field.per_radius_sup]
    est, verdict = _limit_verdict(vals)
    return CriterionVerdict("compactness_limit", est, verdict, vals, _field_meta(field))


def _boundary_samples(phi, k_max, angular_count, k_min=1):
    ks, radii = radial_ladder(k_max, k_min)
    angles = 2.0 * np.pi * np.arange(angular_count) / angular_count
    z = radii[:, None] * np.exp(1j * angles)[None, :]
    return ks, radii, z, eval_symbol(phi, z)


def angular_derivative_criterion(phi: SymbolSpec, k_max: int = DEFAULT_K_MAX,
                                 angular_count: int = DEFAULT_ANGLES) -> CriterionVerdict:
    """Per-radius minimum of ``(1 - |phi(z)|) / (1 - |z|)``; compactness needs divergence."""
    ks, radii, _, fz = _boundary_samples(phi, k_max, angular_count)
    x = 2.0 ** -ks.astype(float)
    mins = (1.0 - np.abs(fz)).min(axis=1) / x
    vals = [float(v) for v in mins]
    v = np.asarray(vals)
    est = aitken_limit(vals)
    if _growth(vals):
        verdict, est = SATISFIED, math.inf
    elif abs(v[-1] - v[-3]) <= STABLE_CHANGE * max(abs(v[-1]), 1e-300):
        verdict = VIOLATED
    else:
        verdict = INCONCLUSIVE
    meta = {"k_max": int(k_max), "angular_count": int(angular_count), "symbol": phi.label,
            "quantity": "liminf (1-|phi(z)|)/(1-|z|)"}
    return CriterionVerdict("angular_derivative", est, verdict, vals, meta)


def weight_ratio_criterion(phi: SymbolSpec, w: WeightProfile, k_max: int = DEFAULT_K_MAX,
                           angular_count: int = DEFAULT_ANGLES) -> CriterionVerdict:
    """Per-radius maximum of ``omega(z) / omega(phi(z))``."""
    ks, radii, _, fz = _boundary_samples(phi, k_max, angular_count)
    om_z = w.at_c(2.0 ** -ks.astype(float))
    om_f = radius_weight(w, np.abs(fz).ravel()).reshape(fz.shape)
    vals = [float(v) for v in (om_z[:, None] / om_f).max(axis=1)]
    est, verdict = _limit_verdict(vals)
    meta = {"k_max": int(k_max), "angular_count": int(angular_count), "symbol": phi.label,
            "weight": w.label, "valence_bound": int(phi.degree)}
    return CriterionVerdict("weight_ratio", est, verdict, vals, meta)


def G_ratio_criterion(phi: SymbolSpec, sigma: WeightProfile, k_max: int = DEFAULT_K_MAX,
                      angular_count: int = DEFAULT_ANGLES, weight: WeightProfile | None = None) -> CriterionVerdict:
    """Per-radius maximum of ``G(z) / G(phi(z))`` with ``G = omega_sigma / (1 - r)``.

    Satisfied is a sufficient condition for compactness on the space
    weighted by ``sigma``.
    """
    w = weight if weight is not None else weight_from_density(sigma)
    ks, radii, _, fz = _boundary_samples(phi, k_max, angular_count)
    Gz = eval_G_c(w, 2.0 ** -ks.astype(float))
    af = np.abs(fz).ravel()
    Gf = np.empty_like(af)
    near = af > 0.5
    Gf[near] = eval_G_c(w, 1.0 - af[near])
    Gf[~near] = w.value(af[~near]) / (1.0 - af[~near])
    vals = [float(v) for v in (Gz[:, None] / Gf.reshape(fz.shape)).max(axis=1)]
    est, verdict = _limit_verdict(vals)
    meta = {"k_max": int(k_max), "angular_count": int(angular_count), "symbol": phi.label,
            "density": sigma.label, "w4_class": check_admissibility(w).w4_class}
    return CriterionVerdict("G_ratio", est, verdict, vals, meta)


# --------------------------------------------------------------------------
# Carleson-type cap integrals


@dataclass
class CarlesonReport:
    deltas: list
    sup_over_centers: list
    center_count: int
    per_center: np.ndarray           # (len(deltas), center_count)
    bounded: CriterionVerdict
    compact: CriterionVerdict
    per_center_compact: list = field(default_factory=list)  # verdict per center


def _cap_integrals(phi, w, delta, centers, rel_tol=1e-3, levels=5):
    """``int_cap N dA`` for one radius and all centers, converged together."""
    rule = QuadratureRule(radial_order=8, order_step=4)
    if delta >= 2.0:
        val = integrate_disk(lambda z: counting_values(phi, w, z),
                             QuadratureRule(rel_tol=rel_tol, abs_tol=1e-14)).value
        return np.full(centers.size, val)
    prev = None
    for L in range(levels):
        z0, wt = _cap_nodes(CapRegion(0.0, delta), L, rule)
        z = (centers[:, None] * z0[None, :]).ravel()
        z = np.where(np.abs(z) < 1.0 - 2.0 ** -50, z, z / np.abs(z) * (1.0 - 2.0 ** -50))
        N = counting_values(phi, w, z).reshape(centers.size, z0.size)
        vals = N @ wt
        if prev is not None:
            scale = max(float(np.max(np.abs(vals))), 1e-300)
            if np.max(np.abs(vals - prev)) <= rel_tol * scale + 1e-300:
                return vals
        prev = vals
    raise ToleranceNotMetError(f"cap integrals at delta={delta} did not converge",
                               (float(np.max(prev)), float(np.max(vals))))


def carleson_criterion(phi: SymbolSpec, w: WeightProfile, delta_list=CARLESON_DELTAS,
                       center_count: int = CARLESON_CENTERS, rel_tol: float = 1e-3) -> CarlesonReport:
    """Normalized cap integrals ``(1 / (delta^2 omega(1 - delta))) int_cap N dA``."""
    deltas = sorted((float(d) for d in delta_list), reverse=True)
    if not deltas or deltas[-1] <= 0 or deltas[0] >= 2:
        raise InvalidInputError("cap radii must lie in (0, 2)")
    if center_count < 1:
        raise InvalidInputError("center_count must be positive")
    centers = np.exp(2j * np.pi * np.arange(center_count) / center_count)
    rows = []
    for d in deltas:
        ints = _cap_integrals(phi, w, d, centers, rel_tol)
        rows.append(ints / (d * d * float(w.at_c(np.array([d]))[0])))
    per_center = np.array(rows)
    sups = [float(v) for v in per_center.max(axis=1)]
    meta = {"center_count": int(center_count), "deltas": deltas, "symbol": phi.label,
            "weight": w.label}
    if _growth(sups):
        bverdict, best = VIOLATED, math.inf
    else:
        best = float(max(sups))
        bverdict = SATISFIED
    bounded = CriterionVerdict("carleson_sup", best, bverdict, sups, dict(meta))
    est, cverdict = _limit_verdict(sups)
    compact = CriterionVerdict("carleson_limit", est, cverdict, sups, dict(meta))
    per_center_verdicts = [_limit_verdict(per_center[:, j])[1] for j in range(center_count)]
    return CarlesonReport(deltas, sups, int(center_count), per_center, bounded, compact,
                          per_center_verdicts)


# --------------------------------------------------------------------------
# kernel-integral bands


@dataclass
class BandReport:
    lambdas: list
    ratios: list
    band_min: float
    band_max: float
    passed: bool
    last_decade_ratio: float
    dropped: list = field(default_factory=list)

    @property
    def band_ratio(self) -> float:
        return self.band_max / self.band_min


DEFAULT_LAMBDAS = (0.0, 0.5, 0.8, 0.9, 0.95, 0.98, 0.99)


def _kernel_rule(lam_abs: float) -> QuadratureRule:
    m = int(2 ** math.ceil(math.log2(max(64.0, 16.0 / max(1.0 - lam_abs, 1e-6)))))
    return QuadratureRule(base_annuli=20, annuli_step=6, radial_order=10, order_step=4,
                          base_angular=16, max_angular=m, refinement_levels=4,
                          rel_tol=1e-6, abs_tol=1e-14)


def _band(lams, ratios, dropped):
    lams = np.asarray(lams)
    r = np.asarray(ratios)
    lo, hi = float(np.min(r)), float(np.max(r))
    gap = 1.0 - lams
    last = gap <= 10.0 * float(np.min(gap))
    dec = float(np.max(r[last]) / np.min(r[last])) if np.count_nonzero(last) >= 2 else 1.0
    ok = hi / lo <= BAND_WIDTH and dec <= BAND_STABILITY
    return BandReport([float(x) for x in lams], [float(x) for x in r], lo, hi, bool(ok), dec, dropped)


def _sweep(integrand_for, asymptote_for, lambda_grid):
    lams, ratios, dropped = [], [], []
    for lam in lambda_grid:
        a = abs(complex(lam))
        if not a < 1:
            raise InvalidInputError("lambda values must lie in the open disk")
        try:
            val = integrate_disk(integrand_for(a), _kernel_rule(a)).value
        except ToleranceNotMetError:
            dropped.append(float(a))
            continue
        lams.append(a)
        ratios.append(val / asymptote_for(a))
    if len(lams) < 2:
        raise ToleranceNotMetError("too few lambda values converged", (None, None))
    return _band(lams, ratios, dropped)


def check_lemma_estimation(w: WeightProfile, delta: float, lambda_grid=DEFAULT_LAMBDAS) -> BandReport:
    """``int omega |1 - conj(lam) z|^-(4+2 delta) dA`` against ``omega(lam) (1 - |lam|^2)^-(2+2 delta)``.

    By rotation invariance each ``lam`` is taken on the positive axis.
    """
    if not delta > 0:
        raise InvalidInputError("delta must be positive")
    p = 4.0 + 2.0 * delta

    def integrand_for(a):
        return lambda z: radius_weight(w, np.abs(z)) / np.abs(1.0 - a * z) ** p

    def asymptote_for(a):
        return float(radius_weight(w, np.array([a]))[0]) / (1.0 - a * a) ** (2.0 + 2.0 * delta)

    return _sweep(integrand_for, asymptote_for, lambda_grid)


def check_integral_identity(c: float, d: float, lambda_grid=DEFAULT_LAMBDAS) -> BandReport:
    """``int (1 - |z|^2)^c |1 - conj(lam) z|^-(2+c+d) dA`` against ``(1 - |lam|^2)^-d``."""
    if not c > -1:
        raise InvalidInputError("c must exceed -1")
    if not d > 0:
        raise InvalidInputError("d must be positive")
    p = 2.0 + c + d

    def integrand_for(a):
        return lambda z: (1.0 - np.abs(z) ** 2) ** c / np.abs(1.0 - a * z) ** p

    return _sweep(integrand_for, lambda a: (1.0 - a * a) ** -d, lambda_grid)


def kernel_integral_radial(w: WeightProfile, a: float, p: float) -> float:
    """Same integral as the disk quadrature, with the angle done in closed form.

    The circle mean of ``|1 - a rho e^{it}|^-p`` is ``2F1(p/2, p/2; 1; a^2 rho^2)``.
    """
    from .numerics import integrate_radial

    s = 0.5 * p

    def g(rho):
        return radius_weight(w, rho) * hyp2f1(s, s, 1.0, (a * rho) ** 2) * 2.0 * rho

    return integrate_radial(g, None, rel_tol=1e-9).value


# --------------------------------------------------------------------------
# combined evaluation


def evaluate_all(phi: SymbolSpec, w: WeightProfile, k_max: int = DEFAULT_K_MAX,
                 angular_count: int = DEFAULT_ANGLES, refine: bool = True,
                 tail_radius: float = 0.0):
    """Ratio-field criteria plus the symbol-only ones; returns (field, verdicts).

    ``tail_radius`` is the ``r0`` used for the admissibility report.
    """
    adm = check_admissibility(w, tail_radius=tail_radius)
    field_ = ratio_field(phi, w, k_max, angular_count)
    bound = boundedness_criterion(phi, w, field_, adm.w4_class)
    comp = compactness_criterion(phi, w, field_)
    if refine and INCONCLUSIVE in (bound.verdict, comp.verdict):
        field_ = ratio_field(phi, w, k_max, 2 * angular_count)
        bound = boundedness_criterion(phi, w, field_, adm.w4_class)
        comp = compactness_criterion(phi, w, field_)
    verdicts = [bound, comp, angular_derivative_criterion(phi, k_max, angular_count),
                weight_ratio_criterion(phi, w, k_max, angular_count)]
    if w.density is not None:
        verdicts.append(G_ratio_criterion(phi, w.density, k_max, angular_count, weight=w))
    member = symbol_in_space(phi, w)
    for v in verdicts:
        v.metadata["admissible"] = bool(adm.admissible)
        v.metadata["symbol_in_space"] = bool(member.in_space)
    return field_, verdicts


def verdict_summary(verdicts) -> str:
    width = max(len(v.criterion) for v in verdicts)
    lines = [f"{'criterion':<{width}}  {'verdict':<12}  estimate"]
    for v in verdicts:
        lines.append(f"{v.criterion:<{width}}  {v.verdict:<12}  {v.estimate:.6g}")
    return "\n".join(lines)


__all__ = [
    "CriterionVerdict", "CarlesonReport", "BandReport", "aitken_limit",
    "boundedness_criterion", "compactness_criterion", "angular_derivative_criterion",
    "weight_ratio_criterion", "G_ratio_criterion", "carleson_criterion",
    "check_lemma_estimation", "check_integral_identity", "kernel_integral_radial",
    "evaluate_all", "verdict_summary",
]
