import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import beta

from compop.errors import DomainError, InvalidInputError, InvalidWeightError
from compop.weight import (check_admissibility, check_kappa, density_moments, eval_G, eval_H,
                           eval_weight, load_density_csv, make_classical_weight,
                           make_density_power, make_log_iterated_weight, make_log_weight,
                           moments, parse_weight_key, probe_grid, radius_weight,
                           weight_from_density)


# -- construction and evaluation


def test_classical_values():
    assert eval_weight(make_classical_weight(1.0), 0.0) == 1.0
    assert abs(eval_weight(make_classical_weight(2.0), 0.5) - 0.5625) < 1e-15
    assert abs(eval_weight(make_classical_weight(1.0), 0.5) - 0.75) < 1e-15
    assert abs(eval_weight(make_classical_weight(1.0), 0.3, 2) + 2.0) < 1e-14


@pytest.mark.parametrize("alpha", [-1.0, -1.5])
def test_classical_rejects_non_integrable(alpha):
    with pytest.raises(InvalidWeightError):
        make_classical_weight(alpha)


def test_eval_outside_domain():
    w = make_classical_weight(1.0)
    for r in (1.0, -0.1, 1.5):
        with pytest.raises(DomainError):
            eval_weight(w, r)


def test_value_c_matches_value_near_boundary():
    w = make_classical_weight(0.5)
    x = np.array([1e-3, 1e-6])
    assert np.allclose(w.at_c(x), w(1 - x), rtol=1e-9)
    # the complementary form keeps precision where 1 - r underflows
    assert abs(w.at_c(np.array([1e-20]))[0] - (2e-20) ** 0.5) < 1e-12 * (2e-20) ** 0.5


@pytest.mark.parametrize("key", ["alpha:0.5", "alpha:3", "sigma:0", "sigma:1.5", "logiter:1"])
def test_supplied_derivatives_match_finite_differences(key):
    w = parse_weight_key(key)
    r = np.linspace(0.1, 0.9, 9)
    h = 1e-5
    fd1 = (w.value(r + h) - w.value(r - h)) / (2 * h)
    fd2 = (w.d1(r + h) - w.d1(r - h)) / (2 * h)
    assert np.allclose(w.d1(r), fd1, rtol=1e-5, atol=1e-9)
    assert np.allclose(w.d2(r), fd2, rtol=1e-5, atol=1e-9)


def test_log_weight_is_singular_at_zero():
    w = make_log_weight()
    assert w.singular_at_zero
    assert abs(eval_weight(w, math.exp(-1)) - 1.0) < 1e-14


def test_parse_weight_key_catalog_and_errors():
    assert parse_weight_key("alpha:2").label == make_classical_weight(2.0).label
    for bad in ("foo:1", "alpha", "alpha:x", "logiter:1.5", 3):
        with pytest.raises(InvalidInputError):
            parse_weight_key(bad)


# -- moments


def test_moment_closed_forms():
    n = np.arange(1, 201, dtype=float)
    got = {a: moments(make_classical_weight(a), 200).values for a in (0.0, 1.0, 2.0)}
    assert np.allclose(got[0.0][1:], n, rtol=1e-10, atol=0)
    assert np.allclose(got[1.0][1:], n / (n + 1), rtol=1e-10, atol=0)
    assert np.allclose(got[2.0][1:], 2 * n / ((n + 1) * (n + 2)), rtol=1e-10, atol=0)
    assert got[1.0][0] == 1.0 and abs(got[2.0][1] - 1 / 3) < 1e-14


def test_moment_sequence_invariants():
    seq = moments(parse_weight_key("logiter:1"), 50)
    assert seq.kind == "omega_n" and seq.values[0] == 1.0
    assert np.all(seq.values > 0) and np.all(np.isfinite(seq.values))


def test_moments_reject_bad_index():
    with pytest.raises(InvalidInputError):
        moments(make_classical_weight(1.0), 0)


@settings(max_examples=30, deadline=None)
@given(st.floats(-0.9, 6.0), st.integers(1, 60))
def test_classical_moments_match_beta_function(alpha, n):
    # 2 n^2 int r^{2n-1} (1 - r^2)^alpha dr = n^2 B(n, alpha + 1)
    got = moments(make_classical_weight(alpha), n).values[n]
    assert abs(got - n * n * beta(n, alpha + 1)) <= 1e-9 * got


def test_density_moments_flat():
    s = density_moments(make_density_power(0.0), 40)
    n = np.arange(41)
    assert s.kind == "sigma_n"
    assert np.allclose(s.values, 1.0 / (n + 1), rtol=1e-10)
    assert abs(s.values[0] - 1.0) < 1e-12


@pytest.mark.parametrize("key", ["sigma:0", "sigma:1", "logiter:1"])
def test_density_moment_ratio_band(key):
    w = parse_weight_key(key)
    n = np.arange(0, 200)
    sig = density_moments(w.density, 201).values[n + 1]
    radial = moments(w, 201).values[n + 1] / (2.0 * (n + 1) ** 2)  # int r^{2n+1} omega_sigma
    ratio = sig / (1 + n) ** 2 / radial
    assert np.all(ratio > 0) and ratio.max() / ratio.min() < 10


# -- induced weights


def test_flat_density_induces_quadratic():
    w = weight_from_density(make_density_power(0.0))
    r = np.array([0.0, 0.3, 0.9, 0.999])
    assert np.allclose(w(r), (1 - r) ** 2 / 2, rtol=1e-12)
    assert abs(eval_weight(w, 0.0) - 0.5) < 1e-14


@pytest.mark.parametrize("alpha", [-0.5, 0.0, 1.0, 2.5])
def test_power_density_closed_form_and_band(alpha):
    w = weight_from_density(make_density_power(alpha))
    x = probe_grid()
    exact = x ** (alpha + 2) / ((alpha + 1) * (alpha + 2))
    assert np.allclose(w.at_c(x), exact, rtol=1e-9)
    ratio = w.at_c(x) / (x * (2 - x)) ** (alpha + 2)
    lo = 2.0 ** -(alpha + 2) / ((alpha + 1) * (alpha + 2))
    hi = 1.0 / ((alpha + 1) * (alpha + 2))
    assert np.all(ratio >= lo * (1 - 1e-9)) and np.all(ratio <= hi * (1 + 1e-9))


@pytest.mark.parametrize("key", ["sigma:0", "sigma:1.5", "logiter:1", "logiter:2"])
def test_induced_second_derivative_round_trip(key):
    w = parse_weight_key(key)
    r = np.linspace(0.05, 0.95, 19)
    assert np.allclose(w.d2(r), w.density(r), rtol=1e-6)


def test_induced_weight_vanishes_at_boundary():
    for key in ("sigma:0", "logiter:1"):
        w = parse_weight_key(key)
        assert w.at_c(np.array([1e-12]))[0] < 1e-10


def test_structure_functions():
    w = parse_weight_key("sigma:0")
    r = np.array([0.0, 0.4, 0.8])
    assert np.allclose(eval_G(w, r), (1 - r) / 2, rtol=1e-12)
    assert eval_G(w, 1.0, extend=True) == 0.0
    h = make_classical_weight(1.0)
    assert np.allclose(eval_G(h, r), 1 + r, rtol=1e-14)
    assert np.allclose(eval_H(h, 1.0, r), (1 + r) / (1 - r), rtol=1e-14)
    with pytest.raises(DomainError):
        eval_G(h, 1.0)


@pytest.mark.parametrize("key", ["sigma:0", "sigma:1", "logiter:1"])
def test_G_non_increasing(key):
    w = parse_weight_key(key)
    x = probe_grid()
    G = w.at_c(x) / x  # ordered by increasing r
    assert np.all(np.diff(G) <= 1e-12 * G[0])


@pytest.mark.parametrize("key", ["sigma:0", "sigma:1", "sigma:2"])
def test_G_convex_for_non_increasing_density(key):
    r = np.linspace(0.0, 0.99, 400)
    G = eval_G(parse_weight_key(key), r)
    assert np.all(G[:-2] - 2 * G[1:-1] + G[2:] >= -1e-12)


def test_logiter_density_at_zero_and_bands():
    sigma, w = make_log_iterated_weight(1)
    assert abs(sigma(np.array([0.0]))[0] - 1.0) < 1e-14
    r = np.linspace(0.9, 0.999, 200)
    band = radius_weight(w, r) * np.log(np.e / (1 - r * r)) / (1 - r * r)
    assert 0.20 < band.min() and band.max() < 0.23
    n = np.arange(10, 501)
    sn = density_moments(sigma, 500).values[n] * np.log(n)
    assert 0.63 < sn.min() and sn.max() < 0.83


def test_logiter_order_validation():
    with pytest.raises(InvalidInputError):
        make_log_iterated_weight(0)


def test_density_file(tmp_path):
    path = tmp_path / "flat.csv"
    r = np.linspace(0, 0.999, 50)
    np.savetxt(path, np.column_stack([r, np.ones_like(r)]), delimiter=",")
    w = parse_weight_key(f"density-file:{path}")
    assert abs(eval_weight(w, 0.0) - 0.5) < 1e-6
    bad = tmp_path / "bad.csv"
    bad.write_text("0.5,1\n0.2,1\n")
    with pytest.raises(InvalidInputError):
        load_density_csv(bad)
    with pytest.raises(InvalidInputError):
        load_density_csv(tmp_path / "missing.csv")


# -- admissibility


def test_probe_grid_covers_boundary():
    x = probe_grid()
    assert x.size >= 2000 and x[0] == 1.0 and x[-1] <= 2.0 ** -30
    assert np.all(np.diff(x) < 0)


def test_hardy_admissible_class_II():
    rep = check_admissibility(make_classical_weight(1.0))
    assert rep.w1 and rep.w3 and rep.w4_class == "II" and rep.admissible
    assert rep.w2_delta == 1 / 16  # smallest certified grid value
    assert 1.0 in rep.w2_certified


def test_constant_weight_fails_vanishing():
    rep = check_admissibility(make_classical_weight(0.0))
    assert not rep.w3 and not rep.admissible
    assert any(c == "W3" for c, _ in rep.violations)


def test_tail_convexity():
    w = make_classical_weight(3.0)
    assert check_admissibility(w, tail_radius=0.8).w4_class == "I"
    assert check_admissibility(w, tail_radius=0.0).w4_class != "I"


def test_empty_delta_grid():
    with pytest.raises(InvalidInputError):
        check_admissibility(make_classical_weight(1.0), delta_grid=[])


@pytest.mark.parametrize("key,r0", [("alpha:1", 0.0), ("alpha:2", 0.6), ("alpha:0.5", 0.0),
                                    ("sigma:0", 0.0), ("logiter:1", 0.0)])
def test_report_invariants(key, r0):
    w = parse_weight_key(key)
    rep = check_admissibility(w, tail_radius=r0)
    x = probe_grid()
    x = x[1 - x >= r0]
    if rep.w2_delta is not None:
        H = w.at_c(x) / x ** (1 + rep.w2_delta)
        assert np.all(np.diff(H) >= -1e-9 * H[:-1])
    r = 1 - x[x > 1e-3]
    if rep.w4_class == "I":
        assert np.all(w.d2(r) >= -1e-9)
    if rep.w4_class == "II":
        assert np.all(w.d2(r) <= 1e-9)


@pytest.mark.parametrize("key", ["sigma:-0.5", "sigma:0", "logiter:1", "logiter:2"])
def test_non_decreasing_density_certifies_delta_one(key):
    assert 1.0 in check_admissibility(parse_weight_key(key)).w2_certified


# -- kappa


def test_kappa_bergman_holds_hardy_fails():
    b = check_kappa(make_classical_weight(2.0))
    assert b.verdict == "holds" and b.estimates[-1] <= 0.05
    assert np.allclose(b.estimates, b.etas, rtol=0.01)
    h = check_kappa(make_classical_weight(1.0))
    assert h.verdict == "fails" and h.estimates[-1] >= 0.9


@pytest.mark.parametrize("key", ["sigma:0", "sigma:1", "sigma:2"])
def test_kappa_non_increasing_densities(key):
    rep = check_kappa(parse_weight_key(key))
    assert rep.verdict == "holds"
    assert np.all(rep.estimates <= rep.etas * (1 + 1e-6))


def test_kappa_grid_too_coarse():
    with pytest.raises(InvalidInputError):
        check_kappa(make_classical_weight(2.0), x_grid=np.logspace(-5, -1, 20))
