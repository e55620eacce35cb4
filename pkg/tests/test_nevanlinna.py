import csv
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from compop.errors import DomainError, InvalidInputError, InvalidRegionError
from compop.nevanlinna import (aleman_radial, check_aleman, check_littlewood, check_submean,
                               classical_counting, counting, counting_multiplicity,
                               counting_values, dilation_integral, laplacian, littlewood_grid,
                               quasi_invariance_band, quasi_invariance_constant, radial_ladder,
                               ratio_field)
from compop.symbol import compose_symbols, make_symbol, mobius, normalize, q_lambda
from compop.weight import (check_admissibility, make_classical_weight, parse_weight_key,
                           radius_weight)

CATALOG = ["z", "poly:[0,0.5]", "z^2", "poly:[0.5,0.5]", "blaschke:[0,0.5,-0.3j]",
           "poly:[0.2,0.3,0.25]"]
WEIGHTS = ["alpha:0.5", "alpha:1", "alpha:2", "sigma:0", "logiter:1"]
disk_points = st.builds(lambda r, t: r * np.exp(1j * t), st.floats(0.01, 0.98), st.floats(0, 6.3))


# -- counting


def test_identity_counts_the_weight(hardy):
    for z in (0.3, -0.5j, 0.9):
        assert abs(counting(make_symbol("z"), hardy, z).value - (1 - abs(z) ** 2)) < 1e-14


def test_square_on_hardy(hardy):
    s = counting(make_symbol("z^2"), hardy, 0.25)
    assert abs(s.value - 1.5) < 1e-14 and s.preimage_count == 2


def test_outside_image_is_zero(hardy):
    assert counting(make_symbol("poly:[0,0.5]"), hardy, 0.9).value == 0.0


def test_zero_at_phi0(hardy):
    s = counting(make_symbol("poly:[0.5,0.5]"), hardy, 0.5)
    assert s.value == 0.0 and s.preimage_count == 0
    assert counting_values(make_symbol("poly:[0.5,0.5]"), hardy, np.array([0.5]))[0] == 0.0


def test_classical_counting_closed_forms():
    z = 0.3 + 0.2j
    expect = math.log(1 / abs(z))
    assert abs(classical_counting(make_symbol("z^2"), z) - expect) < 1e-12
    assert abs(classical_counting(make_symbol("z"), z) - expect) < 1e-12


@settings(max_examples=40, deadline=None)
@given(disk_points, st.sampled_from(CATALOG))
def test_classical_littlewood(z, spec):
    psi = normalize(make_symbol(spec))
    assert classical_counting(psi, complex(z)) <= math.log(1 / abs(z)) + 1e-10


@settings(max_examples=40, deadline=None)
@given(disk_points, st.sampled_from(CATALOG), st.sampled_from(WEIGHTS))
def test_sample_recomputes_and_matches_vectorized(z, spec, key):
    phi, w = make_symbol(spec), parse_weight_key(key)
    s = counting(phi, w, complex(z))
    assert s.value >= 0
    assert abs(s.value - s.recompute(w)) <= 1e-12 * max(1.0, s.value) or s.preimage_count == 0
    v = counting_values(phi, w, np.array([z]))[0]
    assert abs(v - s.value) <= 1e-10 * max(1.0, s.value)


@settings(max_examples=30, deadline=None)
@given(disk_points, st.sampled_from(CATALOG), st.floats(0.0, 0.9), st.floats(0, 6.3))
def test_mobius_transfer(z, spec, r, t):
    lam = r * np.exp(1j * t)
    phi, w = make_symbol(spec), make_classical_weight(1.0)
    psi = compose_symbols(mobius(lam), phi)
    target = complex(q_lambda(lam, z))
    assume(abs(target - phi.phi0) > 1e-6 and abs(z - psi.phi0) > 1e-6)
    assert abs(counting(psi, w, complex(z)).value - counting(phi, w, target).value) < 1e-9


def test_flat_weight_counts_multiplicity(blaschke3):
    flat = make_classical_weight(0.0)
    zs = np.array([0.1, 0.4j, -0.7])
    assert np.allclose(counting_values(blaschke3, flat, zs), counting_multiplicity(blaschke3, zs))
    assert list(counting_multiplicity(make_symbol("poly:[0,0.5]"), np.array([0.2, 0.7]))) == [1, 0]


def test_counting_domain(hardy):
    with pytest.raises(DomainError):
        counting_values(make_symbol("z"), hardy, np.array([1.0]))


# -- ratio field


def test_ladder():
    ks, radii = radial_ladder(5)
    assert list(ks) == [1, 2, 3, 4, 5]
    assert np.allclose(radii, 1 - 2.0 ** -np.arange(1, 6), rtol=0, atol=0)


def test_ratio_field_identity_and_contraction(hardy):
    f = ratio_field(make_symbol("z"), hardy, 30, 64)
    # one ulp in |a| is a relative error of ~1e-7 in 1 - |a| at k = 30
    assert np.allclose(f.ratios, 1.0, rtol=1e-6)
    assert np.allclose(f.ratios[:10], 1.0, rtol=1e-12)
    g = ratio_field(make_symbol("poly:[0,0.5]"), hardy, 30, 64)
    assert np.all(g.ratios[g.radii > 0.5] == 0.0)


def test_ratio_field_square_closed_form(hardy):
    f = ratio_field(make_symbol("z^2"), hardy, 30, 64)
    exact = 2 / (1 + f.radii)
    assert np.max(np.abs(f.per_radius_sup - exact) / exact) < 1e-6
    assert np.array_equal(f.per_radius_sup, f.ratios.max(axis=1))
    assert np.all(f.ratios >= 0)


def test_ratio_field_limits(hardy):
    with pytest.raises(InvalidInputError):
        ratio_field(make_symbol("z"), hardy, 41)


def test_ratio_field_csv(tmp_path, hardy):
    f = ratio_field(make_symbol("z^2"), hardy, 4, 8)
    path = f.to_csv(tmp_path / "rf.csv")
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["k", "r", "theta", "N", "omega", "ratio"]
    assert len(rows) == 1 + 4 * 8
    assert float(rows[1][5]) == f.ratios[0, 0]


# -- sub-mean value


def test_submean_identity(half):
    assert check_submean(make_symbol("z"), half, 0.7, 0.1).passed


def test_submean_invalid_region(hardy):
    with pytest.raises(InvalidRegionError):
        check_submean(make_symbol("z"), hardy, 0.3, 0.1)
    with pytest.raises(InvalidRegionError):
        check_submean(make_symbol("z"), hardy, 0.95, 0.1)


def test_submean_random_square_hardy(hardy, rng):
    phi = make_symbol("z^2")
    for _ in range(100):
        rho = 0.52 + 0.45 * rng.random()
        r = min(rho - 0.5, 1 - rho) * (0.1 + 0.85 * rng.random())
        assert check_submean(phi, hardy, rho * np.exp(2j * np.pi * rng.random()), r).passed


# -- Littlewood


def test_littlewood_grid_shape():
    g = littlewood_grid()
    assert g.size == 64 * 32 and np.all(np.abs(g) >= 0.5 - 1e-15) and np.all(np.abs(g) < 1)


@pytest.mark.parametrize("spec", CATALOG)
def test_littlewood_on_class_one_weights(spec):
    psi = normalize(make_symbol(spec))
    for key in ("sigma:0", "logiter:1"):
        assert check_littlewood(psi, parse_weight_key(key)) == []
    w3 = make_classical_weight(3.0)
    assert check_admissibility(w3, tail_radius=0.8).w4_class == "I"
    assert check_littlewood(psi, w3) == []


def test_littlewood_blaschke_bergman(blaschke3, bergman):
    assert check_littlewood(normalize(blaschke3), bergman) == []


def test_littlewood_requires_normalized(hardy):
    with pytest.raises(InvalidInputError):
        check_littlewood(make_symbol("poly:[0.5,0.5]"), hardy)


# -- Aleman identity and related


def test_aleman_identity_map(half):
    r = check_aleman(make_symbol("z"), half, 0.6)
    assert r.converged and r.gap < 0.05


def test_aleman_square_hardy(hardy):
    r = check_aleman(make_symbol("z^2"), hardy, 0.5)
    assert r.converged and r.gap < 0.05


@pytest.mark.parametrize("spec", ["z", "z^2", "blaschke:[0,0.5,-0.3j]"])
def test_aleman_radial_oracle(spec, half):
    phi = make_symbol(spec)
    for z in (0.6, 0.3 - 0.5j):
        n = counting(phi, half, z).value
        assert abs(aleman_radial(phi, half, z) - n) <= 1e-8 * n


@pytest.mark.parametrize("key", ["alpha:0.5", "alpha:1", "alpha:0.25"])
def test_laplacian_non_positive_class_two(key):
    rho = np.linspace(0.01, 0.999, 300)
    assert np.all(laplacian(parse_weight_key(key), rho) <= 1e-12)


@pytest.mark.parametrize("key", ["sigma:0", "logiter:1"])
@pytest.mark.parametrize("spec", ["z^2", "blaschke:[0,0.5,-0.3j]", "poly:[0.5,0.5]"])
def test_dilation_sandwich(key, spec):
    w = parse_weight_key(key)
    psi = normalize(make_symbol(spec))
    for z in (0.6, -0.7j, 0.85 + 0.1j):
        n = counting(psi, w, z).value
        if n == 0:
            continue
        d = dilation_integral(psi, w, z)
        assert n * (1 - 1e-6) <= d <= 2 * n * (1 + 1e-6)


@pytest.mark.parametrize("key", ["alpha:3", "sigma:0", "sigma:1.5"])
def test_dilation_methods_agree(key, blaschke3):
    w = parse_weight_key(key)
    for z in (0.6, 0.3 - 0.5j):
        a = dilation_integral(blaschke3, w, z, "parts")
        b = dilation_integral(blaschke3, w, z, "direct")
        assert abs(a - b) <= 1e-9 * abs(b)


@pytest.mark.parametrize("key", WEIGHTS[:3])
def test_quasi_invariance(key, rng):
    w = parse_weight_key(key)
    delta = check_admissibility(w).w2_delta or 1.0
    for lam in (0.3, 0.6j, -0.8):
        C = quasi_invariance_constant(lam, delta)
        zs = np.sqrt(rng.random(400)) * (1 - 1e-7) * np.exp(2j * np.pi * rng.random(400))
        lo, hi = quasi_invariance_band(w, lam, zs)
        assert 1 / C <= lo and hi <= C


def test_weight_ratio_sanity(half):
    z = np.array([0.2, 0.5])
    assert np.allclose(radius_weight(half, z), (1 - z * z) ** 0.5)
