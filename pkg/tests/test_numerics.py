import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import hyp2f1

from compop.errors import (IntegrationDomainError, InvalidInputError, ToleranceNotMetError)
from compop.numerics import (CapRegion, QuadratureRule, cluster_roots, gauss_legendre,
                             integrate_cap, integrate_disk, integrate_radial, integrate_subdisk,
                             polynomial_roots, radial_panels)


def test_gauss_legendre_integrates_polynomials_exactly():
    x, w = gauss_legendre(8)
    for k in range(16):
        exact = (1 - (-1) ** (k + 1)) / (k + 1)
        assert abs(np.dot(w, x ** k) - exact) < 1e-14


def test_radial_panels_nodes_and_mass():
    x, w = radial_panels(20, 10)
    assert np.all((x > 0) & (x <= 1))
    assert abs(w.sum() - 1.0) < 1e-14
    r = np.sort(1 - x)
    assert np.all(np.diff(r) > 0)


def test_disk_area_is_one():
    assert abs(integrate_disk(lambda z: np.ones(z.shape)).value - 1.0) < 1e-12


def test_disk_second_moment():
    assert abs(integrate_disk(lambda z: np.abs(z) ** 2).value - 0.5) < 1e-12


def test_disk_kernel_matches_radial_hypergeometric_oracle():
    # circle mean of |1 - a rho e^{it}|^-3 is 2F1(3/2, 3/2; 1; a^2 rho^2)
    rule = QuadratureRule(base_annuli=20, max_angular=1024, rel_tol=1e-9, abs_tol=1e-13)
    got = integrate_disk(lambda z: np.abs(1 - 0.9 * z) ** -3.0, rule).value
    exact = integrate_radial(lambda r: 2 * r * hyp2f1(1.5, 1.5, 1.0, (0.9 * r) ** 2),
                             rel_tol=1e-11).value
    assert abs(got - exact) / exact < 1e-8
    assert 1.0 < got * (1 - 0.81) < 3.0


def test_disk_radial_exactness():
    for k in (1, 5, 11):
        got = integrate_disk(lambda z: np.abs(z) ** k).value
        assert abs(got - 2.0 / (k + 2)) < 1e-12


def test_disk_additivity_over_halves():
    full = integrate_disk(lambda z: np.abs(z + 0.3) ** 2).value
    inner = integrate_disk(lambda z: np.where(np.abs(z) < 0.5, np.abs(z + 0.3) ** 2, 0.0),
                           QuadratureRule(rel_tol=1e-4, abs_tol=1e-8)).value
    outer = integrate_disk(lambda z: np.where(np.abs(z) >= 0.5, np.abs(z + 0.3) ** 2, 0.0),
                           QuadratureRule(rel_tol=1e-4, abs_tol=1e-8)).value
    assert abs(inner + outer - full) < 1e-3


def test_disk_nonfinite_integrand_raises():
    with pytest.raises(IntegrationDomainError):
        integrate_disk(lambda z: np.full(z.shape, np.nan))


def test_quadrature_rule_validation():
    with pytest.raises(InvalidInputError):
        QuadratureRule(refinement_levels=1)


def test_cap_at_full_radius_is_disk():
    assert abs(integrate_cap(lambda z: np.ones(z.shape), CapRegion(0.0, 2.0)).value - 1) < 1e-12


def test_cap_zero_integrand():
    assert integrate_cap(lambda z: np.zeros(z.shape), CapRegion(1.0, 0.3)).value == 0.0


def test_cap_area_matches_lens_formula():
    # normalized area of D ∩ D(1, d): lens of radii 1 and d at distance 1
    d = 0.1
    lens = (d * d * math.acos(d / 2) + math.acos(1 - d * d / 2)
            - 0.5 * math.sqrt((-1 + d + 1) * (1 + d - 1) * (1 - d + 1) * (1 + d + 1)))
    got = integrate_cap(lambda z: np.ones(z.shape), CapRegion(0.0, d)).value
    assert abs(got - lens / math.pi) < 1e-9 * lens


def test_cap_area_rotation_invariant():
    a = integrate_cap(lambda z: np.ones(z.shape), CapRegion(0.0, 0.3)).value
    b = integrate_cap(lambda z: np.ones(z.shape), CapRegion(2.1, 0.3)).value
    assert abs(a - b) < 1e-12


def test_cap_lens_by_monte_carlo_grid():
    d, n = 0.5, 2001
    x = np.linspace(0.4, 1.0, n)
    y = np.linspace(-0.5, 0.5, n)
    X, Y = np.meshgrid(x, y)
    inside = (X ** 2 + Y ** 2 < 1) & ((X - 1) ** 2 + Y ** 2 < d * d)
    brute = inside.sum() * (x[1] - x[0]) * (y[1] - y[0]) / math.pi
    got = integrate_cap(lambda z: np.ones(z.shape), CapRegion(0.0, d)).value
    assert abs(got - brute) < 2e-3 * got


def test_subdisk_area():
    got = integrate_subdisk(lambda z: np.ones(z.shape), 0.5j, 0.2).value
    assert abs(got - 0.04) < 1e-13


def test_subdisk_outside_rejected():
    with pytest.raises(InvalidInputError):
        integrate_subdisk(lambda z: np.ones(z.shape), 0.9, 0.2)


def test_radial_examples():
    assert abs(integrate_radial(lambda r: r ** 3).value - 0.25) < 1e-12
    assert abs(integrate_radial(lambda r: r * (1 - r * r)).value - 0.25) < 1e-12


def test_radial_endpoint_singularity_with_hint():
    got = integrate_radial(lambda r: (1 - r) ** -0.5, -0.5).value
    assert abs(got - 2.0) < 1e-10


def test_radial_complement_variable():
    got = integrate_radial(lambda x: x ** 3, complement=True).value
    assert abs(got - 0.25) < 1e-12


def test_radial_divergent_raises():
    with pytest.raises(ToleranceNotMetError) as info:
        integrate_radial(lambda r: 1.0 / (1.0 - r))
    assert len(info.value.estimates) == 2


def _as_dict(roots):
    return {(round(r.real, 9), round(r.imag, 9)): m for r, m in roots}


def test_roots_simple_and_double():
    assert _as_dict(polynomial_roots([-0.25, 0, 1])) == {(0.5, 0.0): 1, (-0.5, 0.0): 1}
    assert _as_dict(polynomial_roots([0.09, -0.6, 1])) == {(0.3, 0.0): 2}


def test_roots_degree_zero_rejected():
    with pytest.raises(InvalidInputError):
        polynomial_roots([3.0])


def test_roots_random_degree_seven_residual(rng):
    c = np.concatenate([rng.normal(size=7) + 1j * rng.normal(size=7), [1.0]])
    roots = polynomial_roots(c)
    assert sum(m for _, m in roots) == 7
    res = max(abs(np.polynomial.polynomial.polyval(r, c)) for r, _ in roots)
    assert res < 1e-10


def test_cluster_roots_merges_within_radius():
    out = cluster_roots([0.5, 0.5 + 1e-9, -0.2])
    assert sorted(m for _, m in out) == [1, 2]


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=3, max_size=9))
def test_roots_multiplicity_sum_and_conjugate_pairs(coeffs):
    c = list(coeffs) + [1.0]
    roots = polynomial_roots(c)
    assert sum(m for _, m in roots) == len(c) - 1
    for r, m in roots:
        if abs(r.imag) > 1e-6:
            assert any(abs(s - r.conjugate()) < 1e-6 * (1 + abs(r)) and k == m for s, k in roots)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 20))
def test_disk_integrates_radial_monomials(k):
    got = integrate_disk(lambda z: np.abs(z) ** (2 * k)).value
    assert abs(got - 1.0 / (k + 1)) < 1e-10
