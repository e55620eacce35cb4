import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gammaln

from compop import space
from compop.errors import InvalidInputError, TruncationBudgetError
from compop.nevanlinna import counting
from compop.space import (AnalyticFunction, change_of_variable_sides, compose, monomial,
                          norm_coeff, norm_integral)
from compop.symbol import make_symbol
from compop.weight import check_admissibility, make_classical_weight, parse_weight_key, radius_weight

WEIGHT_KEYS = ["alpha:0", "alpha:0.5", "alpha:1", "alpha:2", "sigma:0", "logiter:1"]
LOWER_BOUND_C = 0.5  # frozen from a calibration sweep at |lambda| in {0.8, 0.9}


def test_analytic_function_validation():
    with pytest.raises(InvalidInputError):
        AnalyticFunction([])
    with pytest.raises(InvalidInputError):
        AnalyticFunction([1.0, np.nan])
    f = AnalyticFunction([1, 2, 3])
    assert f.degree == 2 and f(0.5) == 1 + 1 + 0.75
    assert np.allclose(f.derivative().coefficients, [2, 6])
    assert AnalyticFunction([4.0]).derivative().coefficients[0] == 0


def test_norm_coeff_examples(dirichlet, hardy):
    assert norm_coeff(AnalyticFunction([1.0]), hardy) == 1.0
    for n in (1, 4, 9):
        assert abs(norm_coeff(monomial(n), dirichlet) - math.sqrt(n)) < 1e-12
    assert abs(norm_coeff(AnalyticFunction([0, 1, 1]), hardy) - math.sqrt(0.5 + 2 / 3)) < 1e-14


def test_norm_integral_examples(hardy, bergman, rng):
    assert abs(norm_integral(AnalyticFunction([1.0]), hardy) - 1.0) < 1e-15
    assert abs(norm_integral(monomial(1), hardy) - math.sqrt(0.5)) < 1e-12
    f = AnalyticFunction(rng.normal(size=21) + 1j * rng.normal(size=21))
    assert abs(norm_integral(f, bergman) - norm_coeff(f, bergman)) < 1e-6 * norm_coeff(f, bergman)


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 50), st.sampled_from(WEIGHT_KEYS), st.integers(0, 2 ** 31))
def test_norm_equivalence_property(degree, key, seed):
    r = np.random.default_rng(seed)
    w = parse_weight_key(key)
    f = AnalyticFunction(r.normal(size=degree + 1) + 1j * r.normal(size=degree + 1))
    a, b = norm_coeff(f, w), norm_integral(f, w)
    assert abs(a - b) <= 1e-6 * a


# -- test functions


def test_test_function_at_origin(hardy):
    f = space.test_function(0.0, hardy, 1.0)
    assert f.degree == 0 and abs(f.coefficients[0] - 1.0) < 1e-15


def test_test_function_coefficients_match_gamma_form(bergman):
    lam, delta = 0.6 * np.exp(0.7j), 1.0
    f = space.test_function(lam, bergman, delta)
    n = np.arange(f.degree + 1)
    binom = np.exp(gammaln(n + 1 + delta) - gammaln(1 + delta) - gammaln(n + 1))
    scale = (1 - abs(lam) ** 2) ** (1 + delta) / math.sqrt(1 - abs(lam) ** 2) ** 2
    assert np.allclose(f.coefficients, scale * binom * np.conj(lam) ** n, rtol=1e-12, atol=1e-300)


def test_test_function_value_at_zero_bound(hardy, bergman):
    for w in (hardy, bergman):
        delta = check_admissibility(w, tail_radius=0.6).w2_delta
        for a in (0.0, 0.3, 0.7, 0.95, 0.999):
            f0 = (1 - a * a) ** (1 + delta) / math.sqrt(float(radius_weight(w, np.array([a]))[0]))
            assert f0 <= 2 ** (1 + delta) / math.sqrt(1.0) + 1e-12


@pytest.mark.parametrize("key,delta,band", [("alpha:1", 1 / 16, (0.85, 1.05)),
                                            ("alpha:2", 1.0, (0.9, 1.45))])
def test_test_function_norm_band(key, delta, band):
    w = parse_weight_key(key)
    norms = [norm_coeff(space.test_function(a, w, delta), w)
             for a in (0.0, 0.5, 0.9, 0.99, 0.999)]
    assert band[0] <= min(norms) and max(norms) <= band[1]


def test_test_function_budget(hardy):
    with pytest.raises(TruncationBudgetError) as info:
        space.test_function(0.9999, hardy, 1.0, budget=1000)
    assert info.value.required_degree > 1000


def test_test_function_input_checks(hardy):
    with pytest.raises(InvalidInputError):
        space.test_function(1.0, hardy, 1.0)
    with pytest.raises(InvalidInputError):
        space.test_function(0.5, hardy, 0.0)


@pytest.mark.parametrize("spec", ["z^2", "poly:[0.5,0.5]", "blaschke:[0,0.5,-0.3j]"])
@pytest.mark.parametrize("key,delta", [("alpha:1", 1 / 16), ("alpha:2", 1.0)])
def test_test_function_lower_bound(spec, key, delta):
    phi, w = make_symbol(spec), parse_weight_key(key)
    for lam in (0.8, 0.9):
        f = space.test_function(lam, w, delta)
        N = phi.degree * f.degree if phi.is_polynomial else 4 * f.degree
        lhs = norm_coeff(compose(f, phi, N), w) ** 2
        ratio = counting(phi, w, lam).value / float(radius_weight(w, np.array([lam]))[0])
        assert lhs >= LOWER_BOUND_C * ratio


# -- composition


def test_compose_examples():
    sq = make_symbol("z^2")
    assert np.allclose(compose(monomial(1), sq, 4).coefficients, [0, 0, 1, 0, 0])
    half = make_symbol("poly:[0,0.5,0.5]")
    assert np.allclose(compose(monomial(2), half, 4).coefficients, [0, 0, 0.25, 0.5, 0.25])
    assert np.allclose(compose(AnalyticFunction([1.0]), half, 3).coefficients, [1, 0, 0, 0])
    with pytest.raises(InvalidInputError):
        compose(monomial(1), sq, -1)


@settings(max_examples=20, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=1, max_size=6),
       st.sampled_from(["z^2", "mobius:0.3", "blaschke:[0,0.5,-0.3j]", "poly:[0.2,0.3,0.25]"]))
def test_compose_matches_pointwise(coeffs, spec):
    from compop.symbol import eval_symbol
    f, phi = AnalyticFunction(coeffs), make_symbol(spec)
    g = compose(f, phi, 120)
    z = np.array([0.2, -0.3 + 0.1j])
    assert np.allclose(g(z), f(eval_symbol(phi, z)), atol=1e-10)


def test_change_of_variables_one_case(hardy):
    f = AnalyticFunction([0, 1, 0, 1])
    lhs, rhs = change_of_variable_sides(f, make_symbol("z^2"), hardy)
    assert abs(lhs - rhs) <= 1e-4 * lhs
    # the left side is also the coefficient norm of (f o phi)' minus the constant term
    g = compose(f, make_symbol("z^2"), 6)
    assert abs(norm_coeff(g, hardy) ** 2 - abs(g.coefficients[0]) ** 2 - lhs) < 1e-6 * lhs


def test_module_exports_test_function_not_collected():
    assert space.test_function.__test__ is False
    assert make_classical_weight(1.0) is not None
