import math
from fractions import Fraction

import numpy as np
import pytest

from kompakton import (AnalysisError, FieldState, ParameterError, Scheme,
                       apply, empirical_order, operator_A, operator_B,
                       operator_C)

ALL_SCHEMES = list(Scheme)


def test_mass_coefficients():
    assert operator_A(Scheme.ISMAIL).coefficients == (0, 0, 1, 0, 0)
    assert operator_A(Scheme.DE_FRUTOS).coefficients == tuple(
        Fraction(n, 120) for n in (1, 26, 66, 26, 1))
    assert operator_A(Scheme.PADE6).coefficients == tuple(
        Fraction(n, 240) for n in (1, 56, 126, 56, 1))
    assert operator_A(Scheme.PADE8).coefficients == tuple(
        Fraction(n, 70) for n in (1, 16, 36, 16, 1))


def test_gradient_coefficients():
    ismail = operator_B(Scheme.ISMAIL, 0.1)
    np.testing.assert_allclose(ismail.weights, [0.0, -5.0, 0.0, 5.0, 0.0])
    assert (operator_B(Scheme.DE_FRUTOS, 0.3).coefficients
            == operator_B(Scheme.PADE6, 0.7).coefficients)
    pade8 = operator_B(Scheme.PADE8, 1.0)
    assert sum(pade8.coefficients) == 0
    assert pade8.coefficients == tuple(Fraction(n, 84) for n in (-5, -32, 0, 32, 5))


def test_third_difference_shared_and_scaled():
    for scheme in ALL_SCHEMES:
        op = operator_C(scheme, 0.5)
        np.testing.assert_allclose(op.weights, [-4.0, 8.0, 0.0, -8.0, 4.0])


@pytest.mark.parametrize("scheme", ALL_SCHEMES)
def test_coefficient_structure(scheme):
    a = operator_A(scheme).coefficients
    b = operator_B(scheme, 1.0).coefficients
    c = operator_C(scheme, 1.0).coefficients
    assert sum(a) == 1
    assert a[0] == a[4] and a[1] == a[3]
    for anti in (b, c):
        assert sum(anti) == 0
        assert anti[0] == -anti[4] and anti[1] == -anti[3] and anti[2] == 0


def test_operator_rejects_bad_spacing():
    with pytest.raises(ParameterError):
        operator_B(Scheme.ISMAIL, 0.0)
    with pytest.raises(ParameterError):
        operator_C(Scheme.PADE8, -0.1)


def test_apply_identity_and_constant():
    field = FieldState(1.0, np.arange(12, dtype=float))
    out = apply(operator_A(Scheme.ISMAIL), field)
    np.testing.assert_array_equal(out.values, field.values)
    assert out.t == field.t

    const = FieldState(0.0, np.full(16, 7.0))
    out = apply(operator_A(Scheme.DE_FRUTOS), const)
    np.testing.assert_allclose(out.values, 7.0, rtol=1e-15)


def test_gradient_impulse_response():
    m, dx = 32, 0.25
    impulse = np.zeros(m)
    impulse[0] = 1.0
    out = operator_B(Scheme.ISMAIL, dx)(impulse)
    expected = np.zeros(m)
    expected[1] = -1.0 / (2.0 * dx)
    expected[m - 1] = 1.0 / (2.0 * dx)
    np.testing.assert_allclose(out, expected)


def test_third_difference_of_linear_ramp_interior():
    m = 64
    ramp = np.arange(m, dtype=float)
    out = operator_C(Scheme.ISMAIL, 1.0)(ramp)
    # third difference annihilates linear data away from the periodic wrap
    np.testing.assert_allclose(out[3:-3], 0.0, atol=1e-12)


@pytest.mark.parametrize("scheme", ALL_SCHEMES)
def test_telescoping_sums(scheme):
    rng = np.random.default_rng(7)
    values = rng.normal(size=257)
    tol = 1e-12 * values.size * np.max(np.abs(values))
    for make in (lambda: operator_B(scheme, 0.03), lambda: operator_C(scheme, 0.03)):
        total = float(np.sum(make()(values)))
        assert abs(total) < tol / 0.03 ** 3
    mass_sum = float(np.sum(operator_A(scheme)(values)))
    assert mass_sum == pytest.approx(float(np.sum(values)), abs=1e-10)


def test_third_derivative_second_order_on_sine():
    errors = []
    for m in (64, 128):
        dx = 2.0 * math.pi / m
        x = np.arange(m) * dx
        approx = operator_C(Scheme.ISMAIL, dx)(np.sin(x))
        errors.append(np.max(np.abs(approx - (-np.cos(x)))))
    assert errors[0] / errors[1] == pytest.approx(4.0, rel=0.2)


@pytest.mark.parametrize("scheme", ALL_SCHEMES)
def test_empirical_orders_match_classification(scheme):
    first, third = scheme.accuracy_orders
    assert empirical_order(scheme, 1) == pytest.approx(first, abs=0.3)
    assert empirical_order(scheme, 3) == pytest.approx(third, abs=0.3)


def test_empirical_order_flags_rounding_floor():
    with pytest.raises(AnalysisError):
        empirical_order(Scheme.PADE8, 1, grid_sizes=(2048, 4096, 8192))


def test_empirical_order_validates_derivative():
    with pytest.raises(ParameterError):
        empirical_order(Scheme.ISMAIL, 2)


def test_scheme_names():
    assert Scheme.from_name("de_frutos") is Scheme.DE_FRUTOS
    assert Scheme.from_name(" PADE6 ") is Scheme.PADE6
    with pytest.raises(ParameterError):
        Scheme.from_name("spectral")
