import math

import numpy as np
import pytest

from kompakton import (DispersionCurve, ParameterError, Scheme,
                       dispersion_curve, group_velocity, operator_A,
                       operator_B, peak_wavenumber,
                       predicted_front_velocities)

GRID_FRONT_FACTORS = {
    Scheme.ISMAIL: 1.0,
    Scheme.DE_FRUTOS: 5.0,
    Scheme.PADE6: 10.0,
    Scheme.PADE8: 110.0 / 18.0,
}


@pytest.mark.parametrize("scheme", list(Scheme))
def test_value_at_peak_wavenumber(scheme):
    dx, c0 = 0.05, 1.3
    value = group_velocity(scheme, peak_wavenumber(dx), dx, c0)
    assert value == pytest.approx(GRID_FRONT_FACTORS[scheme] * c0, rel=1e-12)


def test_pade8_factor_to_three_significant_figures():
    value = group_velocity(Scheme.PADE8, peak_wavenumber(0.1), 0.1, 1.0)
    assert f"{value:.3g}" == "6.11"


@pytest.mark.parametrize("scheme", list(Scheme))
def test_long_wave_limit_matches_exact_transport(scheme):
    for dx in (0.1, 0.05):
        value = group_velocity(scheme, 1e-6 / dx, dx, 1.0)
        assert value == pytest.approx(-1.0, abs=1e-8)


@pytest.mark.parametrize("scheme", list(Scheme))
def test_exact_linearity_in_drift(scheme):
    k = 0.37 * peak_wavenumber(0.1)
    base = group_velocity(scheme, k, 0.1, 1.0)
    assert group_velocity(scheme, k, 0.1, 3.7) == 3.7 * base
    assert group_velocity(scheme, k, 0.1, 0.0) == 0.0


@pytest.mark.parametrize("scheme", list(Scheme))
def test_curves_collapse_in_normalized_wavenumber(scheme):
    alphas = np.linspace(0.05, 1.0, 40)
    values = [group_velocity(scheme, alphas * peak_wavenumber(dx), dx, 1.0)
              for dx in (0.2, 0.05)]
    np.testing.assert_allclose(values[0], values[1], rtol=1e-12)


def _phase_ratio_from_stencils(scheme, k, dx):
    """Independent oracle: the symbol ratio built from the operator weights."""
    theta = k * dx
    offsets = np.array([-2, -1, 0, 1, 2])
    b = operator_B(scheme, dx).weights
    a = operator_A(scheme).weights
    num = np.sum(b * np.sin(np.outer(theta, offsets)), axis=1)
    den = np.sum(a * np.cos(np.outer(theta, offsets)), axis=1)
    return -1.0 * num / den  # w(k) for c0 = 1


@pytest.mark.parametrize("scheme", list(Scheme))
def test_closed_form_matches_symbol_derivative(scheme):
    dx = 0.1
    kmax = peak_wavenumber(dx)
    alphas = np.linspace(0.01, 1.0, 97)
    k = alphas * kmax
    h = 1e-6 * kmax
    fd = (_phase_ratio_from_stencils(scheme, k + h, dx)
          - _phase_ratio_from_stencils(scheme, k - h, dx)) / (2.0 * h)
    analytic = group_velocity(scheme, k, dx, 1.0)
    # atol floor covers the group-velocity zero crossings, where a relative
    # comparison against finite differences is ill-posed
    np.testing.assert_allclose(analytic, fd, rtol=1e-8, atol=1e-7)


def test_predicted_front_velocities():
    fwd, bwd = predicted_front_velocities(Scheme.DE_FRUTOS, 1.0, 0.1)
    assert fwd == pytest.approx(5.0, rel=1e-12)
    assert bwd == pytest.approx(-1.0, rel=0.05)  # low-wavenumber probe
    fwd, _ = predicted_front_velocities(Scheme.PADE8, 2.0, 0.05)
    assert f"{fwd / 2.0:.3g}" == "6.11"
    assert predicted_front_velocities(Scheme.PADE6, 0.0, 0.1) == (0.0, 0.0)


def test_dispersion_curve_sampling():
    curve = dispersion_curve(Scheme.ISMAIL, 0.1, 2.0, 100)
    assert isinstance(curve, DispersionCurve)
    assert curve.normalized_wavenumbers[0] == pytest.approx(0.01)
    assert curve.normalized_wavenumbers[-1] == 1.0
    mid = group_velocity(Scheme.ISMAIL, 0.5 * peak_wavenumber(0.1), 0.1, 2.0)
    assert mid == pytest.approx(0.0, abs=1e-12)  # -c0*cos(pi/2)
    assert curve.velocities[-1] == pytest.approx(2.0, rel=1e-12)


def test_dispersion_validation():
    with pytest.raises(ParameterError):
        dispersion_curve(Scheme.ISMAIL, 0.1, 1.0, 1)
    with pytest.raises(ParameterError):
        group_velocity(Scheme.ISMAIL, 1.0, 0.0, 1.0)
    with pytest.raises(ParameterError):
        peak_wavenumber(-0.1)
