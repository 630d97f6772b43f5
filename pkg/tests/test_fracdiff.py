import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.special import gammaln, gammasgn

from betarfima.fracdiff import FracCoeffs, c_coeffs, dc_dd, dc_dtheta, dpi_dd, pi_coeffs
from betarfima.special import digamma

D_GRID = (-0.4, -0.1, 0.1, 0.25, 0.45)


def gamma_ratio_pi(d, m):
    """Oracle: pi_k = Gamma(k + d) / (Gamma(k + 1) Gamma(d)) via log-gamma."""
    k = np.arange(m + 1)
    with np.errstate(divide="ignore"):
        log_mag = gammaln(k + d) - gammaln(k + 1) - gammaln(d)
    sign = gammasgn(k + d) * gammasgn(d)
    out = sign * np.exp(log_mag)
    out[0] = 1.0
    return out


def test_pi_trivial_cases():
    assert_allclose(pi_coeffs(0.0, 3), [1.0, 0.0, 0.0, 0.0], atol=0)
    assert_allclose(pi_coeffs(0.3, 2), [1.0, 0.3, 0.3 * 1.3 / 2.0], rtol=1e-15)


@pytest.mark.parametrize("d", D_GRID)
def test_pi_matches_gamma_ratio(d):
    got = pi_coeffs(d, 200)
    want = gamma_ratio_pi(d, 200)
    assert_allclose(got, want, rtol=1e-12, atol=1e-12)


def test_pi_positive_for_positive_d():
    assert np.all(pi_coeffs(0.25, 50)[1:] > 0)


def test_pi_preconditions():
    with pytest.raises(ValueError):
        pi_coeffs(0.6, 5)
    with pytest.raises(ValueError):
        pi_coeffs(0.3, -1)


def test_dpi_trivial_cases():
    dpi = dpi_dd(0.3, 2)
    assert dpi[0] == 0.0
    assert_allclose(dpi[1], 1.0, rtol=1e-15)
    assert_allclose(dpi[2], (1.0 + 2 * 0.3) / 2.0, rtol=1e-14)  # d(1+d)/2 -> 0.8


def test_dpi_limit_at_zero():
    dpi = dpi_dd(0.0, 10)
    k = np.arange(1, 11)
    assert_allclose(dpi[1:], 1.0 / k, rtol=1e-14)
    assert dpi[0] == 0.0


@pytest.mark.parametrize("d", [d for d in D_GRID])
def test_dpi_matches_digamma_form(d):
    # for d != 0 the derivative equals pi_k [psi(d + k) - psi(d)]
    m = 40
    pi = pi_coeffs(d, m)
    k = np.arange(1, m + 1)
    if d > 0:
        psi_d = digamma(d)
    else:
        # reflection to evaluate psi at negative arguments
        psi_d = digamma(1.0 + d) - 1.0 / d
    want = pi[1:] * (digamma(d + k) - psi_d)
    assert_allclose(dpi_dd(d, m)[1:], want, rtol=1e-11)


@pytest.mark.parametrize("d", D_GRID)
def test_dpi_matches_finite_difference(d):
    m, h = 60, 1e-6
    numeric = (pi_coeffs(d + h, m) - pi_coeffs(d - h, m)) / (2.0 * h)
    assert_allclose(dpi_dd(d, m), numeric, rtol=1e-5, atol=1e-10)


def test_c_trivial_cases():
    assert_allclose(c_coeffs([], 0.0, 4), [1, 0, 0, 0, 0], atol=0)
    got = c_coeffs([0.7], 0.0, 4)
    assert_allclose(got, [1.0, 0.7, 0.0, 0.0, 0.0], atol=0)


def test_c_power_series_oracle():
    # coefficients of (1 - z)^(-d) theta(z) by explicit polynomial product
    theta, d, m = [-0.3], 0.15, 2
    got = c_coeffs(theta, d, m)
    assert_allclose(got, [1.0, -0.15, 0.04125], rtol=1e-13)

    rng = np.random.default_rng(3)
    theta = rng.uniform(-0.5, 0.5, 3)
    d, m = 0.22, 12
    pi = pi_coeffs(d, m)
    full = np.zeros(m + 1)
    full[0] = 1.0
    full[1:4] = theta
    want = np.zeros(m + 1)
    for k in range(m + 1):
        for i in range(0, min(k, 3) + 1):
            want[k] += full[i] * pi[k - i]
    assert_allclose(c_coeffs(theta, d, m), want, rtol=1e-13)


def test_c_with_zero_d_is_padded_theta():
    theta = [0.4, -0.2, 0.1]
    got = c_coeffs(theta, 0.0, 10)
    want = np.zeros(11)
    want[0] = 1.0
    want[1:4] = theta
    assert np.array_equal(got, want)


def test_c_requires_m_at_least_q():
    with pytest.raises(ValueError):
        c_coeffs([0.1, 0.2, 0.3], 0.1, 2)


def test_dc_dtheta_is_shifted_pi():
    got = dc_dtheta([0.5], 0.3, 2, s=1)
    assert_allclose(got, [0.0, 1.0, 0.3], rtol=1e-15)
    got = dc_dtheta([0.5, -0.25], 0.2, 6, s=2)
    want = np.concatenate(([0.0, 0.0], pi_coeffs(0.2, 4)))
    assert_allclose(got, want, rtol=1e-15)
    with pytest.raises(ValueError):
        dc_dtheta([0.5], 0.3, 5, s=2)


def test_dc_dd_reduces_to_dpi_without_ma():
    assert_allclose(dc_dd([], 0.2, 30), dpi_dd(0.2, 30), rtol=0, atol=0)


@pytest.mark.parametrize("d", D_GRID)
def test_dc_dd_matches_finite_difference(d):
    theta, m, h = [-0.3, 0.2], 50, 1e-6
    numeric = (c_coeffs(theta, d + h, m) - c_coeffs(theta, d - h, m)) / (2.0 * h)
    assert_allclose(dc_dd(theta, d, m), numeric, rtol=1e-5, atol=1e-10)


def test_fraccoeffs_bundle():
    fc = FracCoeffs.build([-0.3], 0.15, 8)
    assert fc.pi[0] == 1.0 and fc.c[0] == 1.0
    assert_allclose(fc.c, c_coeffs([-0.3], 0.15, 8), atol=0)
