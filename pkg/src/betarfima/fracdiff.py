"""Fractional-differencing weights and their derivatives.

The weights pi_k are the binomial-expansion coefficients of (1 - L)^(-d),
computed through the stable running product

    pi_0 = 1,   pi_k = pi_{k-1} * (k - 1 + d) / k,

which never touches a gamma-function ratio and therefore cannot overflow at
large k.  The c_k weights are the power-series coefficients of
(1 - z)^(-d) * theta(z) with theta_0 = 1, i.e. the moving-average weights of
the model on past prediction errors.

Derivatives in d follow from differentiating the running product itself:

    dpi_0 = 0,  dpi_k = (dpi_{k-1} * (k - 1 + d) + pi_{k-1}) / k.

This is algebraically identical to pi_k * [psi(d + k) - psi(d)] for d != 0
but remains finite and exact at d = 0 (where it reduces to 1/k for k >= 1),
which the score evaluation needs near the short-memory boundary.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "pi_coeffs",
    "dpi_dd",
    "c_coeffs",
    "dc_dd",
    "dc_dtheta",
    "FracCoeffs",
]


def _check_d(d):
    if not -0.5 < d < 0.5:
        raise ValueError(f"d must lie in (-0.5, 0.5), got {d}")


def pi_coeffs(d, m):
    """Fractional-integration weights pi_0..pi_m of (1 - L)^(-d).

    Parameters
    ----------
    d : float
        Memory parameter in (-0.5, 0.5).
    m : int
        Truncation order, >= 0.

    Returns
    -------
    ndarray of shape (m + 1,)
    """
    _check_d(d)
    if m < 0:
        raise ValueError("m must be >= 0")
    pi = np.empty(m + 1)
    pi[0] = 1.0
    for k in range(1, m + 1):
        pi[k] = pi[k - 1] * (k - 1 + d) / k
    return pi


def dpi_dd(d, m):
    """Derivative of the pi weights with respect to d, k = 0..m."""
    _check_d(d)
    if m < 0:
        raise ValueError("m must be >= 0")
    pi = pi_coeffs(d, m)
    dpi = np.empty(m + 1)
    dpi[0] = 0.0
    for k in range(1, m + 1):
        dpi[k] = (dpi[k - 1] * (k - 1 + d) + pi[k - 1]) / k
    return dpi


def _theta_full(theta, m):
    """theta padded to length m + 1 with the implicit theta_0 = 1."""
    theta = np.asarray(theta, dtype=float).ravel()
    if theta.size > m:
        raise ValueError("truncation m must be >= MA order q")
    full = np.zeros(m + 1)
    full[0] = 1.0
    full[1 : 1 + theta.size] = theta
    return full


def _truncated_convolution(theta_full, series):
    # c_k = sum_{i=0}^{min(k,q)} theta_i * series_{k-i}, k = 0..m
    m = series.size - 1
    return np.convolve(theta_full, series)[: m + 1]


def c_coeffs(theta, d, m):
    """Moving-average weights c_0..c_m of (1 - z)^(-d) * theta(z).

    `theta` holds theta_1..theta_q (theta_0 = 1 is implicit); requires m >= q.
    """
    return _truncated_convolution(_theta_full(theta, m), pi_coeffs(d, m))


def dc_dd(theta, d, m):
    """Derivative of the c weights with respect to d."""
    return _truncated_convolution(_theta_full(theta, m), dpi_dd(d, m))


def dc_dtheta(theta, d, m, s):
    """Derivative of the c weights with respect to theta_s (1-based s).

    dc_k/dtheta_s = pi_{k-s} for k >= s and 0 otherwise.
    """
    theta = np.asarray(theta, dtype=float).ravel()
    if not 1 <= s <= theta.size:
        raise ValueError(f"s must be in 1..{theta.size}, got {s}")
    out = np.zeros(m + 1)
    out[s:] = pi_coeffs(d, m - s)
    return out


@dataclass(frozen=True)
class FracCoeffs:
    """Bundle of pi and c weights for one (d, theta) pair."""

    d: float
    theta: np.ndarray
    m: int
    pi: np.ndarray
    c: np.ndarray

    @classmethod
    def build(cls, theta, d, m):
        theta = np.asarray(theta, dtype=float).ravel()
        return cls(d=d, theta=theta, m=m, pi=pi_coeffs(d, m),
                   c=c_coeffs(theta, d, m))
