"""Data generation by recursive simulation with burn-in.

A trajectory of length burn_in + n is generated sequentially: prediction
errors are zero and the mean is held at the deterministic level for the
first m steps, after which each step evaluates the linear predictor, maps it
through the inverse link and draws the observation from the beta density by
inverting its distribution function at a uniform variate.  The first burn_in
values are discarded.

Draws use a seeded 64-bit PCG generator, so a fixed seed reproduces the
sample bit for bit, and replicate streams are independent when seeded as
base_seed + replicate index.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import brentq
from scipy.special import betainc, betaincinv

from .fracdiff import c_coeffs
from .model import ModelSpec, ParamVector, RecursionDivergenceError, Sample

__all__ = ["SimConfig", "simulate", "beta_inverse_cdf", "rescale_from_unit", "rescale_to_unit"]

_INVERSION_TOL = 1e-10


def beta_inverse_cdf(u, shape_a, shape_b):
    """Quantile of the beta distribution by inversion of its CDF.

    Returns x in (0, 1) with ``I_x(a, b) = u`` to within 1e-10, where I is
    the regularized incomplete beta function.  Falls back to bracketed
    root-finding when the direct inverse does not meet the tolerance.
    """
    if not 0.0 < u < 1.0:
        raise ValueError("u must lie strictly inside (0, 1)")
    if shape_a <= 0.0 or shape_b <= 0.0:
        raise ValueError("beta shape parameters must be positive")
    x = float(betaincinv(shape_a, shape_b, u))
    if abs(betainc(shape_a, shape_b, x) - u) > _INVERSION_TOL:
        try:
            x = brentq(
                lambda t: betainc(shape_a, shape_b, t) - u,
                0.0, 1.0, xtol=1e-15, rtol=8.9e-16,
            )
        except ValueError as exc:
            raise ArithmeticError(
                f"beta quantile inversion failed for a={shape_a}, b={shape_b}, u={u}"
            ) from exc
        if abs(betainc(shape_a, shape_b, float(x)) - u) > _INVERSION_TOL:
            raise ArithmeticError(
                f"beta quantile inversion failed for a={shape_a}, b={shape_b}, u={u}"
            )
    return min(max(float(x), np.nextafter(0.0, 1.0)), np.nextafter(1.0, 0.0))


@dataclass(frozen=True)
class SimConfig:
    """Everything needed to draw one reproducible trajectory."""

    spec: ModelSpec
    params: ParamVector
    n: int
    seed: int
    burn_in: int = 500
    covariates: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.burn_in <= self.spec.m:
            raise ValueError("burn_in must exceed the truncation m")
        if self.spec.n_covariates:
            x = np.asarray(self.covariates, dtype=float)
            if x.ndim != 2 or x.shape != (self.burn_in + self.n, self.spec.n_covariates):
                raise ValueError(
                    "covariates must be a (burn_in + n) x l matrix when l > 0"
                )
            object.__setattr__(self, "covariates", x)


def simulate(config: SimConfig) -> Sample:
    """Draw a sample of length n from the model after burn-in."""
    spec, params = config.spec, config.params
    m, p = spec.m, spec.p
    total = config.burn_in + config.n
    link = spec.link
    rng = np.random.default_rng(config.seed)

    if spec.n_covariates:
        xb = config.covariates @ params.beta
    else:
        xb = np.zeros(total)
    c = c_coeffs(params.theta, params.d, m)
    c_rev = c[1:][::-1]  # aligned with r[t-m..t-1]

    gy = np.empty(total)
    r = np.zeros(total)
    y = np.empty(total)
    det = params.alpha + xb
    # warm-up values: zero errors, mean pinned at the deterministic level
    gy[:m] = det[:m]
    y[:m] = link.inverse(det[:m])

    nu = params.nu
    for t in range(m, total):
        eta = det[t]
        for j in range(1, p + 1):
            eta += params.phi[j - 1] * (gy[t - j] - xb[t - j])
        eta += c_rev @ r[t - m : t]
        if not np.isfinite(eta):
            raise RecursionDivergenceError(t + 1)
        mu = float(link.inverse(eta))
        u = rng.uniform()
        y[t] = beta_inverse_cdf(u, nu * mu, nu * (1.0 - mu))
        gy[t] = link.forward(y[t])
        r[t] = gy[t] - eta

    kept = slice(config.burn_in, total)
    x_kept = config.covariates[kept] if spec.n_covariates else None
    return Sample(y=y[kept], x=x_kept)


def rescale_from_unit(y, a, b):
    """Map values from (0, 1) onto (a, b)."""
    if b <= a:
        raise ValueError("rescale interval must have b > a")
    return a + (b - a) * np.asarray(y, dtype=float)


def rescale_to_unit(values, a, b):
    """Map values from (a, b) back onto (0, 1)."""
    if b <= a:
        raise ValueError("rescale interval must have b > a")
    return (np.asarray(values, dtype=float) - a) / (b - a)
