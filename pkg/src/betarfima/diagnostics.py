"""Residuals, deviance, information criteria and residual autocorrelation.

Residuals are defined for the indices that enter the likelihood,
t = p+1..n.  Two flavors are provided: the response-scale standardized
residual (observation minus fitted mean over its conditional standard
deviation) and the logit-scale weighted residual, whose variance is the sum
of the two trigamma terms.
"""

import csv
from dataclasses import dataclass

import numpy as np
from scipy.stats import chi2

from .inference import TestReport
from .likelihood import beta_loglik_terms, loglik
from .model import Y_EPS, forward_recursion
from .special import digamma, trigamma

__all__ = [
    "ResidualSet",
    "DegenerateSeriesError",
    "residuals",
    "deviance",
    "information_criteria",
    "residual_acf",
    "ljung_box",
    "diagnostic_report",
    "write_residual_csv",
    "write_acf_csv",
]


class DegenerateSeriesError(ValueError):
    """Raised when a residual series is constant (no ACF defined)."""


@dataclass(frozen=True)
class ResidualSet:
    """Standardized and weighted residuals for t = p+1..n."""

    standardized: np.ndarray
    weighted: np.ndarray
    start_index: int  # 1-based time index of the first residual


def residuals(fit, sample) -> ResidualSet:
    """Standardized and standardized-weighted residuals of a fitted model."""
    spec, params = fit.spec, fit.params_hat
    state = forward_recursion(spec, params, sample)
    p, nu = spec.p, params.nu
    y = sample.y[p:]
    mu = state.mu[p:]

    std = (y - mu) / np.sqrt(mu * (1.0 - mu) / (1.0 + nu))

    yc = np.clip(y, Y_EPS, 1.0 - Y_EPS)
    ystar = np.log(yc) - np.log1p(-yc)
    mustar = digamma(mu * nu) - digamma((1.0 - mu) * nu)
    weighted = (ystar - mustar) / np.sqrt(trigamma(mu * nu) + trigamma((1.0 - mu) * nu))

    return ResidualSet(standardized=std, weighted=weighted, start_index=p + 1)


def deviance(fit, sample):
    """Deviance D = 2(saturated - fitted log-likelihood) and its df.

    The saturated model sets every mean to the observation while keeping the
    fitted precision.
    """
    spec = fit.spec
    y = sample.y[spec.p :]
    saturated = float(beta_loglik_terms(y, np.clip(y, Y_EPS, 1.0 - Y_EPS), fit.params_hat.nu).sum())
    dev = 2.0 * (saturated - fit.loglik)
    df = fit.n_eff - fit.n_free_params
    return dev, df


def information_criteria(fit):
    """(AIC, BIC, HQ) for a fitted model.

    The parameter count excludes fixed coordinates and the sample size is
    the number of likelihood terms.
    """
    k = fit.n_free_params
    n = fit.n_eff
    ll = fit.loglik
    aic = -2.0 * ll + 2.0 * k
    bic = -2.0 * ll + np.log(n) * k
    hq = -2.0 * ll + np.log(np.log(n)) * k
    return aic, bic, hq


def residual_acf(resid, max_lag):
    """Residual autocorrelations for lags 0..max_lag.

    Both numerator and denominator at lag h sum over t = 1..n-h (deviations
    from the full-sample mean), so values can slightly exceed 1 in modulus
    for short series.
    """
    resid = np.asarray(resid, dtype=float).ravel()
    n = resid.size
    if max_lag >= n:
        raise ValueError("max_lag must be smaller than the series length")
    dev = resid - resid.mean()
    out = np.empty(max_lag + 1)
    for h in range(max_lag + 1):
        head = dev[: n - h]
        denom = float(head @ head)
        if denom == 0.0:
            raise DegenerateSeriesError("constant residual series has no ACF")
        out[h] = float(head @ dev[h:]) / denom
    return out


def ljung_box(acf_values, n, h, df_adjust=0) -> TestReport:
    """Ljung-Box portmanteau statistic from precomputed autocorrelations.

    ``acf_values`` must contain lags 0..h (lag 0 is ignored); reference
    distribution is chi-square with h - df_adjust degrees of freedom.
    """
    if df_adjust < 0 or h <= df_adjust:
        raise ValueError("need h > df_adjust >= 0")
    acf_values = np.asarray(acf_values, dtype=float)
    if acf_values.size < h + 1:
        raise ValueError("acf_values must cover lags 0..h")
    lags = np.arange(1, h + 1)
    stat = float(n * (n + 2.0) * np.sum(acf_values[1 : h + 1] ** 2 / (n - lags)))
    df = h - df_adjust
    return TestReport(
        statistic=stat,
        df=df,
        p_value=float(chi2.sf(stat, df)),
        kind="Ljung-Box",
        restriction=f"no autocorrelation through lag {h}",
    )


def diagnostic_report(fit, sample, lags=20):
    """Plain-text diagnostic summary of a fitted model."""
    res = residuals(fit, sample)
    dev, dev_df = deviance(fit, sample)
    aic, bic, hq = information_criteria(fit)
    acf = residual_acf(res.standardized, min(lags, res.standardized.size - 1))
    lb = ljung_box(acf, res.standardized.size, min(lags, res.standardized.size - 1))

    lines = [
        "Diagnostics",
        "-----------",
        f"Deviance: {dev:.4f} on {dev_df} df",
        f"AIC: {aic:.4f}   BIC: {bic:.4f}   HQ: {hq:.4f}",
        f"Ljung-Box ({lb.df} lags): statistic {lb.statistic:.4f}, p-value {lb.p_value:.4f}",
        f"Residual mean (standardized): {res.standardized.mean():.4f}",
        f"Residual variance (standardized): {res.standardized.var(ddof=1):.4f}",
    ]
    return "\n".join(lines)


def write_residual_csv(path, residual_set: ResidualSet):
    """CSV with one row per residual: index, standardized, weighted."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "standardized", "weighted"])
        start = residual_set.start_index
        for i, (s, w) in enumerate(
            zip(residual_set.standardized, residual_set.weighted)
        ):
            writer.writerow([start + i, repr(float(s)), repr(float(w))])


def write_acf_csv(path, acf_values, n):
    """CSV of residual autocorrelations with the 95% white-noise band."""
    band = 1.96 / np.sqrt(n)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["lag", "acf", "band"])
        for lag, value in enumerate(acf_values):
            writer.writerow([lag, repr(float(value)), repr(float(band))])
