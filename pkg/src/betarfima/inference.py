"""Hypothesis tests: likelihood ratio, Wald, Rao score and per-parameter z.

The primary use is testing d = 0, i.e. whether long-range dependence is
present in the conditional mean, but every coordinate restriction is
supported.  All p-values are two-sided against a chi-square (or standard
normal for z) reference distribution.
"""

from dataclasses import dataclass

import numpy as np
from scipy.stats import chi2, norm

from .likelihood import score_and_fisher_info

__all__ = [
    "TestReport",
    "TestUnavailableError",
    "NestingError",
    "lr_test",
    "wald_test",
    "wald_test_general",
    "rao_score_test",
    "z_statistics",
]

_LR_SLACK = 1e-8


class TestUnavailableError(RuntimeError):
    """Raised when a statistic cannot be formed (singular information)."""


class NestingError(ValueError):
    """Raised when the 'restricted' model is not nested in the free one."""


@dataclass(frozen=True)
class TestReport:
    statistic: float
    df: int
    p_value: float
    kind: str
    restriction: str


def _coord_index(fit, coord):
    names = fit.param_names()
    if isinstance(coord, str):
        if coord not in names:
            raise ValueError(f"unknown coordinate {coord!r}; available: {names}")
        return names.index(coord)
    idx = int(coord)
    if not 0 <= idx < len(names):
        raise ValueError(f"coordinate index {idx} out of range")
    return idx


def lr_test(fit_free, fit_restricted) -> TestReport:
    """Likelihood-ratio test of the restricted model against the free one."""
    df = fit_free.n_free_params - fit_restricted.n_free_params
    if df < 1:
        raise NestingError("restricted model must have fewer free parameters")
    stat = 2.0 * (fit_free.loglik - fit_restricted.loglik)
    if stat < -_LR_SLACK:
        raise NestingError(
            f"negative likelihood-ratio statistic ({stat:.3e}); models not nested "
            "or restricted fit did not converge"
        )
    stat = max(stat, 0.0)
    return TestReport(
        statistic=stat,
        df=df,
        p_value=float(chi2.sf(stat, df)),
        kind="LR",
        restriction=f"{df} restriction(s)",
    )


def wald_test(fit, coord, value=0.0) -> TestReport:
    """Wald test of a single coordinate restriction gamma_j = value."""
    idx = _coord_index(fit, coord)
    jac = np.zeros((fit.spec.n_params, 1))
    jac[idx, 0] = 1.0
    t_val = np.array([fit.params_hat.to_array()[idx] - value])
    report = wald_test_general(fit, t_val, jac)
    name = fit.param_names()[idx]
    return TestReport(
        statistic=report.statistic,
        df=report.df,
        p_value=report.p_value,
        kind="Wald",
        restriction=f"{name} = {value}",
    )


def wald_test_general(fit, t_value, jacobian) -> TestReport:
    """Wald test of a general restriction T(gamma) = 0 with Jacobian J.

    The bracket uses the normalized information G_n / n, i.e.
    W = n T' [J' (G_n/n)^-1 J]^-1 T.
    """
    t_value = np.atleast_1d(np.asarray(t_value, dtype=float))
    jacobian = np.asarray(jacobian, dtype=float)
    n = fit.n_obs
    try:
        info_inv = np.linalg.inv(fit.info_matrix / n)
        bracket = np.linalg.inv(jacobian.T @ info_inv @ jacobian)
    except np.linalg.LinAlgError as exc:
        raise TestUnavailableError("singular information matrix") from exc
    stat = float(n * t_value @ bracket @ t_value)
    df = t_value.size
    return TestReport(
        statistic=stat,
        df=df,
        p_value=float(chi2.sf(stat, df)),
        kind="Wald",
        restriction=f"{df} restriction(s)",
    )


def rao_score_test(spec, sample, fit_restricted) -> TestReport:
    """Rao score test: full-model score and information at the restricted fit."""
    df = spec.n_params - fit_restricted.n_free_params
    if df < 1:
        raise NestingError("restricted fit leaves nothing to test")
    u, info = score_and_fisher_info(spec, fit_restricted.params_hat, sample)
    try:
        stat = float(u @ np.linalg.solve(info, u))
    except np.linalg.LinAlgError as exc:
        raise TestUnavailableError("singular information matrix") from exc
    stat = max(stat, 0.0)
    return TestReport(
        statistic=stat,
        df=df,
        p_value=float(chi2.sf(stat, df)),
        kind="Score",
        restriction=f"{df} restriction(s)",
    )


def z_statistics(fit, null_values=None):
    """Per-parameter z statistics with two-sided normal p-values.

    ``null_values`` defaults to zero for every coordinate.  Coordinates with
    no standard error (fixed, or singular information) are reported with a
    NaN statistic and p-value.
    """
    names = fit.param_names()
    estimates = fit.params_hat.to_array()
    if null_values is None:
        null_values = np.zeros(len(names))
    null_values = np.asarray(null_values, dtype=float)
    se = fit.std_errors if fit.std_errors is not None else np.full(len(names), np.nan)

    reports = []
    for j, name in enumerate(names):
        if np.isfinite(se[j]) and se[j] > 0:
            z = (estimates[j] - null_values[j]) / se[j]
            p = float(2.0 * norm.sf(abs(z)))
        else:
            z, p = np.nan, np.nan
        reports.append(
            TestReport(
                statistic=float(z), df=1, p_value=p, kind="z",
                restriction=f"{name} = {null_values[j]}",
            )
        )
    return reports
