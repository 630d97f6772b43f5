"""Out-of-sample forecasting.

Forecasts iterate the fitted mean recursion forward: lagged observations are
replaced by earlier forecasts once the horizon passes them, in-sample
prediction errors are the fitted ones (zero for the initialization indices),
and future prediction errors are zero because the forecast is the
conditional mean.  Covariates beyond the sample must be supplied by the
caller, one row per forecast step.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .fracdiff import c_coeffs
from .model import forward_recursion

__all__ = ["ForecastRequest", "forecast", "forecast_accuracy"]


@dataclass(frozen=True)
class ForecastRequest:
    """Horizon, future covariate rows and an optional truncation override."""

    horizon: int
    future_covariates: Optional[np.ndarray] = None
    m: Optional[int] = None

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")


def forecast(fit, sample, request: ForecastRequest):
    """Predicted means for steps 1..horizon after the end of the sample."""
    spec, params = fit.spec, fit.params_hat
    h_max, link = request.horizon, spec.link
    n, p, l = sample.n, spec.p, spec.n_covariates

    if l:
        fx = np.asarray(request.future_covariates, dtype=float)
        if fx.ndim == 1:
            fx = fx[:, None]
        if fx.shape != (h_max, l):
            raise ValueError(
                f"future covariates must be a {h_max} x {l} matrix"
            )
    else:
        fx = np.empty((h_max, 0))

    m = request.m if request.m is not None else spec.m
    c = c_coeffs(params.theta, params.d, m)
    state = forward_recursion(spec, params, sample)
    gy = np.concatenate((link.forward(np.clip(sample.y, 1e-12, 1 - 1e-12)), np.empty(h_max)))
    xb = np.concatenate(
        (sample.x @ params.beta if l else np.zeros(n), fx @ params.beta)
    )
    # prediction errors indexed 1..n+h; future ones are zero by construction
    r_ext = np.concatenate((state.r, np.zeros(h_max)))

    preds = np.empty(h_max)
    for h in range(1, h_max + 1):
        t0 = n + h - 1  # 0-based index of time n+h
        eta = params.alpha + xb[t0]
        for j in range(1, p + 1):
            eta += params.phi[j - 1] * (gy[t0 - j] - xb[t0 - j])
        for k in range(1, m + 1):
            idx = t0 - k
            if 0 <= idx < n + h - 1:
                eta += c[k] * r_ext[idx]
        mu = float(link.inverse(eta))
        preds[h - 1] = mu
        gy[t0] = link.forward(mu)
    return preds


def forecast_accuracy(pred, actual):
    """(RMSE, MAE, MAPE%) of predictions against realized values.

    MAPE is reported as NaN when any realized value is zero.
    """
    pred = np.asarray(pred, dtype=float).ravel()
    actual = np.asarray(actual, dtype=float).ravel()
    if pred.size != actual.size:
        raise ValueError("prediction and actual series must have equal length")
    err = pred - actual
    rmse = float(np.sqrt(np.mean(err**2)))
    mae = float(np.mean(np.abs(err)))
    if np.any(actual == 0.0):
        mape = float("nan")
    else:
        mape = float(100.0 * np.mean(np.abs(err / actual)))
    return rmse, mae, mape
