"""Residual diagnostics and multi-step forecasting.

Fits a (0, d, 1) model, inspects residual whiteness through the ACF and the
Ljung-Box statistic, checks the information criteria, and produces a
25-step forecast evaluated against held-out data.
"""

import numpy as np

from betarfima import (
    ForecastRequest,
    ModelSpec,
    ParamVector,
    Sample,
    SimConfig,
    deviance,
    fit,
    forecast,
    forecast_accuracy,
    information_criteria,
    ljung_box,
    residual_acf,
    residuals,
    simulate,
)

truth = ParamVector(nu=30.0, d=0.30, alpha=0.10, theta=[0.1])
gen = ModelSpec(p=0, q=1, m=1000)
horizon = 25

full = simulate(SimConfig(spec=gen, params=truth, n=1200 + horizon, seed=1357, burn_in=1001))
train, held_out = Sample(y=full.y[:1200]), full.y[1200:]

spec = ModelSpec(p=0, q=1, m=200)
result = fit(spec, train)
print(f"estimates: nu={result.params_hat.nu:.3f} d={result.params_hat.d:.4f} "
      f"alpha={result.params_hat.alpha:.4f} theta={result.params_hat.theta[0]:.4f}")

res = residuals(result, train)
acf = residual_acf(res.standardized, 20)
lb = ljung_box(acf, res.standardized.size, 20)
band = 1.96 / np.sqrt(res.standardized.size)
outside = int(np.sum(np.abs(acf[1:]) > band))
print(f"residual ACF: {outside}/20 lags outside the 95% band (+-{band:.4f})")
print(f"Ljung-Box(20): statistic {lb.statistic:.3f}, p-value {lb.p_value:.4f}")

dev, df = deviance(result, train)
aic, bic, hq = information_criteria(result)
print(f"deviance {dev:.2f} on {df} df; AIC {aic:.2f}, BIC {bic:.2f}, HQ {hq:.2f}")

preds = forecast(result, train, ForecastRequest(horizon=horizon))
rmse, mae, mape = forecast_accuracy(preds, held_out)
print(f"\n{horizon}-step forecast: RMSE {rmse:.4f}, MAE {mae:.4f}, MAPE {mape:.2f}%")
print("first five steps:", np.round(preds[:5], 4))
