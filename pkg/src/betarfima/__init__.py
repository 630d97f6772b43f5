"""Long-memory beta regression for time series on the open unit interval.

The conditional distribution of each observation is beta with precision nu
and a mean whose link transform follows a fractionally integrated ARMA
recursion with optional covariates.  The package covers simulation, partial
maximum likelihood estimation with analytic score and conditional Fisher
information, hypothesis tests, residual diagnostics, forecasting and a
Monte Carlo harness for parameter-recovery and test-calibration studies.
"""

from .diagnostics import (
    ResidualSet,
    deviance,
    information_criteria,
    ljung_box,
    residual_acf,
    residuals,
)
from .estimation import FitOptions, FitResult, fit, initialize
from .forecast import ForecastRequest, forecast, forecast_accuracy
from .fracdiff import c_coeffs, dc_dd, dc_dtheta, dpi_dd, pi_coeffs
from .inference import (
    TestReport,
    lr_test,
    rao_score_test,
    wald_test,
    wald_test_general,
    z_statistics,
)
from .likelihood import fisher_info, loglik, score
from .links import Link, get_link, link_eval
from .mc import McDesign, McReport, McScenario, run_design, summarize
from .model import ModelSpec, ParamVector, RecursionState, Sample, forward_recursion
from .simulate import SimConfig, beta_inverse_cdf, simulate
from .special import digamma, trigamma

__version__ = "0.1.0"

__all__ = [
    "ModelSpec", "ParamVector", "Sample", "RecursionState", "forward_recursion",
    "Link", "get_link", "link_eval", "digamma", "trigamma",
    "pi_coeffs", "dpi_dd", "c_coeffs", "dc_dd", "dc_dtheta",
    "loglik", "score", "fisher_info",
    "FitOptions", "FitResult", "fit", "initialize",
    "TestReport", "lr_test", "wald_test", "wald_test_general",
    "rao_score_test", "z_statistics",
    "ResidualSet", "residuals", "deviance", "information_criteria",
    "residual_acf", "ljung_box",
    "ForecastRequest", "forecast", "forecast_accuracy",
    "SimConfig", "simulate", "beta_inverse_cdf",
    "McScenario", "McDesign", "McReport", "run_design", "summarize",
    "__version__",
]
