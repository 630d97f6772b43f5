"""Command-line interface: fit, simulate, forecast, diagnose and mc.

Exit codes: 0 on success, 1 for model or convergence failures, 2 for input
errors (unreadable files, malformed rows, bad flags).
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from .dataio import (
    DatasetError,
    read_dataset,
    read_matrix_csv,
    write_dataset,
    write_forecast_csv,
)
from .diagnostics import (
    diagnostic_report,
    information_criteria,
    ljung_box,
    residual_acf,
    residuals,
    write_acf_csv,
    write_residual_csv,
)
from .estimation import FitOptions, fit
from .forecast import ForecastRequest, forecast
from .inference import lr_test, z_statistics
from .links import LINKS
from .mc import load_design_file, run_design, summarize, write_report_csv
from .model import ModelSpec, ParamVector
from .simulate import SimConfig, rescale_from_unit, simulate

EXIT_OK = 0
EXIT_MODEL = 1
EXIT_INPUT = 2


def _parse_float_list(text):
    if text is None or text.strip() == "":
        return []
    return [float(tok) for tok in text.replace(",", " ").split()]


def _add_model_flags(parser, default_m=200):
    parser.add_argument("--p", type=int, default=0, help="autoregressive order")
    parser.add_argument("--q", type=int, default=0, help="moving-average order")
    parser.add_argument("--no-d", action="store_true",
                        help="fix the long-memory parameter at zero")
    parser.add_argument("--link", choices=sorted(LINKS), default="logit")
    parser.add_argument("--m", type=int, default=default_m,
                        help="truncation of the moving-average sums")


def _add_rescale_flag(parser):
    parser.add_argument("--rescale", nargs=2, type=float, metavar=("A", "B"),
                        help="data interval; values are mapped to (0,1) on read")


def _fit_from_args(args, sample):
    spec = ModelSpec(
        p=args.p, q=args.q, n_covariates=sample.n_covariates,
        link=args.link, m=args.m,
    )
    options = FitOptions(fix_d_at_zero=args.no_d)
    return spec, fit(spec, sample, options)


def _fit_report(result, sample, lr_against_d0=None):
    names = result.param_names()
    estimates = result.params_hat.to_array()
    se = result.std_errors
    zs = z_statistics(result)

    lines = [
        f"Fitted model: p={result.spec.p}, q={result.spec.q}, "
        f"covariates={result.spec.n_covariates}, link={result.spec.link.name}, "
        f"m={result.spec.m}, n={result.n_obs}",
        "",
        f"{'':<10}{'Estimate':>12}{'Std. Error':>12}{'z stat.':>12}{'Pr(>|z|)':>12}",
    ]
    for j, name in enumerate(names):
        if not result.free_mask[j]:
            lines.append(f"{name:<10}{estimates[j]:>12.4f}{'(fixed)':>12}")
            continue
        se_j = se[j] if se is not None else float("nan")
        lines.append(
            f"{name:<10}{estimates[j]:>12.4f}{se_j:>12.4f}"
            f"{zs[j].statistic:>12.4f}{zs[j].p_value:>12.4f}"
        )
    aic, bic, hq = information_criteria(result)
    lines += [
        "",
        f"Log-likelihood: {result.loglik:.4f}",
        f"AIC: {aic:.4f}   BIC: {bic:.4f}   HQ: {hq:.4f}",
    ]
    if lr_against_d0 is not None:
        lines.append(
            f"LR test for d = 0: statistic {lr_against_d0.statistic:.4f}, "
            f"p-value {lr_against_d0.p_value:.4f}"
        )
    res = residuals(result, sample)
    max_lag = min(20, res.standardized.size - 1)
    acf = residual_acf(res.standardized, max_lag)
    lb = ljung_box(acf, res.standardized.size, max_lag)
    lines.append(
        f"Ljung-Box ({max_lag} lags) on standardized residuals: "
        f"statistic {lb.statistic:.4f}, p-value {lb.p_value:.4f}"
    )
    lines.append(f"Converged: {'yes' if result.converged else 'NO'} "
                 f"(iterations {result.iterations})")
    return "\n".join(lines)


def cmd_fit(args):
    sample = read_dataset(args.data, rescale=args.rescale)
    spec, result = _fit_from_args(args, sample)
    lr = None
    if not args.no_d:
        restricted = fit(spec, sample, FitOptions(fix_d_at_zero=True))
        if restricted.converged and result.loglik >= restricted.loglik:
            lr = lr_test(result, restricted)
    report = _fit_report(result, sample, lr_against_d0=lr)
    if args.output:
        Path(args.output).write_text(report + "\n")
    else:
        print(report)
    return EXIT_OK if result.converged else EXIT_MODEL


def cmd_simulate(args):
    phi = _parse_float_list(args.phi)
    theta = _parse_float_list(args.theta)
    beta = _parse_float_list(args.beta)
    covariates = None
    if beta:
        if not args.covariates:
            raise DatasetError("--covariates is required when --beta is given")
        covariates = read_matrix_csv(args.covariates)
    spec = ModelSpec(
        p=len(phi), q=len(theta), n_covariates=len(beta),
        link=args.link, m=args.m,
    )
    params = ParamVector(
        nu=args.nu, d=args.d, alpha=args.alpha, beta=beta, phi=phi, theta=theta
    )
    config = SimConfig(
        spec=spec, params=params, n=args.n, seed=args.seed,
        burn_in=args.burn_in, covariates=covariates,
    )
    sample = simulate(config)
    y = sample.y
    if args.rescale:
        y = rescale_from_unit(y, *args.rescale)
    write_dataset(args.output, y, sample.x if spec.n_covariates else None)
    return EXIT_OK


def cmd_forecast(args):
    sample = read_dataset(args.data, rescale=args.rescale)
    spec, result = _fit_from_args(args, sample)
    if not result.converged:
        print("model fit did not converge", file=sys.stderr)
        return EXIT_MODEL
    future = None
    if sample.n_covariates:
        if not args.future_covariates:
            raise DatasetError(
                "--future-covariates is required when the data has covariates"
            )
        future = read_matrix_csv(args.future_covariates)
    request = ForecastRequest(horizon=args.horizon, future_covariates=future)
    preds = forecast(result, sample, request)
    if args.rescale:
        preds = rescale_from_unit(preds, *args.rescale)
    write_forecast_csv(args.output, preds)
    return EXIT_OK


def cmd_diagnose(args):
    sample = read_dataset(args.data, rescale=args.rescale)
    spec, result = _fit_from_args(args, sample)
    res = residuals(result, sample)
    prefix = Path(args.output_prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    report = diagnostic_report(result, sample)
    Path(f"{prefix}_report.txt").write_text(report + "\n")
    write_residual_csv(f"{prefix}_residuals.csv", res)
    max_lag = min(20, res.standardized.size - 1)
    write_acf_csv(
        f"{prefix}_acf.csv",
        residual_acf(res.standardized, max_lag),
        res.standardized.size,
    )
    print(report)
    return EXIT_OK if result.converged else EXIT_MODEL


def cmd_mc(args):
    design = load_design_file(args.design)
    report = run_design(design, workers=args.workers)
    out = Path(args.output_dir)
    write_report_csv(report, out)
    text = summarize(report)
    (out / "summary.txt").write_text(text + "\n")
    print(text)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="betarfima",
        description="Long-memory beta regression for time series on (0, 1)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="fit a model to a CSV dataset")
    p_fit.add_argument("data")
    _add_model_flags(p_fit)
    _add_rescale_flag(p_fit)
    p_fit.add_argument("--output", help="write the report here instead of stdout")
    p_fit.set_defaults(handler=cmd_fit)

    p_sim = sub.add_parser("simulate", help="simulate a sample to CSV")
    p_sim.add_argument("--n", type=int, required=True)
    p_sim.add_argument("--seed", type=int, required=True)
    p_sim.add_argument("--nu", type=float, required=True)
    p_sim.add_argument("--d", type=float, default=0.0)
    p_sim.add_argument("--alpha", type=float, default=0.0)
    p_sim.add_argument("--phi", help="AR coefficients, comma separated")
    p_sim.add_argument("--theta", help="MA coefficients, comma separated")
    p_sim.add_argument("--beta", help="covariate coefficients, comma separated")
    p_sim.add_argument("--covariates",
                       help="CSV of covariate rows (burn-in + n rows)")
    p_sim.add_argument("--burn-in", type=int, default=500)
    p_sim.add_argument("--link", choices=sorted(LINKS), default="logit")
    p_sim.add_argument("--m", type=int, default=100)
    _add_rescale_flag(p_sim)
    p_sim.add_argument("--output", required=True)
    p_sim.set_defaults(handler=cmd_simulate)

    p_fc = sub.add_parser("forecast", help="fit and forecast ahead")
    p_fc.add_argument("data")
    _add_model_flags(p_fc)
    _add_rescale_flag(p_fc)
    p_fc.add_argument("--horizon", type=int, required=True)
    p_fc.add_argument("--future-covariates")
    p_fc.add_argument("--output", required=True)
    p_fc.set_defaults(handler=cmd_forecast)

    p_diag = sub.add_parser("diagnose", help="fit and write residual diagnostics")
    p_diag.add_argument("data")
    _add_model_flags(p_diag)
    _add_rescale_flag(p_diag)
    p_diag.add_argument("--output-prefix", required=True)
    p_diag.set_defaults(handler=cmd_diagnose)

    p_mc = sub.add_parser("mc", help="run a Monte Carlo design file")
    p_mc.add_argument("design")
    p_mc.add_argument("--output-dir", required=True)
    p_mc.add_argument("--workers", type=int, default=None)
    p_mc.set_defaults(handler=cmd_mc)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "horizon", None) is not None and args.horizon <= 0:
        print("horizon must be positive", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.handler(args)
    except (DatasetError, FileNotFoundError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # model-side failures
        print(f"model error: {exc}", file=sys.stderr)
        return EXIT_MODEL


if __name__ == "__main__":
    sys.exit(main())
