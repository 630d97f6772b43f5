"""Partial maximum likelihood estimation.

Starting values follow the usual regression recipe: ordinary least squares
of the link-transformed series on an intercept, the covariates and the first
p link-scale lags gives (alpha, beta, phi); the moving-average coefficients
start at zero and the memory parameter at 0.001; the precision starts at a
delta-method moment match of the link-scale residual variance.

Maximization runs a box-constrained L-BFGS pass with the analytic gradient
and then polishes the iterate with Fisher-scoring steps until the projected
score meets the requested tolerance.  Box bounds keep nu positive and d
inside (-0.5, 0.5); the remaining coordinates are unconstrained.
"""

import dataclasses
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from .likelihood import (
    LikelihoodEvaluationError,
    loglik_and_score,
    score_and_fisher_info,
)
from .model import ModelSpec, ParamVector, RecursionDivergenceError, Sample, Y_EPS

__all__ = ["FitOptions", "FitResult", "initialize", "fit"]

_FAILURE_VALUE = 1e15
_MAX_POLISH_STEPS = 30

# indices of nu and d in the flattened parameter vector
_NU, _D = 0, 1


@dataclass(frozen=True)
class FitOptions:
    """Knobs for the quasi-Newton maximization.

    ``gradient_tolerance`` is measured on the infinity norm of the projected
    score relative to the likelihood magnitude: convergence requires
    ``|proj score|_inf <= gradient_tolerance * (1 + |loglik|)``.
    """

    max_iterations: int = 500
    gradient_tolerance: float = 1e-8
    nu_bounds: tuple = (1e-4, 1e6)
    d_bounds: tuple = (-0.49, 0.49)
    fix_d_at_zero: bool = False
    m: Optional[int] = None


@dataclass(frozen=True)
class FitResult:
    """Point estimates plus everything needed for inference."""

    spec: ModelSpec
    params_hat: ParamVector
    loglik: float
    score_at_opt: np.ndarray
    info_matrix: np.ndarray
    std_errors: Optional[np.ndarray]
    iterations: int
    converged: bool
    message: str
    n_obs: int
    free_mask: np.ndarray

    @property
    def n_free_params(self):
        return int(self.free_mask.sum())

    @property
    def n_eff(self):
        """Number of terms entering the likelihood sum."""
        return self.n_obs - self.spec.p

    def param_names(self):
        return self.spec.param_names()


def initialize(spec: ModelSpec, sample: Sample) -> ParamVector:
    """Starting values for the maximization (d is started at 0.001)."""
    n, p, l = sample.n, spec.p, spec.n_covariates
    gy = spec.link.forward(np.clip(sample.y, Y_EPS, 1.0 - Y_EPS))
    response = gy[p:]
    columns = []
    if spec.include_intercept:
        columns.append(np.ones(n - p))
    if l:
        columns.append(sample.x[p:])
    for j in range(1, p + 1):
        columns.append(gy[p - j : n - j, None])
    design = np.column_stack(columns) if columns else np.ones((n - p, 1))

    coef, _, rank, _ = np.linalg.lstsq(design, response, rcond=None)
    if rank < design.shape[1] or not np.all(np.isfinite(coef)):
        # rank-deficient design: fall back to a flat start at the mean level
        coef = np.zeros(design.shape[1])
        if spec.include_intercept:
            coef[0] = float(np.mean(gy))

    pos = 0
    alpha = 0.0
    if spec.include_intercept:
        alpha = float(coef[pos])
        pos += 1
    beta = coef[pos : pos + l].copy()
    pos += l
    phi = coef[pos : pos + p].copy()

    fitted_eta = design @ coef
    resid = response - fitted_eta
    dof = max(response.size - design.shape[1], 1)
    sigma2 = float(resid @ resid) / dof
    mu_hat = spec.link.inverse(fitted_eta)
    if sigma2 > 0:
        per_obs = mu_hat * (1.0 - mu_hat) * spec.link.derivative(mu_hat) ** 2 / sigma2 - 1.0
        nu0 = float(np.clip(np.mean(per_obs), 1.0, 1e5))
    else:
        nu0 = 1.0

    return ParamVector(
        nu=nu0, d=0.001, alpha=alpha, beta=beta, phi=phi, theta=np.zeros(spec.q)
    )


def _projected_score(values, score_vec, lower, upper):
    """Projected score for maximization under box bounds."""
    proj = score_vec.copy()
    at_lower = values <= lower + 1e-12
    at_upper = values >= upper - 1e-12
    proj[at_lower] = np.maximum(proj[at_lower], 0.0)
    proj[at_upper] = np.minimum(proj[at_upper], 0.0)
    return proj


def _bounds_arrays(spec, options):
    lower = np.full(spec.n_params, -np.inf)
    upper = np.full(spec.n_params, np.inf)
    lower[_NU], upper[_NU] = options.nu_bounds
    lower[_D], upper[_D] = options.d_bounds
    return lower, upper


def _polish(spec, sample, full, free, lower, upper, tol):
    """Damped Fisher-scoring refinement; returns (full, loglik, steps taken).

    Steps solve (G + damping * I) delta = U on the free coordinates and are
    accepted only when the projected score shrinks without a material
    likelihood loss; the damping ladder handles near-singular information on
    weakly identified ridges.
    """
    ll, _ = loglik_and_score(spec, ParamVector.from_array(full, spec), sample)
    steps = 0
    for _ in range(_MAX_POLISH_STEPS):
        score_vec, info = score_and_fisher_info(
            spec, ParamVector.from_array(full, spec), sample
        )
        proj = _projected_score(full, score_vec, lower, upper)[free]
        pg_norm = np.abs(proj).max(initial=0.0)
        if pg_norm <= tol * (1.0 + abs(ll)):
            break

        info_free = info[np.ix_(free, free)]
        scale = max(float(np.abs(np.diag(info_free)).max()), 1.0)
        accepted = False
        for damping in (0.0, 1e-10, 1e-7, 1e-4, 1e-2):
            try:
                delta = np.linalg.solve(
                    info_free + damping * scale * np.eye(info_free.shape[0]),
                    score_vec[free],
                )
            except np.linalg.LinAlgError:
                continue
            if not np.all(np.isfinite(delta)):
                continue
            step = 1.0
            for _ in range(25):
                candidate = full.copy()
                candidate[free] = np.clip(
                    full[free] + step * delta, lower[free], upper[free]
                )
                try:
                    cand_ll, cand_score = loglik_and_score(
                        spec, ParamVector.from_array(candidate, spec), sample
                    )
                except (RecursionDivergenceError, LikelihoodEvaluationError):
                    step *= 0.5
                    continue
                if not (np.isfinite(cand_ll) and np.all(np.isfinite(cand_score))):
                    step *= 0.5
                    continue
                cand_proj = _projected_score(candidate, cand_score, lower, upper)[free]
                if (
                    np.abs(cand_proj).max(initial=0.0) < pg_norm
                    and cand_ll >= ll - 1e-11 * (1.0 + abs(ll))
                ):
                    full, ll = candidate, cand_ll
                    accepted = True
                    steps += 1
                    break
                step *= 0.5
            if accepted:
                break
        if not accepted:
            break
    return full, ll, steps


def fit(
    spec: ModelSpec,
    sample: Sample,
    options: Optional[FitOptions] = None,
    start: Optional[ParamVector] = None,
) -> FitResult:
    """Maximize the partial likelihood; never raises on non-convergence.

    Returns the best iterate found together with the score and information
    matrix evaluated there.  Standard errors are the square roots of the
    diagonal of the inverse information restricted to the free coordinates
    (``None`` if that matrix is singular).  ``start`` overrides the
    regression-based initializer.
    """
    options = options or FitOptions()
    if options.m is not None and options.m != spec.m:
        spec = dataclasses.replace(spec, m=options.m)
    if sample.n <= spec.p + spec.q + 1:
        raise ValueError("sample too short for the requested orders")

    lower, upper = _bounds_arrays(spec, options)
    free = np.ones(spec.n_params, dtype=bool)
    if options.fix_d_at_zero:
        free[_D] = False
    if not spec.include_intercept:
        free[2] = False

    start = (start or initialize(spec, sample)).to_array()
    if options.fix_d_at_zero:
        start[_D] = 0.0
    if not spec.include_intercept:
        start[2] = 0.0
    start = np.clip(start, lower, upper)

    template = start.copy()

    def negative(x_free):
        full = template.copy()
        full[free] = x_free
        try:
            ll, score_vec = loglik_and_score(
                spec, ParamVector.from_array(full, spec), sample
            )
        except (RecursionDivergenceError, LikelihoodEvaluationError):
            return _FAILURE_VALUE, np.zeros(int(free.sum()))
        if not (np.isfinite(ll) and np.all(np.isfinite(score_vec))):
            return _FAILURE_VALUE, np.zeros(int(free.sum()))
        return -ll, -score_vec[free]

    # quasi-Newton rounds with scoring polish in between; a restart rebuilds
    # the curvature memory, which unsticks stalled line searches
    current = start[free]
    total_iters = 0
    polish_steps = 0
    messages = []
    full = template.copy()
    ll = -np.inf
    for _ in range(3):
        res = minimize(
            negative,
            current,
            jac=True,
            method="L-BFGS-B",
            bounds=list(zip(lower[free], upper[free])),
            options={
                "maxiter": options.max_iterations,
                "ftol": 1e-11,
                "gtol": options.gradient_tolerance,
            },
        )
        total_iters += int(res.nit)
        messages = [res.message if isinstance(res.message, str) else str(res.message)]
        full = template.copy()
        full[free] = res.x
        full, ll, took = _polish(
            spec, sample, full, free, lower, upper, options.gradient_tolerance
        )
        polish_steps += took
        score_vec, info = score_and_fisher_info(
            spec, ParamVector.from_array(full, spec), sample
        )
        proj = _projected_score(full, score_vec, lower, upper)[free]
        if np.abs(proj).max(initial=0.0) <= options.gradient_tolerance * (1.0 + abs(ll)):
            break
        current = full[free]

    params_hat = ParamVector.from_array(full, spec)
    proj = _projected_score(full, score_vec, lower, upper)[free]
    converged = bool(np.abs(proj).max(initial=0.0) <= options.gradient_tolerance * (1.0 + abs(ll)))

    std_errors = None
    try:
        inv_free = np.linalg.inv(info[np.ix_(free, free)])
        diag = np.diag(inv_free)
        if np.all(np.isfinite(diag)) and np.all(diag > 0):
            std_errors = np.full(spec.n_params, np.nan)
            std_errors[free] = np.sqrt(diag)
    except np.linalg.LinAlgError:
        std_errors = None

    message = messages[0]
    if polish_steps:
        message += f" (+{polish_steps} scoring steps)"

    return FitResult(
        spec=spec,
        params_hat=params_hat,
        loglik=ll,
        score_at_opt=score_vec,
        info_matrix=info,
        std_errors=std_errors,
        iterations=total_iters + polish_steps,
        converged=converged,
        message=message,
        n_obs=sample.n,
        free_mask=free,
    )
