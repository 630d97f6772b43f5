"""Partial log-likelihood, analytic score and conditional information matrix.

All quantities condition on the first p observations: sums run over
t = p+1..n so that no autoregressive lag is missing.  The derivative
sequences d(eta_t)/d(gamma_j) satisfy linear recursions driven by the same
moving-average weights as the mean recursion itself, so each one is
evaluated with an IIR filter; the score is then assembled in matrix form.

Observations are clamped to [1e-12, 1 - 1e-12] before any logit-scale
transform, and inverse links clip the mean into the open unit interval, so
evaluations stay finite for any finite predictor.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .fracdiff import c_coeffs, dc_dd, pi_coeffs
from .model import Y_EPS, _filter_tail, _masked_lag_convolution, forward_recursion
from .special import digamma, trigamma

__all__ = [
    "LikelihoodEvaluationError",
    "ScoreWorkspace",
    "InfoWorkspace",
    "beta_loglik_terms",
    "loglik",
    "score",
    "score_workspace",
    "info_workspace",
    "fisher_info",
    "loglik_and_score",
    "score_and_fisher_info",
]


class LikelihoodEvaluationError(RuntimeError):
    """Raised when a log-likelihood term is non-finite."""

    def __init__(self, t):
        self.t = t
        super().__init__(f"non-finite log-likelihood term at t={t}")


@dataclass(frozen=True)
class ScoreWorkspace:
    """Per-observation pieces of the score in matrix form.

    ``deta_*`` hold the derivative of the linear predictor with respect to
    each dynamic parameter; rows t <= p are zero by the pre-sample
    convention.
    """

    ystar: np.ndarray
    mustar: np.ndarray
    t_diag: np.ndarray
    deta_dd: np.ndarray
    deta_dalpha: np.ndarray
    deta_dbeta: np.ndarray
    deta_dphi: np.ndarray
    deta_dtheta: np.ndarray


@dataclass(frozen=True)
class InfoWorkspace:
    """Per-observation conditional-information weights.

    ``mean_info`` is nu^2 [psi'(mu nu) + psi'((1-mu) nu)] (information about
    the mean), ``cross_info`` the mean/precision cross term and
    ``precision_info`` the information about nu.
    """

    mean_info: np.ndarray
    cross_info: np.ndarray
    precision_info: np.ndarray


def beta_loglik_terms(y, mu, nu):
    """Log-density of the mean/precision beta parameterization, elementwise."""
    y = np.clip(np.asarray(y, dtype=float), Y_EPS, 1.0 - Y_EPS)
    mu = np.asarray(mu, dtype=float)
    a = nu * mu
    b = nu * (1.0 - mu)
    return (
        gammaln(nu)
        - gammaln(a)
        - gammaln(b)
        + (a - 1.0) * np.log(y)
        + (b - 1.0) * np.log1p(-y)
    )


def _forward_pieces(spec, params, sample):
    state = forward_recursion(spec, params, sample)
    y = np.clip(sample.y, Y_EPS, 1.0 - Y_EPS)
    gy = spec.link.forward(y)
    xb = sample.x @ params.beta if spec.n_covariates else np.zeros(sample.n)
    return state, y, gy, xb


class _quiet(np.errstate):
    """Overflows at wild trial parameters produce infinities on purpose;
    callers test finiteness instead of relying on warnings."""

    def __init__(self):
        super().__init__(over="ignore", invalid="ignore")


def _loglik_from_state(spec, sample, params, state, y):
    terms = beta_loglik_terms(y, state.mu, params.nu)[spec.p :]
    if not np.all(np.isfinite(terms)):
        raise LikelihoodEvaluationError(int(np.argmin(np.isfinite(terms))) + spec.p + 1)
    return float(terms.sum())


def _derivatives(spec, params, state, gy, xb, sample):
    """Derivative sequences of eta with respect to (d, alpha, beta, phi, theta)."""
    n = sample.n
    p, q, l, m = spec.p, spec.q, spec.n_covariates, spec.m
    c = c_coeffs(params.theta, params.d, spec.m)
    r = state.r

    forcing = np.convolve(r, np.concatenate(([0.0], dc_dd(params.theta, params.d, m)[1:])))[:n]
    deta_dd = _filter_tail(c, forcing, p)

    deta_dalpha = _filter_tail(c, np.ones(n), p)

    deta_dbeta = np.zeros((n, l))
    if l:
        forcing = sample.x.copy()
        for j in range(1, p + 1):
            forcing[j:] -= params.phi[j - 1] * sample.x[:-j]
        for s in range(l):
            deta_dbeta[:, s] = _filter_tail(c, forcing[:, s], p)

    deta_dphi = np.zeros((n, p))
    for s in range(1, p + 1):
        forcing = np.zeros(n)
        forcing[s:] = gy[:-s] - xb[:-s]
        deta_dphi[:, s - 1] = _filter_tail(c, forcing, p)

    deta_dtheta = np.zeros((n, q))
    if q:
        pi = pi_coeffs(params.d, m)
        for s in range(1, q + 1):
            kernel = np.concatenate((np.zeros(s), pi[: m - s + 1]))
            forcing = np.convolve(r, kernel)[:n]
            deta_dtheta[:, s - 1] = _filter_tail(c, forcing, p)

    return deta_dd, deta_dalpha, deta_dbeta, deta_dphi, deta_dtheta


def _workspace_from_pieces(spec, params, state, y, gy, xb, sample):
    mu, nu = state.mu, params.nu
    ystar = np.log(y) - np.log1p(-y)
    mustar = digamma(mu * nu) - digamma((1.0 - mu) * nu)
    t_diag = 1.0 / spec.link.derivative(mu)
    dd, da, db, dp, dt = _derivatives(spec, params, state, gy, xb, sample)
    return ScoreWorkspace(
        ystar=ystar, mustar=mustar, t_diag=t_diag,
        deta_dd=dd, deta_dalpha=da, deta_dbeta=db,
        deta_dphi=dp, deta_dtheta=dt,
    )


def _score_from_workspace(spec, params, state, y, ws):
    p, nu, mu = spec.p, params.nu, state.mu
    resid_star = ws.ystar - ws.mustar
    common = nu * ws.t_diag * resid_star
    common[:p] = 0.0

    u_nu_terms = (
        mu * resid_star
        + np.log1p(-y)
        - digamma((1.0 - mu) * nu)
        + digamma(nu)
    )
    u_nu = float(u_nu_terms[p:].sum())

    stacked = np.column_stack(
        (ws.deta_dd, ws.deta_dalpha, ws.deta_dbeta, ws.deta_dphi, ws.deta_dtheta)
    )
    u_rest = stacked.T @ common
    # ordering (nu, d, alpha, beta, phi, theta)
    return np.concatenate(([u_nu], u_rest))


def _info_weights(params, mu):
    nu = params.nu
    tg_a = trigamma(mu * nu)
    tg_b = trigamma((1.0 - mu) * nu)
    mean_info = nu * nu * (tg_a + tg_b)
    cross_info = nu * (tg_a * mu - tg_b * (1.0 - mu))
    precision_info = tg_a * mu**2 + tg_b * (1.0 - mu) ** 2 - trigamma(nu)
    return InfoWorkspace(mean_info, cross_info, precision_info)


def _info_from_workspace(spec, params, state, ws):
    p = spec.p
    weights = _info_weights(params, state.mu)
    w_scaled = weights.mean_info * ws.t_diag**2
    v_scaled = weights.cross_info * ws.t_diag
    w_scaled[:p] = 0.0
    v_scaled[:p] = 0.0

    stacked = np.column_stack(
        (ws.deta_dd, ws.deta_dalpha, ws.deta_dbeta, ws.deta_dphi, ws.deta_dtheta)
    )
    k = spec.n_params
    info = np.empty((k, k))
    info[0, 0] = weights.precision_info[p:].sum()
    info[0, 1:] = v_scaled @ stacked
    info[1:, 0] = info[0, 1:]
    # fill the upper triangle and mirror it so the matrix is symmetric by
    # construction (BLAS products are not bit-symmetric)
    block = stacked.T @ (w_scaled[:, None] * stacked)
    upper = np.triu(block)
    info[1:, 1:] = upper + upper.T - np.diag(np.diag(block))
    return info


def loglik(spec, params, sample):
    """Partial log-likelihood summed over t = p+1..n."""
    state, y, _, _ = _forward_pieces(spec, params, sample)
    return _loglik_from_state(spec, sample, params, state, y)


def score_workspace(spec, params, sample):
    """Build the per-observation score workspace (derivative sequences)."""
    state, y, gy, xb = _forward_pieces(spec, params, sample)
    with _quiet():
        return _workspace_from_pieces(spec, params, state, y, gy, xb, sample)


def score(spec, params, sample):
    """Analytic score vector in the ordering (nu, d, alpha, beta, phi, theta)."""
    state, y, gy, xb = _forward_pieces(spec, params, sample)
    with _quiet():
        ws = _workspace_from_pieces(spec, params, state, y, gy, xb, sample)
        return _score_from_workspace(spec, params, state, y, ws)


def info_workspace(spec, params, sample):
    """Conditional-information weights evaluated along the fitted means."""
    state, _, _, _ = _forward_pieces(spec, params, sample)
    return _info_weights(params, state.mu)


def fisher_info(spec, params, sample):
    """Conditional Fisher information matrix, assembled blockwise."""
    state, y, gy, xb = _forward_pieces(spec, params, sample)
    with _quiet():
        ws = _workspace_from_pieces(spec, params, state, y, gy, xb, sample)
        return _info_from_workspace(spec, params, state, ws)


def loglik_and_score(spec, params, sample):
    """Log-likelihood and score sharing a single forward pass."""
    state, y, gy, xb = _forward_pieces(spec, params, sample)
    ll = _loglik_from_state(spec, sample, params, state, y)
    with _quiet():
        ws = _workspace_from_pieces(spec, params, state, y, gy, xb, sample)
        return ll, _score_from_workspace(spec, params, state, y, ws)


def score_and_fisher_info(spec, params, sample):
    """Score and information matrix sharing a single forward pass."""
    state, y, gy, xb = _forward_pieces(spec, params, sample)
    with _quiet():
        ws = _workspace_from_pieces(spec, params, state, y, gy, xb, sample)
        return (
            _score_from_workspace(spec, params, state, y, ws),
            _info_from_workspace(spec, params, state, ws),
        )
