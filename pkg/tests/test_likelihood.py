import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import special as sp

from betarfima.estimation import FitOptions, fit
from betarfima.likelihood import (
    beta_loglik_terms,
    fisher_info,
    loglik,
    loglik_and_score,
    score,
    score_workspace,
)
from betarfima.model import ModelSpec, ParamVector, Sample, forward_recursion
from betarfima.simulate import SimConfig, simulate

FLAT = ModelSpec(p=0, q=0, m=1)


def test_uniform_density_gives_zero():
    # mu = 0.5, nu = 2 is the Beta(1, 1) = uniform density
    for y in (0.11, 0.5, 0.93):
        sample = Sample(y=np.array([y]))
        params = ParamVector(nu=2.0, d=0.0, alpha=0.0)
        assert_allclose(loglik(FLAT, params, sample), 0.0, atol=1e-13)


def test_symmetric_beta_at_center():
    # Beta(2, 2) density at 1/2 is 3/2
    sample = Sample(y=np.array([0.5]))
    params = ParamVector(nu=4.0, d=0.0, alpha=0.0)
    assert_allclose(loglik(FLAT, params, sample), np.log(1.5), rtol=1e-14)


def test_sums_from_p_plus_one():
    rng = np.random.default_rng(8)
    y = rng.uniform(0.3, 0.7, 30)
    spec = ModelSpec(p=1, q=0, m=2)
    params = ParamVector(nu=6.0, d=0.0, alpha=0.0, phi=[0.3])
    state = forward_recursion(spec, params, Sample(y=y))
    want = beta_loglik_terms(y, state.mu, 6.0)[1:].sum()
    assert_allclose(loglik(spec, params, Sample(y=y)), want, rtol=1e-14)


def test_boundary_observations_stay_finite():
    y = np.array([1e-300, 0.5, 1 - 1e-16])
    sample = Sample(y=np.clip(y, 1e-310, 1 - 1e-16))
    params = ParamVector(nu=3.0, d=0.0, alpha=0.0)
    value = loglik(FLAT, params, sample)
    assert np.isfinite(value)


def test_intercept_only_first_order_condition():
    rng = np.random.default_rng(9)
    sample = Sample(y=rng.beta(8.0, 6.0, 300))
    result = fit(FLAT, sample, FitOptions(fix_d_at_zero=True))
    assert result.converged
    u = result.score_at_opt
    assert abs(u[2]) < 1e-5  # d(loglik)/d(alpha)
    ws = score_workspace(FLAT, result.params_hat, sample)
    assert abs(np.sum(ws.ystar - ws.mustar)) < 1e-5


def score_fd(spec, params, sample, h=1e-6):
    base = params.to_array()
    grad = np.zeros_like(base)
    for i in range(base.size):
        hi, lo = base.copy(), base.copy()
        hi[i] += h
        lo[i] -= h
        grad[i] = (
            loglik(spec, ParamVector.from_array(hi, spec), sample)
            - loglik(spec, ParamVector.from_array(lo, spec), sample)
        ) / (2.0 * h)
    return grad


def test_score_matches_finite_differences(arfima11_sample):
    spec, truth, sample = arfima11_sample
    rng = np.random.default_rng(123)
    for _ in range(5):
        point = ParamVector(
            nu=rng.uniform(10.0, 60.0),
            d=rng.uniform(-0.3, 0.4),
            alpha=rng.uniform(-0.3, 0.3),
            phi=[rng.uniform(-0.5, 0.5)],
            theta=[rng.uniform(-0.5, 0.5)],
        )
        analytic = score(spec, point, sample)
        numeric = score_fd(spec, point, sample)
        assert_allclose(analytic, numeric, rtol=1e-4, atol=1e-4)


def test_score_matches_fd_with_covariates(covariate_sample):
    spec, params, sample = covariate_sample
    analytic = score(spec, params, sample)
    numeric = score_fd(spec, params, sample)
    assert_allclose(analytic, numeric, rtol=1e-4, atol=1e-4)


def test_precision_score_three_point_expansion():
    # flat model: mu_t = 1/2; term-by-term expansion of d(loglik)/d(nu)
    y = np.array([0.2, 0.55, 0.7])
    nu = 3.0
    sample = Sample(y=y)
    params = ParamVector(nu=nu, d=0.0, alpha=0.0)
    ystar = np.log(y / (1 - y))
    mustar = sp.psi(0.5 * nu) - sp.psi(0.5 * nu)
    want = np.sum(
        0.5 * (ystar - mustar) + np.log(1 - y) - sp.psi(0.5 * nu) + sp.psi(nu)
    )
    got = score(FLAT, params, sample)[0]
    assert_allclose(got, want, rtol=1e-12)


def beta_arma_score_oracle(spec, params, sample):
    """Independent short-memory score with the moving-average weights
    hard-coded to zero (valid when d = 0 and q = 0)."""
    link = spec.link
    n, p = sample.n, spec.p
    y = np.clip(sample.y, 1e-12, 1 - 1e-12)
    gy = link.forward(y)
    xb = sample.x @ params.beta if spec.n_covariates else np.zeros(n)
    eta = np.zeros(n)
    for i in range(n):
        if i + 1 <= p:
            eta[i] = params.alpha + xb[i]
            continue
        eta[i] = params.alpha + xb[i]
        for j in range(1, p + 1):
            eta[i] += params.phi[j - 1] * (gy[i - j] - xb[i - j])
    mu = link.inverse(eta)
    nu = params.nu
    ystar = np.log(y) - np.log1p(-y)
    mustar = sp.psi(mu * nu) - sp.psi((1 - mu) * nu)
    tdiag = 1.0 / link.derivative(mu)
    common = nu * tdiag * (ystar - mustar)
    common[:p] = 0.0

    u_nu = np.sum(
        (mu * (ystar - mustar) + np.log1p(-y) - sp.psi((1 - mu) * nu) + sp.psi(nu))[p:]
    )
    # d(eta)/d(d) with c = 0: sum of r lags weighted by 1/k
    r = gy - eta
    r[:p] = 0.0
    deta_d = np.zeros(n)
    for i in range(n):
        for k in range(1, spec.m + 1):
            if i - k >= 0:
                deta_d[i] += r[i - k] / k
    u_d = np.sum(common * deta_d)
    u_alpha = np.sum(common)
    u_phi = np.zeros(p)
    for s in range(1, p + 1):
        forcing = np.zeros(n)
        forcing[s:] = gy[:-s] - xb[:-s]
        u_phi[s - 1] = np.sum(common * forcing)
    return np.concatenate(([u_nu, u_d, u_alpha], u_phi))


def test_short_memory_score_equals_hardcoded_oracle():
    rng = np.random.default_rng(11)
    y = rng.uniform(0.2, 0.8, 120)
    spec = ModelSpec(p=1, q=0, m=20)
    params = ParamVector(nu=12.0, d=0.0, alpha=0.1, phi=[0.35])
    got = score(spec, params, Sample(y=y))
    want = beta_arma_score_oracle(spec, params, Sample(y=y))
    assert_allclose(got, want, rtol=1e-12, atol=1e-12)


# --- information matrix ----------------------------------------------------


def test_flat_model_information_blocks():
    rng = np.random.default_rng(12)
    n = 50
    sample = Sample(y=rng.uniform(0.3, 0.7, n))
    params = ParamVector(nu=2.0, d=0.0, alpha=0.0)
    info = fisher_info(FLAT, params, sample)
    # mu = 1/2 everywhere: the mean/precision cross terms vanish
    assert_allclose(info[0, 1:], 0.0, atol=1e-12)
    per_obs = sp.polygamma(1, 1.0) * 0.25 * 2 - sp.polygamma(1, 2.0)
    assert_allclose(info[0, 0], n * per_obs, rtol=1e-12)
    assert_allclose(per_obs, 0.177533, atol=5e-7)


def test_information_symmetric_positive_definite(arfima11_sample):
    spec, truth, sample = arfima11_sample
    info = fisher_info(spec, truth, sample)
    assert np.array_equal(info, info.T)
    eigenvalues = np.linalg.eigvalsh(info)
    assert np.all(eigenvalues > 0)


def test_information_with_covariates_pd(covariate_sample):
    spec, params, sample = covariate_sample
    info = fisher_info(spec, params, sample)
    assert info.shape == (spec.n_params, spec.n_params)
    assert np.all(np.linalg.eigvalsh(info) > 0)


def test_score_covariance_tracks_information():
    # small-scale version of the information identity
    spec = ModelSpec(p=1, q=1, m=50)
    truth = ParamVector(nu=40.0, d=0.15, alpha=0.05, phi=[0.2], theta=[-0.3])
    gen = ModelSpec(p=1, q=1, m=300)
    scores, infos = [], []
    from betarfima.likelihood import score_and_fisher_info

    for rep in range(150):
        sample = simulate(
            SimConfig(spec=gen, params=truth, n=150, seed=1000 + rep, burn_in=301)
        )
        u, g = score_and_fisher_info(spec, truth, sample)
        scores.append(u)
        infos.append(g)
    scores = np.array(scores)
    centered = scores - scores.mean(axis=0)
    emp_cov = centered.T @ centered / scores.shape[0]
    mean_info = np.mean(infos, axis=0)
    rel = np.linalg.norm(emp_cov - mean_info) / np.linalg.norm(mean_info)
    assert rel < 0.30


def test_loglik_and_score_consistent(arfima11_sample):
    spec, truth, sample = arfima11_sample
    ll, u = loglik_and_score(spec, truth, sample)
    assert_allclose(ll, loglik(spec, truth, sample), rtol=0, atol=0)
    assert_allclose(u, score(spec, truth, sample), rtol=0, atol=0)
