import numpy as np
import pytest
from numpy.testing import assert_allclose

from betarfima.estimation import FitOptions, fit, initialize
from betarfima.likelihood import loglik
from betarfima.model import ModelSpec, ParamVector, Sample
from betarfima.simulate import SimConfig, simulate


def test_initializer_conventions():
    rng = np.random.default_rng(21)
    y = rng.beta(5.0, 3.0, 200)
    spec = ModelSpec(p=0, q=2, m=10)
    start = initialize(spec, Sample(y=y))
    gy = spec.link.forward(y)
    assert_allclose(start.alpha, gy.mean(), rtol=1e-12)  # OLS on a constant
    assert start.d == 0.001
    assert np.array_equal(start.theta, np.zeros(2))
    assert start.nu >= 1.0


def test_initializer_uses_lagged_regression():
    rng = np.random.default_rng(22)
    y = rng.beta(5.0, 5.0, 300)
    spec = ModelSpec(p=1, q=0, m=10)
    start = initialize(spec, Sample(y=y))
    gy = spec.link.forward(y)
    design = np.column_stack([np.ones(299), gy[:-1]])
    coef, *_ = np.linalg.lstsq(design, gy[1:], rcond=None)
    assert_allclose([start.alpha, start.phi[0]], coef, rtol=1e-10)


def test_intercept_only_fit_recovers_center():
    spec = ModelSpec(p=0, q=0, m=1)
    truth = ParamVector(nu=40.0, d=0.0, alpha=0.0)
    sample = simulate(SimConfig(spec=spec, params=truth, n=2000, seed=314, burn_in=50))
    result = fit(spec, sample, FitOptions(fix_d_at_zero=True))
    assert result.converged
    se_alpha = result.std_errors[2]
    assert abs(result.params_hat.alpha) < 3.0 * se_alpha


def test_monotone_progress_and_gradient_at_optimum(arfima11_sample):
    spec, truth, sample = arfima11_sample
    options = FitOptions()
    start_ll = loglik(spec, initialize(spec, sample), sample)
    result = fit(spec, sample, options)
    assert result.converged
    assert result.loglik >= start_ll
    tol = options.gradient_tolerance * (1.0 + abs(result.loglik))
    assert np.abs(result.score_at_opt).max() < tol


def test_nesting_free_dominates_restricted(arfima11_sample):
    spec, truth, sample = arfima11_sample
    free = fit(spec, sample)
    restricted = fit(spec, sample, FitOptions(fix_d_at_zero=True))
    assert free.loglik >= restricted.loglik - 1e-9
    assert restricted.params_hat.d == 0.0
    assert restricted.n_free_params == free.n_free_params - 1
    assert np.isnan(restricted.std_errors[1])


def test_reproducible_bit_identical(arfima11_sample):
    spec, truth, sample = arfima11_sample
    a = fit(spec, sample)
    b = fit(spec, sample)
    assert a.loglik == b.loglik
    assert np.array_equal(a.params_hat.to_array(), b.params_hat.to_array())
    assert np.array_equal(a.info_matrix, b.info_matrix)
    assert a.iterations == b.iterations


def test_free_d_beats_restricted_on_long_memory_data():
    spec = ModelSpec(p=1, q=2, m=60)
    gen = ModelSpec(p=1, q=2, m=400)
    truth = ParamVector(
        nu=30.0, d=0.3, alpha=0.1, phi=[0.2], theta=[-0.2, 0.1]
    )
    wins = 0
    total = 10
    for rep in range(total):
        sample = simulate(
            SimConfig(spec=gen, params=truth, n=400, seed=600 + rep, burn_in=401)
        )
        free = fit(spec, sample)
        restricted = fit(spec, sample, FitOptions(fix_d_at_zero=True))
        if free.loglik > restricted.loglik:
            wins += 1
    assert wins >= int(0.95 * total)


def test_covariate_model_recovery(covariate_sample):
    spec, params, sample = covariate_sample
    result = fit(spec, sample)
    assert result.converged
    # beta is well identified; 4 standard errors is a generous band
    assert abs(result.params_hat.beta[0] - 0.4) < 4.0 * result.std_errors[3]


def test_truncation_override():
    rng = np.random.default_rng(33)
    sample = Sample(y=rng.beta(4.0, 4.0, 150))
    spec = ModelSpec(p=0, q=0, m=100)
    result = fit(spec, sample, FitOptions(m=25))
    assert result.spec.m == 25


def test_short_sample_rejected():
    spec = ModelSpec(p=2, q=2, m=4)
    with pytest.raises(ValueError):
        fit(spec, Sample(y=np.array([0.5, 0.4, 0.6, 0.5, 0.4])))


def test_without_intercept_alpha_fixed():
    rng = np.random.default_rng(44)
    sample = Sample(y=rng.beta(3.0, 3.0, 120))
    spec = ModelSpec(p=0, q=0, m=1, include_intercept=False)
    result = fit(spec, sample, FitOptions(fix_d_at_zero=True))
    assert result.params_hat.alpha == 0.0
    assert result.n_free_params == 1  # only nu remains
