import numpy as np
import pytest

from betarfima import ModelSpec, ParamVector, Sample, SimConfig, simulate


@pytest.fixture(scope="session")
def arfima11_sample():
    """A moderate (1, d, 1) sample used by several test modules."""
    spec = ModelSpec(p=1, q=1, m=50)
    truth = ParamVector(nu=40.0, d=0.2, alpha=0.05, phi=[0.2], theta=[-0.3])
    sample = simulate(SimConfig(spec=spec, params=truth, n=400, seed=91, burn_in=200))
    return spec, truth, sample


@pytest.fixture(scope="session")
def covariate_sample():
    """A sample with one covariate, for exercising the beta blocks."""
    rng = np.random.default_rng(5)
    spec = ModelSpec(p=1, q=1, n_covariates=1, m=30)
    params = ParamVector(
        nu=30.0, d=0.1, alpha=0.1, beta=[0.4], phi=[0.25], theta=[-0.2]
    )
    covariates = rng.normal(0.0, 0.5, (150 + 300, 1))
    sample = simulate(
        SimConfig(
            spec=spec, params=params, n=300, seed=17, burn_in=150,
            covariates=covariates,
        )
    )
    return spec, params, sample
