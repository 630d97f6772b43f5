"""Model containers and the forward mean recursion.

The observation at time t is conditionally beta distributed with mean mu_t
and precision nu, where the linear predictor follows

    eta_t = g(mu_t) = alpha + x_{t-1}' beta
            + sum_{j=1}^p phi_j (g(y_{t-j}) - x_{t-j-1}' beta)
            + sum_{k=1}^m c_k r_{t-k},

with prediction-scale errors r_t = g(y_t) - g(mu_t) and the infinite
moving-average sum truncated at m.  Initialization follows the estimation
convention: r_t = 0 for t <= p, pre-sample quantities are zero, and for
t <= p the mean is held at the deterministic part g^-1(alpha + x_{t-1}'beta)
(these indices never enter the likelihood, which is summed from t = p + 1).

The recursion in r is linear in eta once g(y) is fixed, so the whole pass is
evaluated with a single IIR filter over t = p+1..n rather than a double loop.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.signal import lfilter

from .fracdiff import c_coeffs
from .links import Link, get_link

__all__ = [
    "ModelSpec",
    "ParamVector",
    "Sample",
    "RecursionState",
    "RecursionDivergenceError",
    "forward_recursion",
]

# guard used when mapping observations through the logit scale
Y_EPS = 1e-12


class RecursionDivergenceError(RuntimeError):
    """Raised when the mean recursion produces a non-finite predictor."""

    def __init__(self, t):
        self.t = t
        super().__init__(f"non-finite linear predictor at t={t}")


@dataclass(frozen=True)
class ModelSpec:
    """Static shape of a model: orders, covariate count, link, truncation."""

    p: int = 0
    q: int = 0
    n_covariates: int = 0
    link: Link = field(default_factory=lambda: get_link("logit"))
    m: int = 100
    include_intercept: bool = True

    def __post_init__(self):
        if self.p < 0 or self.q < 0 or self.n_covariates < 0:
            raise ValueError("orders and covariate count must be >= 0")
        if self.m < max(self.p, self.q, 1):
            raise ValueError("truncation m must be >= max(p, q, 1)")
        if isinstance(self.link, str):
            object.__setattr__(self, "link", get_link(self.link))

    @property
    def n_params(self):
        """Dimension of the full parameter vector (nu, d, alpha, beta, phi, theta)."""
        return self.p + self.q + self.n_covariates + 3

    def param_names(self):
        names = ["nu", "d", "alpha"]
        names += [f"beta_{i}" for i in range(1, self.n_covariates + 1)]
        names += [f"phi_{i}" for i in range(1, self.p + 1)]
        names += [f"theta_{i}" for i in range(1, self.q + 1)]
        return names


@dataclass(frozen=True)
class ParamVector:
    """Parameters in the fixed ordering (nu, d, alpha, beta', phi', theta')."""

    nu: float
    d: float
    alpha: float
    beta: np.ndarray = field(default_factory=lambda: np.empty(0))
    phi: np.ndarray = field(default_factory=lambda: np.empty(0))
    theta: np.ndarray = field(default_factory=lambda: np.empty(0))

    def __post_init__(self):
        for name in ("beta", "phi", "theta"):
            object.__setattr__(
                self, name, np.atleast_1d(np.asarray(getattr(self, name), dtype=float))
            )
        if self.nu <= 0:
            raise ValueError("precision nu must be positive")
        if not -0.5 < self.d < 0.5:
            raise ValueError("d must lie in (-0.5, 0.5)")

    def to_array(self):
        return np.concatenate(
            ([self.nu, self.d, self.alpha], self.beta, self.phi, self.theta)
        )

    @classmethod
    def from_array(cls, arr, spec):
        arr = np.asarray(arr, dtype=float).ravel()
        if arr.size != spec.n_params:
            raise ValueError(
                f"expected {spec.n_params} parameters, got {arr.size}"
            )
        l, p = spec.n_covariates, spec.p
        return cls(
            nu=float(arr[0]),
            d=float(arr[1]),
            alpha=float(arr[2]),
            beta=arr[3 : 3 + l].copy(),
            phi=arr[3 + l : 3 + l + p].copy(),
            theta=arr[3 + l + p :].copy(),
        )


@dataclass(frozen=True)
class Sample:
    """Observed series y in (0, 1) plus, optionally, covariate rows.

    Row t of `x` (0-based row t-1) is the covariate vector entering the
    predictor at time t, i.e. the paper-time x_{t-1}.
    """

    y: np.ndarray
    x: Optional[np.ndarray] = None

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float).ravel()
        if y.size == 0:
            raise ValueError("empty sample")
        if np.any(y <= 0.0) or np.any(y >= 1.0) or not np.all(np.isfinite(y)):
            raise ValueError("observations must lie strictly inside (0, 1)")
        object.__setattr__(self, "y", y)
        x = self.x
        if x is None:
            x = np.empty((y.size, 0))
        else:
            x = np.asarray(x, dtype=float)
            if x.ndim == 1:
                x = x[:, None]
            if x.shape[0] != y.size:
                raise ValueError("covariate matrix must have one row per observation")
            if not np.all(np.isfinite(x)):
                raise ValueError("covariate matrix contains non-finite values")
        object.__setattr__(self, "x", x)

    @property
    def n(self):
        return self.y.size

    @property
    def n_covariates(self):
        return self.x.shape[1]


@dataclass(frozen=True)
class RecursionState:
    """Linear predictor, conditional mean and prediction errors, t = 1..n."""

    eta: np.ndarray
    mu: np.ndarray
    r: np.ndarray


def _check_compatible(spec, params, sample):
    if sample.n_covariates != spec.n_covariates:
        raise ValueError(
            f"sample has {sample.n_covariates} covariates, spec expects "
            f"{spec.n_covariates}"
        )
    if params.beta.size != spec.n_covariates:
        raise ValueError("beta length does not match covariate count")
    if params.phi.size != spec.p or params.theta.size != spec.q:
        raise ValueError("phi/theta length does not match model orders")
    if sample.n <= spec.p:
        raise ValueError("sample shorter than the autoregressive order")


def _ar_forcing(spec, params, gy, xb):
    """alpha + x'beta + AR part, for t = 1..n (AR part zero for t <= p)."""
    n = gy.size
    out = params.alpha + xb.copy()
    p = spec.p
    for j in range(1, p + 1):
        out[p:] += params.phi[j - 1] * (gy[p - j : n - j] - xb[p - j : n - j])
    return out


def _masked_lag_convolution(kernel, series, p):
    """sum_k kernel[k] * series[t-k] with series zeroed for t <= p.

    `series` is the full 0-based array for t = 1..n; entries at 0-based index
    < p are treated as zero, pre-sample lags contribute nothing.
    """
    masked = series.copy()
    masked[:p] = 0.0
    return np.convolve(masked, kernel)[: series.size]


def _filter_tail(c, forcing, p):
    """Solve u_t = forcing_t - sum_{k>=1} c_k u_{t-k} for t >= p+1, zero history."""
    a = np.concatenate(([1.0], c[1:]))
    out = np.zeros_like(forcing)
    out[p:] = lfilter([1.0], a, forcing[p:])
    return out


def forward_recursion(spec, params, sample):
    """Run the mean recursion over the sample.

    Returns a :class:`RecursionState` with eta, mu and r for t = 1..n.
    Raises :class:`RecursionDivergenceError` if eta becomes non-finite.
    """
    _check_compatible(spec, params, sample)
    gy = spec.link.forward(np.clip(sample.y, Y_EPS, 1.0 - Y_EPS))
    xb = sample.x @ params.beta if spec.n_covariates else np.zeros(sample.n)
    c = c_coeffs(params.theta, params.d, spec.m)

    p = spec.p
    forcing = _ar_forcing(spec, params, gy, xb)
    forcing += _masked_lag_convolution(np.concatenate(([0.0], c[1:])), gy, p)
    eta = _filter_tail(c, forcing, p)
    # initialization indices carry the deterministic part only
    eta[:p] = params.alpha + xb[:p]

    if not np.all(np.isfinite(eta)):
        raise RecursionDivergenceError(int(np.argmin(np.isfinite(eta))) + 1)

    mu = spec.link.inverse(eta)
    r = gy - eta
    r[:p] = 0.0
    return RecursionState(eta=eta, mu=mu, r=r)
