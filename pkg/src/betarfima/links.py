"""Link functions mapping the unit interval to the real line.

Each link bundles the forward map g, its inverse and its derivative g'.
The inverse maps are clipped so that they always return values strictly
inside (0, 1), which keeps downstream beta-density evaluations finite even
when a linear predictor overflows the representable range of the link.
"""

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import special as sp

__all__ = ["Link", "get_link", "link_eval", "LINKS"]

# clip guard for inverse links; matches the guard used on observations
_EPS = 1e-12


def _check_unit_open(mu):
    mu = np.asarray(mu, dtype=float)
    if mu.size and (np.any(mu <= 0.0) or np.any(mu >= 1.0)):
        raise ValueError("link argument must lie strictly inside (0, 1)")
    return mu


@dataclass(frozen=True)
class Link:
    """A twice-differentiable monotone bijection from (0, 1) onto the reals."""

    name: str
    _forward: Callable = field(repr=False)
    _inverse: Callable = field(repr=False)
    _derivative: Callable = field(repr=False)

    def forward(self, mu):
        """g(mu); raises ValueError outside the open unit interval."""
        return self._forward(_check_unit_open(mu))

    def inverse(self, eta):
        """g^-1(eta), clipped into the open unit interval."""
        return np.clip(self._inverse(np.asarray(eta, dtype=float)), _EPS, 1.0 - _EPS)

    def derivative(self, mu):
        """g'(mu); strictly positive on (0, 1) for every shipped link."""
        return self._derivative(_check_unit_open(mu))

    def __reduce__(self):
        # links live in a registry; pickle by name so worker processes
        # reconstruct the same callables
        return (get_link, (self.name,))


def _cloglog_deriv(mu):
    return -1.0 / ((1.0 - mu) * np.log1p(-mu))


def _loglog_deriv(mu):
    return -1.0 / (mu * np.log(mu))


LINKS = {
    "logit": Link("logit", sp.logit, sp.expit, lambda mu: 1.0 / (mu * (1.0 - mu))),
    "probit": Link(
        "probit", sp.ndtri, sp.ndtr,
        lambda mu: np.sqrt(2.0 * np.pi) * np.exp(0.5 * sp.ndtri(mu) ** 2),
    ),
    "cloglog": Link(
        "cloglog",
        lambda mu: np.log(-np.log1p(-mu)),
        lambda eta: -np.expm1(-np.exp(eta)),
        _cloglog_deriv,
    ),
    "loglog": Link(
        "loglog",
        lambda mu: -np.log(-np.log(mu)),
        lambda eta: np.exp(-np.exp(-eta)),
        _loglog_deriv,
    ),
}


def get_link(name):
    """Look up a link by name ('logit', 'probit', 'cloglog' or 'loglog')."""
    try:
        return LINKS[name]
    except KeyError:
        raise ValueError(
            f"unknown link {name!r}; available: {sorted(LINKS)}"
        ) from None


def link_eval(link, mu):
    """Evaluate (g(mu), g^-1(g(mu)), g'(mu)) in one call.

    Raises ValueError when mu is 0 or 1.
    """
    g = link.forward(mu)
    return g, link.inverse(g), link.derivative(mu)
