"""Histogram priors on hazard heights.

Six families: independent and autoregressive ("dependent") versions of the
Gamma, log-normal and log-Laplace laws. The dependent versions are built so
that each height has conditional mean equal to its left neighbour and a
conditional standard deviation proportional to it.

Heights are indexed left to right as ``heights[0], ..., heights[K-1]``; the
first height follows the family's base law and, in the dependent case, each
later one is drawn given its predecessor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import DomainError, InvalidParameter


def _positive(**params):
    for name, value in params.items():
        if not (value > 0 and math.isfinite(value)):
            raise InvalidParameter(f"{name} must be positive, got {value!r}")


def _gamma_logpdf(x, shape, rate):
    return shape * np.log(rate) - gammaln(shape) + (shape - 1.0) * np.log(x) - rate * x


def _lognormal_logpdf(x, mu, var):
    lx = np.log(x)
    return -lx - 0.5 * np.log(2.0 * np.pi * var) - (lx - mu) ** 2 / (2.0 * var)


def _loglaplace_logpdf(x, mu, rate):
    lx = np.log(x)
    return np.log(rate / 2.0) - lx - rate * np.abs(lx - mu)


def log_laplace_link(sigma: float) -> tuple[float, float]:
    """Location-shift factor and rate for the dependent log-Laplace step.

    With ``g = 2 s^2 + 1 + sqrt(4 s^4 + 5 s^2 + 1)`` the next height is
    log-Laplace with location ``log(prev * (g - s^2) / g)`` and rate
    ``sqrt(g / s^2)``, which gives conditional mean ``prev`` and conditional
    variance ``(s * prev)^2``.
    """
    if not sigma > 0:
        raise InvalidParameter(f"sigma must be positive, got {sigma!r}")
    s2 = sigma * sigma
    g = 2.0 * s2 + 1.0 + math.sqrt(4.0 * s2 * s2 + 5.0 * s2 + 1.0)
    return (g - s2) / g, math.sqrt(g / s2)


@dataclass(frozen=True)
class IndepGamma:
    shape: float = 1.5
    rate: float = 1.0

    def __post_init__(self):
        _positive(shape=self.shape, rate=self.rate)

    def sample(self, K, rng):
        return rng.gamma(self.shape, 1.0 / self.rate, size=K)

    def log_density(self, h):
        return float(np.sum(_gamma_logpdf(h, self.shape, self.rate)))


@dataclass(frozen=True)
class DepGamma:
    """First height ``Gamma(shape0, rate0)``; then ``Gamma(alpha, alpha / prev)``.

    The conditional variance is ``prev**2 / alpha``.
    """

    shape0: float = 1.5
    rate0: float = 1.0
    alpha: float = 1.0

    def __post_init__(self):
        _positive(shape0=self.shape0, rate0=self.rate0, alpha=self.alpha)

    def sample(self, K, rng):
        h = np.empty(K)
        h[0] = rng.gamma(self.shape0, 1.0 / self.rate0)
        for k in range(1, K):
            h[k] = rng.gamma(self.alpha, h[k - 1] / self.alpha)
        return h

    def log_density(self, h):
        out = _gamma_logpdf(h[0], self.shape0, self.rate0)
        if h.size > 1:
            out += np.sum(_gamma_logpdf(h[1:], self.alpha, self.alpha / h[:-1]))
        return float(out)


@dataclass(frozen=True)
class IndepLogNormal:
    mu0: float = 0.0
    sigma0: float = 1.0

    def __post_init__(self):
        _positive(sigma0=self.sigma0)

    def sample(self, K, rng):
        return np.exp(rng.normal(self.mu0, self.sigma0, size=K))

    def log_density(self, h):
        return float(np.sum(_lognormal_logpdf(h, self.mu0, self.sigma0**2)))


@dataclass(frozen=True)
class DepLogNormal:
    mu0: float = 0.0
    sigma0: float = 1.0
    sigma: float = 1.0

    def __post_init__(self):
        _positive(sigma0=self.sigma0, sigma=self.sigma)

    @property
    def step_var(self):
        return math.log1p(self.sigma**2)

    def sample(self, K, rng):
        v = self.step_var
        h = np.empty(K)
        h[0] = math.exp(rng.normal(self.mu0, self.sigma0))
        for k in range(1, K):
            # log-mean chosen so that E[h_k | h_{k-1}] = h_{k-1}
            h[k] = math.exp(rng.normal(math.log(h[k - 1]) - 0.5 * v, math.sqrt(v)))
        return h

    def log_density(self, h):
        out = _lognormal_logpdf(h[0], self.mu0, self.sigma0**2)
        if h.size > 1:
            v = self.step_var
            out += np.sum(_lognormal_logpdf(h[1:], np.log(h[:-1]) - 0.5 * v, v))
        return float(out)


@dataclass(frozen=True)
class IndepLogLaplace:
    mu0: float = 0.0
    theta0: float = 3.0

    def __post_init__(self):
        _positive(theta0=self.theta0)
        if not self.theta0 > 2:
            raise InvalidParameter("theta0 must exceed 2 for a finite second moment")

    def sample(self, K, rng):
        return np.exp(rng.laplace(self.mu0, 1.0 / self.theta0, size=K))

    def log_density(self, h):
        return float(np.sum(_loglaplace_logpdf(h, self.mu0, self.theta0)))


@dataclass(frozen=True)
class DepLogLaplace:
    mu0: float = 0.0
    theta0: float = 3.0
    sigma: float = 1.0

    def __post_init__(self):
        _positive(theta0=self.theta0, sigma=self.sigma)
        if not self.theta0 > 2:
            raise InvalidParameter("theta0 must exceed 2 for a finite second moment")

    def sample(self, K, rng):
        shift, rate = log_laplace_link(self.sigma)
        h = np.empty(K)
        h[0] = math.exp(rng.laplace(self.mu0, 1.0 / self.theta0))
        for k in range(1, K):
            h[k] = math.exp(rng.laplace(math.log(h[k - 1] * shift), 1.0 / rate))
        return h

    def log_density(self, h):
        out = _loglaplace_logpdf(h[0], self.mu0, self.theta0)
        if h.size > 1:
            shift, rate = log_laplace_link(self.sigma)
            out += np.sum(_loglaplace_logpdf(h[1:], np.log(h[:-1] * shift), rate))
        return float(out)


PriorSpec = IndepGamma | DepGamma | IndepLogNormal | DepLogNormal | IndepLogLaplace | DepLogLaplace

PRIORS = {
    "indep-gamma": IndepGamma,
    "dep-gamma": DepGamma,
    "indep-lognormal": IndepLogNormal,
    "dep-lognormal": DepLogNormal,
    "indep-loglaplace": IndepLogLaplace,
    "dep-loglaplace": DepLogLaplace,
}


def sample_prior(prior, K: int, seed=None):
    """Draw one histogram of ``K`` heights from the prior."""
    from .hazard import HazardHistogram

    if K < 1:
        raise InvalidParameter("K must be at least 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return HazardHistogram.from_heights(prior.sample(K, rng))


def log_prior_density(prior, heights) -> float:
    """Normalised log prior density of a height vector (Markov factorisation for dependent priors)."""
    h = np.asarray(heights, dtype=float).reshape(-1)
    if h.size == 0 or np.any(~(h > 0)) or np.any(~np.isfinite(h)):
        raise DomainError("heights must be finite and strictly positive")
    out = prior.log_density(h)
    if not math.isfinite(out):
        raise DomainError(f"log prior density is not finite at heights {h}")
    return out
