"""Posterior simulation for histogram hazards under the Poisson representation.

Given per-interval event counts ``d`` and exposures ``T`` the log likelihood
is ``sum(d * log(h) - h * T)``. Three samplers are provided:

* independent Gamma prior: exact conjugate draws from ``Gamma(d + a, T + b)``;
* dependent Gamma prior: Metropolis-within-Gibbs, sweeping left to right with
  Gamma independence proposals and a direct draw for the last interval;
* log-normal / log-Laplace priors: random-walk Metropolis on ``log h``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .data import IntervalSummary
from .errors import DomainError, InvalidConfig, InvalidParameter
from .priors import DepGamma, IndepGamma

_TINY = float(np.finfo(float).tiny)


@dataclass(frozen=True)
class ChainConfig:
    """Chain length and tuning.

    ``n_draws`` counts every iteration; the first ``burn_in`` are discarded.
    """

    n_draws: int = 10_000
    burn_in: int = 1_000
    seed: int | np.random.SeedSequence | None = 0
    init_epsilon: float = 1e-4
    proposal_epsilon: float = 1e-2
    rw_step: float = 0.3

    def __post_init__(self):
        if self.burn_in < 0 or self.n_draws - self.burn_in < 100:
            raise InvalidConfig(
                f"need burn_in >= 0 and at least 100 kept draws "
                f"(n_draws={self.n_draws}, burn_in={self.burn_in})"
            )
        if not (self.init_epsilon > 0 and self.proposal_epsilon > 0 and self.rw_step > 0):
            raise InvalidConfig("init_epsilon, proposal_epsilon and rw_step must be positive")


@dataclass(frozen=True)
class PosteriorChain:
    draws: np.ndarray  # (n_kept, K), one row per kept iteration
    acceptance_rates: np.ndarray
    config: ChainConfig
    summary: IntervalSummary

    def __len__(self):
        return self.draws.shape[0]

    def histograms(self):
        from .hazard import HazardHistogram

        return [HazardHistogram(self.summary.grid, row) for row in self.draws]


def log_likelihood(heights, summary: IntervalSummary) -> float:
    h = np.asarray(heights, dtype=float)
    if np.any(~(h > 0)):
        raise DomainError("heights must be strictly positive")
    return float(np.sum(summary.d * np.log(h) - h * summary.T))


def initial_state(summary: IntervalSummary, epsilon: float = 1e-4) -> np.ndarray:
    return summary.d / (summary.T + 1.0) + epsilon


def gibbs_step_indep_gamma(state, summary: IntervalSummary, prior: IndepGamma, rng):
    """Replace every height by a draw from its conjugate ``Gamma(d + shape, T + rate)`` law."""
    return rng.gamma(summary.d + prior.shape, 1.0 / (summary.T + prior.rate))


class _DepGammaKernel:
    """Precomputed constants for one dependent-Gamma sweep.

    Proposal shapes do not depend on the state, so standard Gamma variates can
    be drawn ahead of time and divided by the state-dependent rate.
    """

    def __init__(self, summary, prior: DepGamma, epsilon, literal=False):
        if not epsilon > 0:
            raise InvalidParameter("proposal epsilon must be positive")
        d = summary.d.astype(float)
        K = summary.K
        a = prior.alpha
        self.K = K
        self.alpha = a
        self.d = d.tolist()
        self.T = summary.T.tolist()
        self.rate0 = prior.rate0
        self.literal = literal
        shapes = np.empty(K)
        # target exponent of h in each full conditional (density ∝ h^(target-1) ...)
        target = np.empty(K)
        if K == 1:
            shapes[0] = target[0] = d[0] + prior.shape0
        else:
            target[0] = d[0] + prior.shape0 - a
            shapes[0] = target[0] if target[0] > 0 else epsilon
            target[1:-1] = d[1:-1]
            shapes[1:-1] = d[1:-1] + epsilon
            shapes[-1] = target[-1] = d[-1] + a
        if np.any(shapes <= 0):
            raise InvalidParameter("proposal shape must be positive")
        self.shapes = shapes
        # proposal shape minus target shape; the ratio carries (old/prop)**excess
        self.excess = (shapes - target).tolist()

    def sweep(self, lam, z, u, accepted):
        """Update ``lam`` in place; ``z`` are standard Gamma variates, ``u`` uniforms."""
        K, a, T = self.K, self.alpha, self.T
        if K == 1:
            lam[0] = z[0] / (self.rate0 + T[0])
            accepted[0] += 1
            return
        # first interval
        # a proposal that underflows to 0 has zero posterior density: reject it
        old = lam[0]
        prop = z[0] / (self.rate0 + T[0])
        if prop > 0.0:
            log_a = a * lam[1] * (1.0 / old - 1.0 / prop)
            if self.excess[0]:
                log_a += self.excess[0] * math.log(old / prop)
            if log_a >= 0.0 or u[0] < math.exp(log_a):
                lam[0] = prop
                accepted[0] += 1
        for k in range(1, K - 1):
            old = lam[k]
            prop = z[k] / (a / lam[k - 1] + T[k])
            if prop == 0.0:
                continue
            log_a = a * lam[k + 1] * (1.0 / old - 1.0 / prop)
            if self.literal:
                log_a = -log_a
            log_a += self.excess[k] * math.log(old / prop)
            if log_a >= 0.0 or u[k] < math.exp(log_a):
                lam[k] = prop
                accepted[k] += 1
        rate = (a * lam[K - 2] if self.literal else a / lam[K - 2]) + T[K - 1]
        lam[K - 1] = max(z[K - 1] / rate, _TINY)
        accepted[K - 1] += 1


def mh_sweep_dep_gamma(state, summary, prior: DepGamma, config: ChainConfig, rng, *, literal=False):
    """One left-to-right Metropolis-within-Gibbs sweep for the dependent Gamma prior.

    Returns ``(new_state, accepted)`` where ``accepted`` flags each interval.
    ``literal=True`` swaps in an alternative sign for the middle-interval
    ratio and ``alpha * prev`` as the last-interval rate; this variant does
    not leave the posterior invariant and exists only so tests can show it.
    """
    kernel = _DepGammaKernel(summary, prior, config.proposal_epsilon, literal)
    lam = [float(x) for x in state]
    accepted = [0] * summary.K
    z = rng.standard_gamma(kernel.shapes).tolist()
    u = rng.random(summary.K).tolist()
    kernel.sweep(lam, z, u, accepted)
    return np.array(lam), np.array(accepted, dtype=bool)


def mh_sweep_generic(state, summary, prior, config: ChainConfig, rng, steps=None):
    """Random-walk Metropolis on ``log h``, one interval at a time.

    The log acceptance ratio is the change in log likelihood plus log prior
    plus the log Jacobian ``log h_new - log h_old`` of the log transform.
    ``steps`` overrides the Gaussian increments (mainly for testing).
    """
    h = np.array(state, dtype=float)
    K = h.size
    if steps is None:
        steps = config.rw_step * rng.standard_normal(K)
    logu = np.log(rng.random(K))
    accepted = np.zeros(K, dtype=bool)
    d, T = summary.d, summary.T
    lp_old = prior.log_density(h)
    for k in range(K):
        old = h[k]
        new = old * math.exp(steps[k])
        h[k] = new
        lp_new = prior.log_density(h)
        log_a = d[k] * steps[k] - T[k] * (new - old) + (lp_new - lp_old) + steps[k]
        if logu[k] < log_a:
            lp_old = lp_new
            accepted[k] = True
        else:
            h[k] = old
    return h, accepted


def run_chain(prior, summary: IntervalSummary, config: ChainConfig, *, literal=False) -> PosteriorChain:
    """Simulate the posterior of the histogram heights; deterministic given ``config.seed``."""
    rng = np.random.default_rng(config.seed)
    K = summary.K
    n, burn = config.n_draws, config.burn_in
    n_keep = n - burn

    if isinstance(prior, IndepGamma):
        draws = rng.gamma(
            summary.d + prior.shape, 1.0 / (summary.T + prior.rate), size=(n, K)
        )[burn:]
        return PosteriorChain(draws, np.ones(K), config, summary)

    draws = np.empty((n_keep, K))
    lam = initial_state(summary, config.init_epsilon)

    if isinstance(prior, DepGamma):
        kernel = _DepGammaKernel(summary, prior, config.proposal_epsilon, literal)
        z_all = rng.standard_gamma(kernel.shapes, size=(n, K)).tolist()
        u_all = rng.random((n, K)).tolist()
        state = lam.tolist()
        accepted = [0] * K
        for j in range(n):
            kernel.sweep(state, z_all[j], u_all[j], accepted)
            if j >= burn:
                draws[j - burn] = state
        rates = np.array(accepted) / n
        return PosteriorChain(draws, rates, config, summary)

    accepted = np.zeros(K)
    for j in range(n):
        lam, acc = mh_sweep_generic(lam, summary, prior, config, rng)
        accepted += acc
        if j >= burn:
            draws[j - burn] = lam
    return PosteriorChain(draws, accepted / n, config, summary)


def write_draws_csv(chain: PosteriorChain, path) -> None:
    """One row per kept draw, one column per interval height."""
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"h{k + 1}" for k in range(chain.summary.K)])
        writer.writerows(chain.draws.tolist())
