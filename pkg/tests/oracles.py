"""Independent reference computations used by the tests.

Nothing here imports the package's numerical routines: every oracle is a
direct transcription of a definition (brute-force loops, quadrature,
closed forms, series) so that agreement is evidence rather than tautology.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy.special import gammaln

LN2 = math.log(2.0)


# ----- truth hazards -------------------------------------------------------

def lam_smooth(t):
    u = t + 0.05
    return 6.0 * (u**3 - 2.0 * u**2 + u) + 0.7


def cum_smooth(t):
    # antiderivative of 6(u^3 - 2u^2 + u) from 0.05 to t + 0.05, plus 0.7 t
    def F(u):
        return 6.0 * (u**4 / 4.0 - 2.0 * u**3 / 3.0 + u**2 / 2.0)

    return F(t + 0.05) - F(0.05) + 0.7 * t


def lam_pl(t):
    if t <= 0.4:
        return 3.0
    if t >= 0.6:
        return 1.5
    return 3.0 - 7.5 * (t - 0.4)


def cum_riemann(lam, t, panels=100_000):
    """Midpoint rule with ``panels`` cells."""
    h = t / panels
    mids = (np.arange(panels) + 0.5) * h
    return float(np.sum(np.vectorize(lam)(mids)) * h)


# ----- data reductions ------------------------------------------------------

def augment_loop(times, status, K):
    """Per-subject loop over intervals (right-closed membership)."""
    d = [0] * K
    T = [0.0] * K
    w = 1.0 / K
    for t, s in zip(times, status):
        for k in range(K):
            lo, hi = k * w, (k + 1) * w
            T[k] += max(0.0, min(t, hi) - lo)
        if s:
            k = min(K - 1, max(0, math.ceil(t * K) - 1))
            d[k] += 1
    return d, T


def nelson_aalen_loop(times, status):
    """``(jump_times, cumulative values)`` by scanning the sorted sample."""
    pairs = sorted(zip(times, status))
    out_t, out_v = [], []
    total = 0.0
    n = len(pairs)
    i = 0
    while i < n:
        t = pairs[i][0]
        j = i
        d = 0
        while j < n and pairs[j][0] == t:
            d += pairs[j][1]
            j += 1
        at_risk = n - i
        if d:
            total += d / at_risk
            out_t.append(t)
            out_v.append(total)
        i = j
    return out_t, out_v


def kaplan_meier_loop(times, status):
    pairs = sorted(zip(times, status))
    out_t, out_v = [], []
    s = 1.0
    n = len(pairs)
    i = 0
    while i < n:
        t = pairs[i][0]
        j = i
        d = 0
        while j < n and pairs[j][0] == t:
            d += pairs[j][1]
            j += 1
        if d:
            s *= 1.0 - d / (n - i)
            out_t.append(t)
            out_v.append(s)
        i = j
    return out_t, out_v


# ----- exact posteriors by quadrature ---------------------------------------

def gamma_logpdf(x, shape, rate):
    return shape * np.log(rate) - gammaln(shape) + (shape - 1.0) * np.log(x) - rate * x


def dep_gamma_log_posterior(lams, d, T, shape0, rate0, alpha):
    """Unnormalised log posterior on a list of broadcastable height arrays."""
    out = gamma_logpdf(lams[0], shape0, rate0)
    for k in range(1, len(lams)):
        out = out + gamma_logpdf(lams[k], alpha, alpha / lams[k - 1])
    for k, lam in enumerate(lams):
        out = out + d[k] * np.log(lam) - lam * T[k]
    return out


def _log_nodes(d, T, shape, nodes, width=9.0):
    # log-spaced nodes around the conjugate-ish centre, wide enough for the prior coupling
    centre = math.log((d + shape) / (T + 1.0))
    sd = 1.0 / math.sqrt(d + shape)
    return np.exp(np.linspace(centre - width * sd, centre + width * sd, nodes))


def dep_gamma_posterior_moments(d, T, shape0=1.5, rate0=1.0, alpha=1.0, nodes=400):
    """Posterior means and variances of each height via a tensor grid in log space.

    Each axis uses ``nodes`` log-spaced points; the change of variables
    contributes a factor ``lambda`` per axis (trapezoid in ``log lambda``).
    """
    K = len(d)
    axes = [_log_nodes(d[k], T[k], shape0 if k == 0 else alpha, nodes) for k in range(K)]
    mesh = np.meshgrid(*axes, indexing="ij")
    logp = dep_gamma_log_posterior(mesh, d, T, shape0, rate0, alpha)
    for m in mesh:
        logp = logp + np.log(m)
    w = np.exp(logp - logp.max())
    # trapezoid weights along each (uniform) log axis
    for k in range(K):
        tw = np.ones(nodes)
        tw[0] = tw[-1] = 0.5
        shape = [1] * K
        shape[k] = nodes
        w = w * tw.reshape(shape)
    Z = w.sum()
    means = [float((w * m).sum() / Z) for m in mesh]
    var = [float((w * m * m).sum() / Z) - mu**2 for m, mu in zip(mesh, means)]
    return means, var


def posterior_mean_1d(log_prior, d, T, lo=1e-6, hi=50.0, nodes=200_001):
    """Posterior mean of a single height under ``log_prior`` by log-grid trapezoid."""
    x = np.exp(np.linspace(math.log(lo), math.log(hi), nodes))
    logp = log_prior(x) + d * np.log(x) - x * T + np.log(x)
    w = np.exp(logp - logp.max())
    w[0] *= 0.5
    w[-1] *= 0.5
    return float((w * x).sum() / w.sum())


# ----- Brownian-bridge functionals -----------------------------------------

def kolmogorov_quantile(level):
    """Solve ``1 - 2 sum (-1)^(k-1) exp(-2 k^2 c^2) = level`` by bisection."""

    def cdf(c):
        return 1.0 - 2.0 * sum((-1) ** (k - 1) * math.exp(-2.0 * k * k * c * c) for k in range(1, 101))

    lo, hi = 0.3, 3.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if cdf(mid) < level:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def bridge_ep_quantile_direct(a_lo, a_hi, level, n_paths=20_000, steps=4096, seed=5):
    """Discrete-grid quantile of ``sup |B(x)| / sqrt(x(1-x))`` over [a_lo, a_hi].

    Sampling the bridge on a grid misses the continuous maximum, so this is
    biased low; tests use it as a lower reference.
    """
    rng = np.random.default_rng(seed)
    x = np.arange(1, steps + 1) / steps
    mask = (x >= a_lo) & (x <= a_hi)
    out = []
    for _ in range(n_paths // 1000):
        w = np.cumsum(rng.standard_normal((1000, steps)), axis=1) / math.sqrt(steps)
        b = w - x * w[:, -1:]
        out.append(np.max(np.abs(b[:, mask]) / np.sqrt(x[mask] * (1 - x[mask])), axis=1))
    return float(np.quantile(np.concatenate(out), level))


# ----- Haar -----------------------------------------------------------------

def haar_matrix_loop(L):
    """Entry-by-entry ``W`` from the dyadic-interval indicator definition."""
    n = 2 ** (L + 1)
    W = [[0.0] * n for _ in range(n)]
    for j in range(n):
        W[0][j] = 2.0 ** -(L + 1)
    for l in range(L + 1):
        for k in range(2**l):
            row = 2**l + k
            # level-(l+1) intervals have length 2^-(l+1); bin j is [j/n, (j+1)/n)
            for j in range(n):
                lo, hi = j / n, (j + 1) / n
                left = (2 * k) / 2 ** (l + 1), (2 * k + 1) / 2 ** (l + 1)
                right = (2 * k + 1) / 2 ** (l + 1), (2 * k + 2) / 2 ** (l + 1)
                inside_left = left[0] <= lo and hi <= left[1]
                inside_right = right[0] <= lo and hi <= right[1]
                W[row][j] = 2.0 ** (-(L + 1) + l / 2) * (float(inside_left) - float(inside_right))
    return np.array(W)


def ell_infty_loop(f, g):
    n = len(f)
    L = int(round(math.log2(n))) - 1
    total = abs(f[0] - g[0])
    for l in range(L + 1):
        best = 0.0
        for k in range(2**l):
            best = max(best, abs(f[2**l + k] - g[2**l + k]))
        total += 2.0 ** (l / 2) * best
    return total


# ----- exact right-censored log-likelihood -----------------------------------

def censored_loglik_direct(times, status, heights):
    """``sum_i [delta_i log lambda(Y_i) - Lambda(Y_i)]`` for a histogram on [0, 1]."""
    K = len(heights)
    w = 1.0 / K
    total = 0.0
    for t, s in zip(times, status):
        cum = 0.0
        for k in range(K):
            cum += heights[k] * max(0.0, min(t, (k + 1) * w) - k * w)
        k_t = min(K - 1, max(0, math.ceil(t * K) - 1))
        total += s * math.log(heights[k_t]) - cum
    return total


def all_binary(n):
    return list(itertools.product((0, 1), repeat=n))
