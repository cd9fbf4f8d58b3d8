"""Monte-Carlo critical values for Brownian-bridge sup functionals.

Two functionals of a standard Brownian bridge ``B`` on [0, 1] are needed by
the frequentist survival bands:

* Hall-Wellner: ``sup_{0 <= x <= a} |B(x)|``;
* equal precision: ``sup_{a_lo <= x <= a_hi} |B(x)| / sqrt(x (1 - x))``.

The second is a stationary Ornstein-Uhlenbeck process in disguise: with
``x = e^{2s} / (1 + e^{2s})`` the standardised bridge has covariance
``exp(-|s - s'|)``, so the critical value depends on the range only through
``0.5 * log(a_hi (1 - a_lo) / (a_lo (1 - a_hi)))``.

Each functional is simulated once per (level, paths, seed) on a fine grid
and tabulated against its range parameter. Discrete maxima are shifted up by
``0.5826 * sigma * sqrt(dt)`` to correct for sampling the path on a grid.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy.signal import lfilter

from .errors import InvalidParameter

# E[max of the continuous path] - E[max on a grid] ~ BETA * sigma * sqrt(dt)
BETA = 0.5825971579390106

HW_STEPS = 2048
HW_STRIDE = 16
OU_DT = 0.004
OU_HORIZON = 10.0
OU_STRIDE = 10
N_PATHS = 100_000
SEED = 20_240_611


def _chunks(n, size):
    for start in range(0, n, size):
        yield start, min(size, n - start)


@lru_cache(maxsize=16)
def hall_wellner_table(level: float, n_paths: int = N_PATHS, seed: int = SEED):
    """``(a, c)``: level-quantiles ``c`` of ``sup_{x <= a} |B(x)|`` on a grid of ``a``."""
    rng = np.random.default_rng(seed)
    m = HW_STEPS
    x = np.arange(1, m + 1) / m
    cols = np.arange(HW_STRIDE - 1, m, HW_STRIDE)
    runmax = np.empty((n_paths, cols.size), dtype=np.float32)
    for start, size in _chunks(n_paths, 4000):
        w = np.cumsum(rng.standard_normal((size, m)), axis=1) / math.sqrt(m)
        b = np.abs(w - x * w[:, -1:])
        runmax[start : start + size] = np.maximum.accumulate(b, axis=1)[:, cols]
    q = np.quantile(runmax, level, axis=0) + BETA / math.sqrt(m)
    return x[cols], q


@lru_cache(maxsize=16)
def equal_precision_table(level: float, n_paths: int = N_PATHS, seed: int = SEED):
    """``(s, c)``: level-quantiles of ``sup |OU|`` over ``[0, s]`` on a grid of ``s``."""
    rng = np.random.default_rng(seed)
    steps = int(round(OU_HORIZON / OU_DT))
    rho = math.exp(-OU_DT)
    innov = math.sqrt(1.0 - rho * rho)
    cols = np.arange(0, steps + 1, OU_STRIDE)
    runmax = np.empty((n_paths, cols.size), dtype=np.float32)
    for start, size in _chunks(n_paths, 2000):
        z = rng.standard_normal((size, steps + 1))
        # exact AR(1) skeleton of the stationary OU process; z[:, 0] is the start
        x0 = z[:, :1]
        path = lfilter([innov], [1.0, -rho], z[:, 1:], axis=1, zi=rho * x0)[0]
        path = np.abs(np.concatenate([x0, path], axis=1))
        runmax[start : start + size] = np.maximum.accumulate(path, axis=1)[:, cols]
    # OU has local variance 2 per unit time
    q = np.quantile(runmax, level, axis=0) + BETA * math.sqrt(2.0 * OU_DT)
    q[0] = np.quantile(runmax[:, 0], level)  # a single point: N(0, 1), no correction
    return cols * OU_DT, q


def hall_wellner_critical_value(a_upper: float, level: float = 0.95, n_paths=N_PATHS, seed=SEED) -> float:
    """``c`` with ``P(sup_{0 <= x <= a_upper} |B(x)| <= c) = level``."""
    if not 0.0 <= a_upper <= 1.0:
        raise InvalidParameter(f"a_upper must lie in [0, 1], got {a_upper}")
    if a_upper == 0.0:
        return 0.0
    a, c = hall_wellner_table(level, n_paths, seed)
    if a_upper < a[0]:
        # near 0 the bridge is Brownian motion: quantiles scale like sqrt(a)
        return float(c[0] * math.sqrt(a_upper / a[0]))
    return float(np.interp(a_upper, a, c))


def ou_horizon(a_lower: float, a_upper: float) -> float:
    return 0.5 * math.log(a_upper * (1.0 - a_lower) / (a_lower * (1.0 - a_upper)))


def equal_precision_critical_value(
    a_lower: float, a_upper: float, level: float = 0.95, n_paths=N_PATHS, seed=SEED
) -> float:
    """``c`` with ``P(sup_{a_lower <= x <= a_upper} |B(x)| / sqrt(x(1-x)) <= c) = level``."""
    if not 0.0 < a_lower <= a_upper < 1.0:
        raise InvalidParameter(f"need 0 < a_lower <= a_upper < 1, got ({a_lower}, {a_upper})")
    s = ou_horizon(a_lower, a_upper)
    grid, c = equal_precision_table(level, n_paths, seed)
    if s > grid[-1]:
        raise InvalidParameter(
            f"range ({a_lower}, {a_upper}) exceeds the tabulated horizon {grid[-1]}"
        )
    return float(np.interp(s, grid, c))
