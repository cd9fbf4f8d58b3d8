"""Piecewise-constant and reference hazards, derived curves, and limiting-process quantities.

All hazards live on [0, 1]. Every hazard object exposes vectorised
``hazard(t)`` and ``cumhaz(t)`` plus ``kinks``, the interior points where the
hazard is not smooth (used to split quadrature panels).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .data import IntervalGrid
from .errors import IntegrandSingular, InvalidParameter, NoFiniteMedian, OutOfDomain

LN2 = math.log(2.0)
BEYOND_HORIZON = math.inf
"""Returned in place of a median when the survival curve stays above 1/2 on [0, 1]."""

SINGULAR_CUTOFF = 1.0 - 1e-6


def _check_domain(t):
    t = np.asarray(t, dtype=float)
    if np.any(~(t >= 0.0)) or np.any(t > 1.0):
        raise OutOfDomain("t must lie in [0, 1]")
    return t


class _Hazard:
    kinks: tuple = ()

    def hazard(self, t):
        raise NotImplementedError

    def cumhaz(self, t):
        raise NotImplementedError

    def survival(self, t):
        return np.exp(-self.cumhaz(t))

    def inverse_cumhaz(self, x, tol=1e-10):
        """Solve ``cumhaz(t) = x`` by vectorised bisection; ``inf`` past the horizon."""
        x = np.asarray(x, dtype=float)
        lo = np.zeros_like(x)
        hi = np.ones_like(x)
        n_iter = max(1, math.ceil(math.log2(1.0 / tol)))
        for _ in range(n_iter):
            mid = 0.5 * (lo + hi)
            below = self.cumhaz(mid) < x
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        out = 0.5 * (lo + hi)
        return np.where(x > self.cumhaz(1.0), np.inf, out)


@dataclass(frozen=True)
class ConstantHazard(_Hazard):
    level: float

    def __post_init__(self):
        if not self.level > 0:
            raise InvalidParameter("constant hazard level must be positive")

    def hazard(self, t):
        return np.full_like(np.asarray(t, dtype=float), self.level)

    def cumhaz(self, t):
        return self.level * np.asarray(t, dtype=float)

    def inverse_cumhaz(self, x, tol=None):
        x = np.asarray(x, dtype=float)
        return np.where(x > self.level, np.inf, x / self.level)


class SmoothHazard(_Hazard):
    """``6((t+0.05)^3 - 2(t+0.05)^2 + t + 0.05) + 0.7``."""

    shift = 0.05

    @staticmethod
    def _poly(u):
        # antiderivative of u^3 - 2u^2 + u
        return u**4 / 4.0 - 2.0 * u**3 / 3.0 + u**2 / 2.0

    def hazard(self, t):
        u = np.asarray(t, dtype=float) + self.shift
        return 6.0 * (u**3 - 2.0 * u**2 + u) + 0.7

    def cumhaz(self, t):
        t = np.asarray(t, dtype=float)
        return 6.0 * (self._poly(t + self.shift) - self._poly(self.shift)) + 0.7 * t

    def __eq__(self, other):
        return isinstance(other, SmoothHazard)

    def __hash__(self):
        return hash("smooth")

    def __repr__(self):
        return "SmoothHazard()"


class PiecewiseLinearHazard(_Hazard):
    """3 on [0, 0.4], 1.5 on [0.6, 1], linear in between."""

    kinks = (0.4, 0.6)

    def hazard(self, t):
        return np.interp(np.asarray(t, dtype=float), [0.0, 0.4, 0.6, 1.0], [3.0, 3.0, 1.5, 1.5])

    def cumhaz(self, t):
        t = np.asarray(t, dtype=float)
        s = np.clip(t - 0.4, 0.0, 0.2)
        ramp = 3.0 * s - 3.75 * s**2
        return 3.0 * np.minimum(t, 0.4) + ramp + 1.5 * np.clip(t - 0.6, 0.0, None)

    def __eq__(self, other):
        return isinstance(other, PiecewiseLinearHazard)

    def __hash__(self):
        return hash("piecewise-linear")

    def __repr__(self):
        return "PiecewiseLinearHazard()"


@dataclass(frozen=True, eq=False)
class HazardHistogram(_Hazard):
    """Piecewise-constant hazard with one positive height per interval of ``grid``."""

    grid: IntervalGrid
    heights: np.ndarray

    def __post_init__(self):
        h = np.array(self.heights, dtype=float).reshape(-1)
        if h.size != self.grid.K:
            raise InvalidParameter(f"expected {self.grid.K} heights, got {h.size}")
        if np.any(~(h > 0)) or np.any(~np.isfinite(h)):
            raise InvalidParameter("heights must be finite and positive")
        h.flags.writeable = False
        object.__setattr__(self, "heights", h)

    @classmethod
    def from_heights(cls, heights):
        heights = np.asarray(heights, dtype=float)
        return cls(IntervalGrid(heights.size), heights)

    @property
    def kinks(self):
        return tuple(self.grid.breakpoints[1:-1])

    @property
    def _cum_at_breaks(self):
        return np.concatenate([[0.0], np.cumsum(self.heights * self.grid.width)])

    def hazard(self, t):
        return self.heights[self.grid.locate(t)]

    def cumhaz(self, t):
        t = np.asarray(t, dtype=float)
        idx = self.grid.locate(t)
        return self._cum_at_breaks[idx] + self.heights[idx] * (t - self.grid.breakpoints[idx])

    def inverse_cumhaz(self, x, tol=None):
        x = np.asarray(x, dtype=float)
        cum = self._cum_at_breaks
        k = np.clip(np.searchsorted(cum, x, side="left") - 1, 0, self.grid.K - 1)
        t = self.grid.breakpoints[k] + (x - cum[k]) / self.heights[k]
        return np.where(x > cum[-1], np.inf, t)

    def __eq__(self, other):
        return (
            isinstance(other, HazardHistogram)
            and self.grid == other.grid
            and np.array_equal(self.heights, other.heights)
        )

    def __hash__(self):
        return hash((self.grid.K, self.heights.tobytes()))


class CensoringModel(enum.Enum):
    """Censoring laws on [0, 1]; both censor everyone still at risk at t = 1."""

    ADMIN_ONLY = "adm"
    ADMIN_PLUS_UNIFORM = "adm-unif"

    def survivor(self, u):
        """``G_bar(u) = P(C >= u)``."""
        u = np.asarray(u, dtype=float)
        if self is CensoringModel.ADMIN_ONLY:
            return np.ones_like(u)
        return np.clip(1.0 - u, 0.0, 1.0)


TRUTHS = {
    "smooth": SmoothHazard,
    "piecewise-linear": PiecewiseLinearHazard,
}


def make_truth(kind: str, level: float | None = None):
    if kind == "constant":
        return ConstantHazard(1.0 if level is None else level)
    try:
        return TRUTHS[kind]()
    except KeyError:
        raise InvalidParameter(f"unknown truth hazard {kind!r}") from None


def true_hazard_eval(kind, t):
    """Evaluate a reference hazard (a name or hazard object) at ``t``."""
    h = make_truth(kind) if isinstance(kind, str) else kind
    t = _check_domain(t)
    return h.hazard(t)


def cumulative_hazard(h, t):
    t = _check_domain(t)
    out = h.cumhaz(t)
    return float(out) if np.ndim(out) == 0 else out


def survival(h, t):
    t = _check_domain(t)
    out = np.exp(-h.cumhaz(t))
    return float(out) if np.ndim(out) == 0 else out


def median_survival(h) -> float:
    """Smallest t with cumulative hazard ln 2, or ``BEYOND_HORIZON``."""
    if float(h.cumhaz(1.0)) < LN2:
        return BEYOND_HORIZON
    if isinstance(h, (HazardHistogram, ConstantHazard)):
        return float(h.inverse_cumhaz(LN2))
    if isinstance(h, PiecewiseLinearHazard) and LN2 <= 1.2:
        return LN2 / 3.0
    return brentq(lambda t: float(h.cumhaz(t)) - LN2, 0.0, 1.0, xtol=1e-15, rtol=1e-15)


def m0(truth, cens: CensoringModel, u):
    """Probability of still being at risk at ``u``: ``G_bar(u) exp(-cumhaz(u))``.

    Under uniform censoring this vanishes at u = 1 (the left limit of the
    censoring survivor is 0 there).
    """
    u = _check_domain(u)
    out = cens.survivor(u) * np.exp(-truth.cumhaz(u))
    return float(out) if np.ndim(out) == 0 else out


def _integrate(f, a, b, tol):
    if b <= a:
        return 0.0
    return quad(f, a, b, epsabs=tol, epsrel=0.0, limit=200)[0]


def _split_points(truth, a, b):
    pts = [a] + [k for k in getattr(truth, "kinks", ()) if a < k < b] + [b]
    return pts


def _u0_integrand(truth, cens):
    def f(u):
        return float(truth.hazard(u)) / (float(cens.survivor(u)) * math.exp(-float(truth.cumhaz(u))))

    return f


def u0(truth, cens: CensoringModel, t, tol=1e-8) -> float:
    """``U0(t) = int_0^t hazard / M0``: the variance clock of the limiting process."""
    t = float(_check_domain(t))
    if cens is CensoringModel.ADMIN_PLUS_UNIFORM and t > SINGULAR_CUTOFF:
        raise IntegrandSingular(
            f"hazard/M0 is not integrable up to t={t} under uniform censoring; "
            f"use t <= {SINGULAR_CUTOFF}"
        )
    f = _u0_integrand(truth, cens)
    pts = _split_points(truth, 0.0, t)
    panel_tol = tol / max(1, len(pts) - 1)
    return sum(_integrate(f, lo, hi, panel_tol) for lo, hi in zip(pts[:-1], pts[1:]))


def u0_curve(truth, cens: CensoringModel, grid, tol=1e-8) -> np.ndarray:
    """``U0`` on an increasing grid starting at 0, accumulated panel by panel."""
    grid = _check_domain(grid)
    if grid[0] != 0.0 or np.any(np.diff(grid) <= 0):
        raise InvalidParameter("grid must be strictly increasing from 0")
    if cens is CensoringModel.ADMIN_PLUS_UNIFORM and grid[-1] > SINGULAR_CUTOFF:
        raise IntegrandSingular(f"grid extends past {SINGULAR_CUTOFF} under uniform censoring")
    f = _u0_integrand(truth, cens)
    panel_tol = tol / len(grid)
    incr = np.empty(len(grid) - 1)
    for j, (lo, hi) in enumerate(zip(grid[:-1], grid[1:])):
        pts = _split_points(truth, lo, hi)
        incr[j] = sum(_integrate(f, a, b, panel_tol) for a, b in zip(pts[:-1], pts[1:]))
    return np.concatenate([[0.0], np.cumsum(incr)])


def median_bvm_variance(truth, cens: CensoringModel) -> float:
    """Asymptotic variance ``U0(m0) / (4 f0(m0)^2)`` of root-n times the median error."""
    m = median_survival(truth)
    if not math.isfinite(m):
        raise NoFiniteMedian("median survival lies beyond the horizon")
    density = float(truth.hazard(m)) * math.exp(-float(truth.cumhaz(m)))
    return u0(truth, cens, m) / (4.0 * density**2)


def simulate_limit_paths(truth, cens, n_paths, grid_size=2048, seed=None, horizon=1.0):
    """Sample paths of ``W(U0(t))`` on ``grid_size`` equispaced points of [0, horizon].

    Returns ``(grid, paths)`` with ``paths`` of shape ``(n_paths, grid_size)``.
    """
    grid = np.linspace(0.0, horizon, grid_size)
    clock = u0_curve(truth, cens, grid)
    rng = np.random.default_rng(seed)
    steps = rng.standard_normal((n_paths, grid_size - 1)) * np.sqrt(np.diff(clock))
    paths = np.concatenate([np.zeros((n_paths, 1)), np.cumsum(steps, axis=1)], axis=1)
    return grid, paths


def simulate_limit_sup_quantile(
    truth, cens, level=0.95, n_paths=10_000, grid_size=2048, seed=None, horizon=1.0, chunk=2000
) -> float:
    """Monte-Carlo ``level``-quantile of ``sup_t |W(U0(t))|`` over a grid."""
    if not 0.0 < level < 1.0:
        raise InvalidParameter("level must lie in (0, 1)")
    if n_paths < 1000:
        raise InvalidParameter("n_paths must be at least 1000")
    grid = np.linspace(0.0, horizon, grid_size)
    sd = np.sqrt(np.diff(u0_curve(truth, cens, grid)))
    rng = np.random.default_rng(seed)
    sups = np.empty(n_paths)
    for start in range(0, n_paths, chunk):
        m = min(chunk, n_paths - start)
        paths = np.cumsum(rng.standard_normal((m, grid_size - 1)) * sd, axis=1)
        sups[start : start + m] = np.abs(paths).max(axis=1)
    return float(np.quantile(sups, level))
