"""Classical comparators: Nelson-Aalen, Kaplan-Meier, Greenwood intervals and simultaneous bands."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .bands import Band, Target, evaluation_grid
from .critical import equal_precision_critical_value, hall_wellner_critical_value
from .data import SurvivalDataset
from .errors import InvalidParameter, NoEvents


@dataclass(frozen=True)
class StepEstimate:
    """Right-continuous step function with one jump per distinct event time.

    ``values[i]`` and ``variance[i]`` hold from ``jump_times[i]`` up to the
    next jump; before the first jump the estimate equals ``start`` with zero
    variance. ``at_risk`` and ``events`` are the risk-set sizes and event
    counts at each jump, and ``greenwood`` the running sum of
    ``d / (n (n - d))``.
    """

    kind: str
    jump_times: np.ndarray
    values: np.ndarray
    variance: np.ndarray
    at_risk: np.ndarray
    events: np.ndarray
    greenwood: np.ndarray
    n: int

    @property
    def start(self) -> float:
        return 1.0 if self.kind == "kaplan_meier" else 0.0

    def _index(self, t):
        return np.searchsorted(self.jump_times, np.asarray(t, dtype=float), side="right") - 1

    def _lookup(self, arr, t, before):
        idx = self._index(t)
        padded = np.concatenate([[before], arr])
        return padded[idx + 1]

    def __call__(self, t):
        return self._lookup(self.values, t, self.start)

    def var(self, t):
        return self._lookup(self.variance, t, 0.0)

    def greenwood_sum(self, t):
        return self._lookup(self.greenwood, t, 0.0)


def _risk_table(dataset: SurvivalDataset):
    times = dataset.times
    status = dataset.status.astype(bool)
    event_times = np.unique(times[status])
    order = np.sort(times)
    at_risk = times.size - np.searchsorted(order, event_times, side="left")
    events = np.bincount(
        np.searchsorted(event_times, times[status]), minlength=event_times.size
    )
    return event_times, at_risk.astype(float), events.astype(float)


def _greenwood_terms(at_risk, events):
    with np.errstate(divide="ignore"):
        return np.cumsum(np.where(at_risk > events, events / (at_risk * (at_risk - events)), np.inf))


def nelson_aalen(dataset: SurvivalDataset) -> StepEstimate:
    """Cumulative hazard ``sum d_i / n_i`` with variance ``sum d_i / n_i^2``."""
    t, n_i, d_i = _risk_table(dataset)
    values = np.cumsum(d_i / n_i)
    variance = np.cumsum(d_i / n_i**2)
    return StepEstimate(
        "nelson_aalen", t, values, variance, n_i, d_i, _greenwood_terms(n_i, d_i), dataset.n
    )


def kaplan_meier(dataset: SurvivalDataset) -> StepEstimate:
    """Product-limit survival with Greenwood variance."""
    t, n_i, d_i = _risk_table(dataset)
    values = np.cumprod(1.0 - d_i / n_i)
    gw = _greenwood_terms(n_i, d_i)
    with np.errstate(invalid="ignore"):
        variance = np.where(values > 0, values**2 * gw, 0.0)
    return StepEstimate("kaplan_meier", t, values, variance, n_i, d_i, gw, dataset.n)


def normal_quantile(level: float) -> float:
    """Two-sided standard normal critical value."""
    return float(norm.ppf(0.5 + level / 2.0))


def _usable_jumps(km: StepEstimate):
    """Event times where the Greenwood sum is finite (survival estimate still positive)."""
    return np.flatnonzero(np.isfinite(km.greenwood))


def _check_level(level):
    if not 0.0 < level < 1.0:
        raise InvalidParameter(f"level must lie in (0, 1), got {level!r}")


def _clamp(band_lower, band_upper):
    return np.clip(band_lower, 0.0, 1.0), np.clip(band_upper, 0.0, 1.0)


def hall_wellner_band(dataset: SurvivalDataset, level=0.95, t=None, **mc) -> Band:
    """Hall-Wellner band ``S(t) +/- c n^{-1/2} (1 + n sigma^2(t)) S(t)``.

    ``sigma^2`` is the Greenwood sum. The band is built up to the last event
    time with a finite Greenwood sum and held flat beyond it; ``c`` is the
    level-quantile of ``sup |B|`` over ``[0, K(t_max)]`` with
    ``K = n sigma^2 / (1 + n sigma^2)``.
    """
    if dataset.n_events == 0:
        raise NoEvents("Hall-Wellner band needs at least one event")
    _check_level(level)
    t = evaluation_grid() if t is None else np.asarray(t, dtype=float)
    km = kaplan_meier(dataset)
    n = dataset.n
    usable = _usable_jumps(km)
    surv = km(t)
    if usable.size == 0:
        return Band(Target.SURVIVAL, t, surv, surv.copy(), surv.copy(), level, 0.0, "hall_wellner")
    t_max = km.jump_times[usable[-1]]
    ns2_max = n * km.greenwood[usable[-1]]
    c = hall_wellner_critical_value(ns2_max / (1.0 + ns2_max), level, **mc)
    tt = np.minimum(t, t_max)
    s_at, ns2 = km(tt), n * km.greenwood_sum(tt)
    half = c / np.sqrt(n) * (1.0 + ns2) * s_at
    lower, upper = _clamp(s_at - half, s_at + half)
    return Band(Target.SURVIVAL, t, surv, np.minimum(lower, surv), np.maximum(upper, surv), level, float(c), "hall_wellner")


def log_ep_band(dataset: SurvivalDataset, level=0.95, t=None, **mc) -> Band:
    """Log-minus-log transformed equal-precision band ``[S^(1/theta), S^theta]``.

    ``theta = exp(c sigma(t) / log S(t))`` with ``sigma^2`` the Greenwood sum.
    The range runs from the first event time to the last event time with a
    finite Greenwood sum; before it the band is ``[lower(t_L), 1]`` and after
    it the band is held flat.
    """
    if dataset.n_events == 0:
        raise NoEvents("equal-precision band needs at least one event")
    _check_level(level)
    t = evaluation_grid() if t is None else np.asarray(t, dtype=float)
    km = kaplan_meier(dataset)
    n = dataset.n
    surv = km(t)
    usable = _usable_jumps(km)
    usable = usable[(km.values[usable] > 0) & (km.values[usable] < 1)]
    if usable.size < 2:
        return Band(Target.SURVIVAL, t, surv, surv.copy(), surv.copy(), level, 0.0, "log_ep")
    t_lo, t_hi = km.jump_times[usable[0]], km.jump_times[usable[-1]]
    ns2 = n * km.greenwood[usable[[0, -1]]]
    a_lo, a_hi = ns2 / (1.0 + ns2)
    c = equal_precision_critical_value(a_lo, a_hi, level, **mc)
    tt = np.clip(t, t_lo, t_hi)
    s_at = km(tt)
    theta = np.exp(c * np.sqrt(km.greenwood_sum(tt)) / np.log(s_at))
    lower, upper = s_at ** (1.0 / theta), s_at**theta
    upper = np.where(t < t_lo, 1.0, upper)
    lower, upper = _clamp(lower, upper)
    return Band(Target.SURVIVAL, t, surv, np.minimum(lower, surv), np.maximum(upper, surv), level, float(c), "log_ep")


def pointwise_intervals(estimate: StepEstimate, level=0.95, t=None) -> Band:
    """Collate pointwise normal intervals into a pseudo-band.

    Kaplan-Meier intervals are log-transformed, ``S exp(+/- z sqrt(greenwood))``;
    Nelson-Aalen intervals are linear, ``A +/- z sqrt(var)``. Intervals exist
    only between the first and last event time, so points of ``t`` outside
    that range are dropped from the returned band's grid.
    """
    _check_level(level)
    t = evaluation_grid() if t is None else np.asarray(t, dtype=float)
    jumps = estimate.jump_times
    t = t[(t >= jumps[0]) & (t <= jumps[-1])] if jumps.size else t[:0]
    z = normal_quantile(level)
    center = estimate(t)
    if estimate.kind == "kaplan_meier":
        gw = estimate.greenwood_sum(t)
        with np.errstate(invalid="ignore"):
            spread = np.where(np.isfinite(gw), np.exp(z * np.sqrt(gw)), np.inf)
            lower = np.where(center > 0, center / spread, 0.0)
            upper = np.where(center > 0, np.minimum(center * spread, 1.0), 0.0)
        target = Target.SURVIVAL
    elif estimate.kind == "nelson_aalen":
        sd = np.sqrt(estimate.var(t))
        lower, upper = np.maximum(center - z * sd, 0.0), center + z * sd
        target = Target.CUMHAZ
    else:
        raise InvalidParameter(f"unknown estimate kind {estimate.kind!r}")
    return Band(target, t, center, lower, upper, level, float(z), "pointwise")
