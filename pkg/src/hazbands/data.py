"""Right-censored data: ingestion, interval grids and per-interval sufficient statistics."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DegenerateSample, EmptyData, InvalidParameter, MalformedRow


@dataclass(frozen=True)
class SurvivalDataset:
    """Follow-up times on [0, 1] with event indicators.

    ``horizon`` is the original-scale length of follow-up that maps to 1, so
    ``times * horizon`` recovers the recorded times.
    """

    times: np.ndarray
    status: np.ndarray
    horizon: float = 1.0

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float).reshape(-1)
        status = np.asarray(self.status).reshape(-1)
        if times.shape != status.shape:
            raise ValueError("times and status must have the same length")
        if times.size == 0:
            raise EmptyData("dataset has no records")
        if np.any(~np.isfinite(times)) or np.any(times <= 0) or np.any(times > 1):
            raise ValueError("times must lie in (0, 1]")
        if not np.all((status == 0) | (status == 1)):
            raise ValueError("status must be 0 or 1")
        times.flags.writeable = False
        status = status.astype(np.int8)
        status.flags.writeable = False
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "status", status)

    @property
    def n(self) -> int:
        return int(self.times.size)

    @property
    def n_events(self) -> int:
        return int(self.status.sum())


@dataclass(frozen=True)
class IntervalGrid:
    """``K`` equispaced intervals covering [0, 1]."""

    K: int

    def __post_init__(self):
        if int(self.K) != self.K or self.K < 1:
            raise InvalidParameter(f"K must be a positive integer, got {self.K!r}")
        object.__setattr__(self, "K", int(self.K))

    @property
    def breakpoints(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.K + 1)

    @property
    def width(self) -> float:
        return 1.0 / self.K

    def locate(self, t) -> np.ndarray:
        """Index of the interval containing each ``t``.

        Intervals are left-open and right-closed, ``(t_{k-1}, t_k]``, so an
        event exactly on a breakpoint is counted where its exposure ends;
        t = 0 belongs to the first interval.
        """
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.breakpoints, t, side="left") - 1
        return np.clip(idx, 0, self.K - 1)

    def dyadic(self) -> "IntervalGrid":
        """Smallest grid with a power-of-two count of at least ``K`` intervals."""
        return IntervalGrid(1 << max(self.K - 1, 0).bit_length())


@dataclass(frozen=True)
class IntervalSummary:
    """Event counts ``d`` and exposures ``T`` per interval of ``grid``."""

    grid: IntervalGrid
    d: np.ndarray
    T: np.ndarray = field(repr=False)

    def __post_init__(self):
        d = np.asarray(self.d, dtype=np.int64)
        T = np.asarray(self.T, dtype=float)
        if d.shape != (self.grid.K,) or T.shape != (self.grid.K,):
            raise ValueError("d and T must have one entry per interval")
        if np.any(d < 0) or np.any(T < 0):
            raise ValueError("d and T must be nonnegative")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "T", T)

    @property
    def K(self) -> int:
        return self.grid.K


def load_dataset(
    rows: Iterable,
    time_col: str = "time",
    status_col: str = "status",
    horizon: float | None = None,
) -> SurvivalDataset:
    """Build a dataset from raw records and rescale time to [0, 1].

    ``rows`` may hold mappings (e.g. from :class:`csv.DictReader`) keyed by
    ``time_col``/``status_col``, or plain ``(time, status)`` pairs. Times are
    divided by ``horizon`` (default: the largest recorded time); anything
    past the horizon is truncated to 1 and marked censored.
    """
    times = []
    status = []
    for i, row in enumerate(rows):
        if isinstance(row, Mapping):
            try:
                raw_t, raw_s = row[time_col], row[status_col]
            except KeyError as exc:
                raise MalformedRow(i, f"missing column {exc.args[0]!r}") from None
        else:
            try:
                raw_t, raw_s = row
            except (TypeError, ValueError):
                raise MalformedRow(i, "expected a (time, status) pair") from None
        try:
            t = float(raw_t)
        except (TypeError, ValueError):
            raise MalformedRow(i, f"unparseable time {raw_t!r}") from None
        if not math.isfinite(t) or t <= 0:
            raise MalformedRow(i, f"time must be positive, got {raw_t!r}")
        try:
            s = float(raw_s)
        except (TypeError, ValueError):
            raise MalformedRow(i, f"unparseable status {raw_s!r}") from None
        if s not in (0.0, 1.0):
            raise MalformedRow(i, f"status must be 0 or 1, got {raw_s!r}")
        times.append(t)
        status.append(int(s))
    if not times:
        raise EmptyData("no records")

    t = np.array(times)
    s = np.array(status, dtype=np.int8)
    if horizon is None:
        horizon = float(t.max())
    elif not horizon > 0:
        raise InvalidParameter(f"horizon must be positive, got {horizon!r}")
    beyond = t > horizon
    s[beyond] = 0
    t = np.minimum(t / horizon, 1.0)
    return SurvivalDataset(t, s, float(horizon))


def read_csv(path, time_col="time", status_col="status", horizon=None) -> SurvivalDataset:
    """Load a UTF-8 CSV with a header row."""
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise EmptyData(f"{path}: no header row")
        for col in (time_col, status_col):
            if col not in reader.fieldnames:
                raise MalformedRow(0, f"column {col!r} not in header {reader.fieldnames}")
        return load_dataset(reader, time_col, status_col, horizon)


def select_interval_count(n: int, gamma: float) -> int:
    """Interval count ``ceil((n / log n) ** (1 / (1 + 2 gamma)))``."""
    if n < 2:
        raise DegenerateSample(f"need n >= 2, got {n}")
    if not gamma > 0:
        raise InvalidParameter(f"gamma must be positive, got {gamma!r}")
    return max(1, math.ceil((n / math.log(n)) ** (1.0 / (1.0 + 2.0 * gamma))))


def augment(dataset: SurvivalDataset, grid: IntervalGrid) -> IntervalSummary:
    """Reduce a dataset to per-interval event counts and exposures."""
    lo = grid.breakpoints[:-1]
    # exposure of subject i in interval k: clip(t_i - lo_k, 0, width)
    exposure = np.clip(dataset.times[:, None] - lo[None, :], 0.0, grid.width)
    T = exposure.sum(axis=0)
    idx = grid.locate(dataset.times)
    d = np.bincount(idx, weights=dataset.status, minlength=grid.K).astype(np.int64)
    return IntervalSummary(grid, d, T)


def merge_pairs(summary: IntervalSummary) -> IntervalSummary:
    """Coarsen a summary by merging adjacent pairs of intervals."""
    if summary.K % 2:
        raise InvalidParameter("K must be even to merge pairs")
    d = summary.d.reshape(-1, 2).sum(axis=1)
    T = summary.T.reshape(-1, 2).sum(axis=1)
    return IntervalSummary(IntervalGrid(summary.K // 2), d, T)


def summary_from_counts(d: Sequence[int], T: Sequence[float]) -> IntervalSummary:
    return IntervalSummary(IntervalGrid(len(d)), np.asarray(d), np.asarray(T, dtype=float))
