"""Fixed-radius simultaneous credible bands from posterior draws of a histogram hazard."""

from __future__ import annotations

import csv
import enum
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .data import IntervalGrid
from .errors import InsufficientDraws, InvalidParameter
from .hazard import LN2

MIN_DRAWS = 100
GRID_POINTS = 401


class Target(enum.Enum):
    HAZARD = "hazard"
    CUMHAZ = "cumhaz"
    SURVIVAL = "survival"


@dataclass(frozen=True)
class Band:
    """A center curve with lower/upper envelopes on ``grid``."""

    target: Target
    grid: np.ndarray
    center: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    level: float
    radius: float
    method: str = "credible"

    def __post_init__(self):
        if not (self.grid.shape == self.center.shape == self.lower.shape == self.upper.shape):
            raise ValueError("band arrays must share the grid's shape")

    def to_csv(self, path, scale: float = 1.0) -> None:
        """Write ``t, center, lower, upper``; ``scale`` maps t back to original units."""
        values = self.center, self.lower, self.upper
        if self.target is Target.HAZARD:
            values = tuple(v / scale for v in values)
        with Path(path).open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "center", "lower", "upper"])
            for row in zip(self.grid * scale, *values):
                w.writerow([repr(float(x)) for x in row])

    def envelope(self) -> dict:
        return {
            "method": self.method,
            "target": self.target.value,
            "level": self.level,
            "radius": self.radius,
            "area": band_area(self),
        }

    def to_json(self, path) -> None:
        Path(path).write_text(json.dumps(self.envelope(), indent=2) + "\n")


def evaluation_grid(K: int | None = None, n_points: int = GRID_POINTS) -> np.ndarray:
    """Equispaced points on [0, 1] plus every breakpoint of a ``K``-interval grid."""
    pts = np.linspace(0.0, 1.0, n_points)
    if K is not None:
        pts = np.union1d(pts, IntervalGrid(K).breakpoints)
    return pts


def _cumhaz_matrix(grid: IntervalGrid, t: np.ndarray) -> np.ndarray:
    """``A`` with ``A @ heights`` equal to the cumulative hazard at each ``t``."""
    lo = grid.breakpoints[:-1]
    return np.clip(t[:, None] - lo[None, :], 0.0, grid.width)


def draw_curves(draws: np.ndarray, target: Target, t: np.ndarray) -> np.ndarray:
    """Curves of many histogram draws (rows of ``draws``) evaluated at ``t``."""
    draws = np.atleast_2d(np.asarray(draws, dtype=float))
    grid = IntervalGrid(draws.shape[1])
    t = np.asarray(t, dtype=float)
    if target is Target.HAZARD:
        return draws[:, grid.locate(t)]
    cum = draws @ _cumhaz_matrix(grid, t).T
    if target is Target.CUMHAZ:
        return cum
    return np.exp(-cum)


def curve_of_draw(draw, target: Target, t) -> np.ndarray:
    """Curve of a single histogram draw (a :class:`HazardHistogram` or height vector)."""
    heights = getattr(draw, "heights", draw)
    return draw_curves(heights, target, t)[0]


def radius_index(n_draws: int, level: float) -> int:
    """1-based order statistic of the sup-distances used as the band radius."""
    return max(1, math.ceil(level * n_draws - 1e-9))


def credible_band(chain, target: Target, t=None, level: float = 0.95) -> Band:
    """Posterior mean plus/minus the smallest radius holding ``level`` of the draws.

    Distance is the sup over ``t`` of ``|draw - mean|``. The band is clipped
    at 0 from below and, for survival, at 1 from above.
    """
    draws = getattr(chain, "draws", chain)
    draws = np.atleast_2d(draws)
    if draws.shape[0] < MIN_DRAWS:
        raise InsufficientDraws(f"need at least {MIN_DRAWS} draws, got {draws.shape[0]}")
    if not 0.0 < level < 1.0:
        raise InvalidParameter("level must lie in (0, 1)")
    if t is None:
        t = evaluation_grid(draws.shape[1])
    t = np.asarray(t, dtype=float)
    curves = draw_curves(draws, target, t)
    return band_from_curves(curves, target, t, level)


def band_from_curves(curves: np.ndarray, target: Target, t: np.ndarray, level: float) -> Band:
    # mean as an offset from the first curve: identical draws give radius exactly 0
    center = curves[0] + (curves - curves[0]).mean(axis=0)
    dist = np.abs(curves - center).max(axis=1)
    r = float(np.partition(dist, radius_index(dist.size, level) - 1)[radius_index(dist.size, level) - 1])
    lower = np.maximum(center - r, 0.0)
    upper = center + r
    if target is Target.SURVIVAL:
        upper = np.minimum(upper, 1.0)
    return Band(target, t, center, lower, upper, level, r)


def median_draws(chain) -> np.ndarray:
    """Median survival time of every draw; ``inf`` where the survival stays above 1/2."""
    draws = np.atleast_2d(getattr(chain, "draws", chain))
    K = draws.shape[1]
    w = 1.0 / K
    cum = np.concatenate([np.zeros((draws.shape[0], 1)), np.cumsum(draws * w, axis=1)], axis=1)
    # first interval whose right end reaches ln 2
    k = np.argmax(cum[:, 1:] >= LN2, axis=1)
    rows = np.arange(draws.shape[0])
    m = k * w + (LN2 - cum[rows, k]) / draws[rows, k]
    return np.where(cum[:, -1] < LN2, np.inf, m)


def band_covers(band: Band, truth_curve) -> bool:
    truth_curve = np.asarray(truth_curve, dtype=float)
    if truth_curve.shape != band.grid.shape:
        raise InvalidParameter("truth curve must be evaluated on the band's grid")
    return bool(np.all((band.lower <= truth_curve) & (truth_curve <= band.upper)))


def band_area(band: Band) -> float:
    """Trapezoidal integral of ``upper - lower`` over the grid."""
    width = band.upper - band.lower
    return float(np.sum(0.5 * (width[1:] + width[:-1]) * np.diff(band.grid)))
