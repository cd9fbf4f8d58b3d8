"""Synthetic right-censored data and the coverage/area replication study."""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import bands as B
from .data import IntervalGrid, SurvivalDataset, augment, select_interval_count
from .errors import HazbandsError, InvalidParameter
from .frequentist import hall_wellner_band, kaplan_meier, log_ep_band, nelson_aalen, pointwise_intervals
from .hazard import CensoringModel, make_truth, median_survival
from .priors import DepGamma
from .sampler import ChainConfig, run_chain

# (method, target) pairs evaluated in every replicate
METHODS = (
    ("credible", "survival"),
    ("credible", "cumhaz"),
    ("hall_wellner", "survival"),
    ("log_ep", "survival"),
    ("pointwise", "survival"),
    ("pointwise", "cumhaz"),
)


def sample_event_time(truth, rng, size=None):
    """Event times by inversion, ``cumhaz^{-1}(E)`` with ``E ~ Exp(1)``; ``inf`` past the horizon."""
    e = rng.standard_exponential(size)
    return truth.inverse_cumhaz(e)


def apply_censoring(model: CensoringModel, T, rng):
    """Observed ``(Y, delta)``: ``Y = min(T, C, 1)``, ``delta = 1{T <= min(C, 1)}``."""
    T = np.asarray(T, dtype=float)
    if model is CensoringModel.ADMIN_ONLY:
        C = np.ones_like(T)
    else:
        C = rng.random(T.shape)
    cutoff = np.minimum(C, 1.0)
    delta = (T <= cutoff).astype(np.int8)
    return np.minimum(T, cutoff), delta


def simulate_dataset(truth, censoring: CensoringModel, n: int, rng) -> SurvivalDataset:
    T = sample_event_time(truth, rng, n)
    y, delta = apply_censoring(censoring, T, rng)
    # uniform censoring can produce C = 0 with probability ~2^-53; keep times positive
    y = np.maximum(y, np.finfo(float).tiny)
    return SurvivalDataset(y, delta)


@dataclass(frozen=True)
class Scenario:
    truth: str = "smooth"
    censoring: CensoringModel = CensoringModel.ADMIN_PLUS_UNIFORM
    n: int = 200
    gamma: float = 0.5
    prior: object = field(default_factory=DepGamma)
    level: float = 0.95
    replicates: int = 200
    n_draws: int = 5_000
    burn_in: int = 500

    def __post_init__(self):
        if self.n < 10:
            raise InvalidParameter("scenario needs n >= 10")
        if self.replicates < 1:
            raise InvalidParameter("scenario needs at least one replicate")
        if not self.gamma > 0:
            raise InvalidParameter("gamma must be positive")
        make_truth(self.truth)

    @property
    def K(self) -> int:
        return select_interval_count(self.n, self.gamma)

    @property
    def label(self) -> str:
        cens = "adm. + unif." if self.censoring is CensoringModel.ADMIN_PLUS_UNIFORM else "adm."
        return f"{self.truth}, n = {self.n}, {cens}, gamma = {self.gamma:g}"

    def describe(self) -> dict:
        d = asdict(self)
        d["censoring"] = self.censoring.value
        d["prior"] = {"family": type(self.prior).__name__, **asdict(self.prior)}
        d["K"] = self.K
        return d


def _truth_curves(truth, t):
    cum = truth.cumhaz(t)
    return {"cumhaz": cum, "survival": np.exp(-cum)}


def run_replicate(scenario: Scenario, seed, index: int) -> dict:
    """One synthetic dataset, posterior fit, and every band's coverage and area."""
    data_ss, chain_ss = np.random.SeedSequence([seed, index]).spawn(2)
    truth = make_truth(scenario.truth)
    try:
        data = simulate_dataset(truth, scenario.censoring, scenario.n, np.random.default_rng(data_ss))
        K = scenario.K
        summary = augment(data, IntervalGrid(K))
        config = ChainConfig(scenario.n_draws, scenario.burn_in, seed=chain_ss)
        chain = run_chain(scenario.prior, summary, config)
        t = B.evaluation_grid(K)
        level = scenario.level
        built = {
            ("credible", "survival"): B.credible_band(chain, B.Target.SURVIVAL, t, level),
            ("credible", "cumhaz"): B.credible_band(chain, B.Target.CUMHAZ, t, level),
            ("hall_wellner", "survival"): hall_wellner_band(data, level, t),
            ("log_ep", "survival"): log_ep_band(data, level, t),
            ("pointwise", "survival"): pointwise_intervals(kaplan_meier(data), level, t),
            ("pointwise", "cumhaz"): pointwise_intervals(nelson_aalen(data), level, t),
        }
        medians = B.median_draws(chain)
    except HazbandsError as exc:
        raise HazbandsError(f"replicate {index}: {exc}") from exc
    finite = medians[np.isfinite(medians)]
    return {
        "index": index,
        "covered": {k: B.band_covers(b, _truth_curves(truth, b.grid)[k[1]]) for k, b in built.items()},
        "area": {k: B.band_area(b) for k, b in built.items()},
        "median_mean": float(finite.mean()) if finite.size else math.nan,
        "median_var": float(finite.var(ddof=1)) if finite.size > 1 else math.nan,
        "median_beyond": int(medians.size - finite.size),
        "censored": float(1.0 - data.status.mean()),
        "acceptance": chain.acceptance_rates.tolist(),
    }


@dataclass
class CoverageReport:
    scenario: Scenario
    seed: int
    results: list

    @property
    def replicates(self) -> int:
        return len(self.results)

    def coverage(self, method, target) -> float:
        return sum(r["covered"][(method, target)] for r in self.results) / self.replicates

    def coverage_se(self, method, target) -> float:
        p = self.coverage(method, target)
        return math.sqrt(p * (1.0 - p) / self.replicates)

    def mean_area(self, method, target) -> float:
        return float(np.mean([r["area"][(method, target)] for r in self.results]))

    def area_se(self, method, target) -> float:
        a = np.array([r["area"][(method, target)] for r in self.results])
        return float(a.std(ddof=1) / math.sqrt(a.size)) if a.size > 1 else math.nan

    def table(self) -> dict:
        out = {}
        for method, target in METHODS:
            out[f"{method}/{target}"] = {
                "coverage": self.coverage(method, target),
                "coverage_se": self.coverage_se(method, target),
                "area": self.mean_area(method, target),
                "area_se": self.area_se(method, target),
            }
        return out

    def median_diagnostics(self) -> dict:
        means = np.array([r["median_mean"] for r in self.results])
        var = np.array([r["median_var"] for r in self.results])
        truth = median_survival(make_truth(self.scenario.truth))
        return {
            "true_median": truth,
            "mean_posterior_median": float(np.nanmean(means)),
            "mean_posterior_variance": float(np.nanmean(var)),
            "draws_beyond_horizon": int(sum(r["median_beyond"] for r in self.results)),
        }

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario.describe(),
            "seed": self.seed,
            "replicates": self.replicates,
            "censoring_rate": float(np.mean([r["censored"] for r in self.results])),
            "bands": self.table(),
            "median_survival": self.median_diagnostics(),
        }

    def to_json(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    def table_row(self) -> tuple[list, list]:
        header = ["scenario"]
        row = [self.scenario.label]
        for method, target in METHODS:
            header += [f"{method}/{target} coverage", f"{method}/{target} area"]
            row += [f"{self.coverage(method, target):.3f}", f"{self.mean_area(method, target):.4f}"]
        return header, row

    def to_csv(self, path) -> None:
        """One row per scenario, columns ``<method>/<target> coverage|area``."""
        write_table([self], path)


def write_table(reports, path) -> None:
    rows = [r.table_row() for r in reports]
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(rows[0][0])
        w.writerows(row for _, row in rows)


def full_scale_scenarios(prior=None, replicates: int = 1000, **kw) -> list[Scenario]:
    """The eight truth x censoring x sample-size settings."""
    prior = DepGamma() if prior is None else prior
    return [
        Scenario(truth, cens, n, prior=prior, replicates=replicates, **kw)
        for truth in ("smooth", "piecewise-linear")
        for n in (200, 2000)
        for cens in (CensoringModel.ADMIN_PLUS_UNIFORM, CensoringModel.ADMIN_ONLY)
    ]


def default_workers() -> int:
    env = os.environ.get("HAZBANDS_THREADS")
    if env:
        return max(1, int(env))
    return 1


def run_replication_study(scenario: Scenario, seed: int = 0, workers: int | None = None) -> CoverageReport:
    """Run every replicate of ``scenario``; a pure function of ``(scenario, seed)``."""
    workers = default_workers() if workers is None else workers
    idx = range(scenario.replicates)
    if workers <= 1:
        results = [run_replicate(scenario, seed, i) for i in idx]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_replicate, [scenario] * len(idx), [seed] * len(idx), idx))
    results.sort(key=lambda r: r["index"])
    return CoverageReport(scenario, seed, results)
