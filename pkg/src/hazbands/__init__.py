"""Histogram-hazard posteriors with sup-norm credible bands for right-censored data."""

from .bands import Band, Target, band_area, band_covers, credible_band, evaluation_grid, median_draws
from .data import (
    IntervalGrid,
    IntervalSummary,
    SurvivalDataset,
    augment,
    load_dataset,
    read_csv,
    select_interval_count,
)
from .errors import HazbandsError
from .frequentist import hall_wellner_band, kaplan_meier, log_ep_band, nelson_aalen, pointwise_intervals
from .haar import build_haar_matrix, ell_infty_distance, to_heights, to_wavelet
from .hazard import (
    CensoringModel,
    ConstantHazard,
    HazardHistogram,
    PiecewiseLinearHazard,
    SmoothHazard,
    make_truth,
    median_bvm_variance,
    median_survival,
    u0,
)
from .priors import DepGamma, DepLogLaplace, DepLogNormal, IndepGamma, IndepLogLaplace, IndepLogNormal
from .sampler import ChainConfig, PosteriorChain, run_chain
from .simulation import CoverageReport, Scenario, run_replication_study, simulate_dataset

__all__ = [
    "Band",
    "CensoringModel",
    "ChainConfig",
    "ConstantHazard",
    "CoverageReport",
    "DepGamma",
    "DepLogLaplace",
    "DepLogNormal",
    "HazardHistogram",
    "HazbandsError",
    "IndepGamma",
    "IndepLogLaplace",
    "IndepLogNormal",
    "IntervalGrid",
    "IntervalSummary",
    "PiecewiseLinearHazard",
    "PosteriorChain",
    "Scenario",
    "SmoothHazard",
    "SurvivalDataset",
    "Target",
    "augment",
    "band_area",
    "band_covers",
    "build_haar_matrix",
    "credible_band",
    "ell_infty_distance",
    "evaluation_grid",
    "hall_wellner_band",
    "kaplan_meier",
    "load_dataset",
    "log_ep_band",
    "make_truth",
    "median_bvm_variance",
    "median_draws",
    "median_survival",
    "nelson_aalen",
    "pointwise_intervals",
    "read_csv",
    "run_chain",
    "run_replication_study",
    "select_interval_count",
    "simulate_dataset",
    "to_heights",
    "to_wavelet",
    "u0",
]

__version__ = "0.1.0"
