"""Command-line entry point: ``hazbands {fit,simulate,frequentist,haar}``.

Every option can also come from a flat ``key = value`` file passed with
``--config``; keys are option names with or without the leading dashes.
Options given on the command line win over the file.

Exit status: 0 success, 1 input/output failure, 2 bad configuration,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import bands as B
from .data import IntervalGrid, augment, read_csv, select_interval_count
from .errors import (
    BadShape,
    EmptyData,
    HazbandsError,
    InvalidConfig,
    InvalidParameter,
    MalformedRow,
    TooLarge,
)
from .frequentist import (
    hall_wellner_band,
    kaplan_meier,
    log_ep_band,
    nelson_aalen,
    pointwise_intervals,
)
from .hazard import CensoringModel
from .haar import ell_infty_distance, to_heights, to_wavelet
from .priors import PRIORS, DepGamma, DepLogLaplace, DepLogNormal, IndepGamma, IndepLogLaplace, IndepLogNormal
from .sampler import ChainConfig, run_chain
from .simulation import Scenario, full_scale_scenarios, run_replication_study, write_table

EXIT_IO, EXIT_CONFIG, EXIT_NUMERIC = 1, 2, 3
HELP_WIDTH = 100

FREQ_METHODS = ("nelson-aalen", "kaplan-meier", "hall-wellner", "log-ep", "pointwise")


class ConfigError(Exception):
    pass


class _HelpFormatter(argparse.ArgumentDefaultsHelpFormatter):
    # options whose default needs words rather than a value spell it out themselves
    def _get_help_string(self, action):
        if "(default:" in (action.help or ""):
            return action.help
        return super()._get_help_string(action)


def _formatter(prog):
    return _HelpFormatter(prog, width=HELP_WIDTH)


def _add_data_args(p):
    p.add_argument("input", help="CSV file with a header row")
    p.add_argument("--time-col", default="time", help="column holding follow-up times")
    p.add_argument("--status-col", default="status", help="column holding event indicators (1 = event)")
    p.add_argument(
        "--horizon", type=float, default=None,
        help="follow-up length mapped to 1; later times are censored (default: largest time)",
    )


def _add_prior_args(p):
    p.add_argument("--prior", choices=sorted(PRIORS), default="dep-gamma", help="histogram prior family")
    p.add_argument(
        "--alpha", type=float, default=None,
        help="indep-gamma shape or dep-gamma dependence parameter (default: 1.5 or 1 respectively)",
    )
    p.add_argument("--beta", type=float, default=1.0, help="indep-gamma rate")
    p.add_argument("--alpha0", type=float, default=1.5, help="dep-gamma shape of the first height")
    p.add_argument("--beta0", type=float, default=1.0, help="dep-gamma rate of the first height")
    p.add_argument("--mu0", type=float, default=0.0, help="log-normal / log-Laplace location")
    p.add_argument("--sigma0", type=float, default=1.0, help="log-normal scale of the first height")
    p.add_argument("--theta0", type=float, default=3.0, help="log-Laplace rate of the first height (> 2)")
    p.add_argument("--sigma", type=float, default=1.0, help="dependent log-normal / log-Laplace step size")


def _add_chain_args(p, draws, burnin):
    p.add_argument("--draws", type=int, default=draws, help="MCMC iterations including burn-in")
    p.add_argument("--burnin", type=int, default=burnin, help="iterations discarded at the start")
    p.add_argument("--seed", type=int, default=0, help="master random seed")
    p.add_argument("--level", type=float, default=0.95, help="credibility / confidence level")


def _add_common(p):
    p.add_argument("--out", default="hazbands-out", help="output directory")
    p.add_argument("--config", default=None, help="flat key=value file of option defaults (default: none)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hazbands",
        description="Credible bands for histogram hazards and classical survival comparators.",
        formatter_class=_formatter,
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    fit = sub.add_parser("fit", help="posterior bands for a survival dataset", formatter_class=_formatter)
    _add_data_args(fit)
    _add_prior_args(fit)
    fit.add_argument("--gamma", type=float, default=0.5, help="smoothness in the interval-count rule")
    fit.add_argument("--k", type=int, default=None, help="number of intervals, overriding --gamma (default: from --gamma)")
    _add_chain_args(fit, 10_000, 1_000)
    fit.add_argument("--save-draws", action="store_true", help="also write every kept draw")
    _add_common(fit)

    sim = sub.add_parser("simulate", help="coverage/area replication study", formatter_class=_formatter)
    sim.add_argument("--truth", choices=("smooth", "piecewise-linear"), default="smooth", help="true hazard")
    sim.add_argument(
        "--cens", choices=[c.value for c in CensoringModel], default="adm-unif",
        help="censoring scenario",
    )
    sim.add_argument("--n", type=int, default=200, help="sample size per replicate")
    sim.add_argument("--gamma", type=float, default=0.5, help="smoothness in the interval-count rule")
    _add_prior_args(sim)
    sim.add_argument("--replicates", type=int, default=200, help="number of synthetic datasets")
    _add_chain_args(sim, 5_000, 500)
    sim.add_argument(
        "--full-scale", action="store_true",
        help="run all eight truth/censoring/size scenarios with 1000 replicates each",
    )
    sim.add_argument(
        "--threads", type=int, default=None,
        help="worker processes (default: $HAZBANDS_THREADS, else 1)",
    )
    _add_common(sim)

    freq = sub.add_parser("frequentist", help="Nelson-Aalen / Kaplan-Meier curves and bands", formatter_class=_formatter)
    _add_data_args(freq)
    freq.add_argument("--method", choices=FREQ_METHODS + ("all",), default="all", help="estimator or band")
    freq.add_argument("--level", type=float, default=0.95, help="confidence level")
    _add_common(freq)

    haar = sub.add_parser("haar", help="Haar round trip for a dyadic histogram", formatter_class=_formatter)
    haar.add_argument("heights", help="comma-separated heights, power-of-two count")
    haar.add_argument(
        "--compare", default=None, help="second histogram to measure the multiscale distance to (default: none)"
    )
    haar.add_argument("--config", default=None, help="flat key=value file of option defaults (default: none)")
    return parser


def read_config(path) -> dict:
    """Parse a flat ``key = value`` file; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key.lstrip("-").replace("-", "_")] = value
    return out


def _subparser(parser, name):
    for action in parser._subparsers._group_actions:
        return action.choices[name]


def _apply_config(parser, argv, args):
    """Re-parse with file values as defaults so explicit flags still win."""
    sub = _subparser(parser, args.command)
    cfg = read_config(args.config)
    known = {a.dest: a for a in sub._actions if a.dest not in ("help", "config")}
    unknown = sorted(set(cfg) - set(known))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    for key, value in cfg.items():
        action = known[key]
        if not action.option_strings:
            raise ConfigError(f"{key} is positional and cannot come from a config file")
        if isinstance(action, argparse._StoreTrueAction):
            value = value.lower() in ("1", "true", "yes", "on")
        elif action.type is not None:
            try:
                value = action.type(value)
            except ValueError:
                raise ConfigError(f"bad value for {key}: {value!r}") from None
        if action.choices is not None and value not in action.choices:
            raise ConfigError(f"{key} must be one of {sorted(action.choices)}")
        sub.set_defaults(**{key: value})
    return parser.parse_args(argv)


def make_prior(args):
    name = args.prior
    if name == "indep-gamma":
        return IndepGamma(1.5 if args.alpha is None else args.alpha, args.beta)
    if name == "dep-gamma":
        return DepGamma(args.alpha0, args.beta0, 1.0 if args.alpha is None else args.alpha)
    if name == "indep-lognormal":
        return IndepLogNormal(args.mu0, args.sigma0)
    if name == "dep-lognormal":
        return DepLogNormal(args.mu0, args.sigma0, args.sigma)
    if name == "indep-loglaplace":
        return IndepLogLaplace(args.mu0, args.theta0)
    return DepLogLaplace(args.mu0, args.theta0, args.sigma)


def _finite_or_none(x):
    return float(x) if math.isfinite(x) else None


def _write_band(band, out: Path, stem: str, scale: float, extra=None):
    band.to_csv(out / f"{stem}.csv", scale)
    meta = band.envelope()
    if band.target is B.Target.HAZARD:
        meta["radius"] = band.radius / scale
    meta["time_scale"] = scale
    meta.update(extra or {})
    (out / f"{stem}.json").write_text(json.dumps(meta, indent=2) + "\n")


def cmd_fit(args) -> dict:
    data = read_csv(args.input, args.time_col, args.status_col, args.horizon)
    prior = make_prior(args)
    K = args.k if args.k is not None else select_interval_count(data.n, args.gamma)
    if K < 1:
        raise InvalidParameter("--k must be at least 1")
    summary = augment(data, IntervalGrid(K))
    chain = run_chain(prior, summary, ChainConfig(args.draws, args.burnin, seed=args.seed))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    t = B.evaluation_grid(K)
    radii = {}
    for target in B.Target:
        band = B.credible_band(chain, target, t, args.level)
        _write_band(band, out, f"band_{target.value}", data.horizon)
        radii[target.value] = band.radius / (data.horizon if target is B.Target.HAZARD else 1.0)
    medians = B.median_draws(chain) * data.horizon
    qs = np.quantile(medians, [0.025, 0.5, 0.975], method="inverted_cdf")
    report = {
        "input": str(args.input),
        "n": data.n,
        "events": data.n_events,
        "horizon": data.horizon,
        "K": K,
        "prior": {"family": args.prior, **vars(prior)},
        "draws": args.draws,
        "burn_in": args.burnin,
        "seed": args.seed,
        "level": args.level,
        "acceptance_rates": chain.acceptance_rates.tolist(),
        "posterior_mean_heights": (chain.draws.mean(axis=0) / data.horizon).tolist(),
        "radius": radii,
        "median_survival": {
            "q025": _finite_or_none(qs[0]),
            "q50": _finite_or_none(qs[1]),
            "q975": _finite_or_none(qs[2]),
            "beyond_horizon_fraction": float(np.mean(~np.isfinite(medians))),
        },
    }
    (out / "summary.json").write_text(json.dumps(report, indent=2) + "\n")
    if args.save_draws:
        np.savetxt(
            out / "draws.csv", chain.draws / data.horizon, delimiter=",",
            header=",".join(f"h{k + 1}" for k in range(K)), comments="",
        )
    return report


def cmd_simulate(args) -> list:
    prior = make_prior(args)
    chain_kw = dict(gamma=args.gamma, level=args.level, n_draws=args.draws, burn_in=args.burnin)
    if args.full_scale:
        scenarios = full_scale_scenarios(prior, **chain_kw)
    else:
        scenarios = [
            Scenario(args.truth, CensoringModel(args.cens), args.n, prior=prior,
                     replicates=args.replicates, **chain_kw)
        ]
    # validate chain settings before any work starts
    ChainConfig(args.draws, args.burnin)
    if args.threads is not None and args.threads < 1:
        raise InvalidParameter("--threads must be at least 1")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    reports = [run_replication_study(s, args.seed, args.threads) for s in scenarios]
    write_table(reports, out / "coverage.csv")
    payload = [r.to_dict() for r in reports]
    (out / "report.json").write_text(json.dumps(payload if len(payload) > 1 else payload[0], indent=2) + "\n")
    return reports


def _step_band(est, t, target):
    v = est(t)
    return B.Band(target, t, v, v.copy(), v.copy(), float("nan"), 0.0, est.kind)


def cmd_frequentist(args) -> list:
    data = read_csv(args.input, args.time_col, args.status_col, args.horizon)
    if not 0.0 < args.level < 1.0:
        raise InvalidParameter("--level must lie in (0, 1)")
    na, km = nelson_aalen(data), kaplan_meier(data)
    t = np.union1d(B.evaluation_grid(), km.jump_times)
    methods = FREQ_METHODS if args.method == "all" else (args.method,)
    built = []
    for m in methods:
        if m == "nelson-aalen":
            built.append(("nelson_aalen", _step_band(na, t, B.Target.CUMHAZ)))
        elif m == "kaplan-meier":
            built.append(("kaplan_meier", _step_band(km, t, B.Target.SURVIVAL)))
        elif m == "hall-wellner":
            built.append(("hall_wellner", hall_wellner_band(data, args.level, t)))
        elif m == "log-ep":
            built.append(("log_ep", log_ep_band(data, args.level, t)))
        else:
            built.append(("pointwise_survival", pointwise_intervals(km, args.level, t)))
            built.append(("pointwise_cumhaz", pointwise_intervals(na, args.level, t)))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for stem, band in built:
        _write_band(band, out, stem, data.horizon, {"n": data.n, "events": data.n_events})
    return built


def _parse_vector(text) -> np.ndarray:
    try:
        return np.array([float(x) for x in text.split(",") if x.strip()])
    except ValueError:
        raise InvalidParameter(f"not a comma-separated list of numbers: {text!r}") from None


def cmd_haar(args) -> dict:
    h = _parse_vector(args.heights)
    c = to_wavelet(h)
    back = to_heights(c)
    report = {
        "coefficients": c.tolist(),
        "roundtrip_max_error": float(np.max(np.abs(back - h))),
    }
    if args.compare is not None:
        g = _parse_vector(args.compare)
        report["ell_infty_distance"] = ell_infty_distance(c, to_wavelet(g))
        report["sup_distance"] = float(np.max(np.abs(h - g))) if g.shape == h.shape else None
    print(json.dumps(report, indent=2))
    return report


COMMANDS = {"fit": cmd_fit, "simulate": cmd_simulate, "frequentist": cmd_frequentist, "haar": cmd_haar}


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(argv)
    try:
        if args.config is not None:
            args = _apply_config(parser, argv, args)
        COMMANDS[args.command](args)
    except (FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        print(f"hazbands: cannot read {exc.filename}: {exc.strerror}", file=sys.stderr)
        return EXIT_IO
    except (OSError, EmptyData, MalformedRow, UnicodeDecodeError) as exc:
        print(f"hazbands: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, InvalidConfig, InvalidParameter, BadShape, TooLarge) as exc:
        print(f"hazbands: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (HazbandsError, FloatingPointError, ArithmeticError) as exc:
        print(f"hazbands: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return 0


def entry() -> None:
    sys.exit(main())
