import json
import math

import numpy as np
import pytest
from scipy import integrate

from hazbands.errors import HazbandsError, InvalidParameter
from hazbands.hazard import CensoringModel, ConstantHazard, make_truth
from hazbands.priors import IndepGamma
from hazbands import simulation as sim
from hazbands.simulation import (
    METHODS,
    Scenario,
    apply_censoring,
    default_workers,
    full_scale_scenarios,
    run_replicate,
    run_replication_study,
    sample_event_time,
    simulate_dataset,
)

from oracles import cum_smooth

ADM = CensoringModel.ADMIN_ONLY
UNIF = CensoringModel.ADMIN_PLUS_UNIFORM
N = 1_000_000


def test_exponential_law():
    rng = np.random.default_rng(1)
    t = sample_event_time(ConstantHazard(20.0), rng, N)
    assert np.all(np.isfinite(t))  # P(T > 1) = e^-20
    assert abs(t.mean() - 1 / 20) <= 3 * t.std() / math.sqrt(N)
    # with a unit rate, the horizon cuts the law: E[min(T, 1)] = 1 - e^-1
    t = np.minimum(sample_event_time(ConstantHazard(1.0), rng, N), 1.0)
    assert abs(t.mean() - (1 - math.exp(-1))) <= 3 * t.std() / math.sqrt(N)


def _prop_within_3se(flags, p):
    return abs(flags.mean() - p) <= 3 * math.sqrt(p * (1 - p) / flags.size)


def test_smooth_tail():
    t = sample_event_time(make_truth("smooth"), np.random.default_rng(2), N)
    assert _prop_within_3se(np.isinf(t), math.exp(-cum_smooth(1.0)))
    assert math.exp(-cum_smooth(1.0)) == pytest.approx(0.3033, abs=1e-4)


def test_piecewise_linear_tail():
    t = sample_event_time(make_truth("piecewise-linear"), np.random.default_rng(3), N)
    assert _prop_within_3se(t > 0.4, math.exp(-1.2))
    assert math.exp(-1.2) == pytest.approx(0.3012, abs=1e-4)


def test_apply_censoring():
    rng = np.random.default_rng(0)
    y, d = apply_censoring(ADM, [0.4, np.inf, 1.0], rng)
    assert y.tolist() == [0.4, 1.0, 1.0] and d.tolist() == [1, 0, 1]
    T = np.full(1000, 0.5)
    y, d = apply_censoring(UNIF, T, rng)
    assert np.all(y <= 0.5) and np.all((d == 1) == (y == 0.5))


@pytest.mark.parametrize(
    "truth, exact, rounded",
    [("smooth", 0.549302, 0.548), ("piecewise-linear", 0.338020, 0.339)],
)
def test_uniform_censoring_rate_quadrature(truth, exact, rounded):
    # P(T > C) with C ~ U(0, 1) is the integral of the survival function
    h = make_truth(truth)
    val, _ = integrate.quad(lambda c: float(h.survival(c)), 0, 1, points=[0.4, 0.6], epsabs=1e-12)
    assert val == pytest.approx(exact, abs=1e-6)
    assert val == pytest.approx(rounded, abs=2e-3)


def test_simulated_dataset():
    data = simulate_dataset(make_truth("smooth"), UNIF, 500, np.random.default_rng(7))
    assert data.n == 500 and np.all(data.times > 0) and np.all(data.times <= 1)
    again = simulate_dataset(make_truth("smooth"), UNIF, 500, np.random.default_rng(7))
    assert np.array_equal(data.times, again.times)


def test_scenario_validation():
    with pytest.raises(InvalidParameter):
        Scenario(n=9)
    with pytest.raises(InvalidParameter):
        Scenario(replicates=0)
    with pytest.raises(InvalidParameter):
        Scenario(gamma=0.0)
    with pytest.raises(InvalidParameter):
        Scenario(truth="bumpy")
    s = Scenario()
    assert s.K == 7 and s.n_draws == 5000 and s.burn_in == 500 and s.replicates == 200
    assert s.label == "smooth, n = 200, adm. + unif., gamma = 0.5"
    desc = s.describe()
    assert desc["prior"] == {"family": "DepGamma", "shape0": 1.5, "rate0": 1.0, "alpha": 1.0}
    assert desc["censoring"] == "adm-unif" and desc["K"] == 7
    json.dumps(desc)


def test_full_scale_scenarios():
    scen = full_scale_scenarios()
    assert len(scen) == 8 and len({(s.truth, s.n, s.censoring) for s in scen}) == 8
    assert all(s.replicates == 1000 for s in scen)


SMALL = Scenario(n=60, replicates=3, n_draws=400, burn_in=100)


def test_single_replicate_deterministic():
    one = Scenario(n=60, replicates=1, n_draws=400, burn_in=100)
    a = run_replication_study(one, seed=7).to_dict()
    b = run_replication_study(one, seed=7).to_dict()
    assert a == b
    assert a["replicates"] == 1
    assert set(a["bands"]) == {f"{m}/{t}" for m, t in METHODS}


def test_parallel_matches_serial():
    serial = run_replication_study(SMALL, seed=3, workers=1)
    parallel = run_replication_study(SMALL, seed=3, workers=2)
    assert serial.to_dict() == parallel.to_dict()


def test_report_accounting(tmp_path):
    rep = run_replication_study(SMALL, seed=1)
    for m, t in METHODS:
        covered = sum(r["covered"][(m, t)] for r in rep.results)
        assert rep.coverage(m, t) == covered / 3
        assert 0 <= rep.coverage(m, t) <= 1
        assert rep.mean_area(m, t) >= 0
    diag = rep.median_diagnostics()
    assert diag["true_median"] == pytest.approx(0.479, abs=1e-3)
    rep.to_json(tmp_path / "r.json")
    assert json.loads((tmp_path / "r.json").read_text())["seed"] == 1
    rep.to_csv(tmp_path / "r.csv")
    header, row = (tmp_path / "r.csv").read_text().splitlines()
    assert header.startswith("scenario,credible/survival coverage,credible/survival area")
    assert len(header.split(",")) == 1 + 2 * len(METHODS)


def test_replicates_use_independent_streams():
    a = run_replicate(SMALL, 0, 0)
    b = run_replicate(SMALL, 0, 1)
    assert a["censored"] != b["censored"] or a["area"] != b["area"]


def test_errors_carry_replicate_index(monkeypatch):
    def boom(*args, **kwargs):
        raise HazbandsError("sampler exploded")

    monkeypatch.setattr(sim, "run_chain", boom)
    with pytest.raises(HazbandsError, match="replicate 2"):
        run_replicate(SMALL, 0, 2)


def test_default_workers(monkeypatch):
    monkeypatch.delenv("HAZBANDS_THREADS", raising=False)
    assert default_workers() == 1
    monkeypatch.setenv("HAZBANDS_THREADS", "3")
    assert default_workers() == 3


def test_conjugate_prior_scenario():
    rep = run_replication_study(Scenario(n=80, prior=IndepGamma(), replicates=2, n_draws=300, burn_in=50), seed=0)
    assert all(r["acceptance"] == [1.0] * rep.scenario.K for r in rep.results)
