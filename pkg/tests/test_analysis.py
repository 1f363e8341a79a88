import math

import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given
from scipy import stats

from netcon.analysis import default_threads, monte_carlo, scaling_exponent, trace_metrics, wilson
from netcon.experiments import build
from netcon.scheduler import Simulation, trial_rng


@given(st.integers(1, 500).flatmap(lambda n: st.tuples(st.integers(0, n), st.just(n))))
def test_wilson_matches_scipy(kn):
    k, n = kn
    est = wilson(k, n)
    ci = stats.binomtest(k, n).proportion_ci(method="wilson")
    assert est.low == pytest.approx(ci.low, abs=1e-9)
    assert est.high == pytest.approx(ci.high, abs=1e-9)
    assert est.low <= est.point <= est.high


def test_wilson_frozen_value():
    est = wilson(8, 10)
    assert (round(est.low, 4), round(est.high, 4)) == (0.4902, 0.9433)
    assert str(est) == "0.8000 [0.4902, 0.9433] (8/10)"
    with pytest.raises(ValueError):
        wilson(0, 0)


def test_scaling_exponent_recovers_a_known_power():
    pts = [(n, 3.0 * n ** 2 * math.log(n)) for n in (32, 64, 128, 256)]
    fit = scaling_exponent(pts)
    assert fit.alpha == pytest.approx(2.0)
    assert fit.log_c == pytest.approx(math.log(3.0))
    assert fit.r_squared == pytest.approx(1.0)
    assert np.allclose(fit.residuals, 0)
    with pytest.raises(ValueError):
        scaling_exponent([(8, 1.0), (8, 2.0), (16, 3.0)])


def test_monte_carlo_records_failures_without_aborting():
    def exp(rng):
        x = rng.random()
        if x < 0.2:
            raise RuntimeError("boom")
        return {"success": x > 0.5, "steps": 3}

    batch = monte_carlo(exp, 50, base_seed=9)
    assert len(batch.reports) == 50
    assert batch.errors and all("boom" in r.error for r in batch.errors)
    assert batch.estimate.successes == sum(r.success for r in batch.reports)
    assert batch.mean_steps() == 3
    lines = batch.records().splitlines()
    assert len(lines) == 50 and any("error=RuntimeError: boom" in ln for ln in lines)
    with pytest.raises(ValueError):
        monte_carlo(exp, 0)


def test_monte_carlo_threads_do_not_change_results():
    exp = lambda rng: {"success": rng.random() < 0.5, "steps": int(rng.integers(100))}   # noqa: E731
    one = monte_carlo(exp, 40, 3, threads=1)
    four = monte_carlo(exp, 40, 3, threads=4)
    assert [(r.success, r.steps) for r in one.reports] == [(r.success, r.steps) for r in four.reports]


def test_monte_carlo_with_success_predicate():
    batch = monte_carlo(lambda rng: rng.integers(10), 20, 1, success=lambda x: x >= 0)
    assert batch.estimate.point == 1.0
    assert "result" in batch.reports[0].flags


def test_default_threads(monkeypatch):
    monkeypatch.setenv("NETCON_THREADS", "3")
    assert default_threads() == 3
    monkeypatch.setenv("NETCON_THREADS", "x")
    assert default_threads() == 1
    monkeypatch.delenv("NETCON_THREADS")
    assert default_threads() == 1


def test_trace_metrics():
    s = build("line-replication", length=3)
    res = Simulation(s.cfg, s.spec, trial_rng(7, 0)).run(record=True)
    m = trace_metrics(res.events, res.steps)
    assert m.effective == res.effective
    assert sum(m.phases.values()) == res.steps
    assert 0 < m.effective_fraction <= 1
    # merges outnumber splits, so the running component delta ends negative
    assert m.components[-1][1] < 0
    assert trace_metrics([], 10).steps == 10
