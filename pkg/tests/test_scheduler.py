import gzip

import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given, settings

from netcon.acceptance import frozen_configurations, uniformity_pvalue
from netcon.experiments import build
from netcon.model import Configuration
from netcon.protocol import RuleTable, parse_rules
from netcon.scheduler import (EmptyInteractionSet, Simulation, enumerate_interactions, is_quiescent, run, step,
                              trial_rng, write_trace)

SMALL = [("square", dict(n=6)), ("global-line", dict(n=5)), ("line-replication", dict(length=3)),
         ("no-leader-line-replication", dict(length=3, n=7)), ("square2", dict(n=4))]


def effective_count(cfg, spec):
    return sum(spec.interact(cfg.states[i.a], i.pa, cfg.states[i.b], i.pb, i.edge_bit) is not None
               for i in enumerate_interactions(cfg))


@settings(max_examples=25)
@given(st.sampled_from(SMALL), st.integers(0, 10 ** 6), st.integers(0, 40))
def test_incremental_counts_match_enumeration(setup, seed, steps):
    name, kw = setup
    s = build(name, **kw)
    sim = Simulation(s.cfg, s.spec, trial_rng(seed, 0))
    for _ in range(steps):
        if sim.advance() is None:
            break
    s.cfg.check()
    assert sim.total_interactions() == len(enumerate_interactions(s.cfg))
    assert sum(c[0] for c in sim.choices()) == effective_count(s.cfg, s.spec)


def test_effective_only_sampler_is_uniform():
    for j, (cfg, spec) in enumerate(frozen_configurations()):
        p, k = uniformity_pvalue(cfg, spec, 20000, 500 + j)
        assert k >= 2
        assert p > 0.001


def test_trial_rng_streams_are_reproducible_and_distinct():
    a = trial_rng(3, 1).random(4)
    assert np.array_equal(a, trial_rng(3, 1).random(4))
    assert not np.array_equal(a, trial_rng(3, 2).random(4))
    assert not np.array_equal(a, trial_rng(4, 1).random(4))


def test_same_seed_same_run():
    r1 = run(build("square", n=9).cfg, build("square", n=9).spec, trial_rng(1, 0), record=True)
    s = build("square", n=9)
    r2 = run(s.cfg, s.spec, trial_rng(1, 0), record=True)
    assert (r1.steps, r1.effective) == (r2.steps, r2.effective)
    assert [e.to_record() for e in r1.events] == [e.to_record() for e in r2.events]


def test_literal_scheduler_reaches_the_same_square():
    s = build("square", n=4)
    res = run(s.cfg, s.spec, 5, skip_ineffective=False)
    assert res.reason == "quiescent"
    assert s.check(s.cfg)[0]
    assert res.steps >= res.effective


def test_step_raises_on_empty_interaction_set():
    cfg = Configuration(["q0"])
    with pytest.raises(EmptyInteractionSet):
        step(cfg, RuleTable("empty", []), np.random.default_rng(0))


def test_max_steps_budget_is_respected():
    s = build("square", n=16)
    res = Simulation(s.cfg, s.spec, trial_rng(0, 0)).run(max_steps=50)
    assert res.hit_max_steps
    assert res.steps == 50


def test_stop_predicates():
    s = build("square", n=9)
    with pytest.raises(ValueError):
        Simulation(s.cfg, s.spec, trial_rng(0, 0)).run("never")
    res = Simulation(s.cfg, s.spec, trial_rng(0, 0)).run(lambda cfg: len(cfg.edges) >= 4)
    assert res.reason == "stop" and len(s.cfg.edges) >= 4


def test_quiescence_check():
    spec = RuleTable("t", parse_rules("(a,u),(b,d),0 -> c,c,1"))
    assert not is_quiescent(Configuration(["a", "b"]), spec)
    assert is_quiescent(Configuration(["a", "a"]), spec)


def test_trace_records_and_gzip(tmp_path):
    s = build("square", n=4)
    res = Simulation(s.cfg, s.spec, trial_rng(2, 0)).run(record=True)
    path = tmp_path / "trace.gz"
    write_trace(res.events, path)
    with gzip.open(path, "rt") as fh:
        lines = fh.read().splitlines()
    assert len(lines) == res.effective == 4      # three attachments and the closing bond
    first = lines[0].split(", ")
    assert first[1] == "cross"
    assert first[-2] != ""          # the first interaction merges two free nodes


def test_split_is_recorded():
    spec = RuleTable("cut", parse_rules("(a,r),(a,l),1 -> b,b,0"))
    cfg = Configuration.from_layout(["a", "a"], {0: (0, 0), 1: (1, 0)})
    res = Simulation(cfg, spec, trial_rng(0, 0)).run(record=True)
    assert res.effective == 1
    assert res.events[0].split is not None
    assert cfg.free_nodes() == [0, 1]
