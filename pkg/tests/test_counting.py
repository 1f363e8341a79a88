from fractions import Fraction
from math import comb

import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given, settings

from netcon.counting import (CountingState, UidNodeState, biased_walk_hits, ehrenfest_recurrence, failure_bound,
                             ruin_probability, run_counting_upper_bound, run_simple_uid, run_uid_counting,
                             sample_ids, uid_interact, walk_parameters)
from netcon.scheduler import trial_rng


@settings(max_examples=30)
@given(st.integers(3, 8).flatmap(lambda b: st.tuples(st.just(b), st.integers(b + 2, 200))), st.integers(0, 10 ** 6))
def test_counting_invariants_hold_every_step(bn, seed):
    b, n = bn
    res = run_counting_upper_bound(n, b, seed, check=True)
    assert b <= res.r0 <= n - 1
    assert res.total >= res.leader_events
    # r1 caught up with r0 at halting
    assert res.effective == 2 * res.r0


def test_counting_state_rules():
    st_ = CountingState.initial(10, 2)
    assert not st_.leader_meets("q1")       # unarmed leaders ignore q1
    assert st_.leader_meets("q0") and st_.leader_meets("q0")
    assert st_.armed
    assert st_.leader_meets("q1")
    assert not st_.leader_meets("q2")
    st_.check()
    st_.leader_meets("q1")
    assert st_.r0 == st_.r1
    assert st_.leader_meets("q2") and st_.halted
    assert not st_.leader_meets("q0")


def test_fast_forward_has_the_same_law():
    n, b, trials = 24, 3, 600
    fast = [run_counting_upper_bound(n, b, trial_rng(61, i)) for i in range(trials)]
    slow = [run_counting_upper_bound(n, b, trial_rng(62, i), fast_forward=False) for i in range(trials)]
    for attr in ("r0", "total"):
        x = np.array([getattr(r, attr) for r in fast], float)
        y = np.array([getattr(r, attr) for r in slow], float)
        se = np.sqrt(x.var() / trials + y.var() / trials)
        assert abs(x.mean() - y.mean()) < 4 * se


def test_counting_rejects_tiny_populations():
    with pytest.raises(ValueError):
        run_counting_upper_bound(5, 5)


def test_counting_record_line():
    r = run_counting_upper_bound(40, 4, 1)
    fields = r.record(7, 40, 4).split(", ")
    assert fields[:3] == ["7", "40", "4"] and fields[-1] in ("0", "1")


# ---------------------------------------------------------------------------


@pytest.mark.parametrize("b, x, want", [(1, 3, Fraction(1)), (2, 2, Fraction(1, 3)), (3, 4, Fraction(1, 21))])
def test_ruin_probability_values(b, x, want):
    assert ruin_probability(b, x) == want


def test_ruin_probability_domain():
    with pytest.raises(ValueError):
        ruin_probability(3, 1)
    with pytest.raises(ValueError):
        ruin_probability(0, 2)


@pytest.mark.parametrize("b, x", [(2, 2.0), (4, 1.5)])
def test_biased_walks_match_the_formula(b, x):
    walks = 200_000
    p = float(ruin_probability(b, Fraction(x)))
    hits = biased_walk_hits(b, x, walks, 63)
    assert abs(hits / walks - p) < 4 * (p * (1 - p) / walks) ** 0.5


@given(st.integers(1, 25))
def test_ehrenfest_recurrence_is_inverse_stationary_law(R):
    assert ehrenfest_recurrence(R, -R) == 2 ** (2 * R)
    assert sum(1 / ehrenfest_recurrence(R, k) for k in range(-R, R + 1)) == 1
    assert ehrenfest_recurrence(R, 0) == Fraction(4 ** R, comb(2 * R, R))


def test_walk_parameters_and_bound():
    n_prime, x = walk_parameters(100, 5)
    assert n_prime == 49 and x == Fraction(44, 5)
    assert failure_bound(100, 5) == Fraction(1, 10 ** 6)
    with pytest.raises(ValueError):
        failure_bound(100, 2)


# ---------------------------------------------------------------------------


@settings(max_examples=30)
@given(st.integers(2, 12), st.integers(1, 3), st.integers(0, 10 ** 6))
def test_simple_uid_output_is_a_count_of_seen_ids(n, b, seed):
    out, steps = run_simple_uid(n, b, seed)
    assert 1 <= out <= n
    assert steps >= b + 1


def test_simple_uid_is_reproducible():
    assert run_simple_uid(6, 2, 5) == run_simple_uid(6, 2, 5)
    with pytest.raises(ValueError):
        run_simple_uid(1, 2)


def test_uid_interact_uses_the_state_before_the_meeting():
    u, v = UidNodeState(9), UidNodeState(3)
    assert not uid_interact(u, v, 1)
    # first meeting claims v; it is not marked twice in the same step
    assert (v.belongs, v.marked, u.count1, u.count2) == (9, 1, 1, 0)
    assert not v.active
    assert uid_interact(u, v, 1)          # second meeting marks v again and halts
    assert (v.marked, u.count2) == (2, 1)


def test_uid_interact_deactivates_smaller_owner():
    u, v = UidNodeState(5), UidNodeState(1, belongs=8, marked=1)
    uid_interact(u, v, 2)
    assert not u.active and v.belongs == 8


@settings(max_examples=20)
@given(st.integers(8, 40), st.integers(0, 10 ** 6))
def test_uid_counting_halter_and_output(n, seed):
    rng = np.random.default_rng(seed)
    ids = sample_ids(n, rng)
    assert len(set(ids)) == n
    u, out, steps = run_uid_counting(ids, 3, rng, max_steps=10 ** 6)
    assert u in ids
    assert out % 2 == 0 and out >= 2


def test_uid_counting_cannot_halt_below_the_head_start():
    # the largest id claims at most n - 1 nodes, never reaching b = 3
    with pytest.raises(RuntimeError):
        run_uid_counting([1, 2, 3], 3, 0, max_steps=10 ** 4)


def test_uid_counting_rejects_bad_ids():
    with pytest.raises(ValueError):
        run_uid_counting([1, 1, 2], 2)
    with pytest.raises(ValueError):
        run_uid_counting([1], 2)
