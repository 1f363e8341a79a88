import hypothesis.strategies as st
import pytest
from hypothesis import given, settings

from conftest import polyominoes
from netcon.experiments import PLUS, build
from netcon.model import Configuration, canonical_cells, normalize_cells, output_shape
from netcon.protocol import agent_state, sync_links
from netcon.protocols.counting_line import CountingOnALine, read_tape
from netcon.protocols.replication import Replication, population_for
from netcon.protocols.square_n import SquareKnowingN, stalled_replica_trial
from netcon.protocols.universal import UniversalConstructor
from netcon.scheduler import Simulation, trial_rng
from netcon.turing import DisconnectedShape, shape_of, shipped_tm


@agent_state
class Pair:
    x: int
    links: frozenset = frozenset()


def test_agent_state_hash_is_stable():
    a, b = Pair(1), Pair(1)
    assert hash(a) == hash(a) == hash(b)
    assert a == b and {a: 1}[b] == 1


def test_sync_links_follows_edges():
    cfg = Configuration.from_layout([Pair(0), Pair(1), Pair(2)], {0: (0, 0), 1: (1, 0)})
    sync_links(cfg)
    assert cfg.states[0].links == {1} and cfg.states[1].links == {3}
    assert cfg.states[2].links == frozenset()


# ---------------------------------------------------------------------------


@pytest.mark.parametrize("n", [9, 16, 40])
def test_counting_on_a_line_tape(n):
    spec = CountingOnALine(3)
    cfg = Configuration(spec.initial_states(n))
    res = Simulation(cfg, spec, trial_rng(41, n), count_total=False).run("leader-halted")
    assert res.reason == "halted"
    r0, r1, length, head = read_tape(cfg)
    met = n - 1 - sum(1 for s in cfg.states if s.kind == "q0")
    assert r0 == met
    assert length == max(r0, 1).bit_length()
    assert head.op == "halt"


def test_counting_on_a_line_rejects_zero_head_start():
    with pytest.raises(ValueError):
        CountingOnALine(0)


@pytest.mark.parametrize("n", [1, 4, 9, 16, 25])
def test_square_knowing_n(n):
    s = build("square-knowing-n", n=n)
    res = Simulation(s.cfg, s.spec, trial_rng(42, n), count_total=False).run(s.stop)
    assert res.reason == "halted"
    if n > 1:
        assert s.check(s.cfg)[0]


def test_square_knowing_n_needs_a_perfect_square():
    with pytest.raises(ValueError):
        SquareKnowingN("injected", 10)
    with pytest.raises(ValueError):
        SquareKnowingN("guessed", 9)
    with pytest.raises(ValueError):
        SquareKnowingN("injected", 9).initial_states(16)


def test_square_knowing_n_with_simulated_count():
    spec = SquareKnowingN("simulated", b=5)
    cfg = Configuration(spec.initial_states(20))
    res = Simulation(cfg, spec, trial_rng(43, 0), count_total=False).run("leader-halted", max_steps=10 ** 7)
    assert res.reason == "halted"
    leader = next(v for v, x in enumerate(cfg.states) if spec.is_halted(x))
    comp = cfg.components[cfg.comp[leader]]
    side = round(len(comp) ** 0.5)
    assert side >= 2
    assert normalize_cells(comp.cells) == {(x, y) for x in range(side) for y in range(side)}


@pytest.mark.parametrize("seed", range(4))
def test_stalled_replica_rows_are_released(seed):
    cfg, released, res = stalled_replica_trial(seed)
    assert res.reason == "halted"
    assert released >= 1
    assert build("square-knowing-n", n=16).check(cfg)[0]


# ---------------------------------------------------------------------------


@pytest.mark.parametrize("tm, d", [("leftcol", 3), ("all", 2), ("cross", 3), ("all", 3)])
def test_universal_constructor_outputs_the_machine_shape(tm, d):
    s = build("universal", tm=tm, d=d)
    res = Simulation(s.cfg, s.spec, trial_rng(44, d), count_total=False).run(s.stop)
    assert res.reason == "halted"
    ok, summary = s.check(s.cfg)
    assert ok, summary
    want = shape_of(shipped_tm(tm), d)
    pieces = [p for p in output_shape(s.cfg, s.spec) if len(p.nodes) > 0]
    assert max(len(p.nodes) for p in pieces) == len(want.on)


def test_universal_constructor_rejects_disconnected_output():
    with pytest.raises(DisconnectedShape):
        UniversalConstructor(shipped_tm("parity"), "injected", 9)
    with pytest.raises(ValueError):
        UniversalConstructor(shipped_tm("all"), "injected", 1)


# ---------------------------------------------------------------------------


def test_population_for_plus():
    assert population_for(PLUS) == 13
    assert population_for([(0, 0)]) == 1


@pytest.mark.parametrize("approach", [1, 2])
def test_plus_is_replicated(approach):
    s = build(f"replication{approach}")
    res = Simulation(s.cfg, s.spec, trial_rng(45, approach), count_total=False).run(s.stop)
    assert res.reason == "halted"
    ok, summary = s.check(s.cfg)
    assert ok, summary
    # 5 shape nodes and 13 free ones; the waste and both halted leaders end up free
    assert s.cfg.n == 18 and len(s.cfg.free_nodes()) == 8


@settings(max_examples=12)
@given(polyominoes(2, 6), st.sampled_from([1, 2]), st.integers(0, 3), st.integers(0, 10 ** 6))
def test_replication_of_random_shapes(cells, approach, extra, seed):
    spec = Replication(approach)
    cfg = spec.initial_configuration(cells, population_for(cells) + extra)
    res = Simulation(cfg, spec, trial_rng(seed, 0), count_total=False).run("leader-halted", max_steps=10 ** 7)
    assert res.reason == "halted"
    copies = [c for c in cfg.components.values() if len(c) > 1]
    assert len(copies) == 2
    assert all(canonical_cells(c.cells) == canonical_cells(cells) for c in copies)


def test_replication_rejects_unknown_approach():
    with pytest.raises(ValueError):
        Replication(3)
