import hypothesis.strategies as st
import pytest
from hypothesis import given, settings

from netcon.turing import (SHIPPED, DisconnectedShape, SpaceExceeded, StepsExceeded, TMError, build_tm,
                           input_tape, parse_tm, pattern_of, pos_to_index, resolve_tm, run_tm, run_tm_on_pixel,
                           shape_of, shipped_tm, zigzag_pos)

# pixel oracles written directly in python, keyed by machine
ORACLES = {
    "all": lambda i, x, y, d: "on",
    "parity": lambda i, x, y, d: "on" if i % 2 == 0 else "off",
    "leftcol": lambda i, x, y, d: "on" if x == 0 else "off",
    "cross": lambda i, x, y, d: "on" if d // 2 in (x, y) else "off",
    "constant": lambda i, x, y, d: "black",
    "checker": lambda i, x, y, d: "black" if i % 2 == 0 else "white",
    "bands": lambda i, x, y, d: f"band{y % 3}",
}


@given(st.integers(1, 30).flatmap(lambda d: st.tuples(st.just(d), st.integers(0, d * d - 1))))
def test_zigzag_is_a_bijection(di):
    d, i = di
    pos = zigzag_pos(i, d)
    assert 0 <= pos.x < d and 0 <= pos.y < d
    assert pos_to_index(pos, d) == i
    if i + 1 < d * d:
        nxt = zigzag_pos(i + 1, d)
        assert abs(nxt.x - pos.x) + abs(nxt.y - pos.y) == 1


def test_zigzag_bounds():
    with pytest.raises(IndexError):
        zigzag_pos(9, 3)
    with pytest.raises(IndexError):
        pos_to_index((3, 0), 3)
    assert [tuple(zigzag_pos(i, 3)) for i in range(4)] == [(0, 0), (1, 0), (2, 0), (2, 1)]


def test_input_tape():
    assert input_tape(5, 3) == "101#11"
    assert input_tape(0, 2) == "0#10"


@settings(max_examples=40)
@given(st.sampled_from(SHIPPED), st.integers(2, 9))
def test_shipped_machines_match_python_oracles(name, d):
    tm = shipped_tm(name)
    for i in range(d * d):
        x, y = zigzag_pos(i, d)
        assert run_tm_on_pixel(tm, i, d) == ORACLES[name](i, x, y, d)


@pytest.mark.parametrize("name", SHIPPED)
def test_shipped_files_match_the_builder(name):
    assert shipped_tm(name).delta == build_tm(name).delta


def test_machines_stay_in_logarithmic_space():
    for name in ("leftcol", "cross"):
        tm = shipped_tm(name)
        for d in (2, 5, 11):
            worst = max(run_tm_on_pixel(tm, i, d, detail=True).space for i in range(d * d))
            assert worst <= tm.space_bound(d)


def test_text_round_trip():
    tm = shipped_tm("checker")
    again = parse_tm(tm.to_text(), name="checker")
    assert again == tm


TINY = """
name: tiny
start: s
accept: yes
reject: no
space: linear 2
s,0 -> s,0,R
s,1 -> s,1,R
s,# -> yes,#,S
"""


def test_run_tm_and_caps():
    tm = parse_tm(TINY)
    out = run_tm(tm, "101#1", space_cap=10, step_cap=100)
    assert (out.result, out.steps, out.halt_state) == ("on", 4, "yes")      # three moves and the halting transition
    with pytest.raises(StepsExceeded):
        run_tm(tm, "101#1", space_cap=10, step_cap=3)
    loop = parse_tm(TINY + "s,_ -> s,_,R\n")
    with pytest.raises(SpaceExceeded):
        run_tm(loop, "11", space_cap=5, step_cap=100)
    with pytest.raises(TMError, match="no transition"):
        run_tm(tm, "1a", space_cap=10, step_cap=100)


@pytest.mark.parametrize("text, msg", [
    ("start: s\naccept: a\n", "reject"),
    ("start: s\naccept: a\nreject: r\ns,0 -> s,0,X\n", "move"),
    ("start: s\naccept: a\nreject: r\ns,0 -> s,0,R\ns,0 -> s,1,R\n", "duplicate"),
    ("start: s\naccept: a\nreject: r\nspace: cubic 1\n", "space bound"),
    ("start: s\naccept: a\nreject: r\ns0 -> s\n", "bad transition"),
])
def test_parse_errors(text, msg):
    with pytest.raises(ValueError, match=msg):
        parse_tm(text)


def test_shape_of_checks_output():
    with pytest.raises(DisconnectedShape) as err:
        shape_of(shipped_tm("parity"), 3)
    assert len(err.value.parts) == 5
    with pytest.raises(ValueError, match="colours"):
        shape_of(shipped_tm("bands"), 3)
    sq = shape_of(shipped_tm("leftcol"), 3)
    assert sq.on == [0, 5, 6]
    assert sq.cells() == {(0, 0), (0, 1), (0, 2)}
    assert len(sq.edges()) == 2
    assert sq.grid()[0] == ["on", "off", "off"]


def test_resolve_tm(tmp_path):
    p = tmp_path / "tiny.tm"
    p.write_text(TINY)
    assert resolve_tm(str(p)).start == "s"
    assert resolve_tm("cross").name == "cross"
    with pytest.raises(KeyError):
        build_tm("nope")


def test_step_cap_is_clipped():
    tm = shipped_tm("leftcol")
    assert tm.default_step_cap(100) == 10 ** 8
    assert pattern_of(tm, 2).pixels == ["on", "off", "off", "on"]
