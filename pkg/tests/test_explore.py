import pytest

from netcon.experiments import build, square_check
from netcon.explore import canonical_key, explore
from netcon.model import Configuration, rotate


def test_square_table_only_stabilises_on_squares():
    for k in (2, 3):
        s = build("square", n=k * k)
        states, quiescent = explore(s.cfg, s.spec)
        assert states > 1 and quiescent
        assert all(square_check(k)(c)[0] for c in quiescent.values())


def test_canonical_key_ignores_motion_and_names():
    cells = [(0, 0), (1, 0), (1, 1)]
    a = Configuration.from_layout(["x", "y", "z", "q"], dict(enumerate(cells)))
    turned = {2 - v: (rotate(c, 1), 1) for v, c in enumerate(cells)}
    b = Configuration.from_components(["z", "y", "x", "q"], [turned])
    assert canonical_key(a) == canonical_key(b)
    c = Configuration.from_layout(["y", "x", "z", "q"], dict(enumerate(cells)))
    assert canonical_key(a) != canonical_key(c)


def test_explore_limit():
    s = build("square", n=9)
    with pytest.raises(RuntimeError):
        explore(s.cfg, s.spec, limit=3)
