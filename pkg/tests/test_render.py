import xml.etree.ElementTree as ET

import hypothesis.strategies as st
import pytest
from hypothesis import given

from conftest import polyominoes
from netcon.experiments import PLUS, build
from netcon.model import rotate
from netcon.render import render, render_ascii, render_svg
from netcon.scheduler import Simulation, trial_rng


def test_ascii_plus_frozen():
    assert render_ascii(PLUS) == ".#.\n###\n.#.\n"


def test_ascii_rows_are_top_first():
    assert render([(0, 0), (1, 0), (1, 1)]) == ".#\n##\n"


@given(polyominoes(), st.integers(-5, 5), st.integers(-5, 5))
def test_ascii_ignores_translation(cells, dx, dy):
    moved = [(x + dx, y + dy) for x, y in cells]
    assert render_ascii(moved) == render_ascii(cells)
    assert render_ascii(cells).count("#") == len(cells)


@given(polyominoes())
def test_svg_is_well_formed_and_deterministic(cells):
    out = render_svg(cells)
    assert out == render_svg(list(reversed(cells)))
    root = ET.fromstring(out)
    ns = "{http://www.w3.org/2000/svg}"
    assert len(root.findall(f"{ns}rect")) == len(cells) + 1          # plus the background
    edges = sum(1 for a in cells for b in cells if a < b and abs(a[0] - b[0]) + abs(a[1] - b[1]) == 1)
    assert len(root.findall(f"{ns}line")) == edges


def test_configuration_rendering_marks_free_and_non_output_nodes():
    s = build("universal", tm="leftcol", d=3)
    Simulation(s.cfg, s.spec, trial_rng(8, 0), count_total=False).run(
        lambda cfg: s.spec.phase(cfg.states) == "release")
    text = render(s.cfg, spec=s.spec)
    assert "o" in text and "#" in text
    svg = render(s.cfg, "svg", spec=s.spec)
    assert "stroke-dasharray" in svg
    Simulation(s.cfg, s.spec, trial_rng(8, 1), count_total=False).run("leader-halted")
    assert render(s.cfg, spec=s.spec) == "#\n#\n#\n\nfree nodes: 6\n"


def test_labels_show_state_initials():
    s = build("line-replication", length=3)
    assert render(s.cfg, labels=True).splitlines()[0] == "Lie"


def test_rotated_component_draws_the_same_picture():
    a = build("squaring-local", shape=PLUS).cfg
    b = build("squaring-local", shape=[rotate(c, 1) for c in PLUS]).cfg
    assert render(a) == render(b)


def test_unknown_format():
    with pytest.raises(ValueError, match="unsupported"):
        render(PLUS, "png")
