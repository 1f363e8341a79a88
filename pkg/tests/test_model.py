import hypothesis.strategies as st
import pytest
from hypothesis import given

from conftest import polyominoes
from netcon.model import (Configuration, Port, ShapeViolation, bounding_metrics, brute_force_alignment,
                          canonical_cells, congruent, connected_cell_components, feasible_alignment,
                          induced_edges, normalize_cells, opposite_port, oriented_direction, output_shape,
                          rotate, validate_shape)
from netcon.protocol import RuleTable


def test_port_parse_and_opposites():
    assert [Port.parse(c) for c in "urdl"] == [Port.U, Port.R, Port.D, Port.L]
    assert opposite_port(Port.U) == Port.D
    assert opposite_port(Port.L) == Port.R


def test_oriented_direction_degrees_and_turns():
    assert oriented_direction(0, Port.U) == (0, 1)
    assert oriented_direction(1, Port.U) == (1, 0)
    assert oriented_direction(90, Port.U) == oriented_direction(1, Port.U)
    assert oriented_direction(270, Port.R) == (0, 1)


@given(st.tuples(st.integers(-5, 5), st.integers(-5, 5)), st.integers(0, 7))
def test_rotate_four_times_is_identity(v, k):
    w = v
    for _ in range(4):
        w = rotate(w, k)
    assert w == v
    assert rotate(rotate(v, k), -k) == v


@given(polyominoes())
def test_induced_edges_form_a_shape(cells):
    validate_shape(cells, induced_edges(cells))


def test_validate_shape_rejections():
    with pytest.raises(ShapeViolation, match="duplicate"):
        validate_shape([(0, 0), (0, 0)], [])
    with pytest.raises(ShapeViolation, match="unit length"):
        validate_shape([(0, 0), (2, 0)], [((0, 0), (2, 0))])
    with pytest.raises(ShapeViolation, match="disconnected"):
        validate_shape([(0, 0), (1, 0)], [])
    # adjacency alone is not enough, the edge must be there
    with pytest.raises(ShapeViolation):
        validate_shape([(0, 0), (1, 0), (2, 0)], [((0, 0), (1, 0))])


@given(polyominoes(), st.integers(0, 3), st.integers(-9, 9), st.integers(-9, 9))
def test_canonical_cells_ignores_motion(cells, k, dx, dy):
    moved = [(x + dx, y + dy) for x, y in (rotate(c, k) for c in cells)]
    assert canonical_cells(moved) == canonical_cells(cells)
    assert congruent(moved, cells)
    assert min(x for x, _ in normalize_cells(moved)) == 0


def test_mirror_images_are_not_congruent():
    s = [(0, 0), (1, 0), (2, 0), (2, 1)]
    mirror = [(-x, y) for x, y in s]
    assert not congruent(s, mirror)
    assert congruent(s, [rotate(c, 2) for c in s])


def test_bounding_metrics_of_plus(plus):
    m = bounding_metrics(plus, population=20)
    assert (m.h, m.v, m.max_dim, m.min_dim) == (3, 3, 3, 3)
    assert m.rectangle_size == 9
    assert m.useful == 5 and m.waste == 15
    assert sum(m.rectangle.values()) == 5
    with pytest.raises(ValueError):
        bounding_metrics(plus, population=4)


def test_connected_cell_components_with_and_without_edges():
    cells = [(0, 0), (1, 0), (3, 0)]
    assert len(connected_cell_components(cells)) == 2
    assert len(connected_cell_components(cells[:2], edges=[])) == 2


@given(polyominoes(2, 9), st.data())
def test_deactivate_splits_exactly_when_disconnected(cells, data):
    cfg = Configuration.from_layout(["q"] * len(cells), dict(enumerate(cells)))
    (a, pa), (b, pb) = data.draw(st.sampled_from(cfg.edge_list()))
    before = len(cfg.components)
    new = cfg.deactivate(a, pa, b, pb)
    cfg.check()
    cell_edges = [(cfg.pos[x], cfg.pos[y]) for (x, _), (y, _) in cfg.edge_list()]
    pieces = connected_cell_components(cells, cell_edges)
    assert len(cfg.components) == before - 1 + len(pieces)
    assert (new is None) == (len(pieces) == 1)
    if new is not None:
        assert cfg.comp[a] != cfg.comp[b]


@given(polyominoes(1, 5), polyominoes(1, 5), st.data())
def test_feasible_alignment_matches_brute_force(ca, cb, data):
    rots = data.draw(st.lists(st.integers(0, 3), min_size=len(ca) + len(cb), max_size=len(ca) + len(cb)))
    la = {v: (c, rots[v]) for v, c in enumerate(ca)}
    lb = {len(ca) + v: (c, rots[len(ca) + v]) for v, c in enumerate(cb)}
    cfg = Configuration.from_components(["q"] * (len(ca) + len(cb)), [la, lb])
    a = data.draw(st.integers(0, len(ca) - 1))
    b = data.draw(st.integers(len(ca), len(ca) + len(cb) - 1))
    pa, pb = Port(data.draw(st.integers(0, 3))), Port(data.draw(st.integers(0, 3)))
    A, B = cfg.components[cfg.comp[a]], cfg.components[cfg.comp[b]]
    rot = dict(enumerate(cfg.rot))
    oracle = brute_force_alignment(A.cells, a, pa, rot, B.cells, b, pb, rot)
    pl = feasible_alignment(cfg, a, pa, b, pb)
    if pl is None:
        assert not oracle or not (cfg.exposed(a, pa) and cfg.exposed(b, pb))
        return
    assert len(oracle) == 1
    cfg.merge(pl)
    cfg.activate(a, pa, b, pb)
    cfg.check()
    assert cfg.comp[a] == cfg.comp[b]
    assert cfg.neighbor_cell(a, pa) == cfg.pos[b]


def test_feasible_alignment_rejects_same_component():
    cfg = Configuration.from_layout(["q"] * 2, {0: (0, 0), 1: (1, 0)})
    with pytest.raises(ValueError):
        feasible_alignment(cfg, 0, Port.U, 1, Port.D)


def test_facing_and_exposed():
    cfg = Configuration.from_layout(["q"] * 2, {0: (0, 0), 1: (1, 0)})
    assert cfg.facing(0, Port.R) == (1, Port.L)
    assert cfg.facing(0, Port.U) is None
    assert not cfg.exposed(0, Port.R) and cfg.exposed(0, Port.L)


def test_from_components_rejects_unbonded_component():
    with pytest.raises(ShapeViolation):
        Configuration.from_components(["q"] * 2, [{0: ((0, 0), 0), 1: ((1, 0), 0)}], edges=())


def test_output_shape_pieces():
    table = RuleTable("t", [], outputs={"on"})
    cfg = Configuration.from_layout(["on", "off", "on", "on", "on"],
                                    {0: (0, 0), 1: (1, 0), 2: (2, 0), 3: (2, 1)})
    shapes = sorted(output_shape(cfg, table), key=lambda s: len(s.nodes))
    assert [len(s.nodes) for s in shapes] == [1, 1, 2]
    assert shapes[-1].cells == frozenset({(0, 0), (0, 1)})
    assert shapes[-1].edges == frozenset({(2, 3)})


def test_copy_is_independent():
    cfg = Configuration.from_layout(["q"] * 3, {0: (0, 0), 1: (1, 0)})
    dup = cfg.copy()
    (a, pa), (b, pb) = cfg.edge_list()[0]
    dup.deactivate(a, pa, b, pb)
    assert len(cfg.edges) == 2 and not dup.edges
