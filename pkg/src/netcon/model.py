"""Grid geometry, configurations and shape metrics for the four-port 2D model.

Ports and global directions share one indexing: u=0, r=1, d=2, l=3, i.e.
+y, +x, -y, -x.  A node's orientation is a number of quarter turns; local
port ``p`` of a node with orientation ``o`` points in direction ``(p+o) % 4``.
Every connected component is a rigid body stored in its own frame.
"""

from __future__ import annotations

import copy
from collections import deque
from dataclasses import dataclass
from enum import IntEnum
from typing import Hashable, Iterable, NamedTuple


class Port(IntEnum):
    U = 0
    R = 1
    D = 2
    L = 3

    def __str__(self):
        return "urdl"[self]

    @classmethod
    def parse(cls, text: str) -> "Port":
        try:
            return cls("urdl".index(text.strip().lower()))
        except ValueError:
            raise ValueError(f"unknown port {text!r}") from None


PORTS = (Port.U, Port.R, Port.D, Port.L)
DIRECTIONS = ((0, 1), (1, 0), (0, -1), (-1, 0))


class Position(NamedTuple):
    x: int
    y: int


def opposite_port(p: int) -> Port:
    return Port((p + 2) % 4)


def oriented_direction(orientation: int, p: int) -> tuple[int, int]:
    """Unit vector of local port ``p`` for a node turned ``orientation`` quarter turns.

    Orientation may be given in quarter turns (0..3) or degrees (0, 90, 180, 270).
    """
    if orientation % 90 == 0 and orientation >= 4:
        orientation //= 90
    return DIRECTIONS[(p + orientation) % 4]


def rotate(v: tuple[int, int], k: int) -> tuple[int, int]:
    """Rotate a vector by ``k`` quarter turns in port order (u -> r -> d -> l)."""
    x, y = v
    for _ in range(k % 4):
        x, y = y, -x
    return (x, y)


def add(a, b):
    return (a[0] + b[0], a[1] + b[1])


class ShapeViolation(ValueError):
    """A set of cells and edges that is not a shape."""


def validate_shape(cells: Iterable[tuple[int, int]], edges: Iterable[tuple]) -> None:
    """Raise :class:`ShapeViolation` unless ``cells`` with ``edges`` form a shape.

    ``edges`` is an iterable of cell pairs.  Cells must be distinct, edges must
    join cells at unit distance, and the edge graph must be connected.
    """
    cells = list(map(tuple, cells))
    seen = set()
    for c in cells:
        if c in seen:
            raise ShapeViolation(f"duplicate cell {c}")
        seen.add(c)
    adj = {c: [] for c in cells}
    for a, b in edges:
        a, b = tuple(a), tuple(b)
        if a not in adj or b not in adj:
            raise ShapeViolation(f"edge {a}-{b} leaves the cell set")
        if abs(a[0] - b[0]) + abs(a[1] - b[1]) != 1:
            raise ShapeViolation(f"edge {a}-{b} is not of unit length")
        adj[a].append(b)
        adj[b].append(a)
    if not cells:
        return
    reached = {cells[0]}
    todo = [cells[0]]
    while todo:
        for nb in adj[todo.pop()]:
            if nb not in reached:
                reached.add(nb)
                todo.append(nb)
    if len(reached) != len(cells):
        missing = next(c for c in cells if c not in reached)
        raise ShapeViolation(f"cell {missing} is disconnected")


def induced_edges(cells) -> list[tuple]:
    """All unit-distance adjacencies among ``cells``."""
    cells = set(map(tuple, cells))
    out = []
    for c in sorted(cells):
        for dx, dy in ((1, 0), (0, 1)):
            nb = (c[0] + dx, c[1] + dy)
            if nb in cells:
                out.append((c, nb))
    return out


def connected_cell_components(cells, edges=None) -> list[set]:
    """Split cells into connected pieces (all adjacencies if ``edges`` is None)."""
    cells = set(map(tuple, cells))
    if edges is None:
        edges = induced_edges(cells)
    adj = {c: [] for c in cells}
    for a, b in edges:
        adj[tuple(a)].append(tuple(b))
        adj[tuple(b)].append(tuple(a))
    parts = []
    left = set(cells)
    while left:
        start = min(left)
        part = {start}
        todo = [start]
        while todo:
            for nb in adj[todo.pop()]:
                if nb not in part:
                    part.add(nb)
                    todo.append(nb)
        parts.append(part)
        left -= part
    return parts


def normalize_cells(cells) -> frozenset:
    """Translate cells so the minimum x and y are zero."""
    cells = list(cells)
    if not cells:
        return frozenset()
    mx = min(c[0] for c in cells)
    my = min(c[1] for c in cells)
    return frozenset((x - mx, y - my) for x, y in cells)


def canonical_cells(cells) -> frozenset:
    """Canonical representative of ``cells`` up to translation and rotation."""
    options = [normalize_cells(rotate(c, k) for c in cells) for k in range(4)]
    return min(options, key=lambda s: sorted(s))


def congruent(a, b) -> bool:
    return canonical_cells(a) == canonical_cells(b)


@dataclass
class ShapeMetrics:
    h: int
    v: int
    max_dim: int
    min_dim: int
    rectangle: dict          # cell -> 0/1 label over R_G
    useful: int              # nodes of the shape, g(n)
    waste: int | None        # n - g(n) when n is given

    @property
    def rectangle_size(self) -> int:
        return self.h * self.v


def bounding_metrics(cells, population: int | None = None) -> ShapeMetrics:
    """Extents (in nodes), labelled enclosing rectangle, useful space and waste."""
    cells = set(map(tuple, cells))
    if not cells:
        return ShapeMetrics(0, 0, 0, 0, {}, 0, population)
    xs = [c[0] for c in cells]
    ys = [c[1] for c in cells]
    h = max(xs) - min(xs) + 1
    v = max(ys) - min(ys) + 1
    rect = {}
    for x in range(min(xs), max(xs) + 1):
        for y in range(min(ys), max(ys) + 1):
            rect[(x, y)] = 1 if (x, y) in cells else 0
    waste = None if population is None else population - len(cells)
    if waste is not None and waste < 0:
        raise ValueError("population smaller than the shape")
    return ShapeMetrics(h, v, max(h, v), min(h, v), rect, len(cells), waste)


# ---------------------------------------------------------------------------
# configurations


class Component:
    """A rigid connected component: node positions and orientations in its frame."""

    __slots__ = ("cid", "cells", "version")

    def __init__(self, cid: int):
        self.cid = cid
        self.cells: dict[tuple[int, int], int] = {}
        self.version = 0

    def __len__(self):
        return len(self.cells)

    @property
    def nodes(self):
        return self.cells.values()


class Placement(NamedTuple):
    """Rigid motion taking component ``moving`` into the frame of ``fixed``."""

    moving: int
    fixed: int
    turns: int
    anchor_from: tuple[int, int]
    anchor_to: tuple[int, int]

    def map(self, p):
        return add(self.anchor_to, rotate((p[0] - self.anchor_from[0], p[1] - self.anchor_from[1]), self.turns))


class Configuration:
    """Node states, active edges and rigid components.

    ``edges`` maps each active node-port ``(v, p)`` to its partner.  Free
    nodes are singleton components.
    """

    def __init__(self, states: list[Hashable]):
        self.states = list(states)
        n = len(self.states)
        self.comp = list(range(n))
        self.pos = [(0, 0)] * n
        self.rot = [0] * n
        self.edges: dict[tuple[int, int], tuple[int, int]] = {}
        self.components: dict[int, Component] = {}
        for v in range(n):
            c = Component(v)
            c.cells[(0, 0)] = v
            self.components[v] = c
        self._next_cid = n

    # -- construction helpers -------------------------------------------------

    @classmethod
    def from_layout(cls, states, placed, edges="induced") -> "Configuration":
        """Build a configuration with one attached component.

        ``placed`` maps node ids to cells (all orientation 0); ``edges`` is
        ``"induced"`` for all adjacencies, or an explicit list of node pairs.
        Remaining nodes are free.
        """
        if not placed:
            return cls(states)
        return cls.from_components(states, [{v: (c, 0) for v, c in placed.items()}], edges)

    @classmethod
    def from_components(cls, states, layouts, edges="induced") -> "Configuration":
        """Several attached components, each given as ``{node: (cell, orientation)}``.

        With ``edges="induced"`` every pair of adjacent nodes inside a
        component is bonded; otherwise ``edges`` lists node pairs.
        """
        cfg = cls(states)
        for placed in layouts:
            cid = cfg._new_cid()
            comp = Component(cid)
            for v, (cell, rot) in placed.items():
                del cfg.components[cfg.comp[v]]
                cfg.comp[v] = cid
                cfg.pos[v] = tuple(cell)
                cfg.rot[v] = rot % 4
                comp.cells[tuple(cell)] = v
            cfg.components[cid] = comp
        if edges == "induced":
            pairs = []
            for placed in layouts:
                cellmap = {tuple(c): v for v, (c, _r) in placed.items()}
                pairs += [(cellmap[a], cellmap[b]) for a, b in induced_edges(cellmap)]
        else:
            pairs = list(edges)
        for a, b in pairs:
            pa = cfg.port_towards(a, cfg.pos[b])
            pb = cfg.port_towards(b, cfg.pos[a])
            cfg.edges[(a, pa)] = (b, pb)
            cfg.edges[(b, pb)] = (a, pa)
        cfg.check()
        return cfg

    def copy(self) -> "Configuration":
        return copy.deepcopy(self)

    def _new_cid(self) -> int:
        cid = self._next_cid
        self._next_cid += 1
        return cid

    # -- queries ---------------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.states)

    def direction(self, v: int, p: int) -> int:
        return (p + self.rot[v]) % 4

    def neighbor_cell(self, v: int, p: int):
        return add(self.pos[v], DIRECTIONS[self.direction(v, p)])

    def port_towards(self, v: int, cell) -> Port:
        d = (cell[0] - self.pos[v][0], cell[1] - self.pos[v][1])
        return Port((DIRECTIONS.index(d) - self.rot[v]) % 4)

    def is_free(self, v: int) -> bool:
        return len(self.components[self.comp[v]]) == 1

    def exposed(self, v: int, p: int) -> bool:
        """True when the cell beyond port ``p`` is empty in ``v``'s component."""
        return self.neighbor_cell(v, p) not in self.components[self.comp[v]].cells

    def facing(self, v: int, p: int):
        """The (node, port) facing ``(v, p)`` inside the same component, or None."""
        cell = self.neighbor_cell(v, p)
        w = self.components[self.comp[v]].cells.get(cell)
        if w is None:
            return None
        d = (self.direction(v, p) + 2) % 4
        return (w, Port((d - self.rot[w]) % 4))

    def active_ports(self, v: int) -> list[int]:
        return [p for p in PORTS if (v, p) in self.edges]

    def edge_list(self) -> list[tuple]:
        """Each active edge once, as ``((a, pa), (b, pb))`` with ``a < b``."""
        out = []
        for (a, pa), (b, pb) in self.edges.items():
            if (a, pa) < (b, pb):
                out.append(((a, Port(pa)), (b, Port(pb))))
        return sorted(out)

    def attached_components(self) -> list[Component]:
        return [c for c in self.components.values() if len(c) > 1]

    def free_nodes(self) -> list[int]:
        return [v for v in range(self.n) if self.is_free(v)]

    def component_cells(self, cid: int) -> dict:
        return dict(self.components[cid].cells)

    def component_edges(self, cid: int) -> list[tuple]:
        nodes = set(self.components[cid].cells.values())
        return [e for e in self.edge_list() if e[0][0] in nodes]

    # -- mutation --------------------------------------------------------------

    def set_state(self, v: int, state) -> None:
        self.states[v] = state

    def activate(self, a, pa, b, pb) -> None:
        self.edges[(a, pa)] = (b, pb)
        self.edges[(b, pb)] = (a, pa)
        self.components[self.comp[a]].version += 1

    def merge(self, placement: Placement) -> None:
        """Commit ``placement``: move the moving component into the fixed frame."""
        mov = self.components.pop(placement.moving)
        fix = self.components[placement.fixed]
        for cell, v in mov.cells.items():
            new = placement.map(cell)
            if new in fix.cells:
                raise ShapeViolation(f"placement collides at {new}")
            fix.cells[new] = v
            self.comp[v] = fix.cid
            self.pos[v] = new
            self.rot[v] = (self.rot[v] + placement.turns) % 4
        fix.version += 1

    def deactivate(self, a, pa, b, pb) -> int | None:
        """Remove an active edge; split the component if it disconnects.

        Returns the id of the new component when a split happened.
        """
        del self.edges[(a, pa)]
        del self.edges[(b, pb)]
        cid = self.comp[a]
        comp = self.components[cid]
        comp.version += 1
        reached = self._reach(a, stop=b)
        if b in reached:
            return None
        # the side not containing the larger half moves to a new component
        side = reached
        if 2 * len(reached) > len(comp):
            side = self._reach(b)
        new = Component(self._new_cid())
        for v in side:
            del comp.cells[self.pos[v]]
            new.cells[self.pos[v]] = v
            self.comp[v] = new.cid
        self.components[new.cid] = new
        return new.cid

    def _reach(self, start: int, stop: int | None = None) -> set:
        seen = {start}
        todo = deque([start])
        while todo:
            v = todo.popleft()
            for p in PORTS:
                e = self.edges.get((v, p))
                if e is not None and e[0] not in seen:
                    seen.add(e[0])
                    if e[0] == stop:
                        return seen
                    todo.append(e[0])
        return seen

    # -- consistency -----------------------------------------------------------

    def check(self) -> None:
        """Assert every structural invariant; raises ShapeViolation."""
        seen_nodes = set()
        for cid, comp in self.components.items():
            cells = []
            for cell, v in comp.cells.items():
                if self.comp[v] != cid or self.pos[v] != cell:
                    raise ShapeViolation(f"index mismatch for node {v}")
                if v in seen_nodes:
                    raise ShapeViolation(f"node {v} in two components")
                seen_nodes.add(v)
                cells.append(cell)
            edges = []
            for (a, pa), (b, pb) in self.edges.items():
                if self.comp[a] != cid:
                    continue
                if self.comp[b] != cid:
                    raise ShapeViolation(f"edge {a}-{b} spans components")
                if self.edges.get((b, pb)) != (a, pa):
                    raise ShapeViolation(f"edge {a}-{b} not symmetric")
                if self.neighbor_cell(a, pa) != self.pos[b]:
                    raise ShapeViolation(f"edge {a}-{b} ports do not face")
                if (self.direction(a, pa) + 2) % 4 != self.direction(b, pb):
                    raise ShapeViolation(f"edge {a}-{b} ports not opposite")
                edges.append((self.pos[a], self.pos[b]))
            validate_shape(cells, edges)
        if len(seen_nodes) != self.n:
            raise ShapeViolation("node count changed")


def feasible_alignment(cfg: Configuration, a: int, pa: int, b: int, pb: int) -> Placement | None:
    """Placement bringing port ``pb`` of ``b`` to face port ``pa`` of ``a``.

    ``a`` and ``b`` must lie in different components.  The smaller component
    moves.  Returns None when the two components would overlap.
    """
    ca, cb = cfg.comp[a], cfg.comp[b]
    if ca == cb:
        raise ValueError("nodes share a component; use facing pairs instead")
    if not (cfg.exposed(a, pa) and cfg.exposed(b, pb)):
        return None
    A, B = cfg.components[ca], cfg.components[cb]
    if len(A) < len(B) or (len(A) == len(B) and ca > cb):
        a, pa, b, pb, A, B = b, pb, a, pa, B, A
    # b moves into a's frame
    da = cfg.direction(a, pa)
    target = add(cfg.pos[a], DIRECTIONS[da])
    new_rot_b = (da + 2 - pb) % 4
    turns = (new_rot_b - cfg.rot[b]) % 4
    pl = Placement(B.cid, A.cid, turns, cfg.pos[b], target)
    fixed = A.cells
    for cell in B.cells:
        if pl.map(cell) in fixed:
            return None
    return pl


def brute_force_alignment(cells_a, node_a, port_a, rot_a, cells_b, node_b, port_b, rot_b):
    """Independent oracle: try every rotation and translation of B.

    ``cells_*`` map cells to node ids; ``rot_*`` give per-node orientations.
    Returns the set of B-cell images of all valid placements.
    """
    pos_a = {v: c for c, v in cells_a.items()}
    pos_b = {v: c for c, v in cells_b.items()}
    out = []
    for k in range(4):
        rb = (rot_b[node_b] + k) % 4
        if (port_b + rb) % 4 != ((port_a + rot_a[node_a]) % 4 + 2) % 4:
            continue
        rotated = {v: rotate(c, k) for v, c in pos_b.items()}
        xs = [c[0] for c in cells_a] + [c[0] for c in rotated.values()]
        ys = [c[1] for c in cells_a] + [c[1] for c in rotated.values()]
        span = max(max(xs) - min(xs), max(ys) - min(ys)) + 2
        for tx in range(-2 * span, 2 * span + 1):
            for ty in range(-2 * span, 2 * span + 1):
                moved = {v: (c[0] + tx, c[1] + ty) for v, c in rotated.items()}
                pa = pos_a[node_a]
                d = DIRECTIONS[(port_a + rot_a[node_a]) % 4]
                if moved[node_b] != (pa[0] + d[0], pa[1] + d[1]):
                    continue
                if set(moved.values()) & set(cells_a):
                    continue
                out.append(frozenset(moved.values()))
    return out


class OutputShape(NamedTuple):
    nodes: frozenset
    cells: frozenset          # translated so the minimum x and y are zero
    edges: frozenset          # node pairs (a, b) with a < b


def output_shape(cfg: Configuration, spec) -> list[OutputShape]:
    """Connected pieces of the subnetwork induced by output-state nodes and their active edges."""
    out_nodes = {v for v, s in enumerate(cfg.states) if spec.is_output(s)}
    adj = {v: [] for v in out_nodes}
    for (a, _pa), (b, _pb) in cfg.edges.items():
        if a in out_nodes and b in out_nodes:
            adj[a].append(b)
    shapes = []
    left = set(out_nodes)
    while left:
        root = min(left)
        part = {root}
        todo = [root]
        while todo:
            for w in adj[todo.pop()]:
                if w not in part:
                    part.add(w)
                    todo.append(w)
        left -= part
        edges = frozenset((a, b) for a in part for b in adj[a] if a < b)
        shapes.append(OutputShape(frozenset(part), normalize_cells(cfg.pos[v] for v in part), edges))
    return shapes
