"""Universal constructor: build a d×d square, run a shape TM for every pixel,
then release the off pixels.

The square's nodes, read in zig-zag order from the bottom-left corner, form
the TM tape; every node stores ``CELLS_PER_NODE`` tape cells plus one bit of
the pixel counter (nodes 0..w-1, least significant bit first).  For each
pixel the leader

1. writes ``bin(i)#bin(d)`` on a fresh tape (one forward sweep, then back),
2. runs the machine, moving to a neighbouring node whenever the TM head
   leaves the current node's cells,
3. walks to node i and stores the verdict,
4. increments the counter in the leftmost nodes and reads it back.

After the last pixel the leader goes to the far end of the tape and walks it
backwards, cutting every bond that touches an off node; it halts on node 0.
"""

from __future__ import annotations

from dataclasses import replace

from ..model import Port
from ..protocol import agent_state
from ..turing import BLANK, MOVES, DisconnectedShape, SpaceExceeded, StepsExceeded, TMSpec, \
    input_tape, pos_to_index, shape_of, zigzag_pos
from .square_n import SqNode, SquareKnowingN

U, R, D, L = Port.U, Port.R, Port.D, Port.L
CELLS_PER_NODE = 4
_STEP_PORT = {(1, 0): R, (-1, 0): L, (0, 1): U, (0, -1): D}


@agent_state
class UcHead:
    mode: str                 # write | rewind | run | mark | home | inc | read | to-end | release | halt
    d: int
    i: int = 0                # pixel being evaluated
    v: int = 0                # zig-zag index of the node holding the head
    tstate: str = ""
    tpos: int = 0             # physical tape cell of the TM head
    steps: int = 0
    lo: int = 0
    hi: int = 0
    result: str = ""
    carry: int = 0
    down: bool = False        # release: the bond below this node was handled


@agent_state
class UcNode:
    cells: tuple = ()
    ctr: int = 0
    pixel: str = ""
    head: UcHead | None = None
    links: frozenset = frozenset()

    def __str__(self):
        return ("U" if self.head is not None else "n") + {"on": "+", "off": "-"}.get(self.pixel, "")


def path_port(v: int, w: int, d: int) -> Port:
    """Local port of node v facing its zig-zag neighbour w (square in the leader's frame)."""
    a, b = zigzag_pos(v, d), zigzag_pos(w, d)
    return _STEP_PORT[(b.x - a.x, b.y - a.y)]


class UniversalConstructor(SquareKnowingN):
    """Square-Knowing-n followed by per-pixel TM simulation and release."""

    name = "universal-constructor"

    def __init__(self, tm: TMSpec, count_source: str = "injected", n: int | None = None,
                 b: int = 5, k: int = CELLS_PER_NODE, check_shape: bool = True):
        super().__init__(count_source, n, b)
        self.tm = tm
        self.k = k
        self._caps: dict = {}
        if count_source == "injected":
            d = self.leader_state.head.d
            if d < 2:
                raise ValueError("the universal constructor needs d >= 2")
            if check_shape:
                shape_of(tm, d)      # raises DisconnectedShape for a disconnected output

    # -- bookkeeping -------------------------------------------------------------------

    def is_halted(self, state) -> bool:
        return isinstance(state, UcNode) and state.head is not None and state.head.mode == "halt"

    def catalytic(self, state) -> bool:
        return isinstance(state, UcNode) or super().catalytic(state)

    def phase(self, states) -> str:
        for s in states:
            if isinstance(s, UcNode) and s.head is not None:
                m = s.head.mode
                return "halted" if m == "halt" else ("release" if m in ("to-end", "release") else "simulate")
        return super().phase(states)

    def is_output(self, state) -> bool:
        return isinstance(state, UcNode) and state.pixel == "on"

    # -- helpers -----------------------------------------------------------------------

    def _blank(self, s) -> UcNode:
        if isinstance(s, UcNode):
            return s
        return UcNode(cells=(BLANK,) * self.k, links=s.links)

    def _width(self, d: int) -> int:
        return (d * d).bit_length()

    def _limits(self, d: int):
        """(step cap, usable cells) for one pixel."""
        hit = self._caps.get(d)
        if hit is None:
            hit = self._caps[d] = (self.tm.default_step_cap(d), min(self.tm.space_bound(d), self.k * d * d - 1))
        return hit

    def _fresh_cells(self, v: int, i: int, d: int) -> tuple:
        text = input_tape(i, d)
        base = v * self.k
        return tuple(text[c - 1] if 1 <= c <= len(text) else BLANK for c in range(base, base + self.k))

    # -- handover from the square phase ------------------------------------------------

    def rule(self, sa, pa, sb, pb, e):
        if isinstance(sa, UcNode) and sa.head is not None:
            return self._uc(sa, pa, self._blank(sb) if isinstance(sb, SqNode) else sb, pb, e)
        out = super().rule(sa, pa, sb, pb, e)
        if out is None:
            return None
        return tuple(self._handover(x) for x in out[:2]) + (out[2],)

    def _handover(self, s):
        if not (isinstance(s, SqNode) and s.head is not None and s.head.mode == "halt"):
            return s
        d = s.head.d
        h = UcHead("write", d=d)
        node = UcNode(cells=self._fresh_cells(0, 0, d), links=s.links, head=h)
        return self._arrive(node, h)

    # -- leader program ----------------------------------------------------------------

    def _arrive(self, node: UcNode, h: UcHead) -> UcNode:
        """Work done on entering node ``h.v``."""
        d, v = h.d, h.v
        last = d * d - 1
        m = h.mode
        if m == "write":
            node = replace(node, cells=self._fresh_cells(v, h.i, d))
            if v == last:
                h = replace(h, mode="rewind")
        if m in ("write", "rewind") and h.mode == "rewind" and v == 0:
            h = replace(h, mode="run", tstate=self.tm.start, tpos=1, steps=0, lo=1, hi=1)
            return self._compute(replace(node, head=h))
        if m == "run":
            return self._compute(replace(node, head=h))
        if m == "mark" and v == h.i:
            node = replace(node, pixel=h.result)
            h = replace(h, mode="home")
        if h.mode == "home" and v == 0:
            h = replace(h, mode="inc", carry=1)
        if h.mode == "inc":
            bit = node.ctr ^ h.carry
            h = replace(h, carry=node.ctr & h.carry)
            node = replace(node, ctr=bit)
            if v == self._width(d) - 1:
                h = replace(h, mode="read", i=0)
        if h.mode == "read":
            h = replace(h, i=2 * h.i + node.ctr)
            if v == 0:
                h = replace(h, mode="to-end" if h.i == d * d else "write")
                if h.mode == "write":
                    node = replace(node, cells=self._fresh_cells(0, h.i, d))
        if h.mode == "to-end" and v == last:
            h = replace(h, mode="release", down=False)
        if h.mode == "release":
            if v == 0:
                h = replace(h, mode="halt")
            elif not h.down and self._below(v, d) is None:
                h = replace(h, down=True)
        return replace(node, head=h)

    def _below(self, v: int, d: int):
        """Zig-zag index of the node below v when that bond is not a tape bond."""
        p = zigzag_pos(v, d)
        if p.y == 0:
            return None
        w = pos_to_index((p.x, p.y - 1), d)
        return None if w == v - 1 else w

    def _compute(self, node: UcNode) -> UcNode:
        """Run the machine while its head stays on this node's cells."""
        h = node.head
        tm = self.tm
        d = h.d
        cells = list(node.cells)
        base = h.v * self.k
        state, pos, steps, lo, hi = h.tstate, h.tpos, h.steps, h.lo, h.hi
        cap, space = self._limits(d)
        while state not in tm.halting and base <= pos < base + self.k:
            sym = cells[pos - base]
            try:
                state, out, mv = tm.delta[(state, sym)]
            except KeyError:
                raise StepsExceeded(f"{tm.name}: no transition for ({state},{sym})") from None
            cells[pos - base] = out
            pos += MOVES[mv]
            steps += 1
            lo, hi = min(lo, pos), max(hi, pos)
            if pos < 0 or hi - lo + 1 > space:
                raise SpaceExceeded(f"{tm.name}: pixel {h.i} needs more than {space} cells")
            if steps > cap:
                raise StepsExceeded(f"{tm.name}: pixel {h.i} did not halt within {cap} steps")
        h = replace(h, tstate=state, tpos=pos, steps=steps, lo=lo, hi=hi)
        if state in tm.halting:
            if state in tm.colors:
                res = tm.colors[state]
            else:
                res = "on" if state == tm.accept else "off"
            h = replace(h, mode="mark", result=res)
            node = replace(node, cells=tuple(cells), head=h)
            if h.v == h.i:
                return self._arrive(replace(node, head=None), h)
            return node
        return replace(node, cells=tuple(cells), head=h)

    def _target(self, h: UcHead):
        """Zig-zag index the leader wants to move to next, or None."""
        m, v = h.mode, h.v
        if m in ("write", "inc", "to-end"):
            return v + 1
        if m in ("rewind", "home", "read"):
            return v - 1
        if m == "run":
            return h.tpos // self.k
        if m == "mark":
            return v + 1 if h.i > v else v - 1
        if m == "release" and h.down:
            return v - 1
        return None

    def _uc(self, sa, pa, sb, pb, e):
        h = sa.head
        d = h.d
        if h.mode == "halt" or not isinstance(sb, UcNode):
            return None
        if h.mode == "release" and not h.down:
            w = self._below(h.v, d)
            if e == 1 and pa == D and pb == U:
                cut = "off" in (sa.pixel, sb.pixel)
                return replace(sa, head=replace(h, down=True)), sb, 0 if cut else 1
            return None
        w = self._target(h)
        if w is None or e != 1 or pa != path_port(h.v, w, d) or pb != path_port(w, h.v, d):
            return None
        h2 = replace(h, v=w)
        keep = 1
        if h.mode == "release":
            keep = 0 if "off" in (sa.pixel, sb.pixel) else 1
            h2 = replace(h2, down=False)
        return replace(sa, head=None), self._arrive(sb, h2), keep


def universal_constructor(tm: TMSpec, count_source: str = "injected", n: int | None = None,
                          **kw) -> UniversalConstructor:
    return UniversalConstructor(tm, count_source, n, **kw)
