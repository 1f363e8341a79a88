"""Shape-language Turing machines and zig-zag pixel indexing.

A machine gets ``bin(i) # bin(d)`` (most significant bit first) on a
two-way infinite tape and decides whether pixel ``i`` of the d×d square is
on.  Pixels are numbered boustrophedon from the bottom-left corner.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources

from .model import Position, induced_edges, connected_cell_components

BLANK = "_"
MOVES = {"L": -1, "R": 1, "S": 0}


# ---------------------------------------------------------------------------
# indexing


def zigzag_pos(i: int, d: int) -> Position:
    if not 0 <= i < d * d:
        raise IndexError(f"pixel {i} outside a {d}x{d} square")
    row, off = divmod(i, d)
    return Position(off if row % 2 == 0 else d - 1 - off, row)


def pos_to_index(pos, d: int) -> int:
    x, y = pos
    if not (0 <= x < d and 0 <= y < d):
        raise IndexError(f"cell {pos} outside a {d}x{d} square")
    return y * d + (x if y % 2 == 0 else d - 1 - x)


# ---------------------------------------------------------------------------
# machines


class TMError(RuntimeError):
    pass


class SpaceExceeded(TMError):
    pass


class StepsExceeded(TMError):
    pass


class DisconnectedShape(ValueError):
    def __init__(self, parts):
        super().__init__(f"on-pixels form {len(parts)} components")
        self.parts = parts


SPACE_KINDS = {
    "log": lambda d: max(1, d).bit_length(),
    "linear": lambda d: d,
    "quadratic": lambda d: d * d,
}


@dataclass
class TMSpec:
    name: str
    start: str
    accept: str
    reject: str
    delta: dict                       # (state, sym) -> (state, sym, move)
    space_kind: str = "log"
    space_coef: int = 10
    colors: dict = field(default_factory=dict)   # halting state -> colour, for patterns

    @property
    def halting(self) -> set:
        return {self.accept, self.reject} | set(self.colors)

    @property
    def alphabet(self) -> set:
        syms = {BLANK, "0", "1", "#"}
        for (_, a), (_, b, _) in self.delta.items():
            syms.update((a, b))
        return syms

    @property
    def states(self) -> set:
        out = {self.start} | self.halting
        for (s, _), (t, _, _) in self.delta.items():
            out.update((s, t))
        return out

    def space_bound(self, d: int) -> int:
        return self.space_coef * SPACE_KINDS[self.space_kind](d)

    def default_step_cap(self, d: int) -> int:
        """Configuration-count bound 2^(2 f(d) log|alphabet|), clipped to 10^8."""
        expo = 2 * self.space_bound(d) * math.log2(len(self.alphabet))
        return int(min(2.0 ** min(expo, 60), 1e8))

    def to_text(self) -> str:
        lines = [f"name: {self.name}", f"start: {self.start}", f"accept: {self.accept}",
                 f"reject: {self.reject}", f"space: {self.space_kind} {self.space_coef}"]
        if self.colors:
            lines.append("halt: " + " ".join(f"{s}={c}" for s, c in self.colors.items()))
        for (s, a), (t, b, m) in sorted(self.delta.items()):
            lines.append(f"{s},{a} -> {t},{b},{m}")
        return "\n".join(lines) + "\n"


def parse_tm(text: str, name: str = "tm") -> TMSpec:
    """Read the plain-text machine format (header lines, then transitions)."""
    head = {"name": name, "space": "log 10"}
    delta = {}
    colors = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("//"):
            continue
        if "->" in line:
            lhs, rhs = (p.strip() for p in line.split("->"))
            try:
                s, a = (x.strip() for x in lhs.rsplit(",", 1))
                t, b, m = (x.strip() for x in rhs.rsplit(",", 2))
            except ValueError:
                raise ValueError(f"line {lineno}: bad transition {raw!r}") from None
            if m not in MOVES:
                raise ValueError(f"line {lineno}: move must be L, R or S")
            if (s, a) in delta:
                raise ValueError(f"line {lineno}: duplicate transition for ({s},{a})")
            delta[(s, a)] = (t, b, m)
            continue
        key, _, value = line.partition(":")
        key = key.strip().lower()
        if key == "halt":
            for item in value.split():
                s, _, c = item.partition("=")
                colors[s] = c
        else:
            head[key] = value.strip()
    for k in ("start", "accept", "reject"):
        if k not in head:
            raise ValueError(f"missing header {k!r}")
    kind, _, coef = head["space"].partition(" ")
    if kind not in SPACE_KINDS:
        raise ValueError(f"unknown space bound {kind!r}")
    return TMSpec(head["name"], head["start"], head["accept"], head["reject"], delta,
                  kind, int(coef or 1), colors)


def load_tm(path) -> TMSpec:
    with open(path) as fh:
        return parse_tm(fh.read(), name=str(path))


def input_tape(i: int, d: int) -> str:
    return f"{i:b}#{d:b}"


@dataclass
class TMRun:
    result: str            # "on", "off" or a colour
    steps: int
    space: int
    halt_state: str


def run_tm(tm: TMSpec, tape: str, space_cap: int, step_cap: int) -> TMRun:
    cells = dict(enumerate(tape))
    head = 0
    lo, hi = 0, max(len(tape) - 1, 0)
    state = tm.start
    steps = 0
    halting = tm.halting
    while state not in halting:
        sym = cells.get(head, BLANK)
        try:
            state, out, mv = tm.delta[(state, sym)]
        except KeyError:
            raise TMError(f"{tm.name}: no transition for ({state},{sym})") from None
        cells[head] = out
        head += MOVES[mv]
        steps += 1
        if head < lo:
            lo = head
        elif head > hi:
            hi = head
        if hi - lo + 1 > space_cap:
            raise SpaceExceeded(f"{tm.name}: used more than {space_cap} cells")
        if steps > step_cap:
            raise StepsExceeded(f"{tm.name}: no halt within {step_cap} steps")
    if state in tm.colors:
        res = tm.colors[state]
    elif state == tm.accept:
        res = "on"
    elif state == tm.reject:
        res = "off"
    else:
        res = "off"
    return TMRun(res, steps, hi - lo + 1, state)


def run_tm_on_pixel(tm: TMSpec, i: int, d: int, space_cap: int | None = None,
                    step_cap: int | None = None, detail: bool = False):
    """Evaluate pixel ``i`` of the d×d square: "on", "off" or a colour."""
    if not 0 <= i < d * d:
        raise IndexError(f"pixel {i} outside a {d}x{d} square")
    space_cap = tm.space_bound(d) if space_cap is None else space_cap
    step_cap = tm.default_step_cap(d) if step_cap is None else step_cap
    out = run_tm(tm, input_tape(i, d), space_cap, step_cap)
    return out if detail else out.result


@dataclass
class PixelSquare:
    d: int
    pixels: list                       # index -> "on"/"off"/colour

    @property
    def on(self) -> list[int]:
        return [i for i, p in enumerate(self.pixels) if p == "on"]

    @property
    def off(self) -> list[int]:
        return [i for i, p in enumerate(self.pixels) if p == "off"]

    def cells(self) -> set:
        return {tuple(zigzag_pos(i, self.d)) for i in self.on}

    def edges(self) -> list:
        return induced_edges(self.cells())

    def grid(self) -> list[list]:
        """Rows top to bottom, each listing the pixel values left to right."""
        d = self.d
        return [[self.pixels[pos_to_index((x, y), d)] for x in range(d)] for y in range(d - 1, -1, -1)]


def pattern_of(tm: TMSpec, d: int, **caps) -> PixelSquare:
    return PixelSquare(d, [run_tm_on_pixel(tm, i, d, **caps) for i in range(d * d)])


def shape_of(tm: TMSpec, d: int, **caps) -> PixelSquare:
    """Evaluate every pixel and check the on-pixels form one shape."""
    sq = pattern_of(tm, d, **caps)
    bad = [p for p in sq.pixels if p not in ("on", "off")]
    if bad:
        raise ValueError(f"{tm.name} outputs colours, use pattern_of")
    parts = connected_cell_components(sq.cells())
    if len(parts) > 1:
        raise DisconnectedShape(parts)
    return sq


# ---------------------------------------------------------------------------
# a small macro assembler for the shipped machines


_BITS = ("0", "1")
_MARKED = {"0": "a", "1": "b"}
_ALL = ("0", "1", "a", "b", "#", BLANK)


class TMBuilder:
    """Generates transition tables from composable tape-walking macros.

    Layout after setup: ``i # d # c # r`` where c and r are zero-padded to
    the width of d.  Fields are numbered 0..3.
    """

    def __init__(self, name: str):
        self.name = name
        self.delta: dict = {}
        self.count = 0
        self.accept, self.reject = "acc", "rej"

    def new(self, tag="s") -> str:
        self.count += 1
        return f"{tag}{self.count}"

    def on(self, s, syms, t, write=None, move="S"):
        for a in syms:
            self.delta[(s, a)] = (t, a if write is None else write, move)

    def spec(self, start, space=("log", 10), colors=None) -> TMSpec:
        return TMSpec(self.name, start, self.accept, self.reject, dict(self.delta),
                      space[0], space[1], dict(colors or {}))

    # -- navigation --------------------------------------------------------------------

    def field_start(self, s, k: int) -> str:
        """From anywhere, end on the first cell of field k."""
        self.on(s, [x for x in _ALL if x != BLANK], s, move="L")
        cur = self.new("f")
        self.on(s, [BLANK], cur, move="R")
        for _ in range(k):
            nxt = self.new("f")
            self.on(cur, ("0", "1", "a", "b"), cur, move="R")
            self.on(cur, ["#"], nxt, move="R")
            cur = nxt
        return cur

    def field_end(self, s, k: int) -> str:
        cur = self.field_start(s, k)
        out = self.new("e")
        self.on(cur, ("0", "1", "a", "b"), cur, move="R")
        self.on(cur, ("#", BLANK), out, move="L")
        return out

    def tape_end(self, s) -> str:
        """First blank to the right of everything."""
        out = self.new("t")
        self.on(s, [x for x in _ALL if x != BLANK], s, move="R")
        self.on(s, [BLANK], out)
        return out

    # -- arithmetic on the field under the head (entered at its last bit) --------------

    def decrement(self, s) -> str:
        out = self.new("dec")
        self.on(s, ["0"], s, write="1", move="L")
        self.on(s, ["1"], out, write="0")
        self.on(s, ("#", BLANK), self.reject)   # underflow never happens on valid input
        return out

    def increment(self, s) -> str:
        out = self.new("inc")
        self.on(s, ["1"], s, write="0", move="L")
        self.on(s, ["0"], out, write="1")
        self.on(s, ("#", BLANK), self.reject)
        return out

    def is_zero(self, s, k: int):
        cur = self.field_start(s, k)
        yes, no = self.new("z"), self.new("nz")
        self.on(cur, ["0"], cur, move="R")
        self.on(cur, ["1"], no)
        self.on(cur, ["#"], yes)
        self.on(cur, [BLANK], yes, move="L")
        return yes, no

    def zero(self, s, k: int) -> str:
        cur = self.field_start(s, k)
        out = self.new("zz")
        self.on(cur, _BITS, cur, write="0", move="R")
        self.on(cur, ["#"], out)
        self.on(cur, [BLANK], out, move="L")
        return out

    def last_bit(self, s, k: int):
        cur = self.field_end(s, k)
        even, odd = self.new("ev"), self.new("od")
        self.on(cur, ["0"], even)
        self.on(cur, ["1"], odd)
        return even, odd

    def unmark_all(self, s) -> str:
        cur = self.field_start(s, 0)
        out = self.new("um")
        self.on(cur, ["a"], cur, write="0", move="R")
        self.on(cur, ["b"], cur, write="1", move="R")
        self.on(cur, ("0", "1", "#"), cur, move="R")
        self.on(cur, [BLANK], out, move="L")
        return out

    def append_width_of_d(self, s) -> str:
        """Append '#' and |bin(d)| zeros at the right end of the tape."""
        cur = self.tape_end(s)
        loop = self.new("w")
        self.on(cur, [BLANK], loop, write="#")
        find = self.field_start(loop, 1)
        done = self.new("wd")
        back = self.new("wb")
        self.on(find, ("a", "b"), find, move="R")
        self.on(find, ["0"], back, write="a")
        self.on(find, ["1"], back, write="b")
        self.on(find, ("#",), done)
        end = self.tape_end(back)
        self.on(end, [BLANK], loop, write="0")
        return self.unmark_all(done)

    def compare(self, s, x: int, y: int, shifted: bool = False):
        """Compare field x with field y (or with y >> 1 when ``shifted``).

        Fields have equal width.  Returns (equal, different) exit states;
        marks are cleared on both exits.
        """
        eq, ne = self.new("eq"), self.new("ne")
        eq_out, ne_out = self.unmark_all(eq), self.unmark_all(ne)
        loop = s
        if shifted:
            first = self.field_start(s, x)
            loop = self.new("cl")
            self.on(first, ["0"], loop, write="a")
            self.on(first, ["1"], ne)
        cur = self.field_start(loop, x)
        self.on(cur, ("a", "b"), cur, move="R")
        self.on(cur, ["#"], eq)
        self.on(cur, [BLANK], eq, move="L")
        for bit in _BITS:
            carry = self.new("c" + bit)
            self.on(cur, [bit], carry, write=_MARKED[bit])
            tgt = self.field_start(carry, y)
            self.on(tgt, ("a", "b"), tgt, move="R")
            self.on(tgt, [bit], loop, write=_MARKED[bit])
            self.on(tgt, [b for b in _BITS if b != bit] + ["#"], ne)
            self.on(tgt, [BLANK], ne, move="L")
        return eq_out, ne_out

    def divmod_prefix(self, start) -> str:
        """Turn ``i # d`` into ``0 # d # c # r`` with i = r·d + c; returns the exit state."""
        s = self.append_width_of_d(start)
        s = self.append_width_of_d(s)
        loop = s
        done, go = self.is_zero(loop, 0)
        s = self.decrement(self.field_end(go, 0))
        s = self.increment(self.field_end(s, 2))
        eq, ne = self.compare(s, 2, 1)
        self.on(ne, _ALL, loop)
        s = self.zero(eq, 2)
        s = self.increment(self.field_end(s, 3))
        self.on(s, _ALL, loop)
        return done


def _halt(b: TMBuilder, s, target):
    b.on(s, _ALL, target)


def build_tm(name: str) -> TMSpec:
    """Construct one of the shipped machines by name."""
    b = TMBuilder(name)
    start = "start"
    if name == "all":
        _halt(b, start, b.accept)
        return b.spec(start)
    if name == "parity":
        even, odd = b.last_bit(start, 0)
        _halt(b, even, b.accept)
        _halt(b, odd, b.reject)
        return b.spec(start)
    if name == "constant":
        b.accept, b.reject = "black", "white"
        _halt(b, start, "black")
        return b.spec(start, colors={"black": "black"})
    if name == "checker":
        b.accept, b.reject = "black", "white"
        even, odd = b.last_bit(start, 0)
        _halt(b, even, "black")
        _halt(b, odd, "white")
        return b.spec(start, colors={"black": "black", "white": "white"})
    done = b.divmod_prefix(start)
    if name == "leftcol":
        even, odd = b.last_bit(done, 3)
        yes, no = b.is_zero(even, 2)
        _halt(b, yes, b.accept)
        _halt(b, no, b.reject)
        s = b.increment(b.field_end(odd, 2))
        eq, ne = b.compare(s, 2, 1)
        _halt(b, eq, b.accept)
        _halt(b, ne, b.reject)
        return b.spec(start)
    if name == "cross":
        eq, ne = b.compare(done, 3, 1, shifted=True)
        _halt(b, eq, b.accept)
        even_r, odd_r = b.last_bit(ne, 3)
        d_even, d_odd = b.last_bit(odd_r, 1)
        s = b.increment(b.field_end(d_even, 2))
        for entry in (even_r, d_odd, s):
            ok, bad = b.compare(entry, 2, 1, shifted=True)
            _halt(b, ok, b.accept)
            _halt(b, bad, b.reject)
        return b.spec(start)
    if name == "bands":
        # colour = row index mod 3, read from r most significant bit first
        b.accept, b.reject = "band0", "band1"
        cur = b.field_start(done, 3)
        states = [cur, b.new("m1"), b.new("m2")]
        for m, st in enumerate(states):
            for bit in (0, 1):
                b.on(st, [str(bit)], states[(2 * m + bit) % 3], move="R")
            b.on(st, ("#", BLANK), f"band{m}")
        return b.spec(start, colors={f"band{m}": f"band{m}" for m in range(3)})
    raise KeyError(f"unknown machine {name!r}")


SHIPPED = ("all", "parity", "leftcol", "cross", "constant", "checker", "bands")


def shipped_tm(name: str) -> TMSpec:
    """Load a shipped ``.tm`` file from the package data."""
    fname = name if name.endswith(".tm") else f"{name}.tm"
    text = resources.files("netcon.data").joinpath(fname).read_text()
    return parse_tm(text, name=name.removesuffix(".tm"))


def resolve_tm(ref: str) -> TMSpec:
    """A path to a ``.tm`` file or the name of a shipped machine."""
    import os
    if os.path.exists(ref):
        return load_tm(ref)
    return shipped_tm(os.path.basename(ref))
