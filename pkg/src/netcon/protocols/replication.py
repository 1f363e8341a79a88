"""Shape replication: squaring to R_G, copying, release and de-squaring.

Squaring is leaderless.  A node u with perpendicular links h and v tells its
v-neighbour that it needs an h-neighbour (and symmetrically); a node with an
unmet need bonds a free node to that port.  Facing nodes of the growing
rectangle always activate the bond between them.  Only cells diagonal to two
present cells are ever filled, so the component never leaves the bounding
box and stops growing exactly at R_G.

The leader detects a finished rectangle by a column zig-zag scan (up column
0, right, down column 1, ...) that checks every node's links, then labels
the nodes with their column and row.

Approach 1 shifts a copy of the labels one column to the right per round,
growing a new column each round, until the copy sits in a second rectangle
to the right; the two rectangles are then cut apart.

Approach 2 gives every column its index as a matching key, replicates the
rightmost column, releases the replica and then the original column, and
lets columns with consecutive keys (and equal kinds) bond back into two
rectangles.

Both end with de-squaring: each leader scans its rectangle and walks the
zig-zag back, cutting every bond that touches an off node.
"""

from __future__ import annotations

from dataclasses import replace

from ..model import Configuration, Port, normalize_cells, opposite_port
from ..protocol import AgentProtocol, agent_state, sync_links

U, R, D, L = Port.U, Port.R, Port.D, Port.L
DELTA = {U: (0, 1), R: (1, 0), D: (0, -1), L: (-1, 0)}
PERP = {U: (L, R), D: (L, R), L: (U, D), R: (U, D)}


@agent_state
class RHead:
    mode: str
    approach: int
    x: int = 0
    y: int = 0
    W: int = 0
    H: int = 0
    hasR: int = -1
    r: int = 0                # approach 1: shifting round
    c: int = 0                # approach 2: column being replicated
    dirn: int = 1
    wrote: bool = False       # per-mode sub-step flag
    lab: str = "on"           # label used when de-squaring: "on" or "buf"
    aux: str = "square"       # what a successful scan leads to


@agent_state
class RNode:
    kind: str                 # free | in | orig | rep | rkey | waste
    on: bool = False
    buf: str = ""
    col: int = -1
    row: int = -1
    needs: frozenset = frozenset()
    released: bool = False
    done: bool = False
    head: RHead | None = None
    links: frozenset = frozenset()

    def __str__(self):
        tag = "L" if self.head is not None else {"free": "q", "in": "s", "orig": "o", "rep": "r",
                                                 "rkey": "k", "waste": "w"}[self.kind]
        return tag + ("1" if self.on else "0")


FREE = RNode("free")
WASTE = RNode("waste")


def _relinked(s, port, bit):
    return replace(s, links=s.links | {port} if bit else s.links - {port})


# ---------------------------------------------------------------------------
# squaring


def squaring_rule(sa, pa, sb, pb, e):
    """Local squaring rules on ``in`` nodes; None when nothing applies."""
    if sa.kind == "in" and sb.kind == "in":
        if e == 0:
            return replace(sa, needs=sa.needs - {pa}), replace(sb, needs=sb.needs - {pb}), 1
        nb = sb.needs | {h for h in PERP[pa] if h in sa.links and h not in sb.links}
        na = sa.needs | {h for h in PERP[pb] if h in sb.links and h not in sa.links}
        if na == sa.needs and nb == sb.needs:
            return None
        return replace(sa, needs=na), replace(sb, needs=nb), 1
    if (sa.kind == "in" and e == 0 and sb.kind == "free" and pa in sa.needs and pa not in sa.links
            and pb == opposite_port(pa)):
        return replace(sa, needs=sa.needs - {pa}), RNode("in"), 1
    return None


def detection_patterns(cells) -> list:
    """Every (u, h, v) with u, u+h, u+v present and the diagonal u+h+v missing."""
    cells = {tuple(c) for c in cells}
    out = []
    for (x, y) in sorted(cells):
        for dh in ((1, 0), (-1, 0)):
            for dv in ((0, 1), (0, -1)):
                if ((x + dh[0], y) in cells and (x, y + dv[1]) in cells
                        and (x + dh[0], y + dv[1]) not in cells):
                    out.append(((x, y), dh, dv))
    return out


def is_rectangle(cells) -> bool:
    cells = {tuple(c) for c in cells}
    xs = [c[0] for c in cells]
    ys = [c[1] for c in cells]
    return len(cells) == (max(xs) - min(xs) + 1) * (max(ys) - min(ys) + 1)


def enclosing_rectangle(cells) -> set:
    xs = [c[0] for c in cells]
    ys = [c[1] for c in cells]
    return {(x, y) for x in range(min(xs), max(xs) + 1) for y in range(min(ys), max(ys) + 1)}


class SquaringLocal(AgentProtocol):
    """The leaderless squaring rules on their own; quiesces at R_G."""

    name = "squaring-local"
    q0 = FREE

    def catalytic(self, state) -> bool:
        return state.kind == "in"

    def is_output(self, state) -> bool:
        return state.kind == "in"

    def rule(self, sa, pa, sb, pb, e):
        return squaring_rule(sa, pa, sb, pb, e)


def squaring_local_table() -> SquaringLocal:
    return SquaringLocal()


def shape_configuration(cells, free: int, leader: RNode | None = None) -> Configuration:
    """One on-labelled shape (nodes 0..|G|-1, all bonds induced) plus ``free`` free nodes.

    With ``leader`` the first node of ``sorted(cells)`` carries its head.
    """
    cells = sorted(tuple(c) for c in cells)
    states = [RNode("in", on=True)] * len(cells) + [FREE] * free
    cfg = Configuration.from_layout(list(states), {v: c for v, c in enumerate(cells)})
    sync_links(cfg)
    if leader is not None:
        cfg.states[0] = replace(cfg.states[0], head=leader.head)
    return cfg


# ---------------------------------------------------------------------------
# the leader program


class Replication(AgentProtocol):
    """Leader-driven replication of an on-labelled shape (approach 1 or 2)."""

    q0 = FREE

    def __init__(self, approach: int = 1):
        if approach not in (1, 2):
            raise ValueError("approach must be 1 or 2")
        self.approach = approach
        self.name = f"replication-{approach}"

    def leader_head(self) -> RHead:
        return RHead("seek", self.approach)

    def initial_configuration(self, cells, free: int) -> Configuration:
        cfg = shape_configuration(cells, free)
        cfg.states[0] = self._norm(replace(cfg.states[0], head=self.leader_head()))
        return cfg

    # -- bookkeeping -------------------------------------------------------------------

    def is_halted(self, state) -> bool:
        return state.head is not None and state.head.mode == "halt"

    def leader_halted(self, states) -> bool:
        heads = [s for s in states if s.head is not None]
        return len(heads) == 2 and all(s.head.mode == "halt" for s in heads)

    def catalytic(self, state) -> bool:
        return state.kind not in ("free", "waste")

    def is_output(self, state) -> bool:
        return state.kind not in ("free", "waste")

    def phase(self, states) -> str:
        modes = {s.head.mode for s in states if s.head is not None}
        if modes <= {"halt"}:
            return "halted"
        if modes & {"seek", "scan"} and not any(s.kind in ("orig", "rep", "rkey") for s in states):
            return "squaring"
        if modes & {"extend", "copy", "release", "rattach", "rcut", "ocut", "self"}:
            return "replication"
        return "desquaring" if "desq" in modes else "assembly"

    # -- structural rules ------------------------------------------------------------

    def _structural(self, sa, pa, sb, pb, e):
        out = squaring_rule(sa, pa, sb, pb, e)
        if out is not None:
            return out
        if e != 0 or sa.done or sb.done:
            return None
        if sa.kind == "rep" and sb.kind == "rep" and pa == U and pb == D:
            return sa, sb, 1
        if sa.kind == "rkey" and sb.kind == "rkey" and pa == U and pb == D \
                and sa.col == sb.col and sb.row == sa.row + 1:
            return sa, sb, 1
        if (sa.kind == sb.kind and sa.kind in ("orig", "rkey") and pa == R and pb == L
                and sa.released and sb.released and sb.col == sa.col + 1 and sb.row == sa.row):
            return sa, sb, 1
        return None

    def rule(self, sa, pa, sb, pb, e):
        if sb.head is not None and sa.head is None:
            if self._lead(sb, pb, sa, pa, e) is not None:
                return None
            out = self._structural(sa, pa, sb, pb, e)
            if out is None:
                return None
            b2 = _relinked(out[1], pb, out[2]) if out[2] != e else out[1]
            return out[0], self._norm(b2), out[2]
        if sa.head is None:
            return self._structural(sa, pa, sb, pb, e)
        out = self._lead(sa, pa, sb, pb, e)
        if out is not None:
            return out
        out = self._structural(sa, pa, sb, pb, e)
        if out is None:
            return None
        a2 = _relinked(out[0], pa, out[2]) if out[2] != e else out[0]
        return self._norm(a2), out[1], out[2]

    # -- geometry of the leader's rectangle --------------------------------------------

    @staticmethod
    def _col_end(h, y) -> bool:
        return y == (h.H - 1 if h.x % 2 == 0 else 0)

    @staticmethod
    def _pred(h):
        """Port towards the previous node of the column zig-zag."""
        if h.x % 2 == 0:
            return D if h.y > 0 else L
        return U if h.y < h.H - 1 else L

    @staticmethod
    def _first_in_col(h) -> bool:
        return h.y == (0 if h.x % 2 == 0 else h.H - 1)

    def _off(self, s, lab) -> bool:
        return not (s.on if lab == "on" else s.buf == "on")

    def _vertical_ready(self, s, y, H) -> bool:
        return (U in s.links) == (y < H - 1) and (D in s.links) == (y > 0)

    # -- normalisation: eager head transitions ---------------------------------------

    def _norm(self, node):
        h = node.head
        if h is None:
            return node
        for _ in range(64):
            new = self._norm_once(node)
            if new == node:
                return node
            node = new
        raise RuntimeError(f"leader program does not settle in mode {node.head.mode}")

    def _norm_once(self, node):
        h = node.head
        m = h.mode
        links = node.links
        if m == "seek":
            if D in links or L in links:
                return node
            H, W = (h.H, h.W) if h.aux == "assembly" else (0, 0)
            return self._scan_check(node, replace(h, mode="scan", x=0, y=0, H=H, W=W, hasR=-1))
        if m == "mark":
            marked = replace(node, kind="orig", col=h.x, row=h.y, buf="on" if node.on else "off",
                             needs=frozenset())
            if (h.x, h.y) == (0, 0):
                nxt = "extend" if self.approach == 1 else "rattach"
                return replace(marked, head=replace(h, mode=nxt, r=1, c=h.W - 1, wrote=False))
            return marked
        if m in ("extend", "rattach"):
            X = h.W + h.r - 2 if m == "extend" else h.c
            if h.x != X or R not in links:
                return node
            if not h.wrote and h.y == 0:
                return replace(node, head=replace(h, wrote=True))
            if h.wrote and h.y == h.H - 1:
                if m == "extend":
                    return replace(node, head=replace(h, mode="copy", c=X, dirn=-1, wrote=False))
                return replace(node, head=replace(h, mode="rcut", wrote=False))
            return node
        if m == "copy":
            if not h.wrote:
                return node
            end = h.y == (h.H - 1 if h.dirn > 0 else 0)
            if end and h.c == h.r - 1:
                if h.r == h.W:
                    return replace(node, head=replace(h, mode="release", wrote=False, r=h.r + 1))
                return replace(node, head=replace(h, mode="extend", r=h.r + 1, wrote=False))
            return node
        if m in ("release", "rcut"):
            if h.x != (h.W - 1 if m == "release" else h.c) or R in links:
                return node
            if not h.wrote and h.y == 0:
                return replace(node, head=replace(h, wrote=True))
            if h.wrote and h.y == h.H - 1:
                if m == "release":
                    return replace(node, head=replace(h, mode="seek", aux="assembly", wrote=False))
                return replace(node, head=replace(h, mode="ocut" if h.c > 0 else "self", wrote=False))
            return node
        if m == "ocut":
            if not h.wrote and h.y == 0:
                return replace(node, head=replace(h, wrote=True))
            return node
        if m == "self":
            if not node.released:
                return replace(node, released=True)
            if not h.wrote and h.y == 0:
                return replace(node, head=replace(h, wrote=True))
            if h.wrote and h.y == h.H - 1:
                return replace(node, head=replace(h, mode="seek", aux="assembly", wrote=False))
            return node
        if m == "desq":
            if not h.wrote:
                if not (h.x > 0 and not self._first_in_col(h) and L in links):
                    return replace(node, head=replace(h, wrote=True))
                return node
            if (h.x, h.y) == (0, 0):
                return replace(node, head=replace(h, mode="halt"))
            return node
        return node

    def _scan_check(self, node, h):
        links = node.links
        x, y, H, W = h.x, h.y, h.H, h.W
        ok = (L in links) == (x > 0) and (D in links) == (y > 0)
        if H:
            ok = ok and (U in links) == (y < H - 1)
        elif U not in links:
            H = y + 1
            h = replace(h, H=H)
        first = y == (0 if x % 2 == 0 else H - 1)
        if W:
            ok = ok and (R in links) == (x < W - 1)
        elif first:
            h = replace(h, hasR=int(R in links))
        else:
            ok = ok and int(R in links) == h.hasR
        if not ok:
            h = replace(h, mode="seek")
            if (x, y) == (0, 0):
                return replace(node, head=h)
            return self._norm_once(replace(node, head=h))
        if H and y == (H - 1 if x % 2 == 0 else 0) and R not in links:
            h = replace(h, W=x + 1)
            if h.aux == "assembly":
                return replace(node, head=replace(h, mode="desq", wrote=False))
            return replace(node, head=replace(h, mode="mark"))
        return replace(node, head=h)

    # -- what the leader wants to do next --------------------------------------------

    def _want(self, node):
        h = node.head
        m = h.mode
        links = node.links
        if m == "seek":
            return ("move", D) if D in links else (("move", L) if L in links else None)
        if m == "scan":
            if h.x % 2 == 0:
                if (h.H and h.y < h.H - 1) or (not h.H and U in links):
                    return "move", U
            elif h.y > 0:
                return "move", D
            return "move", R
        if m == "mark":
            return "move", self._pred(h)
        if m in ("extend", "rattach"):
            X = h.W + h.r - 2 if m == "extend" else h.c
            if h.x != X:
                return "move", (R if h.x < X else L)
            if R not in links:
                return "attach", R
            return "move", (U if h.wrote else D)
        if m == "copy":
            if not h.wrote:
                return "write", R
            end = h.y == (h.H - 1 if h.dirn > 0 else 0)
            if not end:
                return "move", (U if h.dirn > 0 else D)
            return "move", L
        if m in ("release", "rcut"):
            X = h.W - 1 if m == "release" else h.c
            if h.x != X:
                return "move", (R if h.x < X else L)
            if R in links:
                return "cut", R
            return "move", (U if h.wrote else D)
        if m == "ocut":
            if not h.wrote:
                return "move", D
            if h.y < h.H - 1:
                return ("cut", L) if L in links else ("move", U)
            return "cutmove", L
        if m == "self":
            return "move", (U if h.wrote else D)
        if m == "desq":
            if not h.wrote:
                return "desqL", L
            return "back", self._pred(h)
        return None

    # -- carrying the actions out ------------------------------------------------------

    def _arrive(self, node, h, port):
        dx, dy = DELTA[port]
        h = replace(h, x=h.x + dx, y=h.y + dy)
        m = h.mode
        if m == "copy":
            if port == L:
                h = replace(h, c=h.c - 1, dirn=-h.dirn)
            h = replace(h, wrote=False)
        elif m == "desq":
            h = replace(h, wrote=False)
        elif m == "ocut" and port == L:
            h = replace(h, mode="rattach", c=h.c - 1, wrote=h.y == 0)
        if m == "scan":
            return self._norm(self._scan_check(node, h))
        return self._norm(replace(node, head=h))

    def _lead(self, sa, pa, sb, pb, e):
        want = self._want(sa)
        if want is None or want[1] != pa:
            return None
        act = want[0]
        h = sa.head
        if act == "move":
            if e != 1:
                return None
            return replace(sa, head=None), self._arrive(sb, h, pa), 1
        if act == "attach":
            if e != 0 or sb.kind != "free" or pb != opposite_port(pa):
                return None
            if h.mode == "extend":
                new = RNode("rep", col=h.x + 1, row=h.y)
            else:
                new = RNode("rkey", on=sa.on, col=h.c, row=h.y)
            return self._norm(_relinked(sa, pa, 1)), new, 1
        if e != 1:
            return None
        if act == "write":
            if not self._vertical_ready(sb, h.y, h.H):
                return None
            mine = "" if h.c == h.r - 1 else sa.buf
            return self._norm(replace(sa, buf=mine, head=replace(h, wrote=True))), \
                replace(sb, buf=sa.buf), 1
        if act == "cut":
            a2 = self._norm(_relinked(sa, pa, 0) if h.mode != "ocut"
                            else replace(_relinked(sa, pa, 0), released=True))
            b2 = _relinked(sb, pb, 0)
            if h.mode == "release":
                if h.y == 0:
                    b2 = self._norm(replace(b2, head=RHead("seek", self.approach, W=h.W, H=h.H,
                                                             lab="buf", aux="assembly")))
            elif h.mode == "rcut":
                if not self._vertical_ready(sb, h.y, h.H):
                    return None
                b2 = replace(b2, released=True)
                if h.c == 0 and h.y == 0:
                    b2 = self._norm(replace(b2, head=RHead("seek", self.approach, W=h.W, H=h.H,
                                                             aux="assembly")))
            return a2, b2, 0
        if act == "cutmove":
            left = replace(_relinked(sa, pa, 0), head=None, released=True)
            return left, self._arrive(_relinked(sb, pb, 0), h, pa), 0
        if act == "desqL":
            if self._off(sa, h.lab) or self._off(sb, h.lab):
                a2 = replace(_relinked(sa, pa, 0), done=True, head=replace(h, wrote=True))
                return self._norm(self._waste(a2, h.lab)), self._waste(replace(_relinked(sb, pb, 0), done=True), h.lab), 0
            return self._norm(replace(sa, head=replace(h, wrote=True))), sb, 1
        if act == "back":
            if self._off(sa, h.lab) or self._off(sb, h.lab):
                left = self._waste(replace(_relinked(sa, pa, 0), head=None, done=True), h.lab)
                return left, self._arrive(replace(_relinked(sb, pb, 0), done=True), h, pa), 0
            return replace(sa, head=None), self._arrive(sb, h, pa), 1
        raise AssertionError(act)

    def _waste(self, s, lab):
        if s.links or s.head is not None or not self._off(s, lab):
            return s
        return WASTE


def replication(approach: int = 1) -> Replication:
    return Replication(approach)


def population_for(cells) -> int:
    """Free nodes needed: 2|V(R_G)| - |V(G)|."""
    return 2 * len(enclosing_rectangle(normalize_cells(cells))) - len(cells)
