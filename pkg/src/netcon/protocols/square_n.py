"""Square-Knowing-n: a terminating √n × √n square built from line replicas.

The leader owns a line of length d = √n (the original row).  Every line
node spawns a child below it; children bond horizontally when both sides
still need a neighbour, and a child releases its vertical bond only once its
horizontal needs are met.  Since an endpoint of a shorter segment always
lacks a neighbour, only complete rows ever detach.  A detached row confirms
itself with a sweep to the right and a "live" sweep back; only live rows
spawn, so a half-detached row never competes with its own grandchildren for
free nodes.  The original row spawns
once (the seed); seed and replica rows respawn whenever their child row has
left.

The leader sits at the bottom-left corner of the growing segment and bonds
the left end of a replica below itself.  It then walks the new row,
activating the vertical bonds and cutting off any children the row was still
carrying (those become orphans and dissolve).  The seed is only accepted
once the segment has d - 1 rows.
"""

from __future__ import annotations

from dataclasses import replace
from math import isqrt

from ..model import Configuration, Port
from ..protocol import AgentProtocol, agent_state
from . import counting_line as cl

U, R, D, L = Port.U, Port.R, Port.D, Port.L
LINE_KINDS = ("orig", "seed", "rep")


@agent_state
class SqHead:
    mode: str                 # build | read | shape | trim | return | wait | join | back | halt
    d: int = 0
    count: int = 0            # replica rows joined so far
    idx: int = 0              # position along the line while shaping it
    val: int = 0              # counter value read from the tape
    final: bool = False       # the row being joined is the seed


@agent_state
class SqNode:
    kind: str                 # free | orig | seed | rep | child | seg | orphan
    role: str = ""            # L | I | R for line nodes and children
    pkind: str = ""           # kind of the parent line, for children
    spawned: bool = False     # original row: the seed has been spawned
    ready: bool = False       # original row: the line is complete
    stage: int = 0            # detached rows: 0 new, 1 left part confirmed, 2 live
    head: SqHead | None = None
    links: frozenset = frozenset()

    def __str__(self):
        tag = {"free": "q", "orig": "o", "seed": "s", "rep": "r", "child": "c", "seg": "#",
               "orphan": "x"}[self.kind]
        return ("L" if self.head is not None else tag) + self.role


FREE = SqNode("free")


def is_material(s) -> bool:
    if isinstance(s, SqNode):
        return s.kind == "free"
    return isinstance(s, cl.Node) and s.kind in ("q0", "q1", "q2")


def _needs_met(s: SqNode) -> bool:
    if s.role == "L":
        return R in s.links
    if s.role == "R":
        return L in s.links
    return L in s.links and R in s.links


def _orphan(s, drop) -> SqNode:
    links = s.links - {drop}
    return FREE if not links else replace(s, kind="orphan", head=None, links=links)


class SquareKnowingN(AgentProtocol):
    """Leader-driven terminating square on n = d² nodes.

    ``count_source="injected"`` gives the leader n directly; ``"simulated"``
    first runs Counting-on-a-Line and takes d = ⌊√r0⌋.
    """

    name = "square-knowing-n"

    def __init__(self, count_source: str = "injected", n: int | None = None, b: int = 5):
        if count_source not in ("injected", "simulated"):
            raise ValueError("count_source must be 'injected' or 'simulated'")
        self.count_source = count_source
        self.n = n
        self.q0 = FREE
        if count_source == "injected":
            if n is None or n < 1 or isqrt(n) ** 2 != n:
                raise ValueError(f"injected population size must be a perfect square, got {n}")
            d = isqrt(n)
            mode = "halt" if d == 1 else ("return" if d == 1 else "build")
            self.leader_state = SqNode("orig", role="L", head=SqHead(mode, d=d, idx=1))
            self.counter = None
        else:
            self.counter = cl.CountingOnALine(b)
            self.leader_state = self.counter.leader_state

    def initial_states(self, n: int):
        if self.count_source == "injected":
            if n != self.n:
                raise ValueError("population differs from the injected count")
            return [self.leader_state] + [FREE] * (n - 1)
        return self.counter.initial_states(n)

    # -- bookkeeping -----------------------------------------------------------------

    def is_halted(self, state) -> bool:
        return isinstance(state, SqNode) and state.head is not None and state.head.mode == "halt"

    def leader_halted(self, states) -> bool:
        return any(self.is_halted(s) for s in states)

    def catalytic(self, state) -> bool:
        return not is_material(state)

    def phase(self, states) -> str:
        for s in states:
            h = getattr(s, "head", None)
            if h is None:
                continue
            if isinstance(s, cl.Node):
                return "counting"
            if h.mode in ("read", "shape", "trim", "build", "return"):
                return "replication"
            if h.mode == "halt":
                return "halted"
            return "assembly"
        return ""

    # -- rules -------------------------------------------------------------------------

    def rule(self, sa, pa, sb, pb, e):
        if isinstance(sa, cl.Node) and sa.head is not None:
            out = self.counter.rule(sa, pa, sb, pb, e)
            if out is None:
                return None
            return tuple(self._after_count(x) if isinstance(x, cl.Node) else x for x in out[:2]) + (out[2],)
        if isinstance(sa, SqNode) and sa.head is not None:
            out = self._leader(sa, pa, sb, pb, e)
            if out is not None:
                return out
        if isinstance(sa, SqNode):
            return self._structural(sa, pa, sb, pb, e)
        return None

    def _after_count(self, s):
        """Hand a halted counting head over to the square phase."""
        if s.head is None or s.head.op != "halt":
            return s
        return SqNode("orig", head=SqHead("read", val=s.b0), links=s.links)

    def _leader(self, sa, pa, sb, pb, e):
        h = sa.head
        m = h.mode
        if m == "read":
            # walk from the most significant cell to the least, reading r0
            if e == 1 and pa == L and pb == R and isinstance(sb, cl.Node):
                val = 2 * h.val + sb.b0
                nxt = SqNode("orig", links=sb.links)
                if L in sb.links:
                    return replace(sa, head=None), replace(nxt, head=replace(h, val=val)), 1
                return replace(sa, head=None), self._start_shape(nxt, val), 1
            return None
        if m == "shape":
            if e == 1 and pa == R and pb == L:
                return self._shape_step(sa, sb)
            if e == 0 and pa == R and pb == L and R not in sa.links and is_material(sb):
                role = "R" if h.idx + 1 == h.d - 1 else "I"
                new = SqNode("orig", role=role, links=frozenset({L}))
                return (replace(sa, head=None, links=sa.links | {R}),
                        self._arrive_shape(new, replace(h, idx=h.idx + 1)), 1)
            return None
        if m == "trim":
            if e == 1 and pa == R and pb == L:
                return replace(sa, head=None), replace(sb, head=replace(h, idx=h.idx + 1)), 1
            if e == 1 and pa == L and pb == R and R not in sa.links:
                # cut the rightmost cell loose and step back
                if h.idx - 1 == h.d - 1:
                    return FREE, replace(sb, role="R", links=sb.links - {R},
                                         head=replace(h, mode="return")), 0
                return FREE, replace(sb, links=sb.links - {R}, head=replace(h, idx=h.idx - 1)), 0
            return None
        if m == "build":
            if e == 0 and pa == R and pb == L and R not in sa.links and is_material(sb):
                idx = h.idx + 1
                new = SqNode("orig", role="R", links=frozenset({L}),
                             head=replace(h, idx=idx, mode="return" if idx == h.d else "build"))
                return replace(sa, head=None, role="L" if sa.role == "L" else "I",
                               links=sa.links | {R}), new, 1
            return None
        if m == "return":
            if e == 1 and pa == L and pb == R:
                arrived = replace(sb, head=h)
                if L not in sb.links:
                    arrived = replace(sb, ready=True, head=replace(h, mode="wait"))
                return replace(sa, head=None, ready=True), arrived, 1
            return None
        if m == "wait":
            if (e == 0 and pa == D and pb == U and isinstance(sb, SqNode) and sb.role == "L"
                    and sb.stage == 2 and D not in sa.links):
                if (sb.kind == "rep" and h.count < h.d - 2) or (sb.kind == "seed" and h.count == h.d - 2):
                    new = replace(sb, kind="seg", links=sb.links | {U},
                                  head=replace(h, mode="join", final=sb.kind == "seed"))
                    return replace(sa, head=None, links=sa.links | {D}), self._settle(new), 1
            return None
        if m == "join":
            if e == 0 and pa == U and pb == D and isinstance(sb, SqNode) and sb.kind in ("seg", "orig"):
                return self._settle(replace(sa, links=sa.links | {U})), replace(sb, links=sb.links | {D}), 1
            if e == 1 and pa == D and pb == U:
                return self._settle(replace(sa, links=sa.links - {D})), _orphan(sb, U), 0
            if e == 1 and pa == R and pb == L and U in sa.links and D not in sa.links:
                return replace(sa, head=None), self._settle(replace(sb, kind="seg", head=h)), 1
            return None
        if m == "back":
            if e == 1 and pa == L and pb == R:
                if L in sb.links:
                    return replace(sa, head=None), replace(sb, head=h), 1
                mode = "halt" if h.final else "wait"
                return replace(sa, head=None), replace(sb, head=replace(h, mode=mode)), 1
            return None
        return None

    def _start_shape(self, node, val):
        d = 1
        while (d + 1) * (d + 1) <= val:      # trial multiplication k·k for k = 1, 2, ...
            d += 1
        h = SqHead("shape", d=d, idx=0, val=val)
        if d <= 1:
            return replace(node, role="L", head=replace(h, mode="halt"))
        return self._arrive_shape(replace(node, role="L"), h)

    def _arrive_shape(self, node, h):
        """Head arrives at cell ``h.idx`` of the line being shaped to length d."""
        if h.idx == h.d - 1:
            if R in node.links:
                return replace(node, role="R", head=replace(h, mode="trim"))
            return replace(node, role="R", head=replace(h, mode="return"))
        role = "L" if h.idx == 0 else "I"
        return replace(node, role=role, head=h)

    def _shape_step(self, sa, sb):
        h = sa.head
        if isinstance(sb, cl.Node):
            sb = SqNode("orig", links=sb.links)
        return replace(sa, head=None), self._arrive_shape(sb, replace(h, idx=h.idx + 1)), 1

    def _settle(self, node):
        """Finish the current row once the head stands on its right end with no work left."""
        h = node.head
        if h.mode == "join" and U in node.links and D not in node.links and R not in node.links:
            return replace(node, head=replace(h, mode="back", count=h.count + (0 if h.final else 1)))
        return node

    def _structural(self, sa, pa, sb, pb, e):
        if e == 0 and pa == D and pb == U and is_material(sb) and D not in sa.links:
            if (sa.kind in ("seed", "rep") and sa.stage == 2) or (sa.kind == "orig" and sa.ready and not sa.spawned):
                child = SqNode("child", role=sa.role, pkind=sa.kind, links=frozenset({U}))
                return replace(sa, spawned=True, links=sa.links | {D}), child, 1
            return None
        if not isinstance(sb, SqNode):
            return None
        if (e == 0 and pa == R and pb == L and sa.kind == "child" and sb.kind == "child"
                and sa.role in ("L", "I") and sb.role in ("I", "R")):
            return replace(sa, links=sa.links | {R}), replace(sb, links=sb.links | {L}), 1
        if (e == 1 and pa == U and pb == D and sa.kind == "child" and _needs_met(sa)
                and sb.kind in LINE_KINDS):
            kind = "seed" if sb.kind == "orig" else "rep"
            return (SqNode(kind, role=sa.role, stage=int(sa.role == "L"), links=sa.links - {U}),
                    replace(sb, links=sb.links - {D}), 0)
        if e == 1 and pa == R and pb == L and sa.kind in ("seed", "rep") and sb.kind == sa.kind:
            if sa.stage >= 1 and sb.stage == 0:
                return sa, replace(sb, stage=2 if sb.role == "R" else 1), 1
            return None
        if e == 1 and pa == L and pb == R and sa.kind in ("seed", "rep") and sb.kind == sa.kind:
            if sa.stage == 2 and sb.stage == 1:
                return sa, replace(sb, stage=2), 1
            return None
        if e == 1 and sa.kind == "orphan":
            if pa == U:
                other = replace(sb, links=sb.links - {pb})
            else:
                other = _orphan(sb, pb)
            return _orphan(sa, pa), other, 0
        return None


def square_knowing_n(count_source: str = "injected", n: int | None = None, b: int = 5):
    return SquareKnowingN(count_source, n, b)



def stalled_replica_trial(seed: int, n: int = 16, max_steps: float = 5_000_000):
    """Adversarial run: a replica row is attached while its own child row is half built.

    The adversary first holds back every attachment to the leader until a
    whole replica row has left the seed, then stops the seed from respawning and the row's
    right end from spawning, until the row carries between 1 and d - 1
    children.  That attachment is then forced and the random scheduler takes
    over.  Returns ``(cfg, released, result)`` where ``released`` counts the
    children cut loose by the join walk and ``result`` is the final RunResult
    (None if the situation never arose within ``max_steps``).
    """
    from ..model import feasible_alignment
    from ..scheduler import Interaction, Simulation, _apply, trial_rng

    spec = SquareKnowingN("injected", n)
    cfg = Configuration(spec.initial_states(n))
    d = isqrt(n)

    def live_rep(cfg):
        return next((v for v, s in enumerate(cfg.states)
                     if s.kind == "rep" and s.role == "L" and s.stage == 2 and U not in s.links), None)

    def kids(cfg, v):
        row = cfg.components[cfg.comp[v]].cells.values()
        return [cfg.edges[(w, D)][0] for w in row if cfg.states[w].kind == "rep" and (w, D) in cfg.edges]

    def stalled(cfg):
        v = live_rep(cfg)
        return v is not None and 0 < len(kids(cfg, v)) < d

    res = Simulation(cfg, _Holding("injected", n), trial_rng(seed, 0), count_total=False).run(
        lambda c: sum(s.kind == "rep" for s in c.states) == d, max_steps=max_steps)
    if res.reason == "stop":
        res = Simulation(cfg, _Holding("injected", n, starve=True), trial_rng(seed, 1),
                         count_total=False).run(stalled, max_steps=max_steps)
    if res.reason != "stop":
        return cfg, 0, None
    v = live_rep(cfg)
    lead = next(w for w, s in enumerate(cfg.states) if s.head is not None)
    pl = feasible_alignment(cfg, lead, D, v, U)
    if cfg.states[lead].head.mode != "wait" or pl is None:
        return cfg, 0, None
    cut = kids(cfg, v)
    out = spec.interact(cfg.states[lead], D, cfg.states[v], U, 0)
    _apply(cfg, Interaction("cross", lead, D, v, U, pl), out)
    released = set()

    def watch(sim, ev):
        released.update(w for w in cut if sim.cfg.states[w].kind in ("orphan", "free"))

    res = Simulation(cfg, spec, trial_rng(seed, 2), count_total=False).run(
        "leader-halted", max_steps=max_steps, on_event=watch)
    return cfg, len(released), res


class _Holding(SquareKnowingN):
    """Square-Knowing-n with an adversary: the leader never accepts a row, and
    with ``starve`` the seed does not respawn and replica rows never spawn
    below their right end, so a child row stays half built."""

    def __init__(self, count_source, n, starve=False):
        super().__init__(count_source, n)
        self.starve = starve

    def _leader(self, sa, pa, sb, pb, e):
        if sa.head.mode == "wait":
            return None
        return super()._leader(sa, pa, sb, pb, e)

    def _structural(self, sa, pa, sb, pb, e):
        if self.starve and e == 0 and pa == D and (sa.kind == "seed" or (sa.kind == "rep" and sa.role == "R")):
            return None
        return super()._structural(sa, pa, sb, pb, e)
