"""Counting-on-a-Line: the leader's tape is its own active line.

Cell k of the line (leftmost is k = 0) stores bit k of the counters r0 and
r1.  A head token walks the tape; when it is idle it sits on the rightmost
cell and meets free nodes with that cell's r port.  The debt r2 and the
armed flag (r0 >= b) travel with the head.
"""

from __future__ import annotations

from dataclasses import replace

from ..model import Port
from ..protocol import AgentProtocol, agent_state

L, R = Port.L, Port.R


@agent_state
class Head:
    op: str = "idle"          # idle | seek | ripple | halt
    target: int = 0           # counter being incremented: 0 -> r0, 1 -> r1
    carry: int = 0
    ones: bool = True         # every r0 bit seen so far is 1
    eq: bool = True           # r0 and r1 agree on every bit seen so far
    full: bool = False
    r2: int = 0
    small: int = 0            # min(r0, b)


@agent_state
class Node:
    kind: str                 # q0 | q1 | q2 | cell
    b0: int = 0
    b1: int = 0
    head: Head | None = None
    links: frozenset = frozenset()

    def __str__(self):
        if self.kind != "cell":
            return self.kind
        return f"{'H' if self.head else 'c'}{self.b0}{self.b1}"


Q0, Q1, Q2 = Node("q0"), Node("q1"), Node("q2")


class CountingOnALine(AgentProtocol):
    """Leader-driven counting whose counters live on the growing line."""

    name = "counting-on-a-line"

    def __init__(self, b: int = 5):
        if b < 1:
            raise ValueError("head start must be positive")
        self.b = b
        self.q0 = Q0
        self.leader_state = Node("cell", head=Head())

    def initial_states(self, n: int):
        return [self.leader_state] + [Q0] * (n - 1)

    def is_halted(self, state) -> bool:
        return state.head is not None and state.head.op == "halt"

    def catalytic(self, state) -> bool:
        return state.head is not None

    def leader_halted(self, states) -> bool:
        return any(s.head is not None and s.head.op == "halt" for s in states)

    def phase(self, states) -> str:
        for s in states:
            if s.head is not None:
                return "halted" if s.head.op == "halt" else ("counting" if s.head.op == "idle" else "tape")
        return ""

    # -- head movement ------------------------------------------------------------

    def _process(self, node: Node) -> Node:
        """Run the head's operation at ``node`` right after it arrives."""
        h = node.head
        if h.op == "seek":
            if L in node.links:
                return node
            h = replace(h, op="ripple", carry=1, ones=True, eq=True)
        bits = [node.b0, node.b1]
        t = h.target
        bits[t], carry = bits[t] ^ h.carry, bits[t] & h.carry
        h = replace(h, carry=carry, ones=h.ones and bits[0] == 1, eq=h.eq and bits[0] == bits[1])
        node = replace(node, b0=bits[0], b1=bits[1])
        if R in node.links:
            return replace(node, head=h)
        # rightmost cell: the operation is complete
        if t == 0:
            h = replace(h, full=h.ones, small=min(self.b, h.small + 1))
        halt = t == 1 and h.eq
        return replace(node, head=replace(h, op="halt" if halt else "idle", carry=0))

    def rule(self, sa, pa, sb, pb, e):
        h = sa.head
        if h is None or sa.kind != "cell":
            return None
        if e == 1:
            if h.op == "seek" and pa == L and pb == R:
                return replace(sa, head=None), self._process(replace(sb, head=h)), 1
            if h.op == "ripple" and pa == R and pb == L:
                return replace(sa, head=None), self._process(replace(sb, head=h)), 1
            return None
        if h.op != "idle" or pa != R or pb != L or R in sa.links:
            return None
        if sb == Q0:
            if not h.full:
                return self._process(replace(sa, head=replace(h, op="seek", target=0))), Q1, 0
            cell = Node("cell", links=frozenset({L}),
                        head=replace(h, op="seek", target=0, r2=h.r2 + 1))
            return replace(sa, head=None, links=sa.links | {R}), self._process(cell), 1
        if sb == Q1 and h.small >= self.b:
            return self._process(replace(sa, head=replace(h, op="seek", target=1))), Q2, 0
        if sb == Q2 and h.r2 >= 1:
            return replace(sa, head=replace(h, r2=h.r2 - 1)), Q1, 0
        return None


def read_tape(cfg):
    """``(r0, r1, length, head)`` of the leader's line, read left to right."""
    leader = next(v for v, s in enumerate(cfg.states) if getattr(s, "head", None) is not None)
    v = leader
    while (v, L) in cfg.edges:
        v = cfg.edges[(v, L)][0]
    r0 = r1 = 0
    k = 0
    while True:
        s = cfg.states[v]
        r0 |= s.b0 << k
        r1 |= s.b1 << k
        k += 1
        if (v, R) not in cfg.edges:
            break
        v = cfg.edges[(v, R)][0]
    return r0, r1, k, cfg.states[leader].head


def counting_on_a_line(b: int = 5) -> CountingOnALine:
    return CountingOnALine(b)
