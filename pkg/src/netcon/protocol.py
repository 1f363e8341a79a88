"""Protocol definitions: rule tables and interaction-driven agent programs.

Both kinds answer one question, :meth:`ProtocolSpec.interact`: given the
states and ports of an unordered pair and the bit of the edge joining them,
what are the new states and edge bit?  Ineffective pairs return None.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, fields, replace
from typing import Hashable, Iterable

from .model import PORTS, Port, opposite_port

ANY = "*"


class ProtocolNondeterminism(RuntimeError):
    """Both orderings of a pair match rules with different effects."""


class ProtocolSpec:
    """Base class for everything the scheduler can run.

    Subclasses implement :meth:`rule`, the ordered lookup.  The unordered
    lookup :meth:`interact` tries both orderings.
    """

    name = "protocol"
    kind = "rule-table"
    q0: Hashable = "q0"
    leader_state: Hashable | None = None
    outputs: frozenset = frozenset()
    halting: frozenset = frozenset()

    def rule(self, sa, pa, sb, pb, e):
        raise NotImplementedError

    def is_halted(self, state) -> bool:
        return state in self.halting

    def catalytic(self, state) -> bool:
        """False only if no interaction between two such states is ever effective."""
        return True

    def is_output(self, state) -> bool:
        return state in self.outputs or state in self.halting

    def leader_halted(self, states) -> bool:
        return any(self.is_halted(s) for s in states)

    def phase(self, states) -> str:
        return ""

    def interact(self, sa, pa, sb, pb, e):
        """Effective outcome ``(sa', sb', e')`` in the given order, or None."""
        if self.is_halted(sa) or self.is_halted(sb):
            return None
        fwd = self.rule(sa, pa, sb, pb, e)
        bwd = self.rule(sb, pb, sa, pa, e)
        if fwd is not None and fwd == (sa, sb, e):
            fwd = None
        if bwd is not None:
            bwd = (bwd[1], bwd[0], bwd[2])
            if bwd == (sa, sb, e):
                bwd = None
        if fwd is not None and bwd is not None and fwd != bwd:
            raise ProtocolNondeterminism(
                f"({sa},{pa}),({sb},{pb}),{e} matches {fwd} and {bwd}")
        return fwd if fwd is not None else bwd


@dataclass(frozen=True)
class Rule:
    a: Hashable
    pa: Port
    b: Hashable
    pb: Port
    e: int | str          # 0, 1 or ANY
    a2: Hashable
    b2: Hashable
    e2: int

    def __str__(self):
        return f"({self.a},{self.pa}),({self.b},{self.pb}),{self.e} -> {self.a2},{self.b2},{self.e2}"


class RuleTable(ProtocolSpec):
    """A finite transition table; unlisted triples are ineffective."""

    def __init__(self, name, rules: Iterable[Rule], q0="q0", leader_state=None,
                 outputs=(), halting=(), states=None):
        self.name = name
        self.rules = [r for r in rules if (r.a, r.b, r.e) != (r.a2, r.b2, r.e2)]
        self.q0 = q0
        self.leader_state = leader_state
        self.outputs = frozenset(outputs)
        self.halting = frozenset(halting)
        self._index: dict = {}
        for r in self.rules:
            for bit in ((0, 1) if r.e == ANY else (r.e,)):
                key = (r.a, r.pa, r.b, r.pb, bit)
                out = (r.a2, r.b2, r.e2)
                if key in self._index and self._index[key] != out:
                    raise ValueError(f"conflicting rules for {key}")
                self._index[key] = out
        found = {q0} | {s for r in self.rules for s in (r.a, r.b, r.a2, r.b2)}
        if leader_state is not None:
            found.add(leader_state)
        self.states = frozenset(states) if states is not None else frozenset(found)

    def __len__(self):
        return len(self.rules)

    def rule(self, sa, pa, sb, pb, e):
        return self._index.get((sa, pa, sb, pb, e))

    def partners(self):
        """Index ``(state, port) -> set of (state, port)`` appearing in some rule."""
        out = {}
        for (a, pa, b, pb, _e) in self._index:
            out.setdefault((a, pa), set()).add((b, pb))
            out.setdefault((b, pb), set()).add((a, pa))
        return out

    def to_text(self) -> str:
        return "\n".join(str(r) for r in self.rules) + "\n"


_RULE_RE = re.compile(
    r"^\(\s*([^,()]+)\s*,\s*([urdl])\s*\)\s*,\s*\(\s*([^,()]+)\s*,\s*([urdl])\s*\)\s*,\s*([01*·])\s*"
    r"->\s*([^,\s]+)\s*,\s*([^,\s]+)\s*,\s*([01])\s*$")


def parse_rules(text: str) -> list[Rule]:
    """Parse ``(state,port),(state,port),bit -> state,state,bit`` lines.

    ``#`` starts a comment; ``*`` (or ``·``) as input bit matches either bit.
    """
    rules = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _RULE_RE.match(line)
        if not m:
            raise ValueError(f"line {lineno}: cannot parse rule {raw!r}")
        a, pa, b, pb, e, a2, b2, e2 = m.groups()
        bit = ANY if e in "*·" else int(e)
        rules.append(Rule(a.strip(), Port.parse(pa), b.strip(), Port.parse(pb), bit,
                          a2, b2, int(e2)))
    return rules


def load_rule_table(path, name=None, **kw) -> RuleTable:
    with open(path) as fh:
        text = fh.read()
    return RuleTable(name or str(path), parse_rules(text), **kw)


class AgentProtocol(ProtocolSpec):
    """Interaction-driven program over hashable (usually frozen dataclass) states.

    The per-interaction update sees only the two node states, their ports and
    the edge bit.  Subclasses implement :meth:`rule`.  States that carry a
    ``links`` field (a frozenset of ports with active edges) are kept in sync
    automatically whenever the edge bit changes.
    """

    kind = "agent-program"

    def interact(self, sa, pa, sb, pb, e):
        out = super().interact(sa, pa, sb, pb, e)
        if out is None or out[2] == e:
            return out
        a2, b2, e2 = out
        return (_relink(a2, pa, e2), _relink(b2, pb, e2), e2)


def agent_state(cls):
    """Frozen dataclass whose hash is computed once per instance.

    Agent states are hashed on every rule lookup, so this matters.
    """
    cls = dataclass(frozen=True)(cls)
    names = tuple(f.name for f in fields(cls))

    def __hash__(self):
        try:
            return self.__dict__["_hash"]
        except KeyError:
            h = hash(tuple(getattr(self, n) for n in names))
            object.__setattr__(self, "_hash", h)
            return h

    cls.__hash__ = __hash__
    return cls


def _relink(state, port, bit):
    links = getattr(state, "links", None)
    if links is None:
        return state
    links = links | {port} if bit else links - {port}
    return replace(state, links=frozenset(links))


def sync_links(cfg) -> None:
    """Set every ``links`` field from the configuration's active edges."""
    for v, s in enumerate(cfg.states):
        if getattr(s, "links", None) is None:
            continue
        ports = frozenset(p for p in PORTS if (v, p) in cfg.edges)
        if ports != s.links:
            cfg.states[v] = replace(s, links=ports)


__all__ = [
    "ANY", "AgentProtocol", "sync_links", "agent_state", "ProtocolNondeterminism", "ProtocolSpec", "Rule",
    "RuleTable", "load_rule_table", "parse_rules", "PORTS", "opposite_port",
]
