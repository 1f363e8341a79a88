"""Builtin rule tables in the plain-text rule format.

State names: ``Lu`` is a leader waiting on port u, ``Lu2`` carries the
superscript 2, ``Ls3`` is the seed-line leader with index 3, and primes are
written ``'``.
"""

from __future__ import annotations

from ..model import PORTS, opposite_port
from ..protocol import RuleTable, parse_rules

_P = "urdl"


def _global_line_text():
    lines = []
    for i in _P:
        for j in _P:
            jbar = _P[opposite_port(_P.index(j))]
            lines.append(f"(L{i},{i}),(q0,{j}),0 -> q1,L{jbar},1")
    return "\n".join(lines)


SQUARE = """
(Lu,u),(q0,d),0 -> q1,Lr,1
(Lr,r),(q0,l),0 -> q1,Ld,1
(Ld,d),(q0,u),0 -> q1,Ll,1
(Ll,l),(q0,r),0 -> q1,Lu,1
(Lu,u),(q1,d),0 -> Ll,q1,1
(Lr,r),(q1,l),0 -> Lu,q1,1
(Ld,d),(q1,u),0 -> Lr,q1,1
(Ll,l),(q1,r),0 -> Ld,q1,1
"""

_SQUARE2_HEAD = """
(Ld2,d),(q0,u),0 -> Lu1,q1,1
(Ll2,l),(q0,r),0 -> Lr1,q1,1
(Lu2,u),(q0,d),0 -> Ld1,q1,1
(Lr2,r),(q0,l),0 -> Lend,q1,1
(Lu1,u),(q0,d),0 -> q1,Ll2,1
(Lr1,r),(q0,l),0 -> q1,Lu2,1
(Ld1,d),(q0,u),0 -> q1,Lr2,1
"""

_SQUARE2_ODD_RULE = "(Lr1,u),(q0,d),0 -> q1,Ll2,1\n"
_SQUARE2_FIXED_RULE = "(Ll1,l),(q0,r),0 -> q1,Ld2,1\n"

_SQUARE2_TAIL = """
(Lend,d),(q0,u),0 -> q1,Ll,1
(Ll,l),(q0,r),0 -> q1,Ll,1
(Ll,l),(q1,r),0 -> q1,Ll3,1
(Lu,u),(q0,d),0 -> q1,Lu,1
(Lu,u),(q1,d),0 -> q1,Lu3,1
(Lr,r),(q0,l),0 -> q1,Lr,1
(Lr,r),(q1,l),0 -> q1,Lr3,1
(Ld,d),(q0,u),0 -> q1,Ld,1
(Ld,d),(q1,u),0 -> q1,Ld3,1
(Ll3,l),(q0,r),0 -> q1,Ld4,1
(Lu3,u),(q0,d),0 -> q1,Ll4,1
(Lr3,r),(q0,l),0 -> q1,Lu4,1
(Ld3,d),(q0,u),0 -> q1,Lr4,1
(Ld4,d),(q0,u),0 -> Lu,q1,1
(Ll4,l),(q0,r),0 -> Lr,q1,1
(Lu4,u),(q0,d),0 -> Ld,q1,1
(Lr4,r),(q0,l),0 -> Lend,q1,1
(q1,u),(q1,d),0 -> q1,q1,1
(q1,r),(q1,l),0 -> q1,q1,1
(Lu,r),(q1,l),0 -> Lu,q1,1
(Lr,d),(q1,u),0 -> Lr,q1,1
(Ld,l),(q1,r),0 -> Ld,q1,1
(Ll,u),(q1,d),0 -> Ll,q1,1
"""

LINE_REPLICATION = """
(L,d),(q0,u),0 -> L',Ls1,1
(i,d),(q0,u),0 -> i',i',1
(e,d),(q0,u),0 -> e',e',1
(i',r),(i',l),0 -> i',i',1
(i',r),(e',l),0 -> i',e',1
(Ls1,r),(i',l),0 -> e',Ls2,1
(Ls2,r),(i',l),* -> i',Ls2,1
(Ls2,r),(e',l),* -> i',Ls3,1
(Ls3,u),(e',d),1 -> Ls4,e',0
(i',r),(Ls4,l),1 -> Ls5,e',1
(Ls5,u),(i',d),1 -> Ls6,i',0
(i',r),(Ls6,l),1 -> Ls5,i',1
(e',r),(Ls6,l),1 -> Ls7,i',1
(Ls7,u),(L',d),1 -> Lst,Lt,0
(Lt,r),(i',l),1 -> e',Lt',1
(Lst,r),(i',l),1 -> e',Lst',1
(Lt',r),(i',l),1 -> i',Lt',1
(Lst',r),(i',l),1 -> i',Lst',1
(Lt',r),(e',l),1 -> Lt'',e,1
(Lst',r),(e',l),1 -> Lst'',e,1
(i',r),(Lt'',l),1 -> Lt'',i,1
(i',r),(Lst'',l),1 -> Lst'',i,1
(e',r),(Lst'',l),1 -> Ls,i,1
(e',r),(Lt'',l),1 -> Lstart,i,1
"""

NO_LEADER_LINE_REPLICATION = """
(i,d),(q0,u),0 -> i1,i1,1
(e,d),(q0,u),0 -> e1,e1,1
(i1,r),(i1,l),0 -> i2,i2,1
(i1,r),(i2,l),0 -> i2,i3,1
(i2,r),(i1,l),0 -> i3,i2,1
(i2,r),(i2,l),0 -> i3,i3,1
(i1,r),(e1,l),0 -> i2,e2,1
(i2,r),(e1,l),0 -> i3,e2,1
(e1,r),(i1,l),0 -> e2,i2,1
(e1,r),(i2,l),0 -> e2,i3,1
(i3,u),(i1,d),1 -> i,i,0
(e2,u),(e1,d),1 -> e,e,0
"""


def _table(name, text, **kw):
    return RuleTable(name, parse_rules(text), **kw)


def global_line():
    return _table("global-line", _global_line_text(), leader_state="Lr",
                  outputs={"q1"} | {f"L{p}" for p in _P})


def square():
    return _table("square", SQUARE, leader_state="Lu", outputs={"q1", "Lu", "Lr", "Ld", "Ll"})


def square2(corrected: bool = False):
    text = _SQUARE2_HEAD + (_SQUARE2_FIXED_RULE if corrected else _SQUARE2_ODD_RULE) + _SQUARE2_TAIL
    rules = parse_rules(text)
    states = {r.a for r in rules} | {r.a2 for r in rules} | {r.b2 for r in rules}
    return RuleTable("square2-corrected" if corrected else "square2", rules, leader_state="Ld2",
                     outputs=states - {"q0"})


def line_replication():
    return _table("line-replication", LINE_REPLICATION, leader_state="L",
                  outputs={"L", "Ls", "Lstart", "i", "e"})


def no_leader_line_replication(corrected: bool = False):
    """As printed, a parent node enters the same state i_1/e_1 as its child, so
    the free end of a parent line can bond to a foreign replica row.  The
    corrected table gives parents their own marks ``ip``/``ep``."""
    if not corrected:
        return _table("no-leader-line-replication", NO_LEADER_LINE_REPLICATION, outputs={"i", "e"})
    text = (NO_LEADER_LINE_REPLICATION
            .replace("(i,d),(q0,u),0 -> i1,i1,1", "(i,d),(q0,u),0 -> ip,i1,1")
            .replace("(e,d),(q0,u),0 -> e1,e1,1", "(e,d),(q0,u),0 -> ep,e1,1")
            .replace("(i3,u),(i1,d),1 -> i,i,0", "(i3,u),(ip,d),1 -> i,i,0")
            .replace("(e2,u),(e1,d),1 -> e,e,0", "(e2,u),(ep,d),1 -> e,e,0"))
    return _table("no-leader-line-replication-corrected", text, outputs={"i", "e"})


__all__ = ["global_line", "square", "square2", "line_replication", "no_leader_line_replication",
           "PORTS"]
