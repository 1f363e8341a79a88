"""Named protocol setups: a spec, its initial configuration and a success check.

Used by the command line and the acceptance suite, so both run exactly the
same experiments.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import isqrt
from typing import Callable

from .model import Configuration, Port, canonical_cells, congruent, normalize_cells, rotate
from .protocol import load_rule_table
from .protocols import BUILTINS, builtin_rule_table

PLUS = ((1, 0), (0, 1), (1, 1), (2, 1), (1, 2))

AGENT_PROTOCOLS = ("counting-on-a-line", "square-knowing-n", "universal", "replication1", "replication2")
PROTOCOLS = tuple(BUILTINS) + ("squaring-local",) + AGENT_PROTOCOLS


@dataclass
class Setup:
    name: str
    spec: object
    cfg: Configuration
    stop: str = "quiescent"
    check: Callable | None = None     # cfg -> (ok, summary)
    info: dict = field(default_factory=dict)


def line_configuration(states) -> Configuration:
    k = len([s for s in states if s != "q0"])
    return Configuration.from_layout(list(states), {v: (v, 0) for v in range(k)})


def horizontal_row(cfg: Configuration, v: int) -> list[int]:
    """Nodes reachable from v along active local l/r bonds."""
    row = [v]
    for p in (Port.L, Port.R):
        w = v
        while (w, p) in cfg.edges:
            w = cfg.edges[(w, p)][0]
            row.append(w)
    return row


def square_check(k: int):
    def check(cfg):
        comps = [c for c in cfg.components.values() if len(c) > 1]
        if len(comps) != 1 or len(comps[0]) != k * k:
            return False, f"components {sorted(len(c) for c in comps)}"
        cells = set(normalize_cells(comps[0].cells))
        full = cells == {(x, y) for x in range(k) for y in range(k)}
        inner = 2 * k * (k - 1)
        active = len(cfg.edges) // 2
        return full and active == inner, f"{k}x{k} square, {active}/{inner} internal bonds active"
    return check


def line_replication_check(k: int):
    def check(cfg):
        comps = sorted((c for c in cfg.components.values() if len(c) > 1), key=lambda c: min(c.nodes))
        lines = [normalize_cells(c.cells) for c in comps]
        straight = all(len({x for x, _ in cs}) == 1 or len({y for _, y in cs}) == 1 for cs in lines)
        ok = len(comps) == 2 and all(len(c) == k for c in comps) and straight
        ok = ok and cfg.states[0] == "Lstart" and all(cfg.states[v] == "i" for v in range(1, k - 1))
        ok = ok and cfg.states[k - 1] == "e"
        return ok, f"lines {[len(c) for c in comps]}, left end {cfg.states[0]}"
    return check


def placed_cells(cfg: Configuration, comp) -> frozenset:
    """Component cells in the frame of its first node, normalised."""
    v0 = min(comp.nodes)
    return normalize_cells(rotate(p, -cfg.rot[v0]) for p in comp.cells)


def replication_check(cells):
    want = canonical_cells(cells)

    def check(cfg):
        comps = [c for c in cfg.components.values() if len(c) > 1]
        good = len(comps) == 2 and all(canonical_cells(c.cells) == want for c in comps)
        if len(cells) == 1:
            good = not comps
        freed = cfg.n - sum(len(c) for c in comps)
        return good, f"{len(comps)} copies, {freed} freed"
    return check


def universal_check(tm, d):
    from .turing import shape_of
    want = shape_of(tm, d)

    def check(cfg):
        comps = [c for c in cfg.components.values() if len(c) > 1]
        if len(want.on) == 1:
            ok = not comps
        else:
            ok = len(comps) == 1 and placed_cells(cfg, comps[0]) == normalize_cells(want.cells())
        freed = len(cfg.free_nodes())
        return ok and freed == len(want.off), f"{len(want.on)} on pixels, {freed} freed"
    return check


def build(name: str, n: int | None = None, b: int = 5, length: int | None = None, tm=None,
          d: int | None = None, shape=None, leader: str | None = None) -> Setup:
    """Setup for a protocol name (or a path to a rule file)."""
    if name in ("line-replication", "no-leader-line-replication", "no-leader-line-replication-corrected"):
        k = length or 3
        spec = builtin_rule_table(name)
        if name == "line-replication":
            line = ["L"] + ["i"] * (k - 2) + ["e"]
            extra = (n - k) if n else k
            return Setup(name, spec, line_configuration(line + ["q0"] * extra),
                         check=line_replication_check(k), info={"length": k})
        line = ["e"] + ["i"] * (k - 2) + ["e"]
        extra = (n - k) if n else 3 * k
        return Setup(name, spec, line_configuration(line + ["q0"] * extra), info={"length": k})
    if name in BUILTINS or name == "squaring-local":
        if name == "squaring-local":
            from .protocols.replication import enclosing_rectangle, shape_configuration
            cells = tuple(shape or PLUS)
            rect = enclosing_rectangle(cells)
            spec = builtin_rule_table(name)
            cfg = shape_configuration(cells, (n - len(cells)) if n else len(rect) - len(cells))
            want = normalize_cells(rect)

            def check(cfg):
                comps = [c for c in cfg.components.values() if any(cfg.states[v].kind == "in" for v in c.nodes)]
                return (len(comps) == 1 and normalize_cells(comps[0].cells) == want,
                        f"{sum(len(c) for c in comps)} nodes squared")
            return Setup(name, spec, cfg, check=check)
        spec = builtin_rule_table(name)
        n = n or 9
        states = ([spec.leader_state] if spec.leader_state else []) + ["q0"] * (n - (1 if spec.leader_state else 0))
        k = isqrt(n)
        check = square_check(k) if name.startswith("square") and k * k == n else None
        return Setup(name, spec, Configuration(states), check=check)
    if name == "counting-on-a-line":
        from .protocols.counting_line import CountingOnALine, read_tape
        spec = CountingOnALine(b)
        n = n or 32

        def check(cfg):
            r0, r1, length, head = read_tape(cfg)
            return r0 >= n // 2 and length == r0.bit_length(), f"r0={r0} r1={r1} tape={length}"
        return Setup(name, spec, Configuration(spec.initial_states(n)), "leader-halted", check)
    if name == "square-knowing-n":
        from .protocols.square_n import SquareKnowingN
        n = n or 9
        spec = SquareKnowingN("injected", n, b)
        return Setup(name, spec, Configuration(spec.initial_states(n)), "leader-halted", square_check(isqrt(n)))
    if name == "universal":
        from .protocols.universal import UniversalConstructor
        from .turing import resolve_tm
        tm = resolve_tm(tm or "leftcol") if isinstance(tm, (str, type(None))) else tm
        if d is None:
            d = isqrt(n) if n else 3
        spec = UniversalConstructor(tm, "injected", d * d, b)
        return Setup(name, spec, Configuration(spec.initial_states(d * d)), "leader-halted",
                     universal_check(tm, d), {"tm": tm.name, "d": d})
    if name in ("replication1", "replication2"):
        from .protocols.replication import Replication, population_for
        cells = tuple(shape or PLUS)
        spec = Replication(int(name[-1]))
        free = (n - len(cells)) if n else population_for(cells)
        return Setup(name, spec, spec.initial_configuration(cells, free), "leader-halted",
                     replication_check(cells))
    # a rule file on disk
    spec = load_rule_table(name, leader_state=leader)
    n = n or 9
    states = ([leader] if leader else []) + ["q0"] * (n - (1 if leader else 0))
    return Setup(name, spec, Configuration(states))


__all__ = ["PLUS", "PROTOCOLS", "Setup", "build", "congruent", "horizontal_row", "placed_cells"]
