"""Exhaustive reachability over small configuration spaces.

Configurations are identified up to node renaming and rigid motions of each
component; free nodes are a multiset of states.
"""

from __future__ import annotations

from collections import deque

from .model import PORTS, Configuration, feasible_alignment, rotate
from .scheduler import Interaction, _apply, intra_pairs, exposed_slots


def _component_key(cfg: Configuration, cid: int):
    comp = cfg.components[cid]
    best = None
    for k in range(4):
        cells = {c: rotate(c, k) for c in comp.cells}
        mx = min(c[0] for c in cells.values())
        my = min(c[1] for c in cells.values())
        nodes = []
        for c, v in comp.cells.items():
            x, y = cells[c]
            links = tuple(sorted((p + cfg.rot[v] + k) % 4 for p in PORTS if (v, p) in cfg.edges))
            nodes.append(((x - mx, y - my), repr(cfg.states[v]), (cfg.rot[v] + k) % 4, links))
        key = tuple(sorted(nodes))
        if best is None or key < best:
            best = key
    return best


def canonical_key(cfg: Configuration):
    """Hashable key equal for configurations that differ by renaming and motion."""
    comps = []
    free = []
    for cid, comp in cfg.components.items():
        if len(comp) == 1:
            free.append(repr(cfg.states[next(iter(comp.cells.values()))]))
        else:
            comps.append(_component_key(cfg, cid))
    return (tuple(sorted(comps)), tuple(sorted(free)))


def effective_successors(cfg: Configuration, spec):
    """Distinct successor configurations reachable by one effective interaction."""
    st = cfg.states
    cands = []
    for (a, pa), (b, pb) in cfg.edge_list():
        cands.append(Interaction("active", a, pa, b, pb))
    for cid in cfg.components:
        for t in intra_pairs(cfg, cid):
            cands.append(Interaction("intra", *t))
    # one representative free node per state is enough up to renaming
    slots = []
    seen_free = {}
    for cid, comp in cfg.components.items():
        if len(comp) == 1:
            v = next(iter(comp.cells.values()))
            seen_free.setdefault(repr(st[v]), []).append(v)
        else:
            slots.extend(exposed_slots(cfg, cid))
    reps = []
    for nodes in seen_free.values():
        reps.extend(nodes[:2])
    for v in reps:
        slots.extend((v, p) for p in PORTS)
    for i, (a, pa) in enumerate(slots):
        for b, pb in slots[i + 1:]:
            if cfg.comp[a] == cfg.comp[b]:
                continue
            cands.append(Interaction("cross", a, pa, b, pb))
    out = {}
    for inter in cands:
        r = spec.interact(st[inter.a], inter.pa, st[inter.b], inter.pb, inter.edge_bit)
        if r is None:
            continue
        if inter.kind == "cross":
            pl = feasible_alignment(cfg, inter.a, inter.pa, inter.b, inter.pb)
            if pl is None:
                continue
            inter = inter._replace(placement=pl)
        nxt = cfg.copy()
        _apply(nxt, inter, r)
        key = canonical_key(nxt)
        if key not in out:
            out[key] = nxt
    return out


def explore(cfg: Configuration, spec, limit: int = 200_000):
    """Breadth-first search of the reachable space.

    Returns ``(n_states, quiescent)`` where ``quiescent`` maps the keys of
    reachable quiescent configurations to one representative each.  Raises
    RuntimeError when more than ``limit`` configurations are reachable.
    """
    start = canonical_key(cfg)
    seen = {start}
    todo = deque([cfg])
    quiescent = {}
    while todo:
        cur = todo.popleft()
        succ = effective_successors(cur, spec)
        if not succ:
            quiescent[canonical_key(cur)] = cur
            continue
        for key, nxt in succ.items():
            if key not in seen:
                seen.add(key)
                if len(seen) > limit:
                    raise RuntimeError(f"more than {limit} reachable configurations")
                todo.append(nxt)
    return len(seen), quiescent
