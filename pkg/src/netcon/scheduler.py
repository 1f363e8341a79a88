"""Uniform random scheduler over permissible node-port interactions.

Two execution paths share one semantics:

* :func:`step` enumerates every permissible interaction and picks one
  uniformly (the literal model; cost grows with the square of the population).
* :class:`Simulation` enumerates only the *effective* interactions, picks one
  uniformly, and draws the number of ineffective selections preceding it from
  the matching geometric law.  Since ineffective selections leave the
  configuration unchanged, the sequence of configurations has the same law.
"""

from __future__ import annotations

import gzip
import math
from itertools import islice
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .model import PORTS, Configuration, Placement, Port, feasible_alignment
from .protocol import ProtocolSpec


class Interaction(NamedTuple):
    kind: str                 # "active" | "intra" | "cross"
    a: int
    pa: int
    b: int
    pb: int
    placement: Placement | None = None

    @property
    def edge_bit(self) -> int:
        return 1 if self.kind == "active" else 0


@dataclass
class TraceEvent:
    step: int
    kind: str
    a: tuple
    b: tuple
    effective: bool
    before: tuple = ()
    after: tuple = ()
    merged: int | None = None
    split: int | None = None
    phase: str = ""

    def to_record(self) -> str:
        rule = f"{self.before} -> {self.after}" if self.effective else "ineffective"
        return (f"{self.step}, {self.kind}, ({self.a[0]},{self.a[1]}), ({self.b[0]},{self.b[1]}), "
                f"{rule}, {'' if self.merged is None else self.merged}, "
                f"{'' if self.split is None else self.split}")


@dataclass
class RunResult:
    config: Configuration
    steps: int
    effective: int
    reason: str               # "quiescent" | "halted" | "max-steps" | "stop"
    events: list = field(default_factory=list)

    @property
    def hit_max_steps(self) -> bool:
        return self.reason == "max-steps"


class EmptyInteractionSet(RuntimeError):
    pass


def _port(p):
    return "urdl"[p]


# ---------------------------------------------------------------------------
# exhaustive enumeration


def exposed_slots(cfg: Configuration, cid: int):
    comp = cfg.components[cid]
    out = []
    for v in comp.cells.values():
        for p in PORTS:
            if cfg.exposed(v, p):
                out.append((v, p))
    return out


def intra_pairs(cfg: Configuration, cid: int):
    """Inactive facing port pairs inside one component, each once."""
    comp = cfg.components[cid]
    out = []
    for v in comp.cells.values():
        for p in PORTS:
            if (v, p) in cfg.edges:
                continue
            f = cfg.facing(v, p)
            if f is None:
                continue
            w, q = f
            if (w, q) in cfg.edges:
                continue
            if (v, p) < (w, q):
                out.append((v, p, w, q))
    return out


def enumerate_interactions(cfg: Configuration) -> list[Interaction]:
    """Every permissible interaction: active edges, facing pairs, feasible alignments."""
    out = [Interaction("active", a, pa, b, pb) for (a, pa), (b, pb) in cfg.edge_list()]
    cids = sorted(cfg.components)
    for cid in cids:
        out.extend(Interaction("intra", *t) for t in intra_pairs(cfg, cid))
    slots = {cid: exposed_slots(cfg, cid) for cid in cids}
    for i, ca in enumerate(cids):
        for cb in cids[i + 1:]:
            for a, pa in slots[ca]:
                for b, pb in slots[cb]:
                    pl = feasible_alignment(cfg, a, pa, b, pb)
                    if pl is not None:
                        out.append(Interaction("cross", a, pa, b, pb, pl))
    return out


def _apply(cfg: Configuration, inter: Interaction, out) -> tuple:
    a2, b2, e2 = out
    cfg.states[inter.a] = a2
    cfg.states[inter.b] = b2
    merged = split = None
    if inter.kind == "cross":
        if e2:
            pl = inter.placement or feasible_alignment(cfg, inter.a, inter.pa, inter.b, inter.pb)
            cfg.merge(pl)
            cfg.activate(inter.a, inter.pa, inter.b, inter.pb)
            merged = pl.moving
    elif inter.kind == "active":
        if not e2:
            split = cfg.deactivate(inter.a, inter.pa, inter.b, inter.pb)
    elif e2:
        cfg.activate(inter.a, inter.pa, inter.b, inter.pb)
    return merged, split


def step(cfg: Configuration, spec: ProtocolSpec, rng: np.random.Generator,
         interactions: list[Interaction] | None = None):
    """One literal scheduler step: uniform choice over all permissible interactions.

    Mutates ``cfg`` in place and returns ``(cfg, TraceEvent)``.
    """
    if interactions is None:
        interactions = enumerate_interactions(cfg)
    if not interactions:
        raise EmptyInteractionSet("no permissible interaction")
    inter = interactions[int(rng.integers(len(interactions)))]
    sa, sb = cfg.states[inter.a], cfg.states[inter.b]
    out = spec.interact(sa, inter.pa, sb, inter.pb, inter.edge_bit)
    ev = TraceEvent(0, inter.kind, (inter.a, _port(inter.pa)), (inter.b, _port(inter.pb)),
                    out is not None)
    if out is not None:
        ev.before = (sa, sb, inter.edge_bit)
        ev.after = out
        ev.merged, ev.split = _apply(cfg, inter, out)
    return cfg, ev


# ---------------------------------------------------------------------------
# effective-only simulation


class Simulation:
    """Runs a protocol on a configuration, selecting only effective interactions.

    ``rng`` is a numpy Generator.  ``count_total`` keeps an exact count of all
    (including ineffective) scheduler selections via geometric skips; turning it
    off avoids counting the permissible interactions between large components.
    """

    def __init__(self, cfg: Configuration, spec: ProtocolSpec, rng: np.random.Generator,
                 count_total: bool = True, check_every: int = 0):
        self.cfg = cfg
        self.spec = spec
        self.rng = rng
        self.count_total = count_total
        self.check_every = check_every
        self.steps = 0
        self.effective = 0
        self._effect_cache: dict = {}
        self._pair_cache: dict = {}
        self._port_cache: dict = {}
        self._cat_cache: dict = {}
        self._slot_cache: dict = {}
        self._local: dict = {}
        self._index()

    # -- incremental indexes ------------------------------------------------------

    def _index(self):
        """Free nodes grouped by state and the set of attached components."""
        cfg = self.cfg
        self._free: dict = {}
        self._free_of: dict = {}
        self._attached: dict = {}
        for cid, comp in cfg.components.items():
            if len(comp) == 1:
                self._add_free(next(iter(comp.cells.values())))
            else:
                self._attached[cid] = None

    def _add_free(self, v):
        s = self.cfg.states[v]
        self._free.setdefault(s, {})[v] = None
        self._free_of[v] = s

    def _reindex(self, nodes, cids):
        cfg = self.cfg
        for cid in cids:
            comp = cfg.components.get(cid)
            if comp is not None and len(comp) > 1:
                self._attached[cid] = None
            else:
                self._attached.pop(cid, None)
        for v in nodes:
            if v in self._free_of:
                old = self._free_of.pop(v)
                group = self._free[old]
                del group[v]
                if not group:
                    del self._free[old]
            if cfg.is_free(v):
                self._add_free(v)

    def _component_view(self, cid):
        """(exposed slots, facing pairs) of a component, cached per version."""
        comp = self.cfg.components[cid]
        key = (cid, comp.version)
        hit = self._slot_cache.get(key)
        if hit is None:
            if len(self._slot_cache) > 4 * len(self._attached) + 256:
                self._slot_cache.clear()
            hit = self._slot_cache[key] = (exposed_slots(self.cfg, cid), intra_pairs(self.cfg, cid),
                                           _component_edges(self.cfg, cid))
        return hit

    def _local_effect(self, a, pa, b, pb, e):
        """Effect of a fixed node pair, reused while both states are unchanged."""
        st = self.cfg.states
        sa, sb = st[a], st[b]
        key = (a, pa, b, pb, e)
        hit = self._local.get(key)
        if hit is not None and hit[0] is sa and hit[1] is sb:
            return hit[2]
        r = self.effect(sa, pa, sb, pb, e)
        self._local[key] = (sa, sb, r)
        return r

    # -- rule lookup with memoisation -------------------------------------------

    def effect(self, sa, pa, sb, pb, e):
        key = (sa, pa, sb, pb, e)
        try:
            return self._effect_cache[key]
        except KeyError:
            pass
        except TypeError:  # unhashable state
            return self.spec.interact(sa, pa, sb, pb, e)
        if len(self._effect_cache) > 500_000:
            self._effect_cache.clear()
        out = self.spec.interact(sa, pa, sb, pb, e)
        self._effect_cache[key] = out
        return out

    def port_effects(self, sa, pa, sb):
        """``[(pb, outcome)]`` over the ports of ``sb`` for a fixed ``(sa, pa)``, bit 0."""
        key = (sa, pa, sb)
        try:
            return self._port_cache[key]
        except KeyError:
            pass
        if len(self._port_cache) > 200_000:
            self._port_cache.clear()
        out = []
        for q in PORTS:
            r = self.spec.interact(sa, pa, sb, q, 0)
            if r is not None:
                out.append((q, r))
        self._port_cache[key] = out
        return out

    # -- enumeration ----------------------------------------------------------------

    def catalytic(self, state) -> bool:
        try:
            return self._cat_cache[state]
        except KeyError:
            c = self._cat_cache[state] = bool(self.spec.catalytic(state))
            return c

    def choices(self):
        """Weighted effective choices: list of (weight, tag, payload)."""
        cfg = self.cfg
        st = cfg.states
        cat = self.catalytic
        out = []
        free = self._free
        attached = list(self._attached)
        views = {cid: self._component_view(cid) for cid in attached}
        if len(self._local) > 8 * len(cfg.states) + 1024:
            self._local.clear()
        local = self._local_effect
        for cid in attached:
            for (a, pa), (b, pb) in views[cid][2]:
                if not (cat(st[a]) or cat(st[b])):
                    continue
                r = local(a, pa, b, pb, 1)
                if r is not None:
                    out.append((1, "one", (Interaction("active", a, pa, b, pb), r)))
        for cid in attached:
            for (a, pa, b, pb) in views[cid][1]:
                if not (cat(st[a]) or cat(st[b])):
                    continue
                r = local(a, pa, b, pb, 0)
                if r is not None:
                    out.append((1, "one", (Interaction("intra", a, pa, b, pb), r)))
        # exposed slots of attached components grouped by (state, port)
        slot_groups: dict = {}
        owners: dict = {}
        for cid in attached:
            for v, p in views[cid][0]:
                k = (st[v], p)
                slot_groups.setdefault(k, []).append(v)
                owners.setdefault(k, set()).add(cid)
        keys = list(slot_groups)
        # attached x attached (a component never aligns with itself)
        flags = [cat(k[0]) for k in keys]
        cat_idx = [j for j, f in enumerate(flags) if f]
        for i, ka in enumerate(keys):
            if len(attached) < 2:
                break
            partners = range(i, len(keys)) if flags[i] else [j for j in cat_idx if j >= i]
            oa = owners[ka]
            for j in partners:
                kb = keys[j]
                ob = owners[kb]
                if len(oa) == 1 and oa == ob:
                    continue
                r = self.effect(ka[0], ka[1], kb[0], kb[1], 0)
                if r is None:
                    continue
                for a in slot_groups[ka]:
                    for b in slot_groups[kb]:
                        if ka == kb and b <= a:
                            continue
                        if cfg.comp[a] == cfg.comp[b]:
                            continue
                        pl = feasible_alignment(cfg, a, ka[1], b, kb[1])
                        if pl is not None:
                            out.append((1, "one", (Interaction("cross", a, ka[1], b, kb[1], pl), r)))
        # attached x free
        fkeys = list(free)
        cat_free = [t for t in fkeys if cat(t)]
        for ka, f in zip(keys, flags):
            nodes = slot_groups[ka]
            for t in (fkeys if f else cat_free):
                fnodes = free[t]
                for q, r in self.port_effects(ka[0], ka[1], t):
                    out.append((len(nodes) * len(fnodes), "attached-free", (nodes, ka[1], fnodes, q, r)))
        # free x free
        for i, t1 in enumerate(fkeys):
            c1t = cat(t1)
            for t2 in fkeys[i:]:
                if not (c1t or cat(t2)):
                    continue
                c1, c2 = len(free[t1]), len(free[t2])
                w = c1 * (c1 - 1) // 2 if t1 == t2 else c1 * c2
                if w == 0:
                    continue
                for q1 in PORTS:
                    for q2, r in self.port_effects(t1, q1, t2):
                        out.append((w, "free-free", (free[t1], q1, free[t2], q2, r, t1 == t2)))
        return out

    def total_interactions(self) -> int:
        """Number of permissible interactions in the current configuration."""
        cfg = self.cfg
        total = len(cfg.edges) // 2
        n_free = 0
        slots = {}
        for cid, comp in cfg.components.items():
            if len(comp) == 1:
                n_free += 1
                continue
            ex, intra, _ = self._component_view(cid)
            total += len(intra)
            slots[cid] = ex
        total += 16 * n_free * (n_free - 1) // 2
        total += 4 * n_free * sum(len(s) for s in slots.values())
        cids = sorted(slots)
        live = set()
        for i, ca in enumerate(cids):
            for cb in cids[i + 1:]:
                key = (ca, cfg.components[ca].version, cb, cfg.components[cb].version)
                live.add(key)
                if key not in self._pair_cache:
                    cnt = 0
                    for a, pa in slots[ca]:
                        for b, pb in slots[cb]:
                            if feasible_alignment(cfg, a, pa, b, pb) is not None:
                                cnt += 1
                    self._pair_cache[key] = cnt
                total += self._pair_cache[key]
        if len(self._pair_cache) > 4 * len(live) + 64:
            self._pair_cache = {k: v for k, v in self._pair_cache.items() if k in live}
        return total

    def _pick(self, choices):
        total_w = sum(c[0] for c in choices)
        x = self.rng.random() * total_w
        for w, tag, payload in choices:
            if x < w:
                break
            x -= w
        if tag == "one":
            return payload
        if tag == "attached-free":
            nodes, pa, fnodes, q, r = payload
            a = nodes[int(self.rng.integers(len(nodes)))]
            b = _nth(fnodes, int(self.rng.integers(len(fnodes))))
            return Interaction("cross", a, pa, b, q, feasible_alignment(self.cfg, a, pa, b, q)), r
        n1, q1, n2, q2, r, same = payload
        if same:
            i, j = self.rng.choice(len(n1), size=2, replace=False)
            a, b = _nth(n1, int(i)), _nth(n1, int(j))
        else:
            a = _nth(n1, int(self.rng.integers(len(n1))))
            b = _nth(n2, int(self.rng.integers(len(n2))))
        return Interaction("cross", a, q1, b, q2, feasible_alignment(self.cfg, a, q1, b, q2)), r

    # -- execution --------------------------------------------------------------------

    def is_quiescent(self) -> bool:
        return not self.choices()

    def advance(self, max_steps: float = math.inf):
        """Apply one effective interaction.

        Returns a TraceEvent, or None if the configuration is quiescent, or the
        string ``"max-steps"`` when the skipped ineffective selections exhaust
        the step budget first.
        """
        choices = self.choices()
        if not choices:
            return None
        if self.count_total:
            eff = sum(c[0] for c in choices)
            total = self.total_interactions()
            skip = int(self.rng.geometric(eff / total)) - 1 if eff < total else 0
            if self.steps + skip + 1 > max_steps:
                self.steps = int(max_steps)
                return "max-steps"
            self.steps += skip + 1
        else:
            if self.steps + 1 > max_steps:
                return "max-steps"
            self.steps += 1
        inter, out = self._pick(choices)
        sa, sb = self.cfg.states[inter.a], self.cfg.states[inter.b]
        ev = TraceEvent(self.steps, inter.kind, (inter.a, _port(inter.pa)), (inter.b, _port(inter.pb)),
                        True, (sa, sb, inter.edge_bit), out)
        ev.merged, ev.split = _apply(self.cfg, inter, out)
        cids = {self.cfg.comp[inter.a], self.cfg.comp[inter.b]}
        if ev.merged is not None:
            cids.add(ev.merged)
        self._reindex((inter.a, inter.b), cids)
        self.effective += 1
        if self.check_every and self.effective % self.check_every == 0:
            self.cfg.check()
        return ev

    def run(self, stop="quiescent", max_steps: float = math.inf, record: bool = False,
            on_event: Callable | None = None, thin: int = 1) -> RunResult:
        """Advance until ``stop`` holds (or quiescence, or ``max_steps``)."""
        events = []
        predicate = _stop_predicate(stop, self.spec)
        while True:
            if predicate is not None and predicate(self.cfg):
                return RunResult(self.cfg, self.steps, self.effective, "halted" if stop in (
                    "all-halted", "leader-halted") else "stop", events)
            ev = self.advance(max_steps)
            if ev is None:
                return RunResult(self.cfg, self.steps, self.effective, "quiescent", events)
            if ev == "max-steps":
                return RunResult(self.cfg, self.steps, self.effective, "max-steps", events)
            if record and self.effective % thin == 0:
                ev.phase = self.spec.phase(self.cfg.states)
                events.append(ev)
            if on_event is not None:
                on_event(self, ev)


def _component_edges(cfg: Configuration, cid: int) -> list:
    """Active edges inside one component, each once as ``((a, pa), (b, pb))``."""
    out = []
    edges = cfg.edges
    for v in cfg.components[cid].cells.values():
        for p in PORTS:
            other = edges.get((v, p))
            if other is not None and (v, p) < other:
                out.append(((v, p), (other[0], Port(other[1]))))
    out.sort()
    return out


def _nth(group, k):
    if isinstance(group, list):
        return group[k]
    return next(islice(group, k, None))


def _stop_predicate(stop, spec):
    if callable(stop):
        return stop
    if stop == "quiescent":
        return None
    if stop == "leader-halted":
        return lambda cfg: spec.leader_halted(cfg.states)
    if stop == "all-halted":
        return lambda cfg: all(spec.is_halted(s) for s in cfg.states)
    raise ValueError(f"unknown stop condition {stop!r}")


def run(cfg: Configuration, spec: ProtocolSpec, rng, stop="quiescent",
        max_steps: float = math.inf, record: bool = False, skip_ineffective: bool = True,
        count_total: bool = True, check_every: int = 0) -> RunResult:
    """Run ``spec`` from ``cfg`` (mutated in place) until the stop condition.

    With ``skip_ineffective=False`` every selection goes through :func:`step`,
    which is exact but slow; use it only on small populations.
    """
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    if skip_ineffective:
        return Simulation(cfg, spec, rng, count_total=count_total,
                          check_every=check_every).run(stop, max_steps, record)
    predicate = _stop_predicate(stop, spec)
    steps = effective = 0
    events = []
    while True:
        if predicate is not None and predicate(cfg):
            return RunResult(cfg, steps, effective, "halted", events)
        if not Simulation(cfg, spec, rng).choices():
            return RunResult(cfg, steps, effective, "quiescent", events)
        if steps >= max_steps:
            return RunResult(cfg, steps, effective, "max-steps", events)
        _, ev = step(cfg, spec, rng)
        steps += 1
        ev.step = steps
        if ev.effective:
            effective += 1
            if check_every and effective % check_every == 0:
                cfg.check()
        if record:
            events.append(ev)


def is_quiescent(cfg: Configuration, spec: ProtocolSpec) -> bool:
    """True iff no permissible interaction is effective."""
    return Simulation(cfg, spec, np.random.default_rng(0)).is_quiescent()


def write_trace(events, path) -> None:
    """Line-delimited trace records; gzip when ``path`` ends in ``.gz``."""
    opener = gzip.open if str(path).endswith(".gz") else open
    with opener(path, "wt") as fh:
        for ev in events:
            fh.write(ev.to_record() + "\n")


def trial_rng(base_seed: int, trial: int) -> np.random.Generator:
    """Independent stream for one trial, derived from (base seed, trial index)."""
    return np.random.default_rng(np.random.SeedSequence([base_seed, trial]))
