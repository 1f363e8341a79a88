"""Well-mixed counting: the leader-driven upper bound, the UID protocols and
the random-walk oracles behind the high-probability bound.

No geometry here: every step picks one of the n(n-1)/2 node pairs uniformly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np


def _rng(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


class _Draws:
    """Buffered uniform draws; numpy scalar calls are slow one at a time."""

    def __init__(self, rng, size=4096):
        self.rng = rng
        self.size = size
        self.buf = rng.random(size)
        self.i = 0

    def __call__(self) -> float:
        if self.i == self.size:
            self.buf = self.rng.random(self.size)
            self.i = 0
        x = self.buf[self.i]
        self.i += 1
        return x


# ---------------------------------------------------------------------------
# Counting-Upper-Bound


@dataclass
class CountingState:
    n: int
    b: int
    r0: int = 0
    r1: int = 0
    q0: int = 0
    q1: int = 0
    q2: int = 0
    halted: bool = False

    @classmethod
    def initial(cls, n, b):
        return cls(n, b, q0=n - 1)

    @property
    def armed(self) -> bool:
        return self.r0 >= self.b

    def check(self):
        assert self.q1 == self.r0 - self.r1, "j = r0 - r1"
        assert self.r0 >= self.r1
        assert self.r1 == (self.n - 1) - (self.q0 + self.q1)

    def leader_meets(self, partner: str) -> bool:
        """Apply one leader interaction; returns True when it was effective."""
        if self.halted:
            return False
        if self.armed and self.r0 == self.r1:
            self.halted = True
            return True
        if partner == "q0":
            self.r0 += 1
            self.q0 -= 1
            self.q1 += 1
            return True
        if partner == "q1" and self.armed:
            self.r1 += 1
            self.q1 -= 1
            self.q2 += 1
            return True
        return False


@dataclass
class CountingResult:
    r0: int
    effective: int
    total: int
    leader_events: int

    def record(self, trial, n, b) -> str:
        return f"{trial}, {n}, {b}, {self.r0}, {self.effective}, {self.total}, {int(2 * self.r0 >= n)}"


def run_counting_upper_bound(n: int, b: int, seed=None, fast_forward: bool = True,
                             check: bool = False) -> CountingResult:
    """Simulate the leader counting protocol until it halts.

    ``fast_forward`` samples leader events only (each of the n(n-1)/2 pairs
    involves the leader with probability 2/n) and adds the skipped
    non-leader steps as one negative-binomial draw; the result has the same
    law as stepping through every pair.
    """
    if n < b + 2:
        raise ValueError("need n >= b + 2")
    rng = _rng(seed)
    st = CountingState.initial(n, b)
    u = _Draws(rng)
    m = n - 1
    events = 0
    total = 0
    p_leader = 2.0 / n
    while not st.halted:
        if fast_forward:
            events += 1
        else:
            total += 1
            if u() >= p_leader:
                continue
            events += 1
        x = u() * m
        partner = "q0" if x < st.q0 else ("q1" if x < st.q0 + st.q1 else "q2")
        st.leader_meets(partner)
        if check:
            st.check()
    if fast_forward:
        total = events + (int(rng.negative_binomial(events, p_leader)) if p_leader < 1 else 0)
    return CountingResult(st.r0, st.r0 + st.r1, total, events)


# ---------------------------------------------------------------------------
# UID protocols


def _pair_stream(rng, n, chunk=8192):
    while True:
        a = rng.integers(0, n, size=chunk)
        b = rng.integers(0, n - 1, size=chunk)
        b = b + (b >= a)
        yield from zip(a.tolist(), b.tolist())


@dataclass
class SimpleUidNode:
    uid: int
    b: int
    first: list = field(default_factory=list)
    window: list = field(default_factory=list)
    seen: set = field(default_factory=set)

    def __post_init__(self):
        self.seen.add(self.uid)

    def meet(self, other: int) -> int | None:
        """Record one interaction; returns |A| on termination."""
        self.seen.add(other)
        if len(self.first) < self.b:
            self.first.append(other)
            return None
        self.window.append(other)
        if len(self.window) == self.b:
            if self.window == self.first:
                return len(self.seen)
            self.window = []
        return None


def run_simple_uid(n: int, b: int, seed=None, max_steps: int = 10**8):
    """Window-matching counting with ids 0..n-1.

    Returns ``(output, steps)`` for the first node to terminate; when two
    nodes terminate in the same interaction the larger output is not
    preferred, the initiator wins.
    """
    if n < 2 or b < 1:
        raise ValueError("need n >= 2 and b >= 1")
    rng = _rng(seed)
    nodes = [SimpleUidNode(i, b) for i in range(n)]
    for step, (a, c) in enumerate(_pair_stream(rng, n), 1):
        out = nodes[a].meet(c)
        out2 = nodes[c].meet(a)
        if out is not None:
            return out, step
        if out2 is not None:
            return out2, step
        if step >= max_steps:
            raise RuntimeError("simple UID protocol did not terminate")


@dataclass
class UidNodeState:
    uid: int
    belongs: int | None = None
    marked: int = 0
    count1: int = 0
    count2: int = 0
    active: bool = True


def uid_interact(u: UidNodeState, v: UidNodeState, b: int) -> bool:
    """One Protocol-4 style interaction, ``u.uid > v.uid``; True when u halts.

    Conditions are evaluated on the state before the interaction, so a node
    marked for the first time is not marked a second time in the same
    meeting.
    """
    if v.active:
        v.active = False
    if not u.active:
        return False
    belongs, marked = v.belongs, v.marked
    if belongs is None or belongs < u.uid:
        v.belongs = u.uid
        v.marked = 1
        u.count1 += 1
    elif belongs > u.uid:
        u.active = False
    elif marked == 1 and u.count1 >= b:
        v.marked = 2
        u.count2 += 1
        if u.count1 == u.count2:
            return True
    return False


def run_uid_counting(ids, b: int, seed=None, max_steps: int = 10**8, trace=None):
    """Returns ``(halter id, output, steps)``; output is 2·count1 of the halter."""
    ids = list(ids)
    n = len(ids)
    if len(set(ids)) != n:
        raise ValueError("ids must be distinct")
    if n < 2:
        raise ValueError("need at least two nodes")
    rng = _rng(seed)
    nodes = [UidNodeState(i) for i in ids]
    for step, (a, c) in enumerate(_pair_stream(rng, n), 1):
        u, v = nodes[a], nodes[c]
        if u.uid < v.uid:
            u, v = v, u
        halted = uid_interact(u, v, b)
        if trace is not None:
            trace(step, nodes)
        if halted:
            return u.uid, 2 * u.count1, step
        if step >= max_steps:
            raise RuntimeError("no node halted")


def sample_ids(n: int, rng) -> list[int]:
    """n distinct 64-bit ids."""
    rng = _rng(rng)
    out = set()
    while len(out) < n:
        out.update(int(x) for x in rng.integers(0, 2**63 - 1, size=n - len(out), dtype=np.int64))
    return sorted(out, key=lambda _: rng.random())


# ---------------------------------------------------------------------------
# analytic oracles


def ruin_probability(b: int, x) -> Fraction:
    """P[a walk from 1 reaches b before 0] when down/up odds are ``x``: (x-1)/(x^b-1)."""
    x = Fraction(x)
    if x <= 1:
        raise ValueError("x must exceed 1")
    if b < 1:
        raise ValueError("b must be positive")
    return (x - 1) / (x ** b - 1)


def walk_parameters(n: int, b: int):
    """(n', x) used by the bound: n' = n/2 - 1 and x = (n' - b)/b."""
    n_prime = Fraction(n, 2) - 1
    return n_prime, (n_prime - b) / b


def biased_walk_hits(b: int, x: float, walks: int, rng) -> int:
    """Monte-Carlo count of walks from 1 that reach b before 0."""
    rng = _rng(rng)
    p_up = 1.0 / (1.0 + x)
    pos = np.ones(walks, dtype=np.int64)
    alive = np.ones(walks, dtype=bool)
    while alive.any():
        idx = np.flatnonzero(alive)
        step = np.where(rng.random(idx.size) < p_up, 1, -1)
        pos[idx] += step
        alive[idx] = (pos[idx] > 0) & (pos[idx] < b)
    return int((pos == b).sum())


def ehrenfest_recurrence(R: int, k: int) -> Fraction:
    """Mean recurrence time of state k of the Ehrenfest walk on [-R, R]."""
    if abs(k) > R:
        raise ValueError("need |k| <= R")
    return Fraction(math.factorial(R + k) * math.factorial(R - k), math.factorial(2 * R)) * 2 ** (2 * R)


def failure_bound(n: int, b: int) -> Fraction:
    """Union bound 1/n^(b-2) on the probability that r0 < n/2 at halting."""
    if b < 3:
        raise ValueError("the bound is vacuous for b < 3")
    return Fraction(1, n ** (b - 2))
