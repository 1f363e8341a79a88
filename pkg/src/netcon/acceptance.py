"""The acceptance suite: fourteen fixed-size checks, one line of output each.

``run_all(quick=True)`` runs the same checks with fewer trials; the
thresholds never change.
"""

from __future__ import annotations

import math
import time
from collections import Counter
from dataclasses import dataclass
from math import isqrt

import numpy as np
from scipy import stats

from .analysis import scaling_exponent
from .counting import (biased_walk_hits, ehrenfest_recurrence, ruin_probability, run_counting_upper_bound,
                       run_simple_uid, run_uid_counting, sample_ids)
from .experiments import PLUS, build, horizontal_row
from .model import Configuration, Port, brute_force_alignment, feasible_alignment
from .scheduler import Simulation, enumerate_interactions, trial_rng


@dataclass
class Result:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        return (f"[{'PASS' if self.passed else 'FAIL'}] criterion {self.number:2d} {self.title}: "
                f"{self.detail} ({self.seconds:.1f}s)")


def _n(full: int, quick: bool, small: int) -> int:
    return small if quick else full


# ---------------------------------------------------------------------------
# counting in the well-mixed solution


def c1(quick):
    trials = _n(400, quick, 60)
    t0 = time.perf_counter()
    res = [run_counting_upper_bound(256, 5, trial_rng(101, i)) for i in range(trials)]
    wall = time.perf_counter() - t0
    frac = np.mean([r.r0 >= 128 for r in res])
    ok = frac >= 0.995 and wall < 60
    return ok, f"{trials}/{trials} halted, P[r0>=128]={frac:.4f} (need >=0.995), {wall:.1f}s (need <60s)"


def c2(quick):
    trials = _n(100, quick, 30)
    ratios = [run_counting_upper_bound(1000, 5, trial_rng(102, i)).r0 / 1000 for i in range(trials)]
    med = float(np.median(ratios))
    return med >= 0.8, f"median r0/n={med:.4f} over {trials} trials (need >=0.8)"


def c3(quick):
    trials = _n(200, quick, 40)
    points = []
    for n in (64, 128, 256, 512):
        mean = np.mean([run_counting_upper_bound(n, 5, trial_rng(103, 1000 * n + i)).total for i in range(trials)])
        points.append((n, mean))
    fit = scaling_exponent(points)
    means = ", ".join(f"{n}:{m:.0f}" for n, m in points)
    return 1.8 <= fit.alpha <= 2.2, f"alpha={fit.alpha:.3f} (need 1.8..2.2), R^2={fit.r_squared:.4f}, means {means}"


def c4(quick):
    walks = 10 ** 6
    hits = biased_walk_hits(3, 4.0, walks, trial_rng(104, 0))
    p = float(ruin_probability(3, 4))
    sigma = math.sqrt(p * (1 - p) / walks)
    z = (hits / walks - p) / sigma
    exact = all(ehrenfest_recurrence(R, -R) == 2 ** (2 * R) for R in range(1, 21))
    return abs(z) <= 3 and exact, (f"ruin {hits / walks:.5f} vs {p:.5f} (z={z:+.2f}, need |z|<=3); "
                                   f"Ehrenfest R<=20 exact: {exact}")


def c11(quick):
    trials = _n(300, quick, 60)
    good = 0
    for i in range(trials):
        rng = trial_rng(111, i)
        ids = sample_ids(64, rng)
        u, out, _ = run_uid_counting(ids, 5, rng)
        good += u == max(ids) and out >= 64
    return good / trials >= 0.99, f"{good}/{trials} trials: max id halts with output >= n (need >=99%)"


def c12(quick):
    trials = _n(500, quick, 200)
    n, b = 4, 2
    steps = [run_simple_uid(n, b, trial_rng(112, i))[1] for i in range(trials)]
    mean = float(np.mean(steps))
    pred = b * (n - 1) ** b
    ratio = mean / pred
    return 1 / 3 <= ratio <= 3, f"mean {mean:.2f} steps vs b(n-1)^b={pred} (ratio {ratio:.2f}, need 1/3..3)"


# ---------------------------------------------------------------------------
# geometric rule tables


def _square2_counts(name, trials):
    out = {}
    for k in (2, 3, 4, 5):
        good = 0
        for i in range(trials):
            s = build(name, n=k * k)
            res = Simulation(s.cfg, s.spec, trial_rng(105, 100 * k + i)).run(max_steps=10 ** 7)
            good += res.reason == "quiescent" and s.check(s.cfg)[0]
        out[k] = good
    return out


def _square2_exhaustive(name):
    from .explore import explore
    from .experiments import square_check
    verdict = {}
    for k in (2, 3):
        s = build(name, n=k * k)
        _, quiescent = explore(s.cfg, s.spec)
        verdict[k] = all(square_check(k)(c)[0] for c in quiescent.values())
    return verdict


def c5(quick):
    trials = _n(50, quick, 10)
    verbatim = _square2_counts("square2", trials)
    fixed = _square2_counts("square2-corrected", trials)
    exh = _square2_exhaustive("square2")
    ok = all(v == trials for v in verbatim.values()) and all(exh.values())
    fmt = lambda d: " ".join(f"k={k}:{v}/{trials}" for k, v in d.items())   # noqa: E731
    return ok, (f"full square reached: {fmt(verbatim)}; corrected table {fmt(fixed)}; "
                f"exhaustive all-square k=2:{exh[2]} k=3:{exh[3]}")


def c6(quick):
    trials = _n(20, quick, 4)
    bad = []
    for k in range(3, 9):
        for i in range(trials):
            s = build("line-replication", length=k)
            res = Simulation(s.cfg, s.spec, trial_rng(106, 100 * k + i)).run(max_steps=10 ** 7)
            ok, summary = s.check(s.cfg)
            if res.reason != "quiescent" or not ok:
                bad.append((k, i, summary))
    return not bad, f"lengths 3-8, {trials} trials each, failures {bad[:3] if bad else 0}"


def released_rows(name: str, trials: int, seed: int = 107) -> Counter:
    """Lengths of the rows released at every split, over seeded runs from a 5-line."""
    rows = Counter()

    def watch(sim, ev):
        if ev.split is None:
            return
        child = ev.a[0] if ev.a[1] == "u" else ev.b[0]
        rows[len(horizontal_row(sim.cfg, child))] += 1

    for i in range(trials):
        s = build(name, length=5)
        Simulation(s.cfg, s.spec, trial_rng(seed, i), count_total=False).run(max_steps=10 ** 6, on_event=watch)
    return rows


def c7(quick):
    trials = _n(100, quick, 20)
    verbatim = released_rows("no-leader-line-replication", trials)
    fixed = released_rows("no-leader-line-replication-corrected", trials)
    ok = set(verbatim) == {5}
    return ok, (f"released row lengths over {trials} trials: as printed {dict(sorted(verbatim.items()))}; "
                f"with parent marks {dict(sorted(fixed.items()))}")


# ---------------------------------------------------------------------------
# leader-driven constructions


def c8(quick):
    from .protocols.counting_line import CountingOnALine, read_tape
    trials = _n(200, quick, 20)
    n, b = 128, 5
    bad = 0
    big = 0
    encoded = 0
    for i in range(trials):
        spec = CountingOnALine(b)
        cfg = Configuration(spec.initial_states(n))
        viol = [0]

        def check(sim, ev):
            r0, _r1, length, h = read_tape(sim.cfg)
            if h.op in ("idle", "halt"):
                lg = max(r0, 1).bit_length() - 1
                if length != lg + 1 or h.r2 > lg:
                    viol[0] += 1

        Simulation(cfg, spec, trial_rng(108, i), count_total=False).run("leader-halted", on_event=check)
        r0, _r1, length, _h = read_tape(cfg)
        bad += viol[0]
        big += r0 >= 64
        met = n - 1 - sum(1 for s in cfg.states if s.kind == "q0")
        encoded += r0 == met and length == r0.bit_length()
    frac = big / trials
    ok = bad == 0 and frac >= 0.99 and encoded == trials
    return ok, (f"invariant violations {bad}, P[r0>=64]={frac:.3f} (need >=0.99), "
                f"tape encodes r0 at halt in {encoded}/{trials}")


def c9(quick):
    trials = _n(30, quick, 5)
    summary = []
    ok = True
    for n in (4, 9, 16):
        good = 0
        for i in range(trials):
            s = build("square-knowing-n", n=n)
            res = Simulation(s.cfg, s.spec, trial_rng(109, 100 * n + i), count_total=False).run(
                "leader-halted", max_steps=10 ** 7)
            good += res.reason == "halted" and s.check(s.cfg)[0] and not s.cfg.free_nodes()
        ok &= good == trials
        summary.append(f"n={n}: {good}/{trials}")
    return ok, ", ".join(summary)


def c10(quick):
    trials = _n(20, quick, 2)
    summary = []
    ok = True
    for tm, d in (("leftcol", 3), ("cross", 5)):
        good = 0
        for i in range(trials):
            s = build("universal", tm=tm, d=d)
            res = Simulation(s.cfg, s.spec, trial_rng(110, 100 * d + i), count_total=False).run("leader-halted")
            good += res.reason == "halted" and s.check(s.cfg)[0]
        ok &= good == trials
        summary.append(f"{tm} d={d}: {good}/{trials}")
    # worst case: a d-line keeps d of the d^2 nodes
    d = 3
    s = build("universal", tm="leftcol", d=d)
    Simulation(s.cfg, s.spec, trial_rng(110, 999), count_total=False).run("leader-halted")
    waste = len(s.cfg.free_nodes())
    ok &= waste == (d - 1) * d
    summary.append(f"d-line waste {waste} (need (d-1)d={(d - 1) * d})")
    return ok, ", ".join(summary)


def c13(quick):
    from .protocols.replication import population_for
    trials = _n(10, quick, 2)
    summary = []
    ok = True
    pop = population_for(PLUS) + len(PLUS)
    for name in ("replication1", "replication2"):
        good = 0
        for i in range(trials):
            s = build(name)
            assert s.cfg.n == pop
            res = Simulation(s.cfg, s.spec, trial_rng(113, i), count_total=False).run("leader-halted")
            comps = [c for c in s.cfg.components.values() if len(c) > 1]
            freed = s.cfg.n - sum(len(c) for c in comps)
            good += res.reason == "halted" and s.check(s.cfg)[0] and freed == 8
        ok &= good == trials
        summary.append(f"{name}: {good}/{trials}")
    return ok, f"population {pop}; " + ", ".join(summary) + " with two copies and 8 freed"


# ---------------------------------------------------------------------------
# scheduler


def frozen_configurations():
    """Three seeded mid-run configurations (with their specs) used for the uniformity check."""
    out = []
    s = build("square", n=9)
    out.append((s.cfg, s.spec))
    s = build("line-replication", length=4)
    Simulation(s.cfg, s.spec, trial_rng(114, 0)).run(lambda c: False, max_steps=400)
    out.append((s.cfg, s.spec))
    s = build("no-leader-line-replication-corrected", length=4)
    sim = Simulation(s.cfg, s.spec, trial_rng(114, 1), count_total=False)
    for _ in range(30):
        sim.advance()
    out.append((s.cfg, s.spec))
    return out


def _key(inter):
    return inter.kind, frozenset({(inter.a, int(inter.pa)), (inter.b, int(inter.pb))})


def uniformity_pvalue(cfg, spec, draws: int, seed: int) -> tuple[float, int]:
    """Chi-square p-value of the effective-only sampler against the uniform law on effective interactions."""
    eff = [i for i in enumerate_interactions(cfg)
           if spec.interact(cfg.states[i.a], i.pa, cfg.states[i.b], i.pb, i.edge_bit) is not None]
    keys = [_key(i) for i in eff]
    sim = Simulation(cfg, spec, trial_rng(seed, 0))
    choices = sim.choices()
    counts = Counter(_key(sim._pick(choices)[0]) for _ in range(draws))
    if set(counts) - set(keys):
        return 0.0, len(keys)
    if len(keys) == 1:
        return 1.0, 1
    obs = np.array([counts[k] for k in keys], dtype=float)
    return float(stats.chisquare(obs).pvalue), len(keys)


def random_polyomino(size, rng):
    cells = {(0, 0)}
    while len(cells) < size:
        x, y = sorted(cells)[int(rng.integers(len(cells)))]
        dx, dy = ((0, 1), (1, 0), (0, -1), (-1, 0))[int(rng.integers(4))]
        cells.add((x + dx, y + dy))
    return sorted(cells)


def random_pair(rng):
    """Two random components (at most 6 nodes each) with random node orientations."""
    a = random_polyomino(int(rng.integers(1, 7)), rng)
    b = random_polyomino(int(rng.integers(1, 7)), rng)
    la = {v: (c, int(rng.integers(4))) for v, c in enumerate(a)}
    lb = {len(a) + v: (c, int(rng.integers(4))) for v, c in enumerate(b)}
    return Configuration.from_components(["q"] * (len(a) + len(b)), [la, lb])


def alignment_agrees(cfg, a, pa, b, pb) -> bool:
    comp_a, comp_b = cfg.components[cfg.comp[a]], cfg.components[cfg.comp[b]]
    rots = dict(enumerate(cfg.rot))
    pl = feasible_alignment(cfg, a, pa, b, pb)
    oracle = brute_force_alignment(comp_a.cells, a, pa, rots, comp_b.cells, b, pb, rots)
    if pl is None:
        return not oracle
    if len(oracle) != 1:
        return False
    if pl.moving == comp_b.cid:
        return frozenset(pl.map(c) for c in comp_b.cells) == oracle[0]
    back = brute_force_alignment(comp_b.cells, b, pb, rots, comp_a.cells, a, pa, rots)
    return len(back) == 1 and frozenset(pl.map(c) for c in comp_a.cells) == back[0]


def c14(quick):
    draws = _n(10 ** 5, quick, 2 * 10 ** 4)
    pvals = []
    for j, (cfg, spec) in enumerate(frozen_configurations()):
        p, k = uniformity_pvalue(cfg, spec, draws, 200 + j)
        pvals.append((p, k))
    rng = trial_rng(114, 99)
    pairs = _n(1000, quick, 200)
    agree = 0
    for _ in range(pairs):
        cfg = random_pair(rng)
        a = int(rng.integers(0, len(cfg.components[cfg.comp[0]])))
        b = int(rng.integers(len(cfg.components[cfg.comp[0]]), cfg.n))
        pa, pb = Port(int(rng.integers(4))), Port(int(rng.integers(4)))
        agree += alignment_agrees(cfg, a, pa, b, pb)
    ok = all(p > 0.001 for p, _ in pvals) and agree == pairs
    ps = ", ".join(f"p={p:.3f} ({k} interactions)" for p, k in pvals)
    return ok, f"chi-square {ps} over {draws} draws each; alignment agreement {agree}/{pairs}"


CRITERIA = {
    1: ("counting w.h.p. bound", c1),
    2: ("estimate quality", c2),
    3: ("runtime scaling", c3),
    4: ("ruin oracle", c4),
    5: ("Square2 stabilization", c5),
    6: ("Line-Replication", c6),
    7: ("no-leader replication invariant", c7),
    8: ("Counting-on-a-Line invariants", c8),
    9: ("Square-Knowing-n", c9),
    10: ("universal constructor", c10),
    11: ("UID counting", c11),
    12: ("simple UID protocol", c12),
    13: ("shape replication", c13),
    14: ("scheduler correctness", c14),
}


def run_one(number: int, quick: bool = False) -> Result:
    title, fn = CRITERIA[number]
    t0 = time.perf_counter()
    try:
        passed, detail = fn(quick)
    except Exception as exc:      # a crash is a failure with a reason, not an abort
        passed, detail = False, f"error: {type(exc).__name__}: {exc}"
    return Result(number, title, bool(passed), detail, time.perf_counter() - t0)


def run_all(only=None, quick: bool = False) -> list[Result]:
    return [run_one(k, quick) for k in sorted(only or CRITERIA)]


__all__ = ["CRITERIA", "Result", "run_all", "run_one", "isqrt"]
