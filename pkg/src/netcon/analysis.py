"""Monte-Carlo orchestration, interval estimates and scaling fits."""

from __future__ import annotations

import math
import os
import time
import traceback
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import stats

from .scheduler import trial_rng

THREADS_ENV = "NETCON_THREADS"


@dataclass
class Estimate:
    point: float
    low: float
    high: float
    trials: int
    successes: int

    def __str__(self):
        return f"{self.point:.4f} [{self.low:.4f}, {self.high:.4f}] ({self.successes}/{self.trials})"


def wilson(successes: int, trials: int, z: float = 1.959963984540054) -> Estimate:
    """Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise ValueError("need at least one trial")
    p = successes / trials
    denom = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    low, high = max(0.0, centre - half), min(1.0, centre + half)
    # guard against rounding at the extremes
    if successes == trials:
        high = 1.0
    if successes == 0:
        low = 0.0
    return Estimate(p, min(low, p), max(high, p), trials, successes)


@dataclass
class TrialReport:
    seed: tuple
    success: bool
    steps: int = 0
    effective: int = 0
    wall: float = 0.0
    flags: dict = field(default_factory=dict)
    error: str | None = None


@dataclass
class Batch:
    estimate: Estimate
    reports: list

    @property
    def errors(self):
        return [r for r in self.reports if r.error is not None]

    def mean_steps(self) -> float:
        ok = [r.steps for r in self.reports if r.error is None]
        return float(np.mean(ok)) if ok else math.nan

    def records(self) -> str:
        lines = []
        for i, r in enumerate(self.reports):
            lines.append(f"{i}, {r.seed[0]}, {int(r.success)}, {r.steps}, {r.effective}, {r.wall:.4f}"
                         + ("" if r.error is None else f", error={r.error.splitlines()[-1]}"))
        return "\n".join(lines)


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def monte_carlo(experiment: Callable, trials: int, base_seed: int = 0,
                success: Callable | None = None, threads: int | None = None) -> Batch:
    """Run ``experiment(rng)`` for independent seeded trials.

    The experiment returns either a TrialReport-like dict with keys
    ``success``, ``steps``, ``effective`` and ``flags``, or any object that
    ``success`` maps to a bool.  Exceptions are recorded per trial and count
    as failures; they never abort the batch.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    threads = default_threads() if threads is None else threads

    def one(i):
        rng = trial_rng(base_seed, i)
        t0 = time.perf_counter()
        try:
            out = experiment(rng)
        except Exception:
            return TrialReport((base_seed, i), False, wall=time.perf_counter() - t0,
                               error=traceback.format_exc())
        wall = time.perf_counter() - t0
        if success is not None:
            ok = bool(success(out))
            steps = getattr(out, "steps", getattr(out, "total", 0))
            eff = getattr(out, "effective", 0)
            return TrialReport((base_seed, i), ok, int(steps), int(eff), wall, {"result": out})
        return TrialReport((base_seed, i), bool(out["success"]), int(out.get("steps", 0)),
                           int(out.get("effective", 0)), wall, dict(out.get("flags", {})))

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            reports = list(pool.map(one, range(trials)))
    else:
        reports = [one(i) for i in range(trials)]
    k = sum(r.success for r in reports)
    return Batch(wilson(k, trials), reports)


@dataclass
class ScalingFit:
    alpha: float
    log_c: float
    residuals: np.ndarray
    r_squared: float


def scaling_exponent(points) -> ScalingFit:
    """Least-squares fit of steps ≈ c·n^alpha·log n on log scale."""
    pts = sorted((float(n), float(s)) for n, s in points)
    ns = np.array([p[0] for p in pts])
    if len(set(ns)) < 3:
        raise ValueError("need at least three distinct sizes")
    ys = np.log(np.array([p[1] for p in pts]) / np.log(ns))
    xs = np.log(ns)
    res = stats.linregress(xs, ys)
    fitted = res.intercept + res.slope * xs
    return ScalingFit(float(res.slope), float(res.intercept), ys - fitted, float(res.rvalue ** 2))


@dataclass
class TraceMetrics:
    steps: int = 0
    effective: int = 0
    effective_fraction: float = 0.0
    phases: dict = field(default_factory=dict)
    components: list = field(default_factory=list)


def trace_metrics(events, total_steps: int | None = None) -> TraceMetrics:
    """Per-phase step counts, effective fraction and a merge/split timeline.

    ``total_steps`` (when the trace skipped ineffective selections) sets the
    denominator of the effective fraction; phase durations are measured in
    scheduler steps between consecutive recorded events.
    """
    events = list(events)
    if not events:
        return TraceMetrics(steps=total_steps or 0)
    steps = total_steps if total_steps is not None else events[-1].step
    eff = sum(1 for e in events if e.effective)
    phases: dict = {}
    prev = 0
    delta = 0
    timeline = []
    for e in events:
        phases[e.phase] = phases.get(e.phase, 0) + (e.step - prev)
        prev = e.step
        if e.merged is not None:
            delta -= 1
        if e.split is not None:
            delta += 1
        timeline.append((e.step, delta))
    if steps > prev:
        last = events[-1].phase
        phases[last] = phases.get(last, 0) + steps - prev
    return TraceMetrics(steps, eff, eff / steps if steps else 0.0, phases, timeline)
