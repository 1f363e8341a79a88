"""Command line: ``netcon {run,count,oracle,render,verify}``.

Every command prints a ``#`` header line with its parameters and seed, so
any number it prints can be reproduced.  Usage errors exit with status 2,
runtime failures with status 1.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, fields

import numpy as np

from .analysis import default_threads, monte_carlo, trace_metrics
from .experiments import PROTOCOLS, build
from .render import FORMATS, render
from .scheduler import Simulation, trial_rng, write_trace


@dataclass
class RunConfig:
    protocol: str = "square"
    n: int | None = None
    b: int = 5
    seed: int = 0
    trials: int | None = None
    stop: str | None = None
    max_steps: float | None = None
    tm: str | None = None
    d: int | None = None
    length: int | None = None
    leader: str | None = None
    format: str = "ascii"
    out: str | None = None
    trace: str | None = None
    phase: str | None = None

    def to_json(self) -> str:
        return json.dumps({k: v for k, v in asdict(self).items() if v is not None}, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        data = json.loads(text)
        names = {f.name for f in fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
        return cls(**data)


class UsageError(Exception):
    pass


def _config(args) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        with open(args.config) as fh:
            cfg = RunConfig.from_json(fh.read())
    for f in fields(RunConfig):
        val = getattr(args, f.name, None)
        if val is not None:
            setattr(cfg, f.name, val)
    return cfg


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
        print(f"wrote {out}")
    else:
        sys.stdout.write(text)


def _setup(c: RunConfig):
    if c.protocol not in PROTOCOLS and not c.protocol.endswith((".rules", ".txt")):
        raise UsageError(f"unknown protocol {c.protocol!r}; choose from {', '.join(PROTOCOLS)} or a rule file")
    try:
        return build(c.protocol, n=c.n, b=c.b, length=c.length, tm=c.tm, d=c.d, leader=c.leader)
    except (ValueError, KeyError) as exc:
        raise UsageError(str(exc)) from None


def _simulate(c: RunConfig, trial: int, record: bool = False):
    s = _setup(c)
    stop = c.stop or s.stop
    if c.phase:
        spec = s.spec
        stop = lambda cfg, ph=c.phase: spec.phase(cfg.states) == ph   # noqa: E731
    sim = Simulation(s.cfg, s.spec, trial_rng(c.seed, trial))
    res = sim.run(stop, max_steps=c.max_steps or float("inf"), record=record)
    return s, res


# ---------------------------------------------------------------------------
# commands


def cmd_run(c: RunConfig) -> int:
    trials = c.trials or 1
    print(f"# run protocol={c.protocol} n={c.n} b={c.b} seed={c.seed} trials={trials} "
          f"stop={c.stop or 'default'} max_steps={c.max_steps}")
    ok_all = True
    for t in range(trials):
        s, res = _simulate(c, t, record=bool(c.trace))
        verdict = ""
        if s.check is not None:
            ok, summary = s.check(s.cfg)
            ok_all &= ok
            verdict = f" check={'pass' if ok else 'fail'} ({summary})"
        print(f"trial {t} (seed {c.seed}/{t}): {res.reason} after {res.steps} steps, "
              f"{res.effective} effective{verdict}")
        if c.trace:
            write_trace(res.events, c.trace if trials == 1 else f"{c.trace}.{t}")
            m = trace_metrics(res.events, res.steps)
            print("phases: " + ", ".join(f"{k or '-'}={v}" for k, v in m.phases.items()))
        if trials == 1:
            _emit(render(s.cfg, c.format, spec=s.spec), c.out)
    return 0


def cmd_count(c: RunConfig) -> int:
    from .counting import run_counting_upper_bound, run_simple_uid, run_uid_counting, sample_ids
    n = c.n or 256
    trials = c.trials or 100
    proto = c.protocol if c.protocol in ("upper-bound", "uid", "simple-uid") else "upper-bound"
    print(f"# count protocol={proto} n={n} b={c.b} trials={trials} seed={c.seed} threads={default_threads()}")
    if proto == "upper-bound":
        batch = monte_carlo(lambda rng: run_counting_upper_bound(n, c.b, rng), trials, c.seed,
                            success=lambda r: 2 * r.r0 >= n)
        r0s = np.array([r.flags["result"].r0 for r in batch.reports if r.error is None])
        print(f"{'n':>6} {'b':>3} {'trials':>7} {'P[r0>=n/2]':>30} {'median r0/n':>12} {'mean steps':>12}")
        print(f"{n:>6} {c.b:>3} {trials:>7} {str(batch.estimate):>30} {np.median(r0s) / n:>12.4f} "
              f"{batch.mean_steps():>12.0f}")
    elif proto == "uid":
        def exp(rng):
            ids = sample_ids(n, rng)
            u, out, steps = run_uid_counting(ids, c.b, rng)
            return {"success": u == max(ids) and out >= n, "steps": steps}
        batch = monte_carlo(exp, trials, c.seed)
        print(f"{'n':>6} {'b':>3} {'trials':>7} {'P[max id halts, out>=n]':>30} {'mean steps':>12}")
        print(f"{n:>6} {c.b:>3} {trials:>7} {str(batch.estimate):>30} {batch.mean_steps():>12.0f}")
    else:
        def exp(rng):
            out, steps = run_simple_uid(n, c.b, rng)
            return {"success": out == n, "steps": steps}
        batch = monte_carlo(exp, trials, c.seed)
        print(f"{'n':>6} {'b':>3} {'trials':>7} {'P[output = n]':>30} {'mean steps':>12}")
        print(f"{n:>6} {c.b:>3} {trials:>7} {str(batch.estimate):>30} {batch.mean_steps():>12.0f}")
    if c.out:
        with open(c.out, "w") as fh:
            fh.write(batch.records() + "\n")
        print(f"wrote {c.out}")
    return 1 if batch.errors else 0


def cmd_oracle(c: RunConfig) -> int:
    from .turing import DisconnectedShape, pattern_of, resolve_tm
    if not c.tm:
        raise UsageError("oracle needs --tm")
    d = c.d or 3
    try:
        tm = resolve_tm(c.tm)
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot load machine {c.tm!r}: {exc}") from None
    pat = pattern_of(tm, d)
    print(f"# oracle tm={tm.name} d={d}")
    print("on pixels: {" + ", ".join(map(str, pat.on)) + "}")
    print("off pixels: " + str(len(pat.off)))
    for row in pat.grid():
        print("".join("#" if x == "on" else ("." if x == "off" else x[:1]) for x in row))
    try:
        from .turing import shape_of
        shape_of(tm, d)
        print("output connected: yes")
    except DisconnectedShape as exc:
        print(f"output connected: no ({exc})")
    return 0


def cmd_render(c: RunConfig, shape: str | None) -> int:
    if c.format not in FORMATS:
        raise UsageError(f"unsupported format {c.format!r}")
    if shape:
        try:
            cells = json.loads(shape)
        except json.JSONDecodeError as exc:
            raise UsageError(f"--shape must be a JSON list of [x, y] cells: {exc}") from None
        _emit(render([tuple(p) for p in cells], c.format), c.out)
        return 0
    if c.tm and c.protocol != "universal":
        from .turing import resolve_tm, shape_of
        _emit(render(shape_of(resolve_tm(c.tm), c.d or 3).cells(), c.format), c.out)
        return 0
    s, res = _simulate(c, 0)
    print(f"# render protocol={c.protocol} seed={c.seed} stop={c.phase or c.stop or s.stop} "
          f"reason={res.reason} steps={res.steps}", file=sys.stderr)
    _emit(render(s.cfg, c.format, spec=s.spec), c.out)
    return 0


def cmd_verify(only, quick: bool) -> int:
    from .acceptance import run_all
    print(f"# verify criteria={','.join(map(str, only)) if only else 'all'} quick={quick}")
    results = run_all(only=only, quick=quick)
    for r in results:
        print(r.line())
    return 0 if all(r.passed for r in results) else 1


# ---------------------------------------------------------------------------


def parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="netcon", description="Geometric network constructors: "
                                "simulate protocols, count, evaluate shape machines, render, verify.")
    sub = p.add_subparsers(dest="command", metavar="{run,count,oracle,render,verify}")

    def common(sp):
        sp.add_argument("--config", help="JSON file with default values for the flags")
        sp.add_argument("--protocol", help=f"one of: {', '.join(PROTOCOLS)}, or a rule file")
        sp.add_argument("--n", type=int, help="population size")
        sp.add_argument("--b", type=int, help="head start")
        sp.add_argument("--seed", type=int, help="base seed")
        sp.add_argument("--trials", type=int)
        sp.add_argument("--stop", choices=("quiescent", "leader-halted", "all-halted"))
        sp.add_argument("--max-steps", dest="max_steps", type=float)
        sp.add_argument("--tm", help="shipped machine name or .tm file")
        sp.add_argument("--d", type=int, help="square side")
        sp.add_argument("--length", type=int, help="initial line length for line replication")
        sp.add_argument("--leader", help="leader state for a rule file")
        sp.add_argument("--format", choices=FORMATS)
        sp.add_argument("--out", help="output file")

    sp = sub.add_parser("run", help="geometric simulation of a protocol")
    common(sp)
    sp.add_argument("--trace", help="write the effective-event trace here")
    sp.add_argument("--phase", help="stop as soon as the protocol reports this phase")
    sp = sub.add_parser("count", help="well-mixed counting experiments (--protocol upper-bound|uid|simple-uid)")
    common(sp)
    sp = sub.add_parser("oracle", help="evaluate a shape machine on every pixel of a d x d square")
    common(sp)
    sp = sub.add_parser("render", help="draw a shape, a machine's shape, or a simulated configuration")
    common(sp)
    sp.add_argument("--shape", help="JSON list of cells, e.g. [[0,0],[1,0]]")
    sp.add_argument("--phase", help="render the first frame in this phase")
    sp = sub.add_parser("verify", help="run the acceptance suite")
    sp.add_argument("--only", type=int, nargs="*", help="criterion numbers")
    sp.add_argument("--quick", action="store_true", help="fewer trials")
    return p


def main(argv=None) -> int:
    p = parser()
    try:
        args = p.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command is None:
        p.print_help()
        return 2
    try:
        if args.command == "verify":
            return cmd_verify(args.only, args.quick)
        c = _config(args)
        if args.command == "run":
            return cmd_run(c)
        if args.command == "count":
            return cmd_count(c)
        if args.command == "oracle":
            return cmd_oracle(c)
        return cmd_render(c, args.shape)
    except UsageError as exc:
        print(f"netcon: error: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        print(f"netcon: error: {exc}", file=sys.stderr)
        return 2 if isinstance(exc, json.JSONDecodeError) else 1
    except Exception as exc:     # runtime failure inside a protocol or machine
        print(f"netcon: runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
