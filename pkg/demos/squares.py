"""Three ways to build a square.

1. The Square rule table spirals a leader around a growing square; it never
   knows when to stop, so it is only correct when n is a perfect square.
2. Square-Knowing-n: the leader knows d = sqrt(n), builds a line of length d
   and replicates it d - 1 times, then glues the copies and halts.
3. The same, but the leader first counts the population on a line.
"""

from netcon.experiments import build
from netcon.model import Configuration
from netcon.protocols.square_n import SquareKnowingN
from netcon.render import render
from netcon.scheduler import Simulation, trial_rng

s = build("square", n=16)
res = Simulation(s.cfg, s.spec, trial_rng(0, 0)).run()
print(f"Square table, n=16: {res.reason} after {res.steps} steps")
print(render(s.cfg))

s = build("square-knowing-n", n=25)
sim = Simulation(s.cfg, s.spec, trial_rng(0, 1), count_total=False)
seen = []


def watch(sim, ev):
    ph = s.spec.phase(sim.cfg.states)
    if not seen or seen[-1] != ph:
        seen.append(ph)


res = sim.run("leader-halted", on_event=watch)
print(f"Square-Knowing-n, n=25: {' -> '.join(seen)}, {res.effective} effective interactions")
print(render(s.cfg))

spec = SquareKnowingN("simulated", b=5)
cfg = Configuration(spec.initial_states(40))
Simulation(cfg, spec, trial_rng(0, 2), count_total=False).run("leader-halted")
print("counting first, n=40: the square has side floor(sqrt(r0)), whatever is left over stays free")
print(render(cfg))
