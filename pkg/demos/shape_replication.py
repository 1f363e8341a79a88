"""Copying an arbitrary connected shape.

The leader first squares the shape up to its enclosing rectangle (the added
nodes are labelled off), replicates the rectangle column by column, and
finally walks both copies cutting every bond that touches an off node.  The
result is two copies of the shape and free waste.
"""

from netcon.experiments import PLUS, build
from netcon.protocols.replication import Replication, population_for
from netcon.render import render
from netcon.scheduler import Simulation, trial_rng

for approach in (1, 2):
    s = build(f"replication{approach}")
    phases = []

    def watch(sim, ev, phases=phases, spec=s.spec):
        ph = spec.phase(sim.cfg.states)
        if not phases or phases[-1] != ph:
            phases.append(ph)

    res = Simulation(s.cfg, s.spec, trial_rng(11, approach), count_total=False).run(s.stop, on_event=watch)
    print(f"approach {approach}: {' -> '.join(phases)}; {s.check(s.cfg)[1]}")
print(render(s.cfg))

shape = [(0, 0), (1, 0), (2, 0), (2, 1), (2, 2), (1, 2)]
spec = Replication(1)
cfg = spec.initial_configuration(shape, population_for(shape))
Simulation(cfg, spec, trial_rng(12, 0), count_total=False).run("leader-halted")
print("a C-shaped hexomino:")
print(render(cfg))
