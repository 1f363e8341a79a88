"""Building the shape a Turing machine describes.

The machine reads ``bin(i) # bin(d)`` and decides whether pixel i of the d x d
square is on.  Pixels are numbered in a zig-zag from the bottom-left corner.
The constructor builds the square, runs the machine on every pixel using the
square's own nodes as tape, and finally releases every off pixel.
"""

from netcon.experiments import build
from netcon.render import render
from netcon.scheduler import Simulation, trial_rng
from netcon.turing import pattern_of, shipped_tm

tm = shipped_tm("cross")
print("cross, d=5, evaluated directly:")
for row in pattern_of(tm, 5).grid():
    print("".join("#" if p == "on" else "." for p in row))

s = build("universal", tm="cross", d=5)
sim = Simulation(s.cfg, s.spec, trial_rng(3, 0), count_total=False)
sim.run(lambda cfg: s.spec.phase(cfg.states) == "release")
print("\njust before release (o marks nodes that will be freed):")
print(render(s.cfg, spec=s.spec))
res = sim.run("leader-halted")
print(f"halted after {res.effective} effective interactions; {s.check(s.cfg)[1]}")
print(render(s.cfg, spec=s.spec))
