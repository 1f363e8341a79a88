"""Replicating a line, with and without a leader.

With a leader at the left end, every node of the line grows a child below
it, the children bond into a row, and the row is cut loose as a copy.

Without a leader, every line keeps replicating.  As printed, the rule table
gives a finished parent the same marks as its children, so a parent end
can bond to a neighbouring replica's row and release a longer line.  Giving
parents their own marks (ip, ep) restores the invariant that every released
row has the length of the seed.
"""

from netcon.acceptance import released_rows
from netcon.experiments import build
from netcon.render import render
from netcon.scheduler import Simulation, trial_rng

s = build("line-replication", length=6)
res = Simulation(s.cfg, s.spec, trial_rng(5, 0)).run()
print(f"leader-driven, length 6: {res.reason}; {s.check(s.cfg)[1]}")
print(render(s.cfg, labels=True))

for name in ("no-leader-line-replication", "no-leader-line-replication-corrected"):
    rows = released_rows(name, 50)
    print(f"{name}: released row lengths {dict(sorted(rows.items()))}")
