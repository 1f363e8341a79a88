"""Counting a population that has a leader but no names.

The leader marks every fresh node it meets (r0) and, once it has a head
start of b marks, re-marks already marked nodes (r1).  It halts when r1
catches up with r0.  With high probability r0 is then at least n/2.
"""

import numpy as np

from netcon.analysis import monte_carlo, scaling_exponent
from netcon.counting import failure_bound, ruin_probability, run_counting_upper_bound, walk_parameters

n, b = 512, 5
batch = monte_carlo(lambda rng: run_counting_upper_bound(n, b, rng), 200, base_seed=1,
                    success=lambda r: 2 * r.r0 >= n)
r0 = np.array([r.flags["result"].r0 for r in batch.reports])
print(f"n={n}, b={b}: P[r0 >= n/2] = {batch.estimate}")
print(f"  r0/n ranges over [{r0.min() / n:.3f}, {r0.max() / n:.3f}], median {np.median(r0) / n:.3f}")

# the bound comes from a gambler's-ruin walk; compare its failure estimate
n_prime, x = walk_parameters(n, b)
print(f"  one bad stretch has probability {float(ruin_probability(b, x)):.2e}; "
      f"union bound {float(failure_bound(n, b)):.2e}")

# expected running time grows like n^2 log n
pts = []
for size in (64, 128, 256, 512):
    pts.append((size, np.mean([run_counting_upper_bound(size, b, s).total for s in range(40)])))
fit = scaling_exponent(pts)
print(f"steps ~ n^{fit.alpha:.2f} log n  (R^2 = {fit.r_squared:.4f})")
