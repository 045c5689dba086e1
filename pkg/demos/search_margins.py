"""Multi-start entropy search: where perfect protractors exist and where they cannot.

The objective f = H(p^x) + H(p^y) - 2 ln d is zero exactly for states that are
uniform along x and y (and along z by construction). A negative maximum
certifies that no such state exists for that spin.

Run: python demos/search_margins.py
"""

import time

from qprotractor.protractor import protractor_rank
from qprotractor.search import RECORDED_MARGINS, SearchConfig, search_perfect
from qprotractor.spinalg import spins_up_to

for j in spins_up_to(7):
    t0 = time.perf_counter()
    res = search_perfect(SearchConfig(j, starts=256, seed=0))
    elapsed = time.perf_counter() - t0
    rank = protractor_rank(res.best_phases.state(), 1e-6).rank
    note = f"recorded margin {RECORDED_MARGINS[j.twice_j]:.6f}" if j.twice_j in RECORDED_MARGINS else ""
    print(f"j={str(j):>3}: best f = {res.best_objective: .3e}  rank {rank}  ({elapsed:.2f} s)  {note}")
