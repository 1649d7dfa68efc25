"""
Searching the unitary group
===========================

Let an optimizer try to find a closed cloner. For the pure pair it succeeds;
for the mixed pair it stalls at a positive value, which is exactly what the
spectral certificate predicts. The run is deterministic given the seed.
"""

import time

from orthoclone import SearchConfig, make_orthogonal_pair, minimize
from orthoclone.qstate import maximally_mixed

config = SearchConfig(restarts=10, max_iters=500, master_seed=42)

cases = [
    ("pure p=r=1, blank |0>", make_orthogonal_pair(1, 1), None),
    ("mixed p=0.7 r=0.6, blank rho0", make_orthogonal_pair(0.7, 0.6), None),
    ("mixed p=0.7 r=0.6, blank I/4", make_orthogonal_pair(0.7, 0.6), maximally_mixed(4)),
]
for label, pair, blank in cases:
    blank = pair.rho0 if blank is None else blank
    for task in ("clone", "delete"):
        t0 = time.perf_counter()
        res = minimize(task, pair, blank, config)
        print(f"{label:32s} {task:6s} best {res.best_objective:.3e}  {res.verdict:9s} "
              f"seed {res.seed_used}  {time.perf_counter() - t0:.1f}s")
