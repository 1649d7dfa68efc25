"""
When the weights coincide
=========================

If {p, q} = {r, s} the eigenvalue test cannot tell the two inputs apart, and a
permutation really does clone them: leave the blank alone when the system
is in span{|0>,|2>}, otherwise swap |0><->|1> and |2><->|3> in the blank.
"""

from orthoclone import (
    blank_feasibility,
    cloning_objective,
    degenerate_clone_unitary,
    deletion_objective,
    make_orthogonal_pair,
    minimize,
    SearchConfig,
)

p = 0.7
pair = make_orthogonal_pair(p, p)
print("feasibility:", blank_feasibility(pair))

u = degenerate_clone_unitary(p)
print("clone objective of the permutation:", cloning_objective(u, pair, pair.rho0))
print("delete objective of its inverse:   ", deletion_objective(u.dagger, pair, pair.rho0))

res = minimize("clone", pair, pair.rho0, SearchConfig(restarts=5))
print(f"search from random starts: {res.best_objective:.2e} ({res.verdict})")
