"""
Why no unitary clones mixed orthogonal states
=============================================

A unitary keeps eigenvalues. So rho_i (x) blank and rho_i (x) rho_i must share
a spectrum for both inputs. Print the two sides and see where they part.
"""

from orthoclone import blank_feasibility, make_orthogonal_pair, spectral_obstruction
from orthoclone.qstate import maximally_mixed

pair = make_orthogonal_pair(p=0.7, r=0.6)

for name, blank in [("rho0", pair.rho0), ("maximally mixed", maximally_mixed(4))]:
    rep = spectral_obstruction(pair, blank, task="clone")
    print(f"blank = {name}: blocked = {rep.blocked}")
    for i, c in enumerate(rep.per_input):
        print(f"  i={i}  rho_i x blank {c.input_spectrum.nonzero()}")
        print(f"       rho_i x rho_i {c.output_spectrum.nonzero()}  gap {c.max_pairwise_gap:.3f}")

# is there *any* blank that would pass the test?
for p, r in [(0.7, 0.6), (0.7, 0.3), (1.0, 1.0)]:
    res = blank_feasibility(make_orthogonal_pair(p, r))
    print(f"p={p}, r={r}: feasible={res.feasible}  ({res.reason})")

# deleting is the same comparison read the other way round
print("delete blocked:", spectral_obstruction(pair, pair.rho0, task="delete").blocked)
