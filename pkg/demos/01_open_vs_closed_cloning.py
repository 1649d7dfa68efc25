"""
Open versus closed cloning
==========================

Two orthogonal states can always be copied by measuring which one we hold
and preparing another. The measurement outcome stays behind, though: here we
count how many bits about the input it keeps. For pure states a CNOT does
the same job with nothing left over.
"""

import numpy as np

from orthoclone import make_orthogonal_pair, open_clone
from orthoclone.channels import closed_clone_pure_gate, delete_pure_gate
from orthoclone.qstate import apply_unitary, basis_ket, fidelity, pure_state, tensor

pair = make_orthogonal_pair(p=0.7, r=0.6)
print("rho0 diagonal:", np.diag(pair.rho0.entries).real)
print("rho1 diagonal:", np.diag(pair.rho1.entries).real)

# measure onto the two supports, then prepare the copy
for which in (0, 1):
    res = open_clone(pair, which, mode="coarse", prior=0.5)
    print(f"coarse, input {which}: fidelity {res.fidelity_to_target:.12f}, "
          f"record {dict(res.record_distribution)}, leaked {res.record_holevo_bits:.3f} bit")

# the finer basis measurement scrambles the weights but still tells 0 from 1
res = open_clone(pair, 0, mode="fine")
print(f"fine, input 0: record {dict(res.record_distribution)}, "
      f"leaked about the input {res.record_holevo_bits:.3f} bit, "
      f"record entropy {res.record_entropy_bits:.3f} bits")

# pure case: a gate, no record
cnot, undo = closed_clone_pure_gate(), delete_pure_gate()
blank = pure_state(basis_ket(0, 2))
for i in (0, 1):
    rho = pure_state(basis_ket(i, 2))
    two = apply_unitary(cnot, tensor(rho, blank))
    back = apply_unitary(undo, two)
    print(f"|{i}>: clone fidelity {fidelity(two, tensor(rho, rho)):.3f}, "
          f"after deletion {fidelity(back, tensor(rho, blank)):.3f}")
