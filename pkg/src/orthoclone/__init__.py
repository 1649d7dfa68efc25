"""Cloning and deleting orthogonal mixed states.

Open (measure-and-prepare) cloning always works but leaves a record in the
environment; closed (unitary) cloning and deleting are ruled out for mixed
inputs by a spectral certificate, which a numerical search over the unitary
group corroborates.
"""

__version__ = "0.1.0"

from .errors import InvalidArgumentError, NumericalError
from .qstate import (
    DensityMatrix,
    Ket,
    OrthoPair,
    Spectrum,
    Unitary,
    apply_unitary,
    fidelity,
    make_orthogonal_pair,
    partial_trace,
    spectrum,
    tensor,
    trace_distance,
    von_neumann_entropy,
)
from .channels import (
    Instrument,
    apply_instrument,
    closed_clone_pure_gate,
    coarse_projectors,
    delete_pure_gate,
    fine_measurement,
    open_clone,
    record_holevo,
)
from .obstruction import blank_feasibility, spectral_obstruction, tensor_spectrum
from .search import (
    SearchConfig,
    SearchResult,
    cloning_objective,
    degenerate_clone_unitary,
    deletion_objective,
    minimize,
)
