"""Measurements with classical records, open and closed cloners.

An :class:`Instrument` is a list of labelled Kraus branches. Applying it to a
state gives, per branch, the probability of that record and the normalized
post-measurement state.

Open cloning measures the input, reads off which state was supplied and
prepares the copy; the measurement record stays behind in the environment.
The environment is modelled as orthogonal pointer states, one per record
label, so the information it retains about the input is the Holevo quantity
of the record ensemble (a purely classical quantity in this model).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidArgumentError
from .qstate import (
    DensityMatrix,
    OrthoPair,
    Unitary,
    fidelity,
    shannon_entropy,
    tensor,
)

__all__ = [
    "COMPLETENESS_TOL",
    "ZERO_PROBABILITY",
    "Instrument",
    "BranchOutcome",
    "OpenCloneResult",
    "coarse_projectors",
    "fine_measurement",
    "apply_instrument",
    "open_clone",
    "closed_clone_pure_gate",
    "delete_pure_gate",
    "embed_qubit_gate",
    "record_holevo",
]

COMPLETENESS_TOL = 1e-10
ZERO_PROBABILITY = 1e-12

# Which input each record label points to.
_COARSE_INDICATES = {"P0": 0, "P1": 1}
_FINE_INDICATES = {"0": 0, "2": 0, "1": 1, "3": 1}


@dataclass(frozen=True, eq=False)
class Instrument:
    branches: tuple[tuple[str, tuple[np.ndarray, ...]], ...]
    dim: int

    def __post_init__(self):
        branches = []
        total = np.zeros((self.dim, self.dim), dtype=complex)
        labels = set()
        for label, ops in self.branches:
            label = str(label)
            if label in labels:
                raise InvalidArgumentError(f"duplicate branch label {label!r}")
            labels.add(label)
            frozen_ops = []
            for k in ops:
                k = np.array(k, dtype=complex)
                if k.shape != (self.dim, self.dim):
                    raise InvalidArgumentError(
                        f"Kraus operator of branch {label!r} has shape {k.shape}"
                    )
                k.flags.writeable = False
                total += k.conj().T @ k
                frozen_ops.append(k)
            branches.append((label, tuple(frozen_ops)))
        err = np.max(np.abs(total - np.eye(self.dim)))
        if err > COMPLETENESS_TOL:
            raise InvalidArgumentError(f"instrument is not complete (error {err:.3e})")
        object.__setattr__(self, "branches", tuple(branches))

    @property
    def labels(self) -> list[str]:
        return [label for label, _ in self.branches]


@dataclass(frozen=True)
class BranchOutcome:
    label: str
    probability: float
    post_state: DensityMatrix | None  # None when probability <= ZERO_PROBABILITY


@dataclass(frozen=True)
class OpenCloneResult:
    output_state: DensityMatrix
    record_distribution: tuple[tuple[str, float], ...]
    record_holevo_bits: float
    fidelity_to_target: float
    record_entropy_bits: float = 0.0

    def to_json(self) -> dict:
        return {
            "fidelity": self.fidelity_to_target,
            "record": [{"label": lab, "p": p} for lab, p in self.record_distribution],
            "holevo_bits": self.record_holevo_bits,
        }


def _projector(indices, dim=4) -> np.ndarray:
    m = np.zeros((dim, dim), dtype=complex)
    for k in indices:
        m[k, k] = 1.0
    return m


def coarse_projectors() -> Instrument:
    """Two-outcome measurement onto the supports of rho0 and rho1."""
    return Instrument(
        branches=(("P0", (_projector([0, 2]),)), ("P1", (_projector([1, 3]),))),
        dim=4,
    )


def fine_measurement() -> Instrument:
    """Measurement in the basis |0>, |1>, |2>, |3>."""
    return Instrument(
        branches=tuple((str(k), (_projector([k]),)) for k in range(4)),
        dim=4,
    )


def apply_instrument(inst: Instrument, rho: DensityMatrix) -> list[BranchOutcome]:
    if inst.dim != rho.dim:
        raise InvalidArgumentError(
            f"instrument acts on dim {inst.dim}, state has dim {rho.dim}"
        )
    outcomes = []
    for label, ops in inst.branches:
        unnormalized = sum(k @ rho.entries @ k.conj().T for k in ops)
        prob = float(np.real(np.trace(unnormalized)))
        prob = min(1.0, max(0.0, prob))
        post = None
        if prob > ZERO_PROBABILITY:
            m = unnormalized / np.trace(unnormalized)
            post = DensityMatrix(0.5 * (m + m.conj().T), rho.subsystem_dims)
        outcomes.append(BranchOutcome(label, prob, post))
    return outcomes


def record_holevo(
    prior: float,
    record_dists: Sequence[Sequence[tuple[str, float]]],
) -> float:
    """Information (bits) the record carries about which of two inputs was given.

    Each record label is treated as an orthogonal pointer state of the
    environment, so the Holevo quantity reduces to
    ``H(prior-weighted mixture) - sum_i prior_i * H(record_i)``.

    Parameters
    ----------
    prior : float
        Probability that input 0 was supplied.
    record_dists : pair of sequences of (label, probability)
        Record distribution for input 0 and for input 1.
    """
    prior = float(prior)
    if not 0.0 <= prior <= 1.0:
        raise InvalidArgumentError(f"prior must lie in [0, 1], got {prior!r}")
    if len(record_dists) != 2:
        raise InvalidArgumentError("record_dists must hold exactly two distributions")

    parsed = []
    for dist in record_dists:
        d: dict[str, float] = {}
        for item in dist:
            try:
                label, p = item
            except (TypeError, ValueError):
                raise InvalidArgumentError(f"malformed record entry {item!r}") from None
            p = float(p)
            if not np.isfinite(p) or p < 0.0 or p > 1.0:
                raise InvalidArgumentError(f"record probability {p!r} outside [0, 1]")
            d[str(label)] = d.get(str(label), 0.0) + p
        if abs(sum(d.values()) - 1.0) > 1e-10:
            raise InvalidArgumentError("record distribution does not sum to 1")
        parsed.append(d)

    labels = sorted(set(parsed[0]) | set(parsed[1]))
    weights = (prior, 1.0 - prior)
    mixture = [sum(w * d.get(lab, 0.0) for w, d in zip(weights, parsed)) for lab in labels]
    chi = shannon_entropy(mixture) - sum(
        w * shannon_entropy(d.values()) for w, d in zip(weights, parsed)
    )
    return max(0.0, chi)


def _record(outcomes: list[BranchOutcome]) -> tuple[tuple[str, float], ...]:
    return tuple((o.label, o.probability) for o in outcomes)


def open_clone(
    pair: OrthoPair,
    which: int,
    mode: str = "coarse",
    prior: float = 0.5,
) -> OpenCloneResult:
    """Measure-and-prepare cloning of ``pair.state(which)``.

    In coarse mode the measured system is kept (the projectors leave it
    undisturbed) and a fresh copy is prepared next to it. In fine mode the
    post-measurement state is a basis vector, so both copies are re-prepared
    from the known mixing weights. ``prior`` only enters the accounting of
    the record information; the cloning map itself does not depend on it.
    """
    if which not in (0, 1):
        raise InvalidArgumentError(f"which must be 0 or 1, got {which!r}")
    prior = float(prior)
    if not 0.0 <= prior <= 1.0:
        raise InvalidArgumentError(f"prior must lie in [0, 1], got {prior!r}")
    if mode == "coarse":
        inst, indicates = coarse_projectors(), _COARSE_INDICATES
    elif mode == "fine":
        inst, indicates = fine_measurement(), _FINE_INDICATES
    else:
        raise InvalidArgumentError(f"mode must be 'coarse' or 'fine', got {mode!r}")

    rho = pair.state(which)
    outcomes = apply_instrument(inst, rho)

    out = np.zeros((16, 16), dtype=complex)
    for o in outcomes:
        if o.post_state is None:
            continue
        indicated = pair.state(indicates[o.label])
        system = o.post_state if mode == "coarse" else indicated
        out += o.probability * tensor(system, indicated).entries
    out /= np.trace(out)
    output_state = DensityMatrix(0.5 * (out + out.conj().T), (4, 4))

    records = [_record(apply_instrument(inst, pair.state(i))) for i in (0, 1)]
    chi = record_holevo(prior, records)
    mixture = [prior * a[1] + (1.0 - prior) * b[1] for a, b in zip(*records)]

    return OpenCloneResult(
        output_state=output_state,
        record_distribution=records[which],
        record_holevo_bits=chi,
        fidelity_to_target=fidelity(output_state, tensor(rho, rho)),
        record_entropy_bits=shannon_entropy(mixture),
    )


def closed_clone_pure_gate() -> Unitary:
    """CNOT on qubit (x) qubit: |i>|j> -> |i>|i xor j>."""
    u = np.zeros((4, 4), dtype=complex)
    for i in (0, 1):
        for j in (0, 1):
            u[2 * i + (i ^ j), 2 * i + j] = 1.0
    return Unitary(u)


def delete_pure_gate() -> Unitary:
    return closed_clone_pure_gate().dagger


def embed_qubit_gate(gate: Unitary, level: int = 4) -> Unitary:
    """Lift a two-qubit gate to two ``level``-dimensional systems.

    The gate acts on span{|0>,|1>} (x) span{|0>,|1>} and as the identity on
    the orthogonal complement.
    """
    if gate.dim != 4:
        raise InvalidArgumentError("expected a two-qubit (4x4) gate")
    big = np.eye(level * level, dtype=complex)
    idx = [a * level + b for a in (0, 1) for b in (0, 1)]
    big[np.ix_(idx, idx)] = gate.entries
    return Unitary(big)
