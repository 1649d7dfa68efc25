"""Spectral certificates against closed cloning and deleting.

Conjugation by a unitary leaves the eigenvalue multiset unchanged. A closed
cloner must carry rho_i (x) blank onto rho_i (x) rho_i for both inputs, so the
two sides must share a spectrum for each i; when they do not, no unitary can
do the job. Deleting asks for the reverse map and is blocked by the same
comparison read backwards.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .qstate import DensityMatrix, OrthoPair, Spectrum, spectrum, tensor

__all__ = [
    "SPECTRUM_MATCH_TOL",
    "InputComparison",
    "ObstructionReport",
    "BlankFeasibility",
    "tensor_spectrum",
    "spectra_match",
    "spectral_obstruction",
    "blank_feasibility",
]

SPECTRUM_MATCH_TOL = 1e-9
TASKS = ("clone", "delete")


@dataclass(frozen=True)
class InputComparison:
    input_spectrum: Spectrum
    output_spectrum: Spectrum
    matched: bool
    max_pairwise_gap: float

    def to_json(self) -> dict:
        return {
            "input_spectrum": list(self.input_spectrum.values),
            "output_spectrum": list(self.output_spectrum.values),
            "matched": self.matched,
            "max_pairwise_gap": self.max_pairwise_gap,
        }


@dataclass(frozen=True)
class ObstructionReport:
    task: str
    per_input: tuple[InputComparison, InputComparison]
    blocked: bool
    note: str

    def to_json(self) -> dict:
        return {
            "task": self.task,
            "per_input": [c.to_json() for c in self.per_input],
            "blocked": self.blocked,
            "note": self.note,
        }


@dataclass(frozen=True)
class BlankFeasibility:
    feasible: bool
    witness_spectrum: tuple[float, ...] | None
    reason: str

    def to_json(self) -> dict:
        return {
            "feasible": self.feasible,
            "witness_spectrum": None if self.witness_spectrum is None else list(self.witness_spectrum),
            "reason": self.reason,
        }


def _check_task(task: str) -> str:
    if task not in TASKS:
        raise InvalidArgumentError(f"task must be 'clone' or 'delete', got {task!r}")
    return task


def tensor_spectrum(a: Spectrum, b: Spectrum) -> Spectrum:
    """Spectrum of a product state: all pairwise products of eigenvalues."""
    return Spectrum(tuple(np.outer(a.as_array(), b.as_array()).ravel()))


def spectra_match(a: Spectrum, b: Spectrum, tol: float = SPECTRUM_MATCH_TOL) -> tuple[bool, float]:
    """Compare two sorted spectra entrywise; returns (matched, max gap).

    Spectra of different lengths are zero-padded, which is the right notion
    of multiset equality for density matrices embedded in a larger space.
    """
    x, y = a.as_array(), b.as_array()
    n = max(x.size, y.size)
    x = np.pad(x, (0, n - x.size))
    y = np.pad(y, (0, n - y.size))
    gap = float(np.max(np.abs(x - y)))
    return gap <= tol, gap


def spectral_obstruction(
    pair: OrthoPair, blank: DensityMatrix, task: str = "clone"
) -> ObstructionReport:
    """Check whether the spectra allow a unitary for ``task`` on both inputs."""
    _check_task(task)
    if blank.dim != 4:
        raise InvalidArgumentError(f"blank must have dim 4, got {blank.dim}")

    comparisons = []
    for i in (0, 1):
        rho = pair.state(i)
        with_blank = spectrum(tensor(rho, blank))
        two_copies = spectrum(tensor(rho, rho))
        if task == "clone":
            src, dst = with_blank, two_copies
        else:
            src, dst = two_copies, with_blank
        matched, gap = spectra_match(src, dst)
        comparisons.append(InputComparison(src, dst, matched, gap))

    mismatched = [i for i, c in enumerate(comparisons) if not c.matched]
    blocked = bool(mismatched)
    if blocked:
        which = ", ".join(f"i={i}" for i in mismatched)
        note = (
            f"input and required output spectra differ for {which}; "
            f"no unitary can {task} both states"
        )
    else:
        note = (
            "not blocked by the spectral argument: spectra agree for both inputs "
            "(necessary condition only; existence needs an explicit unitary)"
        )
    return ObstructionReport(task, tuple(comparisons), blocked, note)


def blank_feasibility(pair: OrthoPair, task: str = "clone") -> BlankFeasibility:
    """Decide whether some blank spectrum passes the spectral test for both inputs.

    For rank-two inputs, {p, q} x beta = {p, q}^2 forces beta = {p, q} (the
    largest and smallest products pin down the two nonzero entries of beta),
    and likewise beta = {r, s}. A common blank therefore exists iff the two
    weight multisets coincide. Deleting gives the same equations with the
    sides swapped, so the verdict does not depend on ``task``.
    """
    _check_task(task)
    w0 = sorted(pair.weights(0), reverse=True)
    w1 = sorted(pair.weights(1), reverse=True)
    gap = max(abs(a - b) for a, b in zip(w0, w1))
    if gap <= SPECTRUM_MATCH_TOL:
        witness = tuple(float(x) for x in w0 if x > 0.0)
        return BlankFeasibility(
            True,
            witness,
            f"weight multisets {{p,q}} and {{r,s}} coincide; blank spectrum {list(witness)} "
            "satisfies both spectral constraints",
        )
    return BlankFeasibility(
        False,
        None,
        f"input 0 forces blank spectrum {[x for x in w0 if x > 0]}, input 1 forces "
        f"{[x for x in w1 if x > 0]}; they differ by {gap:.3g}",
    )
