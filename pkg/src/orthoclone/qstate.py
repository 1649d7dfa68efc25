"""Dense finite-dimensional quantum states.

States, gates and spectra are small immutable value types wrapping numpy
arrays. Every operation here is a pure function; arrays handed out are
read-only views so a value can be shared freely between threads.

Basis convention: the four-level system uses the fixed order |0>, |1>, |2>, |3>
and composite systems are ordered system (x) blank (x) further copies.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidArgumentError, NumericalError

__all__ = [
    "HERMITIAN_TOL",
    "TRACE_TOL",
    "PSD_TOL",
    "UNITARY_TOL",
    "FIDELITY_CONVENTION",
    "Ket",
    "DensityMatrix",
    "Unitary",
    "Spectrum",
    "OrthoPair",
    "basis_ket",
    "pure_state",
    "diagonal_state",
    "maximally_mixed",
    "make_orthogonal_pair",
    "tensor",
    "partial_trace",
    "spectrum",
    "von_neumann_entropy",
    "shannon_entropy",
    "fidelity",
    "psd_sqrt",
    "trace_distance",
    "apply_unitary",
    "matrix_to_json",
    "matrix_from_json",
]

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
UNITARY_TOL = 1e-10

FIDELITY_CONVENTION = "squared Uhlmann: F = (tr sqrt(sqrt(rho) sigma sqrt(rho)))**2"


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.flags.writeable = False
    return a


def _hermitize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def _eigvalsh(m: np.ndarray) -> np.ndarray:
    try:
        w = np.linalg.eigvalsh(m)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver did not converge: {exc}") from exc
    if not np.all(np.isfinite(w)):
        raise NumericalError("eigensolver returned non-finite eigenvalues")
    return w


def _eigh(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    try:
        w, v = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver did not converge: {exc}") from exc
    if not (np.all(np.isfinite(w)) and np.all(np.isfinite(v))):
        raise NumericalError("eigensolver returned non-finite values")
    return w, v


@dataclass(frozen=True, eq=False)
class Ket:
    """Normalized state vector."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.ndim != 1 or amps.size == 0:
            raise InvalidArgumentError("ket amplitudes must be a non-empty vector")
        if abs(np.linalg.norm(amps) - 1.0) > 1e-12:
            raise InvalidArgumentError(
                f"ket is not normalized (norm={np.linalg.norm(amps)!r})"
            )
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def density(self) -> "DensityMatrix":
        return pure_state(self)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, positive semidefinite, unit-trace matrix.

    ``subsystem_dims`` records the tensor-factor structure; it defaults to a
    single factor of size ``dim``.
    """

    entries: np.ndarray
    subsystem_dims: tuple[int, ...] = field(default=())

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise InvalidArgumentError(f"density matrix must be square, got {m.shape}")
        dims = tuple(int(d) for d in self.subsystem_dims) or (m.shape[0],)
        if any(d <= 0 for d in dims) or int(np.prod(dims)) != m.shape[0]:
            raise InvalidArgumentError(
                f"subsystem_dims {dims} do not multiply to {m.shape[0]}"
            )
        herm_err = np.max(np.abs(m - m.conj().T))
        if herm_err > HERMITIAN_TOL:
            raise InvalidArgumentError(f"matrix is not Hermitian (error {herm_err:.3e})")
        tr = np.trace(m)
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvalidArgumentError(f"trace is {tr.real!r}, expected 1")
        lam_min = _eigvalsh(_hermitize(m))[0]
        if lam_min < -PSD_TOL:
            raise InvalidArgumentError(
                f"matrix is not positive semidefinite (min eigenvalue {lam_min:.3e})"
            )
        object.__setattr__(self, "entries", _frozen(m))
        object.__setattr__(self, "subsystem_dims", dims)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "subsystem_dims": list(self.subsystem_dims),
            "entries": matrix_to_json(self.entries),
        }


@dataclass(frozen=True, eq=False)
class Unitary:
    entries: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.entries, dtype=complex)
        if u.ndim != 2 or u.shape[0] != u.shape[1] or u.shape[0] == 0:
            raise InvalidArgumentError(f"unitary must be square, got {u.shape}")
        err = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
        if not err <= UNITARY_TOL:
            raise InvalidArgumentError(f"matrix is not unitary (error {err:.3e})")
        object.__setattr__(self, "entries", _frozen(u))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def dagger(self) -> "Unitary":
        return Unitary(self.entries.conj().T)

    def __matmul__(self, other: "Unitary") -> "Unitary":
        return Unitary(self.entries @ other.entries)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalue multiset, stored sorted in descending order.

    Values in ``[-PSD_TOL, 0)`` are clipped to zero; anything more negative
    is rejected.
    """

    values: tuple[float, ...]

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).ravel()
        if v.size == 0:
            raise InvalidArgumentError("spectrum must be non-empty")
        if not np.all(np.isfinite(v)):
            raise NumericalError("spectrum contains non-finite values")
        if v.min() < -PSD_TOL:
            raise InvalidArgumentError(f"negative eigenvalue {v.min():.3e} in spectrum")
        v = np.clip(v, 0.0, None)
        object.__setattr__(self, "values", tuple(float(x) for x in np.sort(v)[::-1]))

    @property
    def dim(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.array(self.values)

    def nonzero(self, tol: float = 1e-12) -> tuple[float, ...]:
        return tuple(x for x in self.values if x > tol)


@dataclass(frozen=True, eq=False)
class OrthoPair:
    """Two rank-(at most)-two states with orthogonal supports.

    rho0 = p|0><0| + q|2><2| and rho1 = r|1><1| + s|3><3|.
    """

    rho0: DensityMatrix
    rho1: DensityMatrix
    p: float
    q: float
    r: float
    s: float

    def __post_init__(self):
        if abs(self.p + self.q - 1.0) > 1e-12 or abs(self.r + self.s - 1.0) > 1e-12:
            raise InvalidArgumentError("mixing weights must satisfy p+q=1 and r+s=1")
        overlap = np.max(np.abs(self.rho0.entries @ self.rho1.entries))
        if overlap > 1e-12:
            raise InvalidArgumentError("rho0 and rho1 do not have orthogonal supports")

    def state(self, which: int) -> DensityMatrix:
        if which == 0:
            return self.rho0
        if which == 1:
            return self.rho1
        raise InvalidArgumentError(f"which must be 0 or 1, got {which!r}")

    def weights(self, which: int) -> tuple[float, float]:
        if which == 0:
            return (self.p, self.q)
        if which == 1:
            return (self.r, self.s)
        raise InvalidArgumentError(f"which must be 0 or 1, got {which!r}")


def basis_ket(k: int, dim: int) -> Ket:
    if not 0 <= k < dim:
        raise InvalidArgumentError(f"basis index {k} out of range for dim {dim}")
    amps = np.zeros(dim, dtype=complex)
    amps[k] = 1.0
    return Ket(amps)


def pure_state(ket: Ket, subsystem_dims: Sequence[int] = ()) -> DensityMatrix:
    a = ket.amplitudes
    return DensityMatrix(np.outer(a, a.conj()), tuple(subsystem_dims))


def diagonal_state(weights: Iterable[float], subsystem_dims: Sequence[int] = ()) -> DensityMatrix:
    w = np.asarray(list(weights), dtype=float)
    return DensityMatrix(np.diag(w).astype(complex), tuple(subsystem_dims))


def maximally_mixed(dim: int) -> DensityMatrix:
    return diagonal_state(np.full(dim, 1.0 / dim))


def _check_probability(name: str, x: float) -> float:
    x = float(x)
    if not (0.0 <= x <= 1.0):
        raise InvalidArgumentError(f"{name} must lie in [0, 1], got {x!r}")
    return x


def make_orthogonal_pair(p: float, r: float) -> OrthoPair:
    """Build the two orthogonal rank-two states on a four-level system.

    Parameters
    ----------
    p : float
        Weight of |0> in rho0; the remaining ``q = 1 - p`` sits on |2>.
    r : float
        Weight of |1> in rho1; the remaining ``s = 1 - r`` sits on |3>.

    Returns
    -------
    OrthoPair

    Raises
    ------
    InvalidArgumentError
        If either weight is outside [0, 1].
    """
    p = _check_probability("p", p)
    r = _check_probability("r", r)
    q, s = 1.0 - p, 1.0 - r
    rho0 = diagonal_state([p, 0.0, q, 0.0])
    rho1 = diagonal_state([0.0, r, 0.0, s])
    return OrthoPair(rho0=rho0, rho1=rho1, p=p, q=q, r=r, s=s)


def tensor(a: DensityMatrix, b: DensityMatrix) -> DensityMatrix:
    return DensityMatrix(
        np.kron(a.entries, b.entries), a.subsystem_dims + b.subsystem_dims
    )


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Reduced state on the subsystems listed in ``keep``.

    The kept factors appear in ascending index order in the result.
    """
    dims = rho.subsystem_dims
    n = len(dims)
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise InvalidArgumentError("keep must name at least one subsystem")
    if keep[0] < 0 or keep[-1] >= n:
        raise InvalidArgumentError(f"keep {keep} out of range for {n} subsystems")

    t = rho.entries.reshape(dims + dims)
    row = list(range(n))
    col = [i + n if i in keep else i for i in range(n)]
    out = keep + [k + n for k in keep]
    reduced = np.einsum(t, row + col, out)
    kept_dims = tuple(dims[k] for k in keep)
    d = int(np.prod(kept_dims))
    return DensityMatrix(_hermitize(reduced.reshape(d, d)), kept_dims)


def spectrum(rho: DensityMatrix) -> Spectrum:
    """Eigenvalues of ``rho`` in descending order.

    Raises
    ------
    NumericalError
        If the eigensolver fails to converge.
    """
    return Spectrum(tuple(_eigvalsh(_hermitize(rho.entries))))


def shannon_entropy(probs: Iterable[float]) -> float:
    """Shannon entropy in bits, with 0 log 0 = 0."""
    p = np.asarray(list(probs), dtype=float)
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p))) if p.size else 0.0


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """Entropy -tr(rho log2 rho) in bits."""
    return max(0.0, shannon_entropy(spectrum(rho).values))


def psd_sqrt(m: np.ndarray) -> np.ndarray:
    """Principal square root of a Hermitian PSD matrix.

    Eigenvalues below the eigensolver's rounding floor are set to zero before
    taking the root, which would otherwise inflate 1e-17 noise to 1e-9.
    """
    w, v = _eigh(_hermitize(m))
    floor = m.shape[0] * np.finfo(float).eps * max(float(w[-1]), 0.0)
    w = np.where(w > floor, w, 0.0)
    return (v * np.sqrt(w)) @ v.conj().T


def _require_same_dim(a, b):
    if a.dim != b.dim:
        raise InvalidArgumentError(f"dimension mismatch: {a.dim} vs {b.dim}")


def fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Squared Uhlmann fidelity ``(tr sqrt(sqrt(rho) sigma sqrt(rho)))**2``.

    Lies in [0, 1], equals 1 iff the states coincide and 0 iff their
    supports are orthogonal.
    """
    _require_same_dim(rho, sigma)
    # tr sqrt(sqrt(rho) sigma sqrt(rho)) is the nuclear norm of
    # sqrt(sigma) sqrt(rho); singular values avoid the sqrt of eigenvalue noise
    x = psd_sqrt(sigma.entries) @ psd_sqrt(rho.entries)
    try:
        sv = np.linalg.svd(x, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD did not converge: {exc}") from exc
    f = float(np.sum(sv) ** 2)
    return min(1.0, max(0.0, f))


def trace_distance(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    _require_same_dim(rho, sigma)
    w = _eigvalsh(_hermitize(rho.entries - sigma.entries))
    return min(1.0, 0.5 * float(np.sum(np.abs(w))))


def apply_unitary(u: Unitary, rho: DensityMatrix) -> DensityMatrix:
    """Closed-system evolution ``U rho U^dagger``."""
    _require_same_dim(u, rho)
    m = u.entries @ rho.entries @ u.entries.conj().T
    return DensityMatrix(_hermitize(m), rho.subsystem_dims)


def matrix_to_json(m: np.ndarray) -> list:
    """Nested lists of ``[re, im]`` pairs."""
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def matrix_from_json(data: list) -> np.ndarray:
    a = np.asarray(data, dtype=float)
    return a[..., 0] + 1j * a[..., 1]
