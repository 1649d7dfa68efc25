"""Multi-restart search over the unitary group for closed cloners and deleters.

Unitaries are parameterized as ``U = exp(iH)`` with ``H`` Hermitian and
expanded in a fixed basis of ``dim**2`` Hermitian matrices. The parameter
vector is laid out as

* ``params[:dim]`` -- diagonal entries, basis ``E_jj``;
* the next ``dim*(dim-1)/2`` entries -- basis ``E_jk + E_kj`` for ``j < k``;
* the last ``dim*(dim-1)/2`` entries -- basis ``i (E_jk - E_kj)`` for ``j < k``;

with the ``j < k`` pairs in row-major (``numpy.triu_indices``) order, so that
``H_jk = a_jk + i b_jk`` above the diagonal.

Each restart draws its start point from ``numpy.random.default_rng`` (PCG64)
seeded with ``master_seed ^ restart`` and runs L-BFGS-B. Restarts are
independent; the winner is the lowest objective, ties going to the lowest
restart index, so serial and parallel runs agree exactly.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize as _scipy_minimize

from .channels import closed_clone_pure_gate, embed_qubit_gate
from .errors import InvalidArgumentError, NumericalError
from .qstate import (
    DensityMatrix,
    OrthoPair,
    Unitary,
    apply_unitary,
    fidelity,
    tensor,
)

__all__ = [
    "EXACTNESS_THRESHOLD",
    "UnitaryAnsatz",
    "SearchConfig",
    "RestartSummary",
    "SearchResult",
    "hermitian_from_params",
    "params_from_hermitian",
    "ansatz_to_unitary",
    "cloning_objective",
    "deletion_objective",
    "ObjectiveFunction",
    "minimize",
    "degenerate_clone_unitary",
    "pure_clone_unitary",
]

EXACTNESS_THRESHOLD = 1e-9
MAX_TRACE_POINTS = 1000
# singular directions below this are left out of the gradient (the nuclear
# norm has a cusp at zero)
_SV_CUTOFF = 1e-12
_SUPPORT_CUTOFF = 1e-15


def _support_factor(rho) -> np.ndarray:
    """``R`` with ``R^dag R = rho``, one row per eigenvector in the support."""
    m = np.asarray(rho.entries if isinstance(rho, DensityMatrix) else rho)
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    keep = w > _SUPPORT_CUTOFF
    return np.sqrt(w[keep])[:, None] * v[:, keep].conj().T


@dataclass(frozen=True, eq=False)
class UnitaryAnsatz:
    dim: int
    params: np.ndarray

    def __post_init__(self):
        p = np.array(self.params, dtype=float).ravel()
        if self.dim <= 0 or p.size != self.dim**2:
            raise InvalidArgumentError(
                f"ansatz of dim {self.dim} needs {self.dim**2} params, got {p.size}"
            )
        p.flags.writeable = False
        object.__setattr__(self, "params", p)


def hermitian_from_params(params: np.ndarray, dim: int) -> np.ndarray:
    params = np.asarray(params, dtype=float)
    if params.size != dim * dim:
        raise InvalidArgumentError(f"expected {dim * dim} params, got {params.size}")
    n_off = dim * (dim - 1) // 2
    h = np.diag(params[:dim]).astype(complex)
    iu = np.triu_indices(dim, 1)
    upper = params[dim : dim + n_off] + 1j * params[dim + n_off :]
    h[iu] = upper
    h[iu[1], iu[0]] = upper.conj()
    return h


def params_from_hermitian(h: np.ndarray) -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    dim = h.shape[0]
    iu = np.triu_indices(dim, 1)
    return np.concatenate([np.diag(h).real, h[iu].real, h[iu].imag])


def _exp_i_hermitian(h: np.ndarray):
    lam, v = np.linalg.eigh(h)
    phases = np.exp(1j * lam)
    return (v * phases) @ v.conj().T, lam, v, phases


def ansatz_to_unitary(a: UnitaryAnsatz) -> Unitary:
    """``exp(iH)`` for the Hermitian generator encoded by ``a.params``."""
    u, *_ = _exp_i_hermitian(hermitian_from_params(a.params, a.dim))
    return Unitary(u)


def _objective(u: Unitary, inputs, targets) -> float:
    terms = [
        1.0 - fidelity(apply_unitary(u, a), b) for a, b in zip(inputs, targets)
    ]
    return min(1.0, max(0.0, 0.5 * sum(terms)))


def _clone_io(pair: OrthoPair, blank: DensityMatrix):
    if blank.dim != 4:
        raise InvalidArgumentError(f"blank must have dim 4, got {blank.dim}")
    inputs = [tensor(pair.state(i), blank) for i in (0, 1)]
    targets = [tensor(pair.state(i), pair.state(i)) for i in (0, 1)]
    return inputs, targets


def _check_u(u: Unitary):
    if u.dim != 16:
        raise InvalidArgumentError(f"objective needs a 16-dim unitary, got dim {u.dim}")


def cloning_objective(u: Unitary, pair: OrthoPair, blank: DensityMatrix) -> float:
    """Mean infidelity ``1/2 sum_i [1 - F(U (rho_i x blank) U^dag, rho_i x rho_i)]``."""
    _check_u(u)
    inputs, targets = _clone_io(pair, blank)
    return _objective(u, inputs, targets)


def deletion_objective(u: Unitary, pair: OrthoPair, blank: DensityMatrix) -> float:
    """Mean infidelity ``1/2 sum_i [1 - F(U (rho_i x rho_i) U^dag, rho_i x blank)]``."""
    _check_u(u)
    inputs, targets = _clone_io(pair, blank)
    return _objective(u, targets, inputs)


class ObjectiveFunction:
    """Objective and analytic gradient as a function of generator params.

    With ``A = L L^dag`` (input) and ``B = R^dag R`` (target) factored on
    their supports, ``sqrt(F(U A U^dag, B)) = ||R U L||_*``, the nuclear norm,
    so each term costs one small SVD and has the gradient
    ``d||X||_* = Re tr(V W^dag dX)`` for ``X = W S V^dag``.
    """

    def __init__(self, inputs, targets, dim: int = 16):
        self.dim = dim
        self.left = [_support_factor(a).conj().T for a in inputs]
        self.right = [_support_factor(b) for b in targets]
        self._iu = np.triu_indices(dim, 1)

    @classmethod
    def for_task(cls, task: str, pair: OrthoPair, blank: DensityMatrix) -> "ObjectiveFunction":
        inputs, targets = _clone_io(pair, blank)
        if task == "clone":
            return cls(inputs, targets)
        if task == "delete":
            return cls(targets, inputs)
        raise InvalidArgumentError(f"task must be 'clone' or 'delete', got {task!r}")

    def value(self, params: np.ndarray) -> float:
        return self.value_and_grad(params, with_grad=False)[0]

    def value_and_grad(self, params: np.ndarray, with_grad: bool = True):
        h = hermitian_from_params(params, self.dim)
        u, lam, v, phases = _exp_i_hermitian(h)
        f = 0.0
        k_tot = np.zeros((self.dim, self.dim), dtype=complex)
        for ell, r in zip(self.left, self.right):
            x = r @ u @ ell
            if not with_grad:
                t = np.linalg.svd(x, compute_uv=False).sum()
                f += 0.5 * (1.0 - min(1.0, t * t))
                continue
            w, sv, vh = np.linalg.svd(x, full_matrices=False)
            t = sv.sum()
            f += 0.5 * (1.0 - min(1.0, t * t))
            good = sv > _SV_CUTOFF
            # d(1 - t^2)/2 = -t Re tr(L V W^dag R dU)
            k_tot -= t * (ell @ vh[good].conj().T @ w[:, good].conj().T @ r)
        f = min(1.0, max(0.0, f))
        if not with_grad:
            return f, None

        # chain rule through U = V diag(e^{i lam}) V^dag
        dl = lam[:, None] - lam[None, :]
        d = np.exp(0.5j * (lam[:, None] + lam[None, :])) * np.sinc(dl / (2.0 * np.pi))
        kt = v.conj().T @ k_tot @ v
        q = 1j * (v @ (d.T * kt) @ v.conj().T)
        iu0, iu1 = self._iu
        grad = np.concatenate([
            q.diagonal().real,
            (q[iu1, iu0] + q[iu0, iu1]).real,
            q[iu0, iu1].imag - q[iu1, iu0].imag,
        ])
        return f, grad

    def finite_difference_grad(self, params: np.ndarray, step: float = 1e-6) -> np.ndarray:
        params = np.asarray(params, dtype=float)
        grad = np.empty_like(params)
        for j in range(params.size):
            e = np.zeros_like(params)
            e[j] = step
            grad[j] = (self.value(params + e) - self.value(params - e)) / (2 * step)
        return grad


@dataclass(frozen=True)
class SearchConfig:
    """Knobs for :func:`minimize`.

    ``gradient`` selects ``"analytic"`` (default) or ``"finite-difference"``
    (central differences, roughly ``2 * dim**2`` times slower).
    """

    restarts: int = 20
    max_iters: int = 500
    ftol: float = 1e-15
    gtol: float = 1e-10
    master_seed: int = 42
    success_threshold: float = 1e-6
    exactness_threshold: float = EXACTNESS_THRESHOLD
    init_scale: float = 1.0
    gradient: str = "analytic"

    def __post_init__(self):
        if self.restarts < 1 or self.max_iters < 1:
            raise InvalidArgumentError("restarts and max_iters must be positive")
        if not 0 <= self.master_seed < 2**64:
            raise InvalidArgumentError("master_seed must be a 64-bit unsigned integer")
        if self.exactness_threshold != EXACTNESS_THRESHOLD:
            raise InvalidArgumentError("exactness_threshold is fixed at 1e-9")
        if not self.success_threshold > self.exactness_threshold > 0:
            raise InvalidArgumentError(
                "need success_threshold > exactness_threshold > 0"
            )
        if self.ftol <= 0 or self.gtol <= 0 or self.init_scale <= 0:
            raise InvalidArgumentError("tolerances and init_scale must be positive")
        if self.gradient not in ("analytic", "finite-difference"):
            raise InvalidArgumentError(f"unknown gradient mode {self.gradient!r}")

    def restart_seed(self, k: int) -> int:
        return self.master_seed ^ k


@dataclass(frozen=True)
class RestartSummary:
    restart: int
    seed: int
    best_objective: float
    iterations: int
    converged: bool


@dataclass(frozen=True)
class SearchResult:
    best_objective: float
    best_params: tuple[float, ...]
    converged: bool
    iterations_used: int
    trace: tuple[tuple[int, float], ...]
    seed_used: int
    verdict: str
    task: str = "clone"
    config: SearchConfig = field(default_factory=SearchConfig)
    restarts: tuple[RestartSummary, ...] = ()

    def to_json(self, max_trace_points: int = MAX_TRACE_POINTS) -> dict:
        return {
            "task": self.task,
            "verdict": self.verdict,
            "best_objective": self.best_objective,
            "converged": self.converged,
            "iterations_used": self.iterations_used,
            "seed_used": self.seed_used,
            "best_params": list(self.best_params),
            "trace": [[i, f] for i, f in subsample_trace(self.trace, max_trace_points)],
            "restarts": [asdict(r) for r in self.restarts],
            "config": asdict(self.config),
        }


def subsample_trace(trace, max_points: int = MAX_TRACE_POINTS):
    """Evenly spaced subsample of ``trace`` keeping both endpoints."""
    trace = list(trace)
    if len(trace) <= max_points:
        return trace
    idx = np.unique(np.linspace(0, len(trace) - 1, max_points).round().astype(int))
    return [trace[i] for i in idx]


def _run_restart(fn: ObjectiveFunction, config: SearchConfig, k: int):
    seed = config.restart_seed(k)
    rng = np.random.default_rng(seed)
    x0 = rng.normal(scale=config.init_scale, size=fn.dim**2)

    def fun(x):
        if config.gradient == "analytic":
            f, g = fn.value_and_grad(x)
        else:
            f, g = fn.value(x), fn.finite_difference_grad(x)
        if not (np.isfinite(f) and np.all(np.isfinite(g))):
            raise NumericalError("non-finite objective or gradient", params=np.array(x))
        return f, g

    best = {"f": np.inf, "x": x0}
    f0, _ = fun(x0)
    best.update(f=f0, x=x0.copy())
    trace = [(0, f0)]

    def callback(intermediate_result):
        f = float(intermediate_result.fun)
        if f < best["f"]:
            best.update(f=f, x=np.array(intermediate_result.x))
        trace.append((len(trace), best["f"]))

    res = _scipy_minimize(
        fun,
        x0,
        jac=True,
        method="L-BFGS-B",
        callback=callback,
        options={
            "maxiter": config.max_iters,
            "maxfun": 20 * config.max_iters,
            "ftol": config.ftol,
            "gtol": config.gtol,
        },
    )
    if np.isfinite(res.fun) and res.fun < best["f"]:
        best.update(f=float(res.fun), x=np.array(res.x))
        trace.append((len(trace), best["f"]))
    summary = RestartSummary(
        restart=k,
        seed=seed,
        best_objective=float(best["f"]),
        iterations=int(res.nit),
        converged=bool(res.success) or best["f"] <= config.success_threshold,
    )
    return summary, best["x"], trace


def _restart_job(args):
    fn, config, k = args
    return _run_restart(fn, config, k)


def minimize(
    objective: str,
    pair: OrthoPair,
    blank: DensityMatrix,
    config: SearchConfig | None = None,
    workers: int = 1,
) -> SearchResult:
    """Search for a unitary that clones (or deletes) both states of ``pair``.

    Parameters
    ----------
    objective : {"clone", "delete"}
    pair : OrthoPair
    blank : DensityMatrix
        Four-dimensional blank state.
    config : SearchConfig, optional
    workers : int
        Number of processes for the restarts. The result does not depend on it.

    Returns
    -------
    SearchResult
        Best restart; ``verdict`` is ``"found"`` iff the best objective is at
        most ``config.success_threshold``.

    Raises
    ------
    NumericalError
        If the objective becomes non-finite; ``exc.params`` holds the point.
    """
    config = config or SearchConfig()
    fn = ObjectiveFunction.for_task(objective, pair, blank)
    jobs = [(fn, config, k) for k in range(config.restarts)]
    if workers > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(_restart_job, jobs))
    else:
        runs = [_restart_job(j) for j in jobs]

    # min objective, ties to the lowest restart index (runs are in index order)
    best_k = min(range(len(runs)), key=lambda k: (runs[k][0].best_objective, k))
    summary, x, trace = runs[best_k]
    f = summary.best_objective
    return SearchResult(
        best_objective=f,
        best_params=tuple(float(t) for t in x),
        converged=summary.converged,
        iterations_used=sum(r[0].iterations for r in runs),
        trace=tuple((int(i), float(v)) for i, v in trace),
        seed_used=summary.seed,
        verdict="found" if f <= config.success_threshold else "not_found",
        task=objective,
        config=config,
        restarts=tuple(r[0] for r in runs),
    )


def _permutation_unitary(perm: Callable[[int], int], dim: int) -> Unitary:
    u = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        u[perm(col), col] = 1.0
    return Unitary(u)


def degenerate_clone_unitary(p: float) -> Unitary:
    """Closed cloner for the equal-weight pair (p, r=p) with blank rho0.

    Identity while the system sits in span{|0>,|2>}; otherwise the blank
    slot is permuted |0> <-> |1>, |2> <-> |3>, turning rho0 into rho1.
    The permutation is its own inverse, so it also deletes.
    """
    p = float(p)
    if not 0.0 < p < 1.0:
        raise InvalidArgumentError(f"p must lie in (0, 1), got {p!r}")

    def perm(index):
        system, slot = divmod(index, 4)
        return 4 * system + (slot ^ 1 if system % 2 else slot)

    return _permutation_unitary(perm, 16)


def pure_clone_unitary() -> Unitary:
    """The two-qubit CNOT cloner lifted to the 16-dim system (x) blank space."""
    return embed_qubit_gate(closed_clone_pure_gate())
