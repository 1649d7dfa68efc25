"""Exit criteria for the package, one test per criterion.

Each test records a PASS/FAIL line (shown in the pytest terminal summary)
before asserting, so a full run prints one verdict per criterion.
"""

import json
import subprocess
import sys
import time

import numpy as np
import pytest

from orthoclone.channels import closed_clone_pure_gate, delete_pure_gate, open_clone
from orthoclone.obstruction import blank_feasibility, spectral_obstruction
from orthoclone.qstate import (
    apply_unitary,
    basis_ket,
    fidelity,
    make_orthogonal_pair,
    maximally_mixed,
    pure_state,
    spectrum,
    tensor,
)
from orthoclone.search import (
    SearchConfig,
    cloning_objective,
    degenerate_clone_unitary,
    deletion_objective,
    minimize,
    pure_clone_unitary,
)

from conftest import ACCEPTANCE_LOG, random_density, random_unitary

SEARCH = SearchConfig(restarts=20, max_iters=500, master_seed=42)


def check(number, title, passed, detail):
    ACCEPTANCE_LOG.append((number, title, bool(passed), detail))
    print(f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {title} -- {detail}")
    assert passed, detail


def test_1_pure_closed_cloning_and_deletion():
    clone, delete = closed_clone_pure_gate(), delete_pure_gate()
    blank = pure_state(basis_ket(0, 2))
    worst = 1.0
    for i in (0, 1):
        rho = pure_state(basis_ket(i, 2))
        worst = min(worst, fidelity(apply_unitary(clone, tensor(rho, blank)), tensor(rho, rho)))
    err = float(np.max(np.abs((delete @ clone).entries - np.eye(4))))
    check(
        1, "pure-state closed cloning, exact inverse deletion",
        worst >= 1 - 1e-10 and err <= 1e-10,
        f"min clone fidelity {worst:.16f} (>= 1-1e-10), |delete*clone - I| = {err:.1e} (<= 1e-10)",
    )


def test_2_open_cloning_exact_with_one_bit_record():
    rng = np.random.default_rng(2)
    worst_fid, worst_chi = 1.0, 0.0
    for p, r in rng.uniform(size=(50, 2)):
        pair = make_orthogonal_pair(p, r)
        for mode in ("coarse", "fine"):
            for which in (0, 1):
                res = open_clone(pair, which, mode, 0.5)
                worst_fid = min(worst_fid, res.fidelity_to_target)
                if mode == "coarse":
                    worst_chi = max(worst_chi, abs(res.record_holevo_bits - 1.0))
    check(
        2, "open cloning exact; coarse record carries 1 bit",
        worst_fid >= 1 - 1e-9 and worst_chi <= 1e-9,
        f"min fidelity {worst_fid:.16f} (>= 1-1e-9), max |holevo - 1| = {worst_chi:.1e} (<= 1e-9)",
    )


def test_3_unitary_conjugation_preserves_spectrum():
    rng = np.random.default_rng(3)
    worst = 0.0
    count = 0
    for dim in (2, 4, 16):
        for _ in range(200):
            rho = random_density(rng, dim, rank=int(rng.integers(1, dim + 1)))
            u = random_unitary(rng, dim)
            gap = np.max(np.abs(spectrum(apply_unitary(u, rho)).as_array() - spectrum(rho).as_array()))
            worst = max(worst, float(gap))
            count += 1
    check(3, "spectrum preserved under U rho U^dag", worst <= 1e-9,
          f"{count} pairs at dims 2/4/16, max pairwise gap {worst:.1e} (<= 1e-9)")


def test_4_obstruction_soundness():
    pair = make_orthogonal_pair(0.7, 0.6)
    blanks = {"rho0": pair.rho0, "maximally-mixed": maximally_mixed(4)}
    blocked = all(
        spectral_obstruction(pair, b, task).blocked for b in blanks.values() for task in ("clone", "delete")
    )
    infeasible = not blank_feasibility(pair, "clone").feasible and not blank_feasibility(pair, "delete").feasible

    start = time.perf_counter()
    floors = {}
    for name, b in blanks.items():
        for task in ("clone", "delete"):
            floors[(name, task)] = minimize(task, pair, b, SEARCH).best_objective
    elapsed = time.perf_counter() - start
    lowest = min(floors.values())
    measured = ", ".join(f"{n}/{t}={v:.4g}" for (n, t), v in floors.items())
    check(
        4, "obstruction blocks p=0.7,r=0.6 and search never reaches exactness",
        blocked and infeasible and lowest > 1e-9 and elapsed < 300,
        f"blocked={blocked}, infeasible={infeasible}, best objectives [{measured}] (> 1e-9), "
        f"search time {elapsed:.1f}s (< 300s)",
    )


def test_5_constructive_recovery_pure_pair():
    pair = make_orthogonal_pair(1.0, 1.0)
    res = minimize("clone", pair, pair.rho0, SEARCH)
    analytic = cloning_objective(pure_clone_unitary(), pair, pair.rho0)
    check(
        5, "search recovers the pure-state cloner",
        res.best_objective <= 1e-6 and analytic <= 1e-10,
        f"search best {res.best_objective:.2e} (<= 1e-6), analytic CNOT extension {analytic:.1e} (<= 1e-10)",
    )


def test_6_degenerate_equal_spectra_case():
    pair = make_orthogonal_pair(0.7, 0.7)
    feas = blank_feasibility(pair, "clone")
    witness_ok = feas.feasible and np.allclose(feas.witness_spectrum, [0.7, 0.3], atol=1e-12)
    u = degenerate_clone_unitary(0.7)
    c = cloning_objective(u, pair, pair.rho0)
    d = deletion_objective(u.dagger, pair, pair.rho0)
    check(
        6, "degenerate {p,q}={r,s} case has an explicit closed cloner/deleter",
        witness_ok and c <= 1e-9 and d <= 1e-9,
        f"feasible={feas.feasible} witness={feas.witness_spectrum}, clone objective {c:.1e}, "
        f"delete objective {d:.1e} (<= 1e-9)",
    )


def test_7_clone_delete_feasibility_symmetry():
    rng = np.random.default_rng(7)
    pairs = [tuple(x) for x in rng.uniform(size=(25, 2))]
    # half the sample sits on the feasible set {r, 1-r} = {p, 1-p}
    for p in rng.uniform(size=25):
        pairs.append((p, p if rng.uniform() < 0.5 else 1 - p))
    mismatches = 0
    feasible = 0
    for p, r in pairs:
        pair = make_orthogonal_pair(p, r)
        a, b = blank_feasibility(pair, "clone"), blank_feasibility(pair, "delete")
        mismatches += a.feasible != b.feasible
        feasible += a.feasible
    check(7, "clone and delete feasibility verdicts coincide", mismatches == 0,
          f"{len(pairs)} pairs ({feasible} feasible), {mismatches} mismatches")


def test_8_cli_search_is_deterministic():
    argv = [sys.executable, "-m", "orthoclone", "search", "--p", "0.7", "--r", "0.6",
            "--blank", "maximally-mixed", "--task", "clone", "--seed", "42"]
    payloads = []
    for _ in range(2):
        proc = subprocess.run(argv, capture_output=True, text=True, check=True)
        payloads.append(json.dumps(json.loads(proc.stdout)["results"], sort_keys=True).encode())
    check(8, "two identical `search` invocations give byte-identical results",
          payloads[0] == payloads[1], f"payload sizes {len(payloads[0])}/{len(payloads[1])} bytes")
