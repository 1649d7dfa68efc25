"""Command-line experiments emitting JSON reports.

Every subcommand prints one JSON report::

    {"command": ..., "inputs": {...}, "results": {...},
     "artifact_version": ..., "timestamp": ...}

``inputs`` echoes the fully normalized configuration; re-running with it
reproduces ``results`` byte for byte. Exit codes: 0 success, 2 invalid
arguments, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import json
import sys

import numpy as np

from . import __version__
from .channels import closed_clone_pure_gate, delete_pure_gate, open_clone
from .errors import InvalidArgumentError, NumericalError
from .obstruction import blank_feasibility, spectral_obstruction
from .qstate import (
    FIDELITY_CONVENTION,
    OrthoPair,
    apply_unitary,
    basis_ket,
    diagonal_state,
    fidelity,
    make_orthogonal_pair,
    matrix_to_json,
    maximally_mixed,
    pure_state,
    spectrum,
    tensor,
    trace_distance,
    von_neumann_entropy,
)
from .search import (
    SearchConfig,
    cloning_objective,
    degenerate_clone_unitary,
    deletion_objective,
    minimize,
    pure_clone_unitary,
    subsample_trace,
)

COMMANDS = (
    "states",
    "obstruction",
    "feasibility",
    "open-clone",
    "search",
    "demo-pure",
    "demo-degenerate",
)

DEFAULTS = {
    "prior": 0.5,
    "mode": "coarse",
    "which": 0,
    "task": "clone",
    "blank": "rho0",
    "restarts": 20,
    "max_iters": 500,
    "master_seed": 42,
    "success_threshold": 1e-6,
}

_SUM_TOL = 1e-12


class ConfigError(InvalidArgumentError):
    def __init__(self, flag: str, message: str):
        super().__init__(f"{flag}: {message}")
        self.flag = flag


def _unit_interval(flag, x):
    if not 0.0 <= x <= 1.0:
        raise ConfigError(flag, f"must lie in [0, 1], got {x!r}")
    return x


def _weights(raw, first, second):
    a, b = raw.get(first), raw.get(second)
    if a is None and b is None:
        raise ConfigError(f"--{first}", "is required")
    if a is not None:
        _unit_interval(f"--{first}", a)
    if b is not None:
        _unit_interval(f"--{second}", b)
    if a is None:
        a = 1.0 - b
    elif b is None:
        b = 1.0 - a
    elif abs(a + b - 1.0) > _SUM_TOL:
        raise ConfigError(f"--{second}", f"--{first} + --{second} must equal 1, got {a + b!r}")
    return a, b


def _blank_spec(value):
    if value in ("rho0", "maximally-mixed"):
        return value
    try:
        weights = [float(x) for x in str(value).split(",")]
    except ValueError:
        raise ConfigError(
            "--blank", "expected 'rho0', 'maximally-mixed' or four comma-separated weights"
        ) from None
    if len(weights) != 4 or min(weights) < 0 or abs(sum(weights) - 1.0) > 1e-10:
        raise ConfigError("--blank", "explicit spectrum needs four nonnegative weights summing to 1")
    return weights


def validate(command: str, raw: dict) -> dict:
    """Normalize raw flag values for ``command``, filling defaults.

    Raises :class:`ConfigError` naming the offending flag.
    """
    if command not in COMMANDS:
        raise ConfigError("command", f"unknown command {command!r}")
    cfg: dict = {}
    raw = {k: v for k, v in raw.items() if v is not None}

    if command in ("states", "obstruction", "feasibility", "open-clone", "search"):
        cfg["p"], cfg["q"] = _weights(raw, "p", "q")
        cfg["r"], cfg["s"] = _weights(raw, "r", "s")
    if command == "demo-degenerate":
        p = raw.get("p", 0.7)
        if not 0.0 < p < 1.0:
            raise ConfigError("--p", f"must lie in (0, 1), got {p!r}")
        cfg["p"] = cfg["r"] = p
    if command in ("obstruction", "search"):
        cfg["blank"] = _blank_spec(raw.get("blank", DEFAULTS["blank"]))
    if command in ("obstruction", "feasibility", "search"):
        cfg["task"] = raw.get("task", DEFAULTS["task"])
        if cfg["task"] not in ("clone", "delete"):
            raise ConfigError("--task", "must be 'clone' or 'delete'")
    if command == "open-clone":
        cfg["which"] = raw.get("which", DEFAULTS["which"])
        if cfg["which"] not in (0, 1):
            raise ConfigError("--which", "must be 0 or 1")
        cfg["mode"] = raw.get("mode", DEFAULTS["mode"])
        if cfg["mode"] not in ("coarse", "fine"):
            raise ConfigError("--mode", "must be 'coarse' or 'fine'")
        cfg["prior"] = _unit_interval("--prior", raw.get("prior", DEFAULTS["prior"]))
    if command == "search":
        for key, flag in (("restarts", "--restarts"), ("max_iters", "--max-iters")):
            cfg[key] = raw.get(key, DEFAULTS[key])
            if cfg[key] < 1:
                raise ConfigError(flag, "must be a positive integer")
        cfg["master_seed"] = raw.get("master_seed", DEFAULTS["master_seed"])
        if not 0 <= cfg["master_seed"] < 2**64:
            raise ConfigError("--seed", "must be a 64-bit unsigned integer")
        cfg["success_threshold"] = raw.get("success_threshold", DEFAULTS["success_threshold"])
        if not cfg["success_threshold"] > 1e-9:
            raise ConfigError("--success-threshold", "must exceed the exactness threshold 1e-9")
    return cfg


def _pair(cfg) -> OrthoPair:
    return make_orthogonal_pair(cfg["p"], cfg["r"])


def _blank(cfg, pair):
    spec = cfg["blank"]
    if spec == "rho0":
        return pair.rho0
    if spec == "maximally-mixed":
        return maximally_mixed(4)
    return diagonal_state(spec)


def _spectrum_list(rho):
    return list(spectrum(rho).values)


def _cmd_states(cfg):
    pair = _pair(cfg)
    out = {}
    for i in (0, 1):
        rho = pair.state(i)
        out[f"rho{i}"] = {
            "matrix": matrix_to_json(rho.entries),
            "spectrum": _spectrum_list(rho),
            "entropy_bits": von_neumann_entropy(rho),
        }
    out["fidelity_rho0_rho1"] = fidelity(pair.rho0, pair.rho1)
    out["trace_distance_rho0_rho1"] = trace_distance(pair.rho0, pair.rho1)
    out["fidelity_convention"] = FIDELITY_CONVENTION
    return out


def _cmd_obstruction(cfg):
    pair = _pair(cfg)
    return spectral_obstruction(pair, _blank(cfg, pair), cfg["task"]).to_json()


def _cmd_feasibility(cfg):
    return blank_feasibility(_pair(cfg), cfg["task"]).to_json()


def _cmd_open_clone(cfg):
    res = open_clone(_pair(cfg), cfg["which"], cfg["mode"], cfg["prior"])
    out = res.to_json()
    out["record_entropy_bits"] = res.record_entropy_bits
    out["fidelity_convention"] = FIDELITY_CONVENTION
    return out


def _cmd_search(cfg, workers=1, csv_path=None):
    pair = _pair(cfg)
    config = SearchConfig(
        restarts=cfg["restarts"],
        max_iters=cfg["max_iters"],
        master_seed=cfg["master_seed"],
        success_threshold=cfg["success_threshold"],
    )
    result = minimize(cfg["task"], pair, _blank(cfg, pair), config, workers=workers)
    if csv_path:
        with open(csv_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["iteration", "best_objective"])
            writer.writerows(subsample_trace(result.trace))
    out = result.to_json()
    out["fidelity_convention"] = FIDELITY_CONVENTION
    return out


def _cmd_demo_pure(cfg):
    clone, delete = closed_clone_pure_gate(), delete_pure_gate()
    blank = pure_state(basis_ket(0, 2))
    rows = []
    for i in (0, 1):
        rho = pure_state(basis_ket(i, 2))
        cloned = apply_unitary(clone, tensor(rho, blank))
        restored = apply_unitary(delete, cloned)
        rows.append({
            "input": i,
            "clone_fidelity": fidelity(cloned, tensor(rho, rho)),
            "delete_fidelity": fidelity(restored, tensor(rho, blank)),
        })
    pair = make_orthogonal_pair(1.0, 1.0)
    u = pure_clone_unitary()
    return {
        "gate": matrix_to_json(clone.entries),
        "per_input": rows,
        "round_trip_identity_error": float(np.abs((delete @ clone).entries - np.eye(4)).max()),
        "cloning_objective_16dim": cloning_objective(u, pair, pair.rho0),
        "deletion_objective_16dim": deletion_objective(u.dagger, pair, pair.rho0),
        "fidelity_convention": FIDELITY_CONVENTION,
    }


def _cmd_demo_degenerate(cfg):
    pair = make_orthogonal_pair(cfg["p"], cfg["r"])
    u = degenerate_clone_unitary(cfg["p"])
    return {
        "feasibility": blank_feasibility(pair, "clone").to_json(),
        "obstruction": spectral_obstruction(pair, pair.rho0, "clone").to_json(),
        "cloning_objective": cloning_objective(u, pair, pair.rho0),
        "deletion_objective": deletion_objective(u.dagger, pair, pair.rho0),
        "fidelity_convention": FIDELITY_CONVENTION,
    }


def run(command: str, cfg: dict, workers: int = 1, csv_path: str | None = None) -> dict:
    """Execute ``command`` on a validated config and return the report dict."""
    if command == "search":
        results = _cmd_search(cfg, workers=workers, csv_path=csv_path)
    else:
        results = {
            "states": _cmd_states,
            "obstruction": _cmd_obstruction,
            "feasibility": _cmd_feasibility,
            "open-clone": _cmd_open_clone,
            "demo-pure": _cmd_demo_pure,
            "demo-degenerate": _cmd_demo_degenerate,
        }[command](cfg)
    return {
        "command": command,
        "inputs": cfg,
        "results": results,
        "artifact_version": __version__,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }


def results_payload(report: dict) -> str:
    """Canonical serialization of the results, used for reproducibility checks."""
    return json.dumps(report["results"], sort_keys=True)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orthoclone",
        description="Cloning and deleting orthogonal mixed states: reproducible JSON experiments.",
        allow_abbrev=False,
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, help_):
        sp = sub.add_parser(name, help=help_, allow_abbrev=False)
        sp.add_argument("--out", metavar="PATH", help="also write the report to PATH")
        return sp

    def weights(sp, with_r=True):
        sp.add_argument("--p", type=float, help="weight of |0> in rho0")
        sp.add_argument("--q", type=float, help="weight of |2> in rho0 (default 1-p)")
        if with_r:
            sp.add_argument("--r", type=float, help="weight of |1> in rho1")
            sp.add_argument("--s", type=float, help="weight of |3> in rho1 (default 1-r)")

    def task(sp):
        sp.add_argument("--task", choices=("clone", "delete"))

    def blank(sp):
        sp.add_argument(
            "--blank",
            help="'rho0' (default), 'maximally-mixed', or four weights like 0.5,0,0.5,0",
        )

    weights(add("states", "the two orthogonal states, spectra and entropies"))

    sp = add("obstruction", "spectral certificate against a closed cloner/deleter")
    weights(sp), blank(sp), task(sp)

    sp = add("feasibility", "does any blank pass the spectral test for both inputs?")
    weights(sp), task(sp)

    sp = add("open-clone", "measure-and-prepare cloning and the leaked record")
    weights(sp)
    sp.add_argument("--which", type=int, choices=(0, 1))
    sp.add_argument("--mode", choices=("coarse", "fine"))
    sp.add_argument("--prior", type=float, help="prior probability of input 0 (default 0.5)")

    sp = add("search", "multi-restart search over 16-dim unitaries")
    weights(sp), blank(sp), task(sp)
    sp.add_argument("--restarts", type=int)
    sp.add_argument("--max-iters", dest="max_iters", type=int)
    sp.add_argument("--seed", dest="master_seed", type=int)
    sp.add_argument("--success-threshold", dest="success_threshold", type=float)
    sp.add_argument("--parallel", type=int, default=1, metavar="N",
                    help="run restarts in N processes (results unchanged)")
    sp.add_argument("--csv", metavar="PATH", help="write the best restart's trace as CSV")

    add("demo-pure", "CNOT cloning of |0>,|1> and deletion by its inverse")

    sp = add("demo-degenerate", "explicit closed cloner when {p,q} = {r,s}")
    sp.add_argument("--p", type=float, help="common weight p = r (default 0.7)")
    return parser


_NOT_CONFIG = {"command", "out", "parallel", "csv"}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    raw = {k: v for k, v in vars(args).items() if k not in _NOT_CONFIG}
    try:
        cfg = validate(args.command, raw)
        if getattr(args, "parallel", 1) < 1:
            raise ConfigError("--parallel", "must be a positive integer")
    except InvalidArgumentError as exc:
        print(f"orthoclone {args.command}: error: {exc}", file=sys.stderr)
        return 2
    try:
        report = run(args.command, cfg, workers=getattr(args, "parallel", 1),
                     csv_path=getattr(args, "csv", None))
    except NumericalError as exc:
        print(f"orthoclone {args.command}: numerical failure: {exc}", file=sys.stderr)
        return 3
    except InvalidArgumentError as exc:
        print(f"orthoclone {args.command}: error: {exc}", file=sys.stderr)
        return 2

    text = json.dumps(report, indent=2, sort_keys=True)
    print(text)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
