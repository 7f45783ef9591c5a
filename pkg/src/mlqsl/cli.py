"""Command-line interface: figure data, validation campaigns, saturating states."""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import io, reports
from .errors import (
    InfeasibleFidelity,
    LevelOrderError,
    NonOrthogonalPairing,
    RankBoundViolation,
    SchemaError,
    ToolkitError,
)
from .mlbound import dual_ml_bound, minimal_time_to_fidelity, ml_bound
from .saturation import (
    DEFAULT_TOL,
    check_saturation,
    construct_dual_saturating_state,
    construct_saturating_state,
    dual_spec,
)
from .states import expected_energy, ground_and_top

EXIT_OK = 0
EXIT_SCHEMA = 2
EXIT_NUMERICAL = 3
EXIT_INFEASIBLE = 4

COMMANDS = ("alpha-sweep", "objective-curves", "qubit-alpha-sweep", "validate", "construct", "check", "minimal-time")


class NumericalFailure(Exception):
    """A computed result breached its tolerance; carries the report to emit anyway."""

    def __init__(self, message, payload):
        super().__init__(message)
        self.payload = payload


@dataclass
class RunConfig:
    command: str
    seed: int = 0
    tol: float | None = None
    out: str | None = None
    format: str = "csv"
    options: dict = field(default_factory=dict)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _table(header, rows, fmt: str) -> str:
    if fmt == "json":
        return io.dumps({"schema": reports.SCHEMA_VERSION, "columns": list(header), "rows": [list(r) for r in rows]})
    return reports.to_csv(header, rows)


def cmd_alpha_sweep(cfg: RunConfig) -> str:
    return _table(reports.ALPHA_HEADER, reports.alpha_sweep(cfg.options["count"]), cfg.format)


def cmd_objective_curves(cfg: RunConfig) -> str:
    deltas = cfg.options["delta"] or reports.FIGURE_DELTAS
    return _table(reports.CURVE_HEADER, reports.objective_curves(deltas, cfg.options["samples"]), cfg.format)


def cmd_qubit_alpha_sweep(cfg: RunConfig) -> str:
    purities = cfg.options["purity"] or (1.0, 0.9, 0.8, 0.75)
    return _table(reports.QUBIT_HEADER, reports.qubit_alpha_sweep(purities, cfg.options["count"]), cfg.format)


def cmd_validate(cfg: RunConfig) -> str:
    o = cfg.options
    report = reports.run_validation(o["count"], o["dim_min"], o["dim_max"], cfg.seed, cfg.tol or 1e-9)
    text = io.dumps(report)
    if report["violations"]:
        raise NumericalFailure(f"{len(report['violations'])} bound violations", text)
    return text


def cmd_construct(cfg: RunConfig) -> str:
    spec = io.spec_from_json(io.load_json(cfg.options["spec"]))
    tol = cfg.tol or DEFAULT_TOL
    if cfg.options["dual"]:
        rho = construct_dual_saturating_state(spec)
        reversed_spec = dual_spec(spec)
        H, tau = reversed_spec.H, reversed_spec.tau_star()
    else:
        rho = construct_saturating_state(spec)
        H, tau = spec.H, spec.tau_star()
    report = check_saturation(rho, H, tau, spec.delta, tol)
    payload = io.dumps(
        {
            "schema": reports.SCHEMA_VERSION,
            "command": "construct",
            "variant": "dual" if cfg.options["dual"] else "standard",
            "state": io.state_to_json(rho),
            "report": report.to_dict(),
        }
    )
    if not report.saturates:
        raise NumericalFailure("constructed state failed the saturation check", payload)
    return payload


def cmd_check(cfg: RunConfig) -> str:
    o = cfg.options
    rho = io.state_from_json(io.load_json(o["state"]), o["state"])
    H = io.hamiltonian_from_json(io.load_json(o["hamiltonian"]), o["hamiltonian"])
    delta = o["delta"]
    tau = o["tau"]
    if tau is None:
        bound = ml_bound(rho, H, delta)
        if bound.unbounded or not bound.tau_lower > 0:
            raise InfeasibleFidelity("no finite positive bound time for this state; pass --tau explicitly")
        tau = bound.tau_lower
    report = check_saturation(rho, H, tau, delta, cfg.tol or DEFAULT_TOL)
    return io.dumps({"schema": reports.SCHEMA_VERSION, "command": "check", "report": report.to_dict()})


def cmd_minimal_time(cfg: RunConfig) -> str:
    o = cfg.options
    rho = io.state_from_json(io.load_json(o["state"]), o["state"])
    H = io.hamiltonian_from_json(io.load_json(o["hamiltonian"]), o["hamiltonian"])
    delta = o["delta"]
    tau = minimal_time_to_fidelity(rho, H, delta, o["horizon"])
    e0, em = ground_and_top(rho, H)
    return io.dumps(
        {
            "schema": reports.SCHEMA_VERSION,
            "command": "minimal-time",
            "delta": delta,
            "horizon": o["horizon"],
            "tau": tau,
            "E": expected_energy(rho, H),
            "E0": e0,
            "E_m": em,
            "bound": ml_bound(rho, H, delta).to_dict(),
            "dual_bound": dual_ml_bound(rho, H, delta).to_dict(),
        }
    )


HANDLERS = {
    "alpha-sweep": cmd_alpha_sweep,
    "objective-curves": cmd_objective_curves,
    "qubit-alpha-sweep": cmd_qubit_alpha_sweep,
    "validate": cmd_validate,
    "construct": cmd_construct,
    "check": cmd_check,
    "minimal-time": cmd_minimal_time,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mlqsl",
        description="Evaluate, verify and saturate the Margolus-Levitin quantum speed limit.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--format", choices=("csv", "json"), default=None)
    common.add_argument("--tol", type=float, default=None, help="override the command's tolerance")
    common.add_argument("--seed", type=int, default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("alpha-sweep", parents=[common], help="alpha(delta) on a uniform delta grid")
    p.add_argument("--count", "-n", type=int, default=101, help="number of grid points")

    p = sub.add_parser("objective-curves", parents=[common], help="objective f_delta(z) curves with their minima")
    p.add_argument("--delta", type=float, action="append", help="repeatable; defaults to 0.9 0.7 0.5 0.3 0.1")
    p.add_argument("--samples", type=int, default=reports.CURVE_SAMPLES)

    p = sub.add_parser("qubit-alpha-sweep", parents=[common], help="purity-resolved qubit numerator")
    p.add_argument("--purity", type=float, action="append", help="repeatable")
    p.add_argument("--count", "-n", type=int, default=51)

    p = sub.add_parser("validate", parents=[common], help="randomized bound-validity campaign")
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--dim-min", type=int, default=2)
    p.add_argument("--dim-max", type=int, default=6)

    p = sub.add_parser("construct", parents=[common], help="build a saturating state from a spec file")
    p.add_argument("--spec", required=True)
    p.add_argument("--dual", action="store_true", help="construct the dual-bound saturating state")

    p = sub.add_parser("check", parents=[common], help="check the saturation conditions for a state")
    p.add_argument("--state", required=True)
    p.add_argument("--hamiltonian", required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--tau", type=float, default=None, help="defaults to the bound time alpha/(E - E0)")

    p = sub.add_parser("minimal-time", parents=[common], help="first time the fidelity reaches delta")
    p.add_argument("--state", required=True)
    p.add_argument("--hamiltonian", required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--horizon", type=float, required=True)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    opts = {k: v for k, v in vars(args).items() if k not in ("command", "seed", "tol", "out", "format")}
    fmt = args.format or ("csv" if args.command in ("alpha-sweep", "objective-curves", "qubit-alpha-sweep") else "json")
    return RunConfig(command=args.command, seed=args.seed, tol=args.tol, out=args.out, format=fmt, options=opts)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = config_from_args(args)
    try:
        text = HANDLERS[cfg.command](cfg)
    except NumericalFailure as exc:
        _emit(exc.payload, cfg.out)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except (InfeasibleFidelity, RankBoundViolation, LevelOrderError, NonOrthogonalPairing) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ToolkitError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    _emit(text, cfg.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
