"""Command-line front end.

Subcommands: synthesize, simulate, curves, landmarks, verify, oracle.
Exit codes: 0 success, 1 usage/input error, 2 unreachable target,
3 verification failure.  All numeric flags default to the values the test
suite pins, so omitting them reproduces those numbers; an optional
key=value config file supplies defaults that explicit flags override.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Optional

from .bloch import PulseTarget, StepControl, write_trajectory_csv
from .bounded import PulseProgram, landmarks, sample_geometry, synthesize
from .errors import BlochControlError, DidNotConverge, Unreachable
from .oracle import oracle_transcription
from .pmp import verify_program

__all__ = ["main"]


def _fmt(x: float) -> str:
    return format(x, ".12g")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2; we use 1
        raise _UsageError(f"{self.prog}: error: {message}")


def _parse_bound(text: str) -> float:
    if text.strip().lower() in ("inf", "infinity", "unbounded"):
        return math.inf
    try:
        return float(text)
    except ValueError:
        raise _UsageError(f"invalid control bound {text!r}") from None


def _bool_from_text(text: str) -> bool:
    return text.strip().lower() in ("1", "true", "yes", "on")


_CONFIG_TYPES = {
    "m": str,
    "target": str,
    "r_final": float,
    "out": str,
    "pulse": str,
    "step": float,
    "csv": str,
    "samples": int,
    "tol": float,
    "adjoint_tol": float,
    "grid": int,
    "seed": int,
    "evals": int,
    "restarts": int,
    "json": _bool_from_text,
}


def _read_config(path: str) -> dict:
    values = {}
    with open(path) as handle:
        for lineno, line in enumerate(handle, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, raw = line.partition("=")
            values[key.strip().replace("-", "_")] = raw.strip()
    return values


def _apply_config(args: argparse.Namespace, argv: list[str]) -> None:
    if not getattr(args, "config", None):
        return
    for key, raw in _read_config(args.config).items():
        if key not in _CONFIG_TYPES:
            raise ValueError(f"unknown config key {key!r}")
        if not hasattr(args, key):
            continue  # key belongs to a different subcommand
        if f"--{key.replace('_', '-')}" in argv:
            continue  # explicit flag wins
        setattr(args, key, _CONFIG_TYPES[key](raw))


def _target_from_args(args: argparse.Namespace) -> PulseTarget:
    return PulseTarget.from_label(args.r_final, args.target)


def cmd_synthesize(args: argparse.Namespace) -> int:
    program = synthesize(_parse_bound(args.m), _target_from_args(args))
    if args.out:
        program.save(args.out)
    if args.json:
        print(program.to_json())
        return 0
    print(f"regime: {program.regime.value}")
    print(f"theta1: {_fmt(program.theta1) if program.theta1 is not None else '-'}")
    print(f"theta2: {_fmt(program.theta2) if program.theta2 is not None else '-'}")
    print(f"kappa: {_fmt(program.kappa)}")
    print(f"energy: {_fmt(program.energy)}")
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    program = PulseProgram.load(args.pulse)
    trajectory = program.simulate(StepControl(h=args.step))
    if args.csv:
        write_trajectory_csv(trajectory, args.csv)
    deviation = abs(trajectory.total_energy - program.energy) / program.energy
    print(f"final theta: {_fmt(trajectory.final_theta)}")
    print(f"final r: {_fmt(trajectory.final_r)}")
    print(f"simulated energy: {_fmt(trajectory.total_energy)}")
    print(f"predicted energy: {_fmt(program.energy)}")
    print(f"relative energy deviation: {_fmt(deviation)}")
    return 0


def cmd_curves(args: argparse.Namespace) -> int:
    geometry = sample_geometry(_parse_bound(args.m), args.samples)
    if args.csv:
        with open(args.csv, "w", newline="") as handle:
            geometry.write_csv(handle)
    else:
        geometry.write_csv(sys.stdout)
    return 0


def cmd_landmarks(args: argparse.Namespace) -> int:
    values = landmarks(_parse_bound(args.m)).as_dict()
    if args.json:
        body = ", ".join(f'"{k}": {_fmt(v)}' for k, v in values.items())
        print("{%s}" % body)
    else:
        for key, value in values.items():
            print(f"{key}: {_fmt(value)}")
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    program = PulseProgram.load(args.pulse)
    report = verify_program(
        program,
        h_tol=args.tol,
        adjoint_tol=args.adjoint_tol,
        step=args.step,
    )
    if args.json:
        print(report.to_json())
    else:
        print(f"max |H|: {_fmt(report.max_abs_h)} (tol {_fmt(report.h_tol)})")
        print(
            f"adjoint residual: {_fmt(report.adjoint_residual)} "
            f"(tol {_fmt(report.adjoint_tol)})"
        )
        print(f"costate exceeds bound inside saturation: {report.lambda_excess_ok}")
        print(f"verdict: {'pass' if report.passed else 'fail'}")
    return 0 if report.passed else 3


def cmd_oracle(args: argparse.Namespace) -> int:
    m = _parse_bound(args.m)
    target = _target_from_args(args)
    program = synthesize(m, target)
    result = oracle_transcription(
        m,
        target,
        n_segments=args.grid,
        evaluations=args.evals,
        seed=args.seed,
        restarts=args.restarts,
        program=program,
    )
    if args.json:
        print(
            '{"synthesized_energy": %s, "oracle": %s}'
            % (_fmt(program.energy), result.to_json())
        )
    else:
        print(f"synthesized energy: {_fmt(program.energy)}")
        print(f"oracle best energy: {_fmt(result.best_energy)}")
        print(f"oracle endpoint error: {_fmt(result.endpoint_error)}")
        print(f"horizon: {_fmt(result.horizon)}")
        print(f"evaluations: {result.evaluations}")
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="blochpulse", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: _Parser) -> None:
        p.add_argument("--config", help="key=value file with flag defaults")
        p.add_argument("--json", action="store_true", help="machine-readable output")

    p = sub.add_parser("synthesize", help="design a pulse program")
    p.add_argument("--m", required=True, help="control bound (> 0.5) or 'inf'")
    p.add_argument("--target", required=True, choices=["pi", "pi2"])
    p.add_argument("--r-final", dest="r_final", type=float, required=True)
    p.add_argument("--out", help="write the program JSON here")
    add_common(p)
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("simulate", help="closed-loop run of a saved program")
    p.add_argument("--pulse", required=True, help="program JSON file")
    p.add_argument("--step", type=float, default=1e-4)
    p.add_argument("--csv", help="write the trajectory CSV here")
    add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("curves", help="export the switching geometry")
    p.add_argument("--m", required=True)
    p.add_argument("--samples", type=int, default=400)
    p.add_argument("--csv", help="write here instead of stdout")
    add_common(p)
    p.set_defaults(func=cmd_curves)

    p = sub.add_parser("landmarks", help="named radii/angles for a bound")
    p.add_argument("--m", required=True)
    add_common(p)
    p.set_defaults(func=cmd_landmarks)

    p = sub.add_parser("verify", help="stationarity checks on a saved program")
    p.add_argument("--pulse", required=True)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--adjoint-tol", dest="adjoint_tol", type=float, default=1e-4)
    p.add_argument("--step", type=float, default=1e-4)
    add_common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="transcription search for cheaper controls")
    p.add_argument("--m", required=True)
    p.add_argument("--target", required=True, choices=["pi", "pi2"])
    p.add_argument("--r-final", dest="r_final", type=float, required=True)
    p.add_argument("--grid", type=int, default=200, help="number of control segments")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--evals", type=int, default=50_000)
    p.add_argument("--restarts", type=int, default=2)
    add_common(p)
    p.set_defaults(func=cmd_oracle)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        _apply_config(args, argv)
        return args.func(args)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except Unreachable as exc:
        print(f"unreachable target: {exc}", file=sys.stderr)
        return 2
    except DidNotConverge as exc:
        print(f"oracle did not converge: {exc}", file=sys.stderr)
        return 3
    except BlochControlError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
