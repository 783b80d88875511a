"""
Command-line front end of the geodesic engine.

    python Main.py tensors  --config run.json --at 1,0,0,1,0,0 --what g,N,metricity
    python Main.py geodesic --config run.json [--out run.csv]
    python Main.py solve    helix|circle|generator|sphere-circles --config run.json [--bracket lo,hi] [--rho r]
    python Main.py verify   [--suite all] [--seed 42]
    python Main.py plot     run.csv --proj xy --out run.svg

Exit codes: 0 success, 1 configuration error, 2 numerical or domain failure,
3 empty solution set, 4 verification failure.
"""

import argparse
import json
import math
import sys
from typing import List, Optional, Sequence

import numpy as np

from data.run_config import RunConfig, load_run_config
from data.trajectory_io import read_trajectory_csv, summary, write_trajectory_csv, write_trajectory_json
from engines import closedform, connection, curvature, dynamics, metric, plotting, verify
from engines.errors import ConfigError, DomainError, NumericalError, UnsupportedProfileError
from engines.metric import PhasePoint
from utils import config
from utils.logger import log_command, log_error, log_info

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_EMPTY = 3
EXIT_VERIFY = 4

TENSOR_KEYS = ("g", "ginv", "G", "N", "L", "C", "torsions", "curvatures", "metricity")
SOLVE_KINDS = ("helix", "circle", "generator", "sphere-circles")
# comma lists that may start with a minus sign
VALUE_FLAGS = ("--at", "--bracket")


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage; usage errors are configuration errors here."""

    def error(self, message):
        raise ConfigError(message)


def _reals(text: str, count: Optional[int], flag: str) -> List[float]:
    try:
        values = [float(part) for part in text.split(",")]
    except ValueError as e:
        raise ConfigError(f"{flag} expects comma-separated numbers, got {text!r}") from e
    if count is not None and len(values) != count:
        raise ConfigError(f"{flag} expects {count} numbers, got {len(values)}")
    if not all(math.isfinite(v) for v in values):
        raise ConfigError(f"{flag} values must be finite")
    return values


def _emit(document) -> None:
    try:
        text = json.dumps(document, indent=2, allow_nan=False)
    except ValueError as e:
        raise NumericalError(f"non-finite value in output: {e}") from e
    sys.stdout.write(text + "\n")


def _tolist(a) -> list:
    return np.asarray(a, dtype=float).tolist()


# tensors

def cmd_tensors(run_config: RunConfig, at: Sequence[float], what: Sequence[str]) -> dict:
    """Nested JSON document of the requested objects at the phase point `at`."""
    unknown = [w for w in what if w not in TENSOR_KEYS]
    if unknown:
        raise ConfigError(f"--what accepts {', '.join(TENSOR_KEYS)}; unknown: {', '.join(unknown)}")
    profile = run_config.build_profile()
    p = PhasePoint.from_flat(at)

    document = {"profile": profile.to_dict(), "point": {"x": _tolist(p.x), "y": _tolist(p.y)}}
    # fixed order regardless of how --what was written
    for key in TENSOR_KEYS:
        if key not in what:
            continue
        if key == "g":
            document["g"] = _tolist(metric.fundamental_tensor(profile, p))
        elif key == "ginv":
            document["ginv"] = _tolist(metric.inverse_fundamental_tensor(profile, p))
        elif key == "G":
            document["G"] = _tolist(connection.semispray(profile, p))
        elif key == "N":
            document["N"] = _tolist(connection.nonlinear_connection(profile, p).N)
        elif key == "L":
            document["L"] = _tolist(connection.cartan_closed_form(profile, p).L)
        elif key == "C":
            document["C"] = _tolist(connection.cartan_closed_form(profile, p).C)
        elif key == "torsions":
            t = curvature.torsions(profile, p)
            document["torsions"] = {"R": _tolist(t.R), "P": _tolist(t.P), "C": _tolist(t.C)}
        elif key == "curvatures":
            c = curvature.curvatures(profile, p)
            document["curvatures"] = {"R4": _tolist(c.R4), "P4": _tolist(c.P4), "S4": _tolist(c.S4)}
        elif key == "metricity":
            h_res, v_res = curvature.metricity_residuals(profile, p)
            document["metricity"] = {
                "h_residual": _tolist(h_res),
                "v_residual": _tolist(v_res),
                "h_max": float(np.max(np.abs(h_res))),
                "v_max": float(np.max(np.abs(v_res))),
            }
    return document


# geodesic

def cmd_geodesic(run_config: RunConfig, out: Optional[str] = None) -> int:
    """Integrate from the configured initial state, write the samples and print a summary."""
    if run_config.initial is None:
        raise ConfigError("geodesic runs need an 'initial' block with x and v")
    profile = run_config.build_profile()
    cfg = run_config.integrator_config()
    fmt = run_config.output.format
    path = out or run_config.output.path or f"trajectory.{fmt}"
    writer = write_trajectory_json if fmt == "json" else write_trajectory_csv

    try:
        trajectory = dynamics.integrate(profile, run_config.initial.x, run_config.initial.v, cfg)
    except NumericalError as e:
        partial = getattr(e, "trajectory", None)
        if partial is not None:
            writer(partial, path)
            result = summary(partial, error=str(e))
        else:
            result = {"truncated": True, "error": str(e)}
        result["output"] = path
        _emit(result)
        log_error(f"Geodesic run truncated: {e}")
        return EXIT_NUMERICAL

    writer(trajectory, path)
    result = summary(trajectory)
    result["output"] = path
    _emit(result)
    return EXIT_OK


# solve

def _solve(kind: str, run_config: RunConfig, bracket, rho: Optional[float]) -> list:
    profile = run_config.build_profile()
    if kind == "helix":
        if rho is None:
            raise ConfigError("solve helix needs --rho")
        return closedform.helix_omegas(profile, rho)
    if kind == "circle":
        return closedform.circle_radii(profile, bracket)
    if kind == "generator":
        return closedform.generator_radii(profile, bracket)
    if kind == "sphere-circles":
        return closedform.sphere_circle_families(profile, bracket)
    raise ConfigError(f"unknown solve kind {kind!r}; choose from {', '.join(SOLVE_KINDS)}")


def cmd_solve(kind: str, run_config: RunConfig, bracket=config.DEFAULT_BRACKET,
              rho: Optional[float] = None) -> int:
    """Print the families as a JSON array; exit 3 when there are none."""
    families = _solve(kind, run_config, bracket, rho)
    _emit([family.to_dict() for family in families])
    if not families:
        log_info(f"solve {kind}: no families")
        return EXIT_EMPTY
    return EXIT_OK


# verify

def cmd_verify(suite: str = "all", seed: int = config.VERIFY_SEED) -> int:
    checks = verify.run_suite(suite, seed)
    table = verify.report(checks)
    failed = int((table["status"] == "FAIL").sum())
    sys.stdout.write(f"verify suite={suite} seed={seed}\n")
    sys.stdout.write(table.to_string(index=False, float_format=lambda v: f"{v:.3e}") + "\n")
    sys.stdout.write(f"{len(table) - failed} passed, {failed} failed\n")
    return EXIT_VERIFY if failed else EXIT_OK


# plot

def cmd_plot(csv_path: str, proj: str, out: str) -> int:
    frame = read_trajectory_csv(csv_path)
    plotting.plot_projection(frame, proj, out)
    _emit({"output": out, "projection": proj, "samples": len(frame)})
    return EXIT_OK


def attach_values(argv: Sequence[str]) -> List[str]:
    """Rewrite `--at -1,0,0,...` as `--at=-1,0,0,...` so argparse does not read the value as a flag."""
    out = []
    i = 0
    while i < len(argv):
        arg = argv[i]
        if arg in VALUE_FLAGS and i + 1 < len(argv):
            out.append(f"{arg}={argv[i + 1]}")
            i += 2
        else:
            out.append(arg)
            i += 1
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="Main.py", description="Geodesics of light in anisotropic optical media.")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    tensors = commands.add_parser("tensors", help="dump geometric objects at a phase point")
    tensors.add_argument("--config", required=True)
    tensors.add_argument("--at", required=True, help="x1,x2,x3,y1,y2,y3")
    tensors.add_argument("--what", default="g", help=",".join(TENSOR_KEYS))

    geodesic = commands.add_parser("geodesic", help="integrate the equations of motion")
    geodesic.add_argument("--config", required=True)
    geodesic.add_argument("--out", default=None)

    solve = commands.add_parser("solve", help="closed-form solution families")
    solve.add_argument("kind", choices=SOLVE_KINDS)
    solve.add_argument("--config", required=True)
    solve.add_argument("--bracket", default=None, help="lo,hi")
    solve.add_argument("--rho", "--r", dest="rho", type=float, default=None)

    check = commands.add_parser("verify", help="run the invariant suite")
    check.add_argument("--suite", default="all", choices=("all",) + verify.SUITES)
    check.add_argument("--seed", type=int, default=config.VERIFY_SEED)

    plot = commands.add_parser("plot", help="SVG projection of a trajectory CSV")
    plot.add_argument("csv")
    plot.add_argument("--proj", default="xy", choices=plotting.PROJECTIONS)
    plot.add_argument("--out", required=True)
    return parser


def _dispatch(args) -> int:
    if args.command == "tensors":
        what = [w.strip() for w in args.what.split(",") if w.strip()]
        _emit(cmd_tensors(load_run_config(args.config), _reals(args.at, 6, "--at"), what))
        return EXIT_OK
    if args.command == "geodesic":
        return cmd_geodesic(load_run_config(args.config), args.out)
    if args.command == "solve":
        bracket = config.DEFAULT_BRACKET if args.bracket is None else tuple(_reals(args.bracket, 2, "--bracket"))
        return cmd_solve(args.kind, load_run_config(args.config), bracket, args.rho)
    if args.command == "verify":
        return cmd_verify(args.suite, args.seed)
    if args.command == "plot":
        return cmd_plot(args.csv, args.proj, args.out)
    raise ConfigError(f"unknown command {args.command!r}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    command = argv[0] if argv else "<none>"
    try:
        code = _dispatch(build_parser().parse_args(attach_values(argv)))
    except (ConfigError, UnsupportedProfileError) as e:
        log_error(f"Configuration error: {e}")
        sys.stderr.write(f"error: {e}\n")
        code = EXIT_CONFIG
    except (DomainError, NumericalError) as e:
        log_error(f"Numerical error: {e}")
        sys.stderr.write(f"error: {e}\n")
        code = EXIT_NUMERICAL
    log_command(command, code)
    return code


if __name__ == "__main__":
    sys.exit(main())
