"""Command-line entry point.

Exit codes: 0 completed with verdicts, 2 scenario or usage error,
3 internal numeric failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from . import criteria as cr
from . import dynamics as dyn
from .analysis import analyze, run_witness
from .domains import DomainError
from .expr import EvaluationError, ExpressionError
from .presets import PRESETS, run_preset
from .report import Report
from .scenario import ScenarioError, load_scenario, parse_point

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3


class UsageError(Exception):
    pass


def _emit(rep: Report, out: Optional[str], stem: str = "report") -> None:
    if out:
        for p in rep.write(out, stem):
            print(p)
    else:
        sys.stdout.write(rep.render())


def _write_or_print(text: str, path: Optional[str]) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_analyze(args) -> int:
    rep = analyze(load_scenario(args.scenario))
    _emit(rep, args.out)
    return EXIT_OK


def cmd_orbit(args) -> int:
    scn = load_scenario(args.scenario)
    z = parse_point(args.start)
    n = args.steps if args.steps is not None else scn.horizons["orbitN"]
    if n < 0:
        raise UsageError("--steps must be non-negative")
    tr = dyn.iterate(scn.symbol, z, n, scn.domain)
    _write_or_print(dyn.orbit_csv(tr), args.csv)
    print(f"classification: {tr}", file=sys.stderr if not args.csv else sys.stdout)
    return EXIT_OK


def cmd_quotient(args) -> int:
    scn = load_scenario(args.scenario)
    f = args.f or str(scn.test_functions[0])
    dg = cr.quotient_sequence(scn.symbol, scn.weight, f, parse_point(args.z1),
                              parse_point(args.z2), args.steps or scn.horizons["quotientN"],
                              scn.domain, cauchy_tol=scn.tolerances["quotientCauchy"])
    _write_or_print(cr.quotient_csv(dg), args.csv)
    print(f"classification: {dg}", file=sys.stderr if not args.csv else sys.stdout)
    return EXIT_OK


def cmd_witness(args) -> int:
    rep = run_witness(load_scenario(args.scenario))
    _emit(rep, args.out, "witness")
    return EXIT_OK


def load_matrix(path) -> np.ndarray:
    """JSON {"matrix": rows} (entries are numbers or [re, im]) or a text table."""
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise UsageError(f"cannot read matrix file: {exc.strerror}") from None
    if p.suffix == ".json" or text.lstrip().startswith(("{", "[")):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise UsageError(f"invalid JSON at line {exc.lineno}: {exc.msg}") from None
        rows = data.get("matrix") if isinstance(data, dict) else data
        if not isinstance(rows, list) or not rows:
            raise UsageError("matrix file needs a non-empty 'matrix' list")
        try:
            return np.array([[complex(*e) if isinstance(e, list) else complex(e) for e in r]
                             for r in rows], dtype=complex)
        except (TypeError, ValueError) as exc:
            raise UsageError(f"bad matrix entry: {exc}") from None
    try:
        return np.atleast_2d(np.loadtxt(p, dtype=complex))
    except ValueError as exc:
        raise UsageError(f"bad matrix table: {exc}") from None


def cmd_spectrum(args) -> int:
    m = load_matrix(args.matrix)
    try:
        T = cr.OperatorMatrix.from_entries(m)
    except cr.SpectralError as exc:
        raise UsageError(str(exc)) from None
    if T.dimension < 2:
        raise UsageError("matrix dimension must be at least 2")
    rep = Report(f"spectrum {Path(args.matrix).name}", {"dimension": T.dimension})
    rep.add("Cor. 10 spectral obstruction", cr.spectral_obstruction(T))
    _emit(rep, args.out, "spectrum")
    return EXIT_OK


def cmd_reproduce(args) -> int:
    if args.list or not args.id:
        for name in PRESETS:
            print(name)
        return EXIT_OK
    if args.id not in PRESETS:
        raise UsageError(f"unknown preset {args.id!r}; choose from {', '.join(PRESETS)}")
    rep = run_preset(args.id, args.refine)
    _emit(rep, args.out, args.id)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="supercyc",
                                description="Obstructions to supercyclicity of weighted "
                                            "composition operators.")
    p.add_argument("--version", action="version", version=f"supercyc {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="full pipeline on a scenario file")
    a.add_argument("scenario")
    a.add_argument("--out", help="directory for report, JSON sidecar and CSVs")
    a.set_defaults(func=cmd_analyze)

    o = sub.add_parser("orbit", help="orbit CSV")
    o.add_argument("scenario")
    o.add_argument("--from", dest="start", required=True, help="start point, e.g. 0.5+0.5*i")
    o.add_argument("--steps", type=int, default=None)
    o.add_argument("--csv", help="write CSV here instead of stdout")
    o.set_defaults(func=cmd_orbit)

    q = sub.add_parser("quotient", help="quotient CSV and classification")
    q.add_argument("scenario")
    q.add_argument("--z1", required=True)
    q.add_argument("--z2", required=True)
    q.add_argument("--f", help="test function (default: first in scenario)")
    q.add_argument("--steps", type=int, default=None)
    q.add_argument("--csv")
    q.set_defaults(func=cmd_quotient)

    w = sub.add_parser("witness", help="shift construction and witness search")
    w.add_argument("scenario")
    w.add_argument("--out")
    w.set_defaults(func=cmd_witness)

    s = sub.add_parser("spectrum", help="spectral obstruction on a matrix file")
    s.add_argument("matrix")
    s.add_argument("--out")
    s.set_defaults(func=cmd_spectrum)

    r = sub.add_parser("reproduce", help="run a shipped preset")
    r.add_argument("id", nargs="?")
    r.add_argument("--list", action="store_true")
    r.add_argument("--refine", type=int, default=1, help="grid resolution multiplier")
    r.add_argument("--out")
    r.set_defaults(func=cmd_reproduce)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    if getattr(args, "refine", 1) < 1:
        print("error: --refine must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (cr.QuadratureError, cr.SpectralError, EvaluationError, ArithmeticError,
            np.linalg.LinAlgError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ScenarioError, ExpressionError, DomainError, UsageError, cr.SelfMapError,
            dyn.PreconditionError, dyn.NotHomeomorphismError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # never let a traceback be the interface
        print(f"internal failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
