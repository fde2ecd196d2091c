"""
pointspec - Main Entry Point.

Spectral analysis of one-dimensional Schrodinger operators with nonlocal
point interactions. Reads a JSON model document, runs one analysis and
writes a JSON report (or CSV for grid commands) to standard output.

Usage:
    python main.py <command> --model FILE [options]

Commands:
    weyl, eigs, exceptional, singularities, phase-diagram, eigenfunction,
    classify, verify

Example:
    python main.py eigs --model samples/delta_well.json --verify --no-timing
    python main.py phase-diagram --model samples/delta_free.json \\
        --a-range=-2,2,-2,2 --grid 41 --csv

Values that start with a minus sign are passed as --option=value.

Exit codes:
    0 success, 2 input errors, 3 numerical failures, 4 resolution limits.
"""

import argparse
import json
import logging
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src import __version__
from src.eigenfunctions import (
    Eigenfunction,
    basis_general,
    embedded_box_eigenfunction,
    exp_even_eigenfunction,
    is_square_integrable,
    norm_squared,
    u_delta,
)
from src.errors import ParseError, PointSpecError, PreconditionError
from src.excel_generator import SpectrumWorkbook
from src.model import k_from_lambda
from src.oracle import FdOracle
from src.report import ReportWriter
from src.schema import (
    BoundarySide,
    BoxEven,
    DeltaModel,
    ExpEven,
    FdGrid,
    ModelSpec,
    NumericsConfig,
    Potential,
    Report,
    SearchRegion,
    SpectralParameter,
)
from src.spectrum import SpectrumAnalyser
from src.symmetry import classify
from src.validator import ModelValidator
from src.weyl import weyl_boundary, weyl_derivative, weyl_matrix, weyl_scalar

logger = logging.getLogger("pointspec")

# Oracle bound states need Im k * L above this
FD_DECAY_LENGTHS = 16.0
BLOWUP_EPSILONS = (1e-2, 1e-3, 1e-4)
FD_NODES = 2001
PHASE_GRID = 41
WORKBOOK_COMMANDS = ("eigs", "singularities", "phase-diagram")


# ---------------------------------------------------------------------------
# Argument types
# ---------------------------------------------------------------------------


def _floats(count: int) -> Callable[[str], Tuple[float, ...]]:
    def parse(text: str) -> Tuple[float, ...]:
        try:
            values = tuple(float(part) for part in text.split(","))
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected {count} comma-separated numbers, got {text!r}")
        if len(values) != count:
            raise argparse.ArgumentTypeError(f"expected {count} comma-separated numbers, got {text!r}")
        return values
    return parse


def _complex_arg(text: str) -> complex:
    """Parses "re,im" or a plain real number."""
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected re,im, got {text!r}")


def _grid_arg(text: str) -> Tuple[float, float, int]:
    lo, hi, steps = _floats(3)(text)
    if steps < 1 or int(steps) != steps:
        raise argparse.ArgumentTypeError(f"step count must be a positive integer, got {text!r}")
    return lo, hi, int(steps)


# ---------------------------------------------------------------------------
# Shared helpers
# ---------------------------------------------------------------------------


class CommandContext:
    """Parsed model, numerics configuration and output plumbing for one run."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.config = NumericsConfig(tol=args.tol)
        self.writer = ReportWriter()
        self.analyser = SpectrumAnalyser(self.config, jobs=args.jobs)
        self.oracle = FdOracle()
        self.document: Optional[Dict[str, Any]] = None
        self.model: Optional[ModelSpec] = None

    def load_model(self) -> ModelSpec:
        path = Path(self.args.model)
        if not path.exists():
            raise ParseError("$", f"model file not found: {path}")
        text = path.read_text(encoding="utf-8")
        self.model = ModelValidator().parse_text(text)
        self.document = json.loads(text)
        logger.debug("loaded %s model from %s", type(self.model).__name__, path)
        return self.model

    def load_potential(self) -> Potential:
        """Reads a bare potential document, or the potential of a delta-model document."""
        path = Path(self.args.model)
        if not path.exists():
            raise ParseError("$", f"potential file not found: {path}")
        text = path.read_text(encoding="utf-8")
        potential = ModelValidator().parse_potential_text(text)
        self.document = json.loads(text)
        logger.debug("loaded %s from %s", type(potential).__name__, path)
        return potential

    def delta_model(self) -> DeltaModel:
        model = self.model or self.load_model()
        if not isinstance(model, DeltaModel):
            raise PreconditionError(f"command '{self.args.command}' needs a delta model")
        return model

    def region(self) -> SearchRegion:
        if self.args.region is None:
            return SearchRegion.default()
        re_min, re_max, im_min, im_max = self.args.region
        return SearchRegion(re_min, re_max, im_min, im_max, margin=min(self.config.margin, im_min))

    def spectral_point(self, lam: complex) -> SpectralParameter:
        side = BoundarySide(self.args.side) if self.args.side else None
        return k_from_lambda(lam, side)

    def fd_grid(self, k: Optional[complex] = None) -> FdGrid:
        nodes = self.args.grid
        length = self.args.fd_length
        if k is not None and k.imag > 0:
            length = max(length, FD_DECAY_LENGTHS / k.imag)
        # keep h below the grid's step cap
        length = min(length, 0.499 * FdGrid.MAX_STEP * (nodes - 1))
        return FdGrid(half_length=length, node_count=nodes)

    def progress(self, message: str) -> None:
        if self.args.verbose:
            print(f"  {message}", file=sys.stderr)


def _eigenfunction_for(ctx: CommandContext, at: SpectralParameter) -> List[Eigenfunction]:
    """u for a delta model (embedded form when it applies), u and v otherwise."""
    model = ctx.model
    if isinstance(model, DeltaModel):
        q = model.q
        if isinstance(q, BoxEven) and at.k.imag == 0 and at.k.real > 0:
            try:
                return [embedded_box_eigenfunction(complex(q.z).real, q.rho, at.k.real)]
            except PointSpecError:
                logger.debug("no embedded eigenvalue at k=%s; using the generalized eigenfunction", at.k)
        if isinstance(q, ExpEven):
            try:
                return [exp_even_eigenfunction(q.c, q.mu, at)]
            except PointSpecError:
                logger.debug("closed form has a pole at k=%s; using the kernel combination", at.k)
        return [u_delta(at, q, ctx.config.tol)]
    return list(basis_general(at, model.q1, model.q2, ctx.config.tol))


def _split(value: complex) -> Tuple[float, float]:
    value = complex(value)
    return value.real, value.imag


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_weyl(ctx: CommandContext) -> Tuple[Any, Optional[Tuple[List[Dict[str, Any]], List[str]]]]:
    """Weyl function at interior lambdas and boundary values on a real k-grid."""
    model = ctx.load_model()
    args = ctx.args
    tol = ctx.config.tol
    rows: List[Dict[str, Any]] = []

    for lam in args.lambdas or []:
        at = ctx.spectral_point(lam)
        row: Dict[str, Any] = {"lambda": at.lam, "k": at.k}
        if isinstance(model, DeltaModel):
            row["value"] = weyl_scalar(at, model.q, tol).value
            if args.derivative:
                row["derivative"] = weyl_derivative(at, model.q, tol, ctx.config.derivative_radius)
        else:
            row["value"] = weyl_matrix(at, model.q1, model.q2, tol).entries
        rows.append(row)

    if args.k_grid:
        lo, hi, steps = args.k_grid
        for k in np.linspace(lo, hi, steps):
            if k == 0:
                continue
            if isinstance(model, DeltaModel):
                value = weyl_boundary(float(k), model.q, tol=tol).value
            else:
                value = weyl_boundary(float(k), model.q1, model.q2, tol).entries
            rows.append({"lambda": complex(k * k), "k": complex(k), "value": value})

    csv_rows = None
    if args.csv:
        if not isinstance(model, DeltaModel):
            raise PreconditionError("CSV output of the Weyl matrix is not supported; use JSON")
        columns = ["re_lambda", "im_lambda", "re_k", "im_k", "re_w", "im_w"]
        csv_rows = ([
            dict(zip(columns, _split(r["lambda"]) + _split(r["k"]) + _split(r["value"])))
            for r in rows
        ], columns)
    return {"values": rows}, csv_rows


def cmd_eigs(ctx: CommandContext):
    """Eigenvalues in the search region, optionally checked by the oracle."""
    model = ctx.load_model()
    eigenvalues = ctx.analyser.find_eigenvalues(model, ctx.region())
    ctx.progress(f"found {len(eigenvalues)} eigenvalue(s)")
    payload: Dict[str, Any] = {"eigenvalues": eigenvalues}

    if ctx.args.verify and not isinstance(model, DeltaModel):
        logger.debug("oracle skipped for a general model")
        payload["verification"] = None
        payload["verification_note"] = "the finite-difference oracle covers the delta model only"
    elif ctx.args.verify:
        delta = model

        def check(ev):
            grid = ctx.fd_grid(complex(ev.k))
            result = ctx.oracle.verify_eigenvalue(delta, ev.lam, grid)
            return {"lambda": ev.lam, "grid": grid, "verification": result}

        if ctx.args.jobs > 1 and len(eigenvalues) > 1:
            with ThreadPoolExecutor(max_workers=ctx.args.jobs) as pool:
                payload["verification"] = list(pool.map(check, eigenvalues))
        else:
            payload["verification"] = [check(ev) for ev in eigenvalues]

    csv_rows = None
    if ctx.args.csv:
        columns = ["re_lambda", "im_lambda", "re_k", "im_k", "geometric", "algebraic", "residual"]
        csv_rows = ([
            dict(zip(columns, _split(ev.lam) + _split(ev.k) + (
                ev.geometric_mult, ev.algebraic_mult, ev.residual)))
            for ev in eigenvalues
        ], columns)
    return payload, csv_rows


def cmd_exceptional(ctx: CommandContext):
    """Exceptional points of a potential, with multiplicities."""
    q = ctx.load_potential()
    region = ctx.region()
    points = ctx.analyser.find_exceptional_points(q, region)
    records = []
    for point in points:
        at_point = DeltaModel(a=point.a, q=q)
        matching = [
            ev for ev in ctx.analyser.find_eigenvalues(at_point, region)
            if abs(ev.lam - point.lam0) <= 1e-6 * (1.0 + abs(point.lam0))
        ]
        record: Dict[str, Any] = {"point": point}
        if matching:
            record["geometric_mult"] = matching[0].geometric_mult
            record["algebraic_mult"] = matching[0].algebraic_mult
        records.append(record)
    ctx.progress(f"found {len(points)} exceptional point(s)")
    return {"exceptional_points": records}, None


def cmd_singularities(ctx: CommandContext):
    """Spectral-singularity scan, optional embedded search and blow-up ratios."""
    q = ctx.load_potential()
    lo, hi, steps = ctx.args.k_range
    if not 0 <= lo < hi:
        raise PreconditionError("k-range must satisfy 0 <= kmin < kmax")
    k_grid = [k for k in np.linspace(lo, hi, steps + 1)[1:] if k > 0]
    records = ctx.analyser.singularity_scan(q, k_grid)
    payload: Dict[str, Any] = {"singularities": records}

    if ctx.args.embedded:
        payload["embedded"] = ctx.analyser.embedded_eigenvalues(q, (max(lo, 1e-6), hi))

    if ctx.args.blowup is not None:
        k0 = ctx.args.blowup
        a_plus = weyl_boundary(k0, q, tol=ctx.config.tol).value
        at_singularity = DeltaModel(a=a_plus, q=q)
        payload["blowup"] = {
            "k": k0,
            "a": a_plus,
            "ratios": [
                {"epsilon": eps, "ratio": ctx.analyser.blowup_ratio(at_singularity, k0 * k0 + 1j * eps)}
                for eps in BLOWUP_EPSILONS
            ],
        }

    csv_rows = None
    if ctx.args.csv:
        columns = ["lambda", "k", "re_a_plus", "im_a_plus", "singular"]
        csv_rows = ([
            dict(zip(columns, (r.lam, r.k) + _split(r.a_plus) + (r.is_singular,)))
            for r in records
        ], columns)
    return payload, csv_rows


def cmd_phase_diagram(ctx: CommandContext):
    """Classification of the a-plane for a potential."""
    q = ctx.load_potential()
    re_min, re_max, im_min, im_max = ctx.args.a_range
    n = ctx.args.grid
    re_axis = np.linspace(re_min, re_max, n)
    im_axis = np.linspace(im_min, im_max, n)
    a_values = [complex(x, y) for x in re_axis for y in im_axis]
    spacing = min(
        (re_max - re_min) / max(n - 1, 1),
        (im_max - im_min) / max(n - 1, 1),
    )
    cells = ctx.analyser.phase_diagram(q, a_values, ctx.region(), curve_tolerance=0.5 * spacing)
    ctx.progress(f"classified {len(cells)} couplings")

    columns = ["re_a", "im_a", "eigenvalue_count", "has_real_eigenvalue", "singular", "label"]
    rows = [
        dict(zip(columns, _split(c.a) + (
            c.eigenvalue_count, c.has_real_eigenvalue, c.singular, c.label)))
        for c in cells
    ]
    return {"cells": cells}, ((rows, columns) if ctx.args.csv else None)


def cmd_eigenfunction(ctx: CommandContext):
    """Eigenfunction values on an x-grid with boundary data and norm."""
    ctx.load_model()
    if ctx.args.lam is None:
        raise PreconditionError("eigenfunction needs --lambda")
    at = ctx.spectral_point(ctx.args.lam)
    functions = _eigenfunction_for(ctx, at)
    lo, hi, steps = ctx.args.x_range
    xs = np.linspace(lo, hi, steps)
    names = ["u", "v"][:len(functions)]
    values = {name: f.evaluate(xs) for name, f in zip(names, functions)}

    payload: Dict[str, Any] = {
        "lambda": at.lam,
        "k": at.k,
        "kind": [f.kind for f in functions],
        "x": xs,
        "values": values,
        "boundary_data": {name: f.boundary_data() for name, f in zip(names, functions)},
    }
    if all(is_square_integrable(f) for f in functions):
        payload["norm_squared"] = {name: norm_squared(f) for name, f in zip(names, functions)}

    columns = ["x"]
    for name in names:
        columns += [f"re_{name}", f"im_{name}"]
    rows = []
    for j, x in enumerate(xs):
        row = {"x": float(x)}
        for name in names:
            row[f"re_{name}"], row[f"im_{name}"] = _split(values[name][j])
        rows.append(row)
    return payload, ((rows, columns) if ctx.args.csv else None)


def cmd_classify(ctx: CommandContext):
    """Symmetry flags of the model."""
    return classify(ctx.load_model()), None


def cmd_verify(ctx: CommandContext):
    """Finite-difference check of one candidate eigenvalue."""
    model = ctx.delta_model()
    if ctx.args.lam is None:
        raise PreconditionError("verify needs --lambda")
    lam = ctx.args.lam
    k = None
    candidate = None
    if ctx.args.with_eigenfunction:
        at = ctx.spectral_point(lam)
        k = at.k
        candidate = _eigenfunction_for(ctx, at)[0]
    grid = ctx.fd_grid(k)
    result = ctx.oracle.verify_eigenvalue(model, lam, grid, candidate)
    return {"lambda": lam, "grid": grid, "verification": result}, None


COMMANDS: Dict[str, Tuple[Callable, str, str]] = {
    "weyl": (cmd_weyl, "Weyl function values", "CSV: re_lambda, im_lambda, re_k, im_k, re_w, im_w"),
    "eigs": (cmd_eigs, "eigenvalues with multiplicities",
             "CSV: re_lambda, im_lambda, re_k, im_k, geometric, algebraic, residual"),
    "exceptional": (cmd_exceptional, "exceptional points", ""),
    "singularities": (cmd_singularities, "spectral singularities on (0, inf)",
                      "CSV: lambda, k, re_a_plus, im_a_plus, singular"),
    "phase-diagram": (cmd_phase_diagram, "a-plane phase diagram",
                      "CSV: re_a, im_a, eigenvalue_count, has_real_eigenvalue, singular, label"),
    "eigenfunction": (cmd_eigenfunction, "eigenfunction on an x-grid",
                      "CSV: x, re_u, im_u (and re_v, im_v for general models)"),
    "classify": (cmd_classify, "symmetry classification", ""),
    "verify": (cmd_verify, "finite-difference check of an eigenvalue", ""),
}


def export_files(ctx: CommandContext, report: Report) -> None:
    """
    Writes the report files requested on the command line.

    --output-dir receives the JSON report and, for workbook commands, an
    xlsx workbook, both under timestamped names. --xlsx names the
    workbook explicitly.
    """
    args = ctx.args
    prefix = args.command.replace("-", "_")
    workbook = SpectrumWorkbook()
    xlsx_path = args.xlsx
    if args.output_dir is not None:
        report_path = args.output_dir / ctx.writer.generate_filename(prefix)
        ctx.writer.save_to_file(report, report_path)
        logger.debug("report saved to %s", report_path)
        if xlsx_path is None and args.command in WORKBOOK_COMMANDS:
            xlsx_path = args.output_dir / workbook.generate_filename(prefix)
    if xlsx_path is None:
        return
    if args.command == "phase-diagram":
        workbook.write_phase_diagram(report.results["cells"], xlsx_path)
    else:
        workbook.write_spectrum(report, xlsx_path)
    logger.debug("workbook saved to %s", xlsx_path)


def build_parser() -> argparse.ArgumentParser:
    """Builds the argument parser with one sub-command per analysis."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--model", required=True, type=Path,
        help="Path to the JSON model document (a bare potential for exceptional, singularities, phase-diagram)",
    )
    common.add_argument("--tol", type=float, default=NumericsConfig.tol, help="Absolute tolerance (default: 1e-10)")
    common.add_argument(
        "--region", type=_floats(4), default=None,
        help="k search rectangle krmin,krmax,kimin,kimax (default: -10,10,1e-6,10)",
    )
    common.add_argument(
        "--grid", type=int, default=None,
        help="FD node count (default: 2001), or a-grid points per axis (default: 41)",
    )
    common.add_argument("--fd-length", type=float, default=20.0, help="Half-length L of the FD interval")
    common.add_argument("--verify", action="store_true", help="Cross-check eigenvalues with the FD oracle")
    common.add_argument("--csv", action="store_true", help="Write CSV instead of JSON")
    common.add_argument("--xlsx", type=Path, default=None, help="Also write an xlsx workbook (eigs, singularities, phase-diagram)")
    common.add_argument(
        "--output-dir", type=Path, default=None,
        help="Also save the JSON report (and workbook) here under timestamped names",
    )
    common.add_argument("--jobs", type=int, default=1, help="Worker threads for grid commands")
    common.add_argument("--no-timing", action="store_true", help="Omit wall time from the report")
    common.add_argument("--verbose", action="store_true", help="Progress and debug logging on stderr")
    common.add_argument("--lambda", dest="lam", type=_complex_arg, default=None, help="Spectral point re,im")
    common.add_argument(
        "--side", choices=[BoundarySide.PLUS.value, BoundarySide.MINUS.value], default=None,
        help="Side of the cut for lambda > 0",
    )

    parser = argparse.ArgumentParser(
        prog="pointspec",
        description="Spectral analysis of Schrodinger operators with nonlocal point interactions",
    )
    parser.add_argument("--version", action="version", version=f"pointspec {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    parsers = {}
    for name, (_, help_text, epilog) in COMMANDS.items():
        parsers[name] = sub.add_parser(name, parents=[common], help=help_text, epilog=epilog or None)

    parsers["weyl"].add_argument(
        "--at", dest="lambdas", type=_complex_arg, action="append",
        help="Interior spectral point re,im (repeatable)",
    )
    parsers["weyl"].add_argument("--k-grid", type=_grid_arg, default=None, help="Real k-grid kmin,kmax,steps")
    parsers["weyl"].add_argument("--derivative", action="store_true", help="Include dW/dlambda (delta model)")
    parsers["singularities"].add_argument(
        "--k-range", type=_grid_arg, default=(0.0, 10.0, 100), help="kmin,kmax,steps (default: 0,10,100)",
    )
    parsers["singularities"].add_argument("--embedded", action="store_true", help="Also search embedded eigenvalues")
    parsers["singularities"].add_argument(
        "--blowup", type=float, default=None, help="Resolvent blow-up ratios at a = W+(k) for this k",
    )
    parsers["phase-diagram"].add_argument(
        "--a-range", type=_floats(4), default=(-2.0, 2.0, -2.0, 2.0),
        help="re_min,re_max,im_min,im_max of the a-plane (default: -2,2,-2,2)",
    )
    parsers["eigenfunction"].add_argument(
        "--x-range", type=_grid_arg, default=(-10.0, 10.0, 201), help="xmin,xmax,steps",
    )
    parsers["verify"].add_argument(
        "--with-eigenfunction", action="store_true", help="Also report the residual of the eigenfunction",
    )
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Main entry point.

    Args:
        argv: Argument list; defaults to sys.argv[1:].

    Returns:
        Exit code.
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.grid is None:
        args.grid = PHASE_GRID if args.command == "phase-diagram" else FD_NODES

    if args.verbose:
        logging.basicConfig(level=logging.DEBUG, stream=sys.stderr, format="%(name)s: %(message)s")

    handler = COMMANDS[args.command][0]
    started = time.perf_counter()
    try:
        if args.xlsx is not None and args.command not in WORKBOOK_COMMANDS:
            raise PreconditionError(f"--xlsx applies to {', '.join(WORKBOOK_COMMANDS)} only")
        ctx = CommandContext(args)
        payload, csv_rows = handler(ctx)
        wall_time = None if args.no_timing else time.perf_counter() - started
        echo = {
            key: (str(value) if isinstance(value, Path) else value)
            for key, value in sorted(vars(args).items())
        }
        report = ctx.writer.build(
            {"name": args.command, "args": echo},
            ctx.document,
            payload,
            ctx.config.as_dict(),
            wall_time,
        )
        export_files(ctx, report)
        if csv_rows is not None:
            rows, columns = csv_rows
            ctx.writer.write_csv(rows, columns, sys.stdout)
        else:
            print(ctx.writer.serialise(report))
    except PointSpecError as error:
        print(json.dumps(error.to_dict(), sort_keys=True, default=str))
        return error.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
