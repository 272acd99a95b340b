"""
Command-line interface.

Usage:
    triangular-well solve --vbar0 25
    triangular-well solve --physical 1.0 1.0 50.0 1.0 --format json
    triangular-well table1 --compare --output reports/table1.csv
    triangular-well wavefunction --vbar0 5 --state 1 --grid 1001
    triangular-well critical --max-n 4
    triangular-well oracle --vbar0 5
    triangular-well airy --x 0

Standard output carries only the requested document; logs and summaries go
to standard error. Exit status: 0 success, 1 solver failure, 2 usage error.
"""

from __future__ import annotations
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Optional, Sequence
import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import tempfile

from rich.console import Console
from rich.logging import RichHandler

from .airy import AiryRangeError, airy_eval, airy_eval_scaled
from .comparison import PUBLISHED_ONSETS, Table1IntegrityError, compare_table1, load_table1, regenerate_table1
from .eigen import (
    MAX_TOL,
    MIN_TOL,
    BracketRefinementError,
    SpectrumError,
    critical_depth,
    solve_spectrum,
)
from .model import Convention, DimensionlessWell, PhysicalWell, WellDomainError, to_dimensionless, to_physical
from .oracle import OracleConfig, OracleConvergenceError, oracle_spectrum
from .wavefn import NotAnEigenstateError, build_state, sample

logger = logging.getLogger("triangular_well")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


class MissingStateError(LookupError):
    """Requested state index does not exist for the well."""


# =========================================================================
# Argument Types
# =========================================================================

def finite_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"must be finite: {text!r}")
    return value


def positive_float(text: str) -> float:
    value = finite_float(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be > 0: {text!r}")
    return value


def tolerance(text: str) -> float:
    value = finite_float(text)
    if not MIN_TOL <= value <= MAX_TOL:
        raise argparse.ArgumentTypeError(f"must lie in [{MIN_TOL:g}, {MAX_TOL:g}]: {text!r}")
    return value


def bounded_int(low: int, high: Optional[int] = None) -> Callable[[str], int]:
    def parse(text: str) -> int:
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
        if value < low or (high is not None and value > high):
            upper = "" if high is None else f", <= {high}"
            raise argparse.ArgumentTypeError(f"must be >= {low}{upper}: {text!r}")
        return value
    return parse


# =========================================================================
# Documents
# =========================================================================

def number(value: Optional[float]) -> str:
    """Shortest round-trip decimal; blank for missing values."""
    return "" if value is None else repr(float(value))


def diagnostic(value: float) -> str:
    """17 significant digits."""
    return format(float(value), ".16e")


def csv_document(header: Sequence[str], rows: Iterable[Sequence[str]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def json_document(payload: Dict) -> str:
    return json.dumps(payload, indent=2) + "\n"


def key_value_document(pairs: Sequence[tuple]) -> str:
    return "".join(f"{key} = {value}\n" for key, value in pairs)


def write_document(document: str, output: Optional[Path]) -> None:
    """Write to stdout, or atomically replace ``output`` (parent directories are created)."""
    if output is None:
        sys.stdout.write(document)
        sys.stdout.flush()
        return
    output = Path(output)
    directory = output.parent
    directory.mkdir(parents=True, exist_ok=True)
    handle = tempfile.NamedTemporaryFile(
        "w", dir=directory, prefix=f".{output.name}.", suffix=".tmp",
        delete=False, encoding="utf-8", newline="",
    )
    try:
        with handle:
            handle.write(document)
        os.replace(handle.name, output)
    except BaseException:
        Path(handle.name).unlink(missing_ok=True)
        raise


# =========================================================================
# Commands
# =========================================================================

def cmd_solve(args: argparse.Namespace) -> str:
    physical = None
    if args.physical is not None:
        physical = PhysicalWell(*args.physical)
        well = to_dimensionless(physical, args.convention)
    else:
        well = DimensionlessWell(args.vbar0, args.convention)
    spectrum = solve_spectrum(well, args.tol)
    logger.info("vbar0=%r (%s): %d states", well.vbar0, well.convention.value, len(spectrum))

    if args.format == "json":
        payload = spectrum.to_dict()
        if physical is not None:
            for entry, state in zip(payload["states"], spectrum.states):
                entry["energy"] = to_physical(physical, state.ebar)
        return json_document(payload)

    header = ["n", "parity", "ebar", "residual"] + (["energy"] if physical else [])
    rows = []
    for state in spectrum.states:
        row = [str(state.n), state.parity.value, number(state.ebar), number(state.residual_abs)]
        if physical is not None:
            row.append(number(to_physical(physical, state.ebar)))
        rows.append(row)
    return csv_document(header, rows)


def cmd_table1(args: argparse.Namespace) -> str:
    rows = load_table1()
    if not args.compare:
        table = regenerate_table1(rows, args.convention, args.tol)
        if args.format == "json":
            return json_document({
                "convention": args.convention.value,
                "rows": [{"vbar0": v, "energies": e} for v, e in table],
            })
        return csv_document(
            ["vbar0", "e0", "e1", "e2"],
            [[row.raw[0]] + [number(e) for e in energies] for row, (_, energies) in zip(rows, table)],
        )

    report = compare_table1(rows, tol=args.tol, run_oracle=not args.no_oracle)
    report.render(Console(stderr=True))
    for line in report.summary_lines():
        logger.info(line)
    if args.format == "json":
        return json_document(report.to_dict())
    return csv_document(report.csv_header(), report.csv_rows())


def cmd_wavefunction(args: argparse.Namespace) -> str:
    well = DimensionlessWell(args.vbar0, args.convention)
    spectrum = solve_spectrum(well, args.tol)
    try:
        state = spectrum.state(args.state)
    except IndexError as exc:
        raise MissingStateError(f"vbar0={args.vbar0!r}: {exc}") from exc
    piecewise = build_state(well, state)
    y, psi = sample(piecewise, args.grid)
    if args.format == "json":
        return json_document({
            "vbar0": well.vbar0,
            "convention": well.convention.value,
            "n": state.n,
            "ebar": state.ebar,
            "parity": state.parity.value,
            "y": [float(v) for v in y],
            "psi": [float(v) for v in psi],
        })
    return csv_document(["y", "psi"], ([number(a), number(b)] for a, b in zip(y, psi)))


def cmd_critical(args: argparse.Namespace) -> str:
    records = []
    for n in range(1, args.max_n + 1):
        record = {"n": n, "published": PUBLISHED_ONSETS.get(n)}
        for convention in Convention:
            depth = critical_depth(n, args.tol, convention)
            below, above = _counts_around(depth, convention, args.tol)
            record[f"vbar0_critical_{convention.value}"] = depth
            record[f"{convention.value}_count_below"] = below
            record[f"{convention.value}_count_above"] = above
            if above != below + 1:
                logger.warning(
                    "state count does not step across n=%d (%s): %d -> %d",
                    n, convention.value, below, above,
                )
        records.append(record)

    if args.format == "json":
        return json_document({"critical_depths": records})
    header = ["n"] + [f"vbar0_critical_{c.value}" for c in Convention] + ["published"]
    for c in Convention:
        header += [f"{c.value}_count_below", f"{c.value}_count_above"]
    rows = []
    for r in records:
        row = [str(r["n"])] + [number(r[f"vbar0_critical_{c.value}"]) for c in Convention]
        row.append(number(r["published"]))
        for c in Convention:
            row += [str(r[f"{c.value}_count_below"]), str(r[f"{c.value}_count_above"])]
        rows.append(row)
    return csv_document(header, rows)


def cmd_oracle(args: argparse.Namespace) -> str:
    well = DimensionlessWell(args.vbar0, args.convention)
    overrides = {
        key: value
        for key, value in (
            ("half_domain", args.half_domain),
            ("grid_points", args.grid_points),
            ("refine_levels", args.refine_levels),
        )
        if value is not None
    }
    config = OracleConfig.for_well(well, **overrides)
    spectrum = oracle_spectrum(well, config)
    if args.format == "json":
        return json_document({"vbar0": well.vbar0, "convention": well.convention.value, **spectrum.to_dict()})
    pairs = [
        ("vbar0", diagnostic(well.vbar0)),
        ("convention", well.convention.value),
        ("half_domain", diagnostic(spectrum.half_domain)),
        ("step", diagnostic(spectrum.step)),
        ("count", len(spectrum)),
    ]
    pairs += [(f"eigenvalue[{i}]", diagnostic(e)) for i, e in enumerate(spectrum.eigenvalues)]
    pairs.append(("achieved_error_estimate", diagnostic(spectrum.achieved_error_estimate)))
    return key_value_document(pairs)


def cmd_airy(args: argparse.Namespace) -> str:
    quad = airy_eval_scaled(args.x) if args.scaled else airy_eval(args.x)
    values = quad.as_dict()
    if args.format == "json":
        return json_document(values)
    return key_value_document([(key, diagnostic(value)) for key, value in values.items()])


# =========================================================================
# Parser
# =========================================================================

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--convention", type=Convention, default=Convention.EQ1, metavar="{eq1,halfwidth2}",
        help="geometry convention (default: eq1)",
    )
    common.add_argument("--tol", type=tolerance, default=1e-10, help="root tolerance (default: 1e-10)")
    common.add_argument("--format", choices=["csv", "json"], default="csv", help="output format")
    common.add_argument("--output", type=Path, default=None, help="output file (default: stdout)")
    common.add_argument("-v", "--verbose", action="count", default=0, help="more logging (-vv for debug)")

    parser = argparse.ArgumentParser(
        prog="triangular-well",
        description="Bound states of a finite-range triangular potential well",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    solve = commands.add_parser("solve", parents=[common], help="bound-state spectrum of one well")
    depth = solve.add_mutually_exclusive_group(required=True)
    depth.add_argument("--vbar0", type=positive_float, help="dimensionless depth")
    depth.add_argument(
        "--physical", type=positive_float, nargs=4, metavar=("MASS", "HBAR", "DEPTH", "HALF_WIDTH"),
        help="physical parameters; adds an energy column in physical units",
    )
    solve.set_defaults(handler=cmd_solve)

    table1 = commands.add_parser("table1", parents=[common], help="regenerate or compare Table 1")
    table1.add_argument("--compare", action="store_true", help="emit the comparison report")
    table1.add_argument("--no-oracle", action="store_true", help="skip the finite-difference oracle")
    table1.set_defaults(handler=cmd_table1)

    wave = commands.add_parser("wavefunction", parents=[common], help="sample one eigenfunction")
    wave.add_argument("--vbar0", type=positive_float, required=True)
    wave.add_argument("--state", type=bounded_int(0), default=0, help="state index (default: 0)")
    wave.add_argument("--grid", type=bounded_int(2), default=1001, help="samples (default: 1001)")
    wave.set_defaults(handler=cmd_wavefunction)

    critical = commands.add_parser("critical", parents=[common], help="critical depths")
    critical.add_argument("--max-n", type=bounded_int(1, 8), default=2, help="largest state index (1-8)")
    critical.set_defaults(handler=cmd_critical)

    oracle = commands.add_parser("oracle", parents=[common], help="finite-difference spectrum")
    oracle.add_argument("--vbar0", type=positive_float, required=True)
    oracle.add_argument("--half-domain", type=positive_float, default=None)
    oracle.add_argument("--grid-points", type=bounded_int(201), default=None)
    oracle.add_argument("--refine-levels", type=bounded_int(2), default=None)
    oracle.set_defaults(handler=cmd_oracle)

    airy = commands.add_parser("airy", parents=[common], help="Airy functions at one point")
    airy.add_argument("--x", type=finite_float, required=True)
    airy.add_argument("--scaled", action="store_true", help="exponent-scaled values")
    airy.set_defaults(handler=cmd_airy)
    return parser


def configure_logging(verbose: int) -> None:
    """Send package logs to a RichHandler on stderr; repeated calls replace it."""
    level = logging.WARNING if verbose == 0 else (logging.INFO if verbose == 1 else logging.DEBUG)
    for handler in list(logger.handlers):
        if isinstance(handler, RichHandler):
            logger.removeHandler(handler)
    handler = RichHandler(console=Console(stderr=True), show_path=False)
    handler.setFormatter(logging.Formatter("%(message)s"))
    logger.addHandler(handler)
    logger.setLevel(level)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    configure_logging(args.verbose)

    try:
        document = args.handler(args)
    except (
        SpectrumError,
        BracketRefinementError,
        OracleConvergenceError,
        NotAnEigenstateError,
        MissingStateError,
        Table1IntegrityError,
    ) as exc:
        logger.error("%s", exc)
        return EXIT_FAILURE
    except (AiryRangeError, WellDomainError, ValueError) as exc:
        logger.error("%s", exc)
        return EXIT_USAGE

    try:
        write_document(document, args.output)
    except OSError as exc:
        logger.error("cannot write %s: %s", args.output, exc)
        return EXIT_FAILURE
    return EXIT_OK


def _counts_around(depth: float, convention: Convention, tol: float) -> tuple:
    delta = 1e-6 * max(1.0, depth)
    below = len(solve_spectrum(DimensionlessWell(depth - delta, convention), tol))
    above = len(solve_spectrum(DimensionlessWell(depth + delta, convention), tol))
    return below, above


if __name__ == "__main__":
    sys.exit(main())
