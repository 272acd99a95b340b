"""
Table 1 comparison.

Loads the embedded table of published eigenenergies, recomputes every row
under both geometry conventions with the Airy solver and the finite-difference
oracle, and reports deviations and anomalies. The published values are
never edited; rows that look wrong are flagged, not corrected.
"""

from __future__ import annotations
from enum import Enum
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union
import csv
import hashlib
import io
import logging
import math

from rich.console import Console
from rich.table import Table

from .eigen import critical_depth, solve_spectrum
from .model import Convention, DimensionlessWell
from .oracle import OracleConfig, OracleConvergenceError, oracle_spectrum

logger = logging.getLogger(__name__)

TABLE1_SHA256 = "27a441b99c1983178978c795659e68f4cb317869e3c3bfd41a12814e8686180c"

# Depths of the first rows with a nonempty E1 and E2 column
PUBLISHED_ONSETS: Dict[int, float] = {1: 4.28, 2: 20.62}

DEVIATION_LIMIT = 0.01
AGREEMENT_LIMIT = 1e-6
SLOPE_JUMP_FACTOR = 3.5
COLUMNS = 3


class Table1IntegrityError(ValueError):
    """The embedded table does not match its recorded hash."""


class Flag(str, Enum):
    MISSING_STATE = "missing-state"
    EXTRA_STATE = "extra-state"
    ORDERING = "ordering"
    DEVIATION = "deviation>1%"
    INCONSISTENT = "internal-inconsistency"
    ORACLE_FAILURE = "oracle-failure"
    SLOPE_JUMP = "slope-jump"


def _tag(flag: Flag, convention: Optional[Convention] = None) -> str:
    return flag.value if convention is None else f"{convention.value}:{flag.value}"


# =========================================================================
# Table 1
# =========================================================================

@dataclass(frozen=True)
class Table1Row:
    """
    One published row. ``raw`` keeps the cells exactly as printed.

    Example:
        Table1Row(vbar0=4.28, e0=-1.298437, e1=-9.91e-05, e2=None,
                  raw=("4.28", "-1.2984370", "-0.0000991", ""))
    """
    vbar0: float
    e0: Optional[float]
    e1: Optional[float]
    e2: Optional[float]
    raw: Tuple[str, str, str, str]

    def energy(self, n: int) -> Optional[float]:
        return (self.e0, self.e1, self.e2)[n]

    def text(self, n: int) -> str:
        return self.raw[n + 1]

    @property
    def count(self) -> int:
        return sum(e is not None for e in (self.e0, self.e1, self.e2))

    def ordering_violations(self) -> List[int]:
        """Indices n whose energy does not exceed the one before it."""
        bad = []
        for n in range(1, COLUMNS):
            low, high = self.energy(n - 1), self.energy(n)
            if low is not None and high is not None and not low < high:
                bad.append(n)
        return bad

    @property
    def is_ordered(self) -> bool:
        return not self.ordering_violations()


def read_table1_bytes(path: Optional[Union[str, Path]] = None) -> bytes:
    if path is not None:
        return Path(path).read_bytes()
    return resources.files("triangular_well").joinpath("data/table1.csv").read_bytes()


def load_table1(path: Optional[Union[str, Path]] = None) -> List[Table1Row]:
    """
    Load the published table.

    Args:
        path: Alternative CSV file; defaults to the packaged copy

    Raises:
        Table1IntegrityError: file content differs from TABLE1_SHA256
    """
    data = read_table1_bytes(path)
    digest = hashlib.sha256(data).hexdigest()
    if digest != TABLE1_SHA256:
        raise Table1IntegrityError(f"table1.csv hash {digest} does not match {TABLE1_SHA256}")

    rows = []
    for record in csv.DictReader(io.StringIO(data.decode("utf-8"))):
        cells = tuple(record[k].strip() for k in ("vbar0", "e0", "e1", "e2"))
        energies = [float(c) if c else None for c in cells[1:]]
        rows.append(Table1Row(float(cells[0]), *energies, raw=cells))
    return rows


def slope_jumps(rows: List[Table1Row], factor: float = SLOPE_JUMP_FACTOR) -> List[Tuple[float, int]]:
    """
    (vbar0, n) cells whose increment from the previous row is steeper than
    ``factor`` times the previous increment in the same column.
    """
    jumps = []
    for n in range(COLUMNS):
        points = [(r.vbar0, r.energy(n)) for r in rows if r.energy(n) is not None]
        previous = None
        for (v0, e0), (v1, e1) in zip(points, points[1:]):
            slope = abs((e1 - e0) / (v1 - v0))
            if previous is not None and slope > factor * previous:
                jumps.append((v1, n))
            previous = slope
    return jumps


# =========================================================================
# Comparison
# =========================================================================

@dataclass
class WellResult:
    """Both methods for one row under one convention."""
    convention: Convention
    solver: Tuple[float, ...]
    oracle: Optional[Tuple[float, ...]] = None
    oracle_error_estimate: Optional[float] = None
    failure: Optional[str] = None

    def disagreement(self) -> Optional[float]:
        """
        Largest |solver - oracle| over paired states.

        A state only one method finds counts with its own |Ebar| (it may sit
        just below threshold). None when the oracle did not run.
        """
        if self.oracle is None:
            return None
        paired = min(len(self.solver), len(self.oracle))
        worst = max((abs(a - b) for a, b in zip(self.solver, self.oracle)), default=0.0)
        for extra in self.solver[paired:] + self.oracle[paired:]:
            worst = max(worst, abs(extra))
        return worst

    @property
    def consistent(self) -> bool:
        worst = self.disagreement()
        return worst is not None and worst <= AGREEMENT_LIMIT

    def energy(self, n: int) -> Optional[float]:
        return self.solver[n] if n < len(self.solver) else None

    def oracle_energy(self, n: int) -> Optional[float]:
        if self.oracle is None or n >= len(self.oracle):
            return None
        return self.oracle[n]


@dataclass
class CellComparison:
    """One published cell (row x state) against both conventions."""
    vbar0: float
    n: int
    published: Optional[float]
    published_text: str
    solver: Dict[Convention, Optional[float]]
    oracle: Dict[Convention, Optional[float]]
    flags: List[str] = field(default_factory=list)

    def abs_deviation(self, convention: Convention) -> Optional[float]:
        value = self.solver[convention]
        if self.published is None or value is None:
            return None
        return abs(value - self.published)

    def rel_deviation(self, convention: Convention) -> Optional[float]:
        deviation = self.abs_deviation(convention)
        if deviation is None:
            return None
        return deviation / abs(self.published)


@dataclass
class RowComparison:
    row: Table1Row
    results: Dict[Convention, WellResult]
    cells: List[CellComparison]
    flags: List[str] = field(default_factory=list)


@dataclass
class ComparisonReport:
    """
    Published Table 1 against both conventions.

    Attributes:
        rows: Per-row results, in table order
        onsets: Computed critical depths per convention, n -> depth
        tolerance: Solver tolerance used
    """
    rows: List[RowComparison]
    onsets: Dict[Convention, Dict[int, float]]
    tolerance: float

    # =========================================================================
    # Summary Statistics
    # =========================================================================

    def rms(self, convention: Convention) -> float:
        """Root-mean-square relative deviation over cells both sides have."""
        deviations = [
            cell.rel_deviation(convention)
            for row in self.rows for cell in row.cells
            if cell.rel_deviation(convention) is not None
        ]
        if not deviations:
            return math.nan
        return math.sqrt(sum(d * d for d in deviations) / len(deviations))

    def count_matches(self, convention: Convention) -> int:
        return sum(len(r.results[convention].solver) == r.row.count for r in self.rows)

    @property
    def best_convention(self) -> Convention:
        return min(Convention, key=lambda c: (math.inf if math.isnan(self.rms(c)) else self.rms(c)))

    def inconsistent_rows(self, convention: Convention) -> List[float]:
        return [r.row.vbar0 for r in self.rows if not r.results[convention].consistent]

    def flagged_cells(self) -> List[CellComparison]:
        return [cell for row in self.rows for cell in row.cells if cell.flags]

    # =========================================================================
    # Documents
    # =========================================================================

    def csv_header(self) -> List[str]:
        header = ["vbar0", "n", "published"]
        for c in Convention:
            header += [f"{c.value}_solver", f"{c.value}_oracle", f"{c.value}_abs_dev", f"{c.value}_rel_dev"]
        return header + ["flags"]

    def csv_rows(self) -> List[List[str]]:
        lines = []
        for row in self.rows:
            for cell in row.cells:
                line = [row.row.raw[0], str(cell.n), cell.published_text]
                for c in Convention:
                    line += [
                        _fmt(cell.solver[c]),
                        _fmt(cell.oracle[c]),
                        _fmt(cell.abs_deviation(c)),
                        _fmt(cell.rel_deviation(c)),
                    ]
                line.append(";".join(cell.flags))
                lines.append(line)
        return lines

    def to_dict(self) -> Dict:
        return {
            "tolerance": self.tolerance,
            "summary": self.summary(),
            "rows": [
                {
                    "vbar0": r.row.vbar0,
                    "published": [r.row.energy(n) for n in range(COLUMNS)],
                    "flags": r.flags,
                    "conventions": {
                        c.value: {
                            "solver": list(res.solver),
                            "oracle": None if res.oracle is None else list(res.oracle),
                            "oracle_error_estimate": res.oracle_error_estimate,
                            "max_disagreement": res.disagreement(),
                            "failure": res.failure,
                        }
                        for c, res in r.results.items()
                    },
                    "cells": [
                        {
                            "n": cell.n,
                            "published": cell.published,
                            "flags": cell.flags,
                            **{
                                c.value: {
                                    "solver": cell.solver[c],
                                    "oracle": cell.oracle[c],
                                    "abs_dev": cell.abs_deviation(c),
                                    "rel_dev": cell.rel_deviation(c),
                                }
                                for c in Convention
                            },
                        }
                        for cell in r.cells
                    ],
                }
                for r in self.rows
            ],
        }

    def summary(self) -> Dict:
        return {
            "best_convention": self.best_convention.value,
            "conventions": {
                c.value: {
                    "rms_rel_deviation": self.rms(c),
                    "count_matches": self.count_matches(c),
                    "rows": len(self.rows),
                    "inconsistent_rows": self.inconsistent_rows(c),
                    "onsets": {
                        str(n): {
                            "computed": depth,
                            "published": PUBLISHED_ONSETS[n],
                            "deviation": depth - PUBLISHED_ONSETS[n],
                        }
                        for n, depth in self.onsets.get(c, {}).items()
                    },
                }
                for c in Convention
            },
            "flagged_cells": len(self.flagged_cells()),
        }

    def summary_lines(self) -> List[str]:
        """Plain-text summary naming the convention with the lower RMS deviation."""
        lines = []
        for c in Convention:
            onsets = ", ".join(
                f"n={n}: {depth:.4f} (published {PUBLISHED_ONSETS[n]})"
                for n, depth in sorted(self.onsets.get(c, {}).items())
            )
            lines.append(
                f"{c.value}: rms relative deviation {self.rms(c):.4%}, "
                f"state counts match {self.count_matches(c)}/{len(self.rows)} rows, "
                f"onsets {onsets or 'not computed'}"
            )
        lines.append(f"lower rms deviation: {self.best_convention.value}")
        return lines

    def render(self, console: Console) -> None:
        table = Table(title="Table 1 comparison")
        table.add_column("convention")
        table.add_column("rms rel. dev.", justify="right")
        table.add_column("count matches", justify="right")
        table.add_column("onset n=1", justify="right")
        table.add_column("onset n=2", justify="right")
        table.add_column("solver/oracle", justify="right")
        for c in Convention:
            onsets = self.onsets.get(c, {})
            bad = self.inconsistent_rows(c)
            table.add_row(
                c.value,
                f"{self.rms(c):.4%}",
                f"{self.count_matches(c)}/{len(self.rows)}",
                f"{onsets[1]:.4f}" if 1 in onsets else "-",
                f"{onsets[2]:.4f}" if 2 in onsets else "-",
                "ok" if not bad else f"{len(bad)} rows off",
            )
        console.print(table)
        console.print(f"lower rms deviation: [bold]{self.best_convention.value}[/bold]")
        flagged = self.flagged_cells()
        if flagged:
            console.print(f"{len(flagged)} flagged cells")


def compare_table1(
    rows: Optional[List[Table1Row]] = None,
    tol: float = 1e-10,
    oracle_config: Optional[OracleConfig] = None,
    run_oracle: bool = True,
) -> ComparisonReport:
    """
    Recompute Table 1 under both conventions.

    Args:
        rows: Rows to compare; defaults to the packaged table
        tol: Solver tolerance
        oracle_config: Oracle settings; by default OracleConfig.for_well per row
        run_oracle: Skip the oracle when False (no consistency columns)

    Returns:
        ComparisonReport. Oracle failures are flagged and logged, never raised.
    """
    rows = load_table1() if rows is None else rows
    jumps = set(slope_jumps(rows))
    compared = []
    for row in rows:
        results = {c: _run_well(row.vbar0, c, tol, oracle_config, run_oracle) for c in Convention}
        compared.append(_compare_row(row, results, jumps))

    onsets = {c: {n: critical_depth(n, tol, c) for n in PUBLISHED_ONSETS} for c in Convention}
    report = ComparisonReport(rows=compared, onsets=onsets, tolerance=tol)

    best = report.best_convention
    for row in report.rows:
        for cell in row.cells:
            deviation = cell.rel_deviation(best)
            if deviation is not None and deviation > DEVIATION_LIMIT:
                cell.flags.append(_tag(Flag.DEVIATION, best))
    for cell in report.flagged_cells():
        logger.debug("vbar0=%r n=%d flagged: %s", cell.vbar0, cell.n, ", ".join(cell.flags))
    return report


def regenerate_table1(
    rows: List[Table1Row],
    convention: Convention,
    tol: float = 1e-10,
) -> List[Tuple[float, List[Optional[float]]]]:
    """Solver values for the table's depths, first three states per row."""
    table = []
    for row in rows:
        energies = solve_spectrum(DimensionlessWell(row.vbar0, convention), tol).energies
        table.append((row.vbar0, [energies[n] if n < len(energies) else None for n in range(COLUMNS)]))
    return table


# =========================================================================
# Internal Helpers
# =========================================================================

def _run_well(
    vbar0: float,
    convention: Convention,
    tol: float,
    oracle_config: Optional[OracleConfig],
    run_oracle: bool,
) -> WellResult:
    well = DimensionlessWell(vbar0, convention)
    spectrum = solve_spectrum(well, tol)
    result = WellResult(convention=convention, solver=spectrum.energies)
    if not run_oracle:
        return result
    try:
        oracle = oracle_spectrum(well, oracle_config or OracleConfig.for_well(well))
    except OracleConvergenceError as exc:
        logger.warning("oracle failed for vbar0=%r (%s): %s", vbar0, convention.value, exc)
        result.failure = str(exc)
        return result
    result.oracle = oracle.eigenvalues
    result.oracle_error_estimate = oracle.achieved_error_estimate
    if not result.consistent:
        logger.warning(
            "solver and oracle disagree by %.3e for vbar0=%r (%s)",
            result.disagreement(), vbar0, convention.value,
        )
    return result


def _compare_row(
    row: Table1Row,
    results: Dict[Convention, WellResult],
    jumps: set,
) -> RowComparison:
    compared = RowComparison(row=row, results=results, cells=[])
    disordered = set(row.ordering_violations())
    if disordered:
        compared.flags.append(_tag(Flag.ORDERING))
    for c, result in results.items():
        if result.failure is not None:
            compared.flags.append(_tag(Flag.ORACLE_FAILURE, c))
        elif not result.consistent:
            compared.flags.append(_tag(Flag.INCONSISTENT, c))
        if len(result.solver) != row.count:
            logger.debug(
                "vbar0=%r (%s): %d states against %d published",
                row.vbar0, c.value, len(result.solver), row.count,
            )

    for n in range(COLUMNS):
        published = row.energy(n)
        solver = {c: r.energy(n) for c, r in results.items()}
        if published is None and all(v is None for v in solver.values()):
            continue
        cell = CellComparison(
            vbar0=row.vbar0,
            n=n,
            published=published,
            published_text=row.text(n),
            solver=solver,
            oracle={c: r.oracle_energy(n) for c, r in results.items()},
        )
        if n in disordered:
            cell.flags.append(_tag(Flag.ORDERING))
        if (row.vbar0, n) in jumps:
            cell.flags.append(_tag(Flag.SLOPE_JUMP))
        for c, result in results.items():
            if published is not None and solver[c] is None:
                cell.flags.append(_tag(Flag.MISSING_STATE, c))
            if published is None and solver[c] is not None:
                cell.flags.append(_tag(Flag.EXTRA_STATE, c))
            if result.failure is not None:
                cell.flags.append(_tag(Flag.ORACLE_FAILURE, c))
            elif result.oracle is not None and _disagree(solver[c], cell.oracle[c]):
                cell.flags.append(_tag(Flag.INCONSISTENT, c))
        compared.cells.append(cell)
    return compared


def _disagree(solver: Optional[float], oracle: Optional[float]) -> bool:
    # A state only one method finds is tolerated while it sits within the limit of 0
    if solver is None and oracle is None:
        return False
    if solver is None or oracle is None:
        return abs(oracle if solver is None else solver) > AGREEMENT_LIMIT
    return abs(solver - oracle) > AGREEMENT_LIMIT


def _fmt(value: Optional[float]) -> str:
    return "" if value is None else repr(value)
