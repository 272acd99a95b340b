"""
Adjudicate the published Table 1 against both geometry conventions.

Recomputes every row with the Airy solver and the finite-difference oracle,
records the P/Q equation diagnostics at each accepted root, and writes one JSON
report with per-cell deviations, flags and the measured onset depths.

Usage:
    python -m experiments.table1_adjudication \
        --output reports/table1_adjudication.json
"""

import sys
import json
import time
import argparse
from pathlib import Path
from typing import Dict

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))
from triangular_well import Convention, DimensionlessWell, compare_table1, eq26_diagnostics, solve_spectrum
from triangular_well.comparison import slope_jumps


def run_adjudication(tol: float, run_oracle: bool) -> Dict:
    """Compare the table and collect the printed-equation diagnostics."""
    start = time.perf_counter()
    report = compare_table1(tol=tol, run_oracle=run_oracle)
    elapsed = time.perf_counter() - start

    diagnostics = {}
    for convention in Convention:
        entries = []
        for row in report.rows:
            spectrum = solve_spectrum(DimensionlessWell(row.row.vbar0, convention), tol)
            entries.extend(
                {"vbar0": row.row.vbar0, **check.as_dict()}
                for check in eq26_diagnostics(spectrum)
            )
        diagnostics[convention.value] = entries

    payload = report.to_dict()
    payload["slope_jumps"] = [{"vbar0": v, "n": n} for v, n in slope_jumps([r.row for r in report.rows])]
    payload["eq26_diagnostics"] = diagnostics
    payload["elapsed_s"] = elapsed
    return payload


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--output", default="reports/table1_adjudication.json")
    parser.add_argument("--tol", type=float, default=1e-10)
    parser.add_argument("--no-oracle", action="store_true")
    args = parser.parse_args()

    payload = run_adjudication(args.tol, not args.no_oracle)
    summary = payload["summary"]

    print("\n=== Table 1 Adjudication ===")
    for name, stats in summary["conventions"].items():
        print(
            f"{name}: rms {stats['rms_rel_deviation']:.3%}, "
            f"counts match {stats['count_matches']}/{stats['rows']}, "
            f"inconsistent rows {len(stats['inconsistent_rows'])}"
        )
    print(f"Lower rms deviation: {summary['best_convention']}")
    print(f"Flagged cells: {summary['flagged_cells']}")
    print(f"Elapsed: {payload['elapsed_s']:.1f}s")

    output_path = Path(args.output)
    output_path.parent.mkdir(parents=True, exist_ok=True)

    with open(output_path, 'w') as f:
        json.dump(payload, f, indent=2)

    print(f"Results saved to {output_path}")


if __name__ == "__main__":
    main()
