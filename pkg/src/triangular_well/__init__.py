"""
Triangular Well - Bound states of a finite-range linear potential well.

This package provides:
- Range-checked Airy functions (plain and exponent-scaled)
- Parity-split Airy matching determinants and a complete spectrum solver
- Critical depths at which new states bind
- An independent finite-difference oracle (Sturm bisection + Richardson)
- Normalised piecewise eigenfunctions
- Comparison of the published Table 1 against both geometry conventions

Quick start:
    from triangular_well import DimensionlessWell, solve_spectrum, build_state

    well = DimensionlessWell(25.0)
    spectrum = solve_spectrum(well)
    print(spectrum.energies)

    psi = build_state(well, spectrum.states[0])
"""

__version__ = "0.1.0"

from .airy import (
    AiryQuad,
    ScaledAiryQuad,
    AiryRangeError,
    airy_eval,
    airy_eval_scaled,
    airy_eval_array,
    airy_scaled_array,
    MAX_ARGUMENT,
    WRONSKIAN,
)

from .model import (
    Convention,
    PhysicalWell,
    DimensionlessWell,
    MatchPoints,
    WellDomainError,
    to_dimensionless,
    to_physical,
    potential_value,
    match_points,
    weak_coupling_energy,
)

from .eigen import (
    Parity,
    EigenState,
    Spectrum,
    RatioPQ,
    SolverConfig,
    Eq26Check,
    Eq26Status,
    BracketRefinementError,
    SpectrumError,
    Eq26PoleError,
    residual_even,
    residual_odd,
    residual_eq26,
    ratios_pq,
    threshold_residual,
    threshold_count,
    solve_spectrum,
    critical_depth,
    eq26_diagnostics,
)

from .oracle import (
    OracleConfig,
    OracleSpectrum,
    OracleConvergenceError,
    FiniteDifferenceOperator,
    sturm_count,
    oracle_spectrum,
    box_spectrum,
)

from .wavefn import (
    PiecewiseState,
    NotAnEigenstateError,
    build_state,
    evaluate,
    derivative,
    count_nodes,
    overlap,
    sample,
    matching_determinant,
)

from .comparison import (
    Table1Row,
    ComparisonReport,
    Table1IntegrityError,
    Flag,
    load_table1,
    compare_table1,
)

__all__ = [
    # Airy functions
    "AiryQuad",
    "ScaledAiryQuad",
    "AiryRangeError",
    "airy_eval",
    "airy_eval_scaled",
    "airy_eval_array",
    "airy_scaled_array",
    "MAX_ARGUMENT",
    "WRONSKIAN",
    # Wells
    "Convention",
    "PhysicalWell",
    "DimensionlessWell",
    "MatchPoints",
    "WellDomainError",
    "to_dimensionless",
    "to_physical",
    "potential_value",
    "match_points",
    "weak_coupling_energy",
    # Eigenvalues
    "Parity",
    "EigenState",
    "Spectrum",
    "RatioPQ",
    "SolverConfig",
    "Eq26Check",
    "Eq26Status",
    "BracketRefinementError",
    "SpectrumError",
    "Eq26PoleError",
    "residual_even",
    "residual_odd",
    "residual_eq26",
    "ratios_pq",
    "threshold_residual",
    "threshold_count",
    "solve_spectrum",
    "critical_depth",
    "eq26_diagnostics",
    # Finite-difference oracle
    "OracleConfig",
    "OracleSpectrum",
    "OracleConvergenceError",
    "FiniteDifferenceOperator",
    "sturm_count",
    "oracle_spectrum",
    "box_spectrum",
    # Eigenfunctions
    "PiecewiseState",
    "NotAnEigenstateError",
    "build_state",
    "evaluate",
    "derivative",
    "count_nodes",
    "overlap",
    "sample",
    "matching_determinant",
    # Table 1
    "Table1Row",
    "ComparisonReport",
    "Table1IntegrityError",
    "Flag",
    "load_table1",
    "compare_table1",
]
