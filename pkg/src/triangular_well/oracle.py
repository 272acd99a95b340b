"""
Finite-difference oracle for the bound-state spectrum.

Discretises -psi'' + Vbar(y) psi on [-L, L] with Dirichlet walls and the
three-point stencil, and counts eigenvalues below a shift with the Sturm
sequence of the shifted tridiagonal matrix. Eigenvalues are isolated by
multisection on those counts, then Richardson-extrapolated over successive
grid halvings (h^2 error model).

Outside the well the matrix has constant coefficients, and the pivot
recurrence q -> a - b/q there is a Mobius map with a closed-form orbit.
For negative shifts the exterior segments are therefore evaluated in O(1)
instead of node by node, which lets L grow like 1/sqrt(|Ebar|) for shallow
states at no cost.

Shares nothing with the Airy path beyond potential_value and the
weak-coupling estimate that seeds the domain size for shallow wells.
"""

from __future__ import annotations
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple
import logging
import math

import numpy as np

from .model import DimensionlessWell, potential_value, weak_coupling_energy

logger = logging.getLogger(__name__)

# Stop multisection once a bracket is this many ulps wide
_ULP_FLOOR = 4.0
_MAX_SWEEPS = 200


class OracleConvergenceError(RuntimeError):
    """The domain size never stabilised the spectrum."""

    def __init__(self, message: str, half_domain: float, history: List[Tuple[float, ...]]):
        self.half_domain = half_domain
        self.history = history
        super().__init__(message)


@dataclass
class OracleConfig:
    """
    Configuration for the finite-difference oracle.

    half_domain is measured in reduced units and must exceed the well edge;
    grid_points is odd so that y = 0 is a node.
    """
    half_domain: float = 8.0        # L
    grid_points: int = 4001         # N on [-L, L], walls included
    refine_levels: int = 3          # Richardson levels (grid halvings + 1)
    bisection_tol: float = 1e-12    # eigenvalue bracket width per level
    samples: int = 31               # multisection samples per bracket and sweep
    max_doublings: int = 6
    stability_tol: float = 1e-9

    def __post_init__(self):
        if not math.isfinite(self.half_domain) or self.half_domain <= 0:
            raise ValueError(f"half_domain must be finite and > 0, got {self.half_domain!r}")
        if self.grid_points < 201 or self.grid_points % 2 == 0:
            raise ValueError(f"grid_points must be odd and >= 201, got {self.grid_points!r}")
        if self.refine_levels < 2:
            raise ValueError(f"refine_levels must be >= 2, got {self.refine_levels!r}")
        if self.samples < 1 or self.bisection_tol <= 0:
            raise ValueError("samples must be >= 1 and bisection_tol > 0")

    @property
    def step(self) -> float:
        return 2.0 * self.half_domain / (self.grid_points - 1)

    @property
    def half_steps(self) -> int:
        """Number of steps from y = 0 to a wall."""
        return (self.grid_points - 1) // 2

    @classmethod
    def for_well(cls, well: DimensionlessWell, **overrides) -> "OracleConfig":
        """Default configuration; deep wells (Vbar0 > 100) use L = 4."""
        overrides.setdefault("half_domain", 4.0 if well.vbar0 > 100 else 8.0)
        return cls(**overrides)


@dataclass(frozen=True)
class OracleSpectrum:
    """
    Negative eigenvalues of the discretised operator.

    Attributes:
        eigenvalues: Richardson-extrapolated eigenvalues, increasing, all < 0
        achieved_error_estimate: Size of the last extrapolation increment
        half_domain: L after domain stabilisation
        step: Coarsest grid step
        levels: Raw eigenvalues per grid level, coarsest first
    """
    eigenvalues: Tuple[float, ...]
    achieved_error_estimate: float
    half_domain: float
    step: float
    levels: Tuple[Tuple[float, ...], ...] = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.eigenvalues)

    def to_dict(self) -> Dict:
        return {
            "eigenvalues": list(self.eigenvalues),
            "achieved_error_estimate": self.achieved_error_estimate,
            "half_domain": self.half_domain,
            "step": self.step,
        }


class FiniteDifferenceOperator:
    """
    Three-point Dirichlet discretisation of -psi'' + Vbar psi.

    Unknowns sit at y = k h for |k| < half_steps; the walls at +-half_steps h
    carry psi = 0. ``well=None`` gives the empty box.

    Usage:
        op = FiniteDifferenceOperator(DimensionlessWell(5.0), half_steps=2000, step=0.004)
        op.sturm_counts([-1.0, -1e-9])     # eigenvalues below each shift
        op.eigenvalues(lower=-5.0, upper=-1e-12)
    """

    def __init__(self, well: Optional[DimensionlessWell], half_steps: int, step: float):
        if half_steps < 2:
            raise ValueError(f"half_steps must be >= 2, got {half_steps!r}")
        self.well = well
        self.half_steps = int(half_steps)
        self.step = float(step)
        self.coupling = 1.0 / self.step ** 4        # squared off-diagonal
        self.pivmin = np.finfo(float).tiny * max(1.0, self.coupling)
        self._diagonal_base = 2.0 / self.step ** 2
        self._well_nodes = self._locate_well()

    @property
    def half_domain(self) -> float:
        return self.half_steps * self.step

    @property
    def size(self) -> int:
        return 2 * self.half_steps - 1

    # =========================================================================
    # Structure
    # =========================================================================

    def _locate_well(self) -> Optional[Tuple[int, int, np.ndarray]]:
        """(first k, last k, potential) for the nodes with nonzero potential."""
        if self.well is None:
            return None
        reach = min(self.half_steps - 1, math.ceil(self.well.edge / self.step) + 1)
        k = np.arange(-reach, reach + 1)
        v = potential_value(self.well, k * self.step)
        inside = np.flatnonzero(v != 0.0)
        if inside.size == 0:
            return None
        return int(k[inside[0]]), int(k[inside[-1]]), v[inside[0]:inside[-1] + 1]

    def diagonal(self) -> np.ndarray:
        """Full diagonal, wall to wall (explicit path and inspection)."""
        m = self.half_steps - 1
        y = np.arange(-m, m + 1) * self.step
        v = np.zeros_like(y) if self.well is None else potential_value(self.well, y)
        return self._diagonal_base + v

    # =========================================================================
    # Sturm Counts
    # =========================================================================

    def sturm_counts(self, shifts) -> np.ndarray:
        """
        Number of eigenvalues strictly below each shift.

        Vectorised over shifts. Negative shifts on a well take the
        closed-form exterior path; anything else sweeps every node.
        """
        shifts = np.atleast_1d(np.asarray(shifts, dtype=float))
        if self._well_nodes is not None and np.all(shifts < 0):
            return self._counts_closed_exterior(shifts)
        return self._counts_explicit(shifts)

    def _counts_explicit(self, shifts: np.ndarray) -> np.ndarray:
        counts, _ = self._sweep(self.diagonal(), shifts)
        return counts

    def _counts_closed_exterior(self, shifts: np.ndarray) -> np.ndarray:
        first, last, v = self._well_nodes
        m = self.half_steps - 1
        n_left = first + m              # free nodes between the left wall and the well
        n_right = m - last

        kappa2 = -shifts
        a = self._diagonal_base + kappa2
        s = np.sqrt(kappa2 * (4.0 / self.step ** 2 + kappa2))
        q_plus = 0.5 * (a + s)          # attracting fixed point of q -> a - b/q
        q_minus = self.coupling / q_plus
        log_rho = np.log1p(-s / q_plus)  # log(q_minus / q_plus) < 0

        # Left segment starts at the wall (q = a) and never produces a negative pivot
        if n_left > 0:
            rho_n = np.exp(n_left * log_rho)
            q = (q_plus - rho_n * q_minus) / (-np.expm1(n_left * log_rho))
            counts, q = self._sweep(self._diagonal_base + v, shifts, q)
        else:
            counts, q = self._sweep(self._diagonal_base + v, shifts)

        # Right segment: the orbit u_n = rho^n u_0 of (q - q+)/(q - q-) gives
        # q_n < 0 exactly while 1 < u_n < 1/rho
        with np.errstate(divide="ignore", invalid="ignore"):
            u0 = (q - q_plus) / (q - q_minus)
            steps = np.log(u0) / -log_rho
        hit = (u0 > 1.0) & (np.floor(steps) >= 1) & (np.floor(steps) <= n_right)
        return counts + hit.astype(np.int64)

    def _sweep(
        self,
        diagonal: np.ndarray,
        shifts: np.ndarray,
        q: Optional[np.ndarray] = None,
    ) -> Tuple[np.ndarray, np.ndarray]:
        """LDL^T pivots of (T - shift) along ``diagonal``, continuing from pivot ``q``."""
        counts = np.zeros(shifts.shape, dtype=np.int64)
        for d in diagonal:
            q = d - shifts if q is None else d - shifts - self.coupling / q
            # Zero pivots become +-pivmin with the sign kept
            q = np.where(np.abs(q) < self.pivmin, np.copysign(self.pivmin, q), q)
            counts += q < 0
        return counts, q

    # =========================================================================
    # Eigenvalues
    # =========================================================================

    def eigenvalues(
        self,
        lower: float,
        upper: float,
        tol: float = 1e-12,
        samples: int = 31,
        limit: Optional[int] = None,
    ) -> np.ndarray:
        """
        Eigenvalues in [lower, upper) by Sturm multisection.

        Every index is searched at once; each sweep places ``samples``
        shifts in each bracket.

        Args:
            lower: Lower bound (must not exceed the smallest wanted eigenvalue)
            upper: Upper bound
            tol: Final bracket width
            samples: Shifts per bracket per sweep
            limit: Return at most this many, lowest first
        """
        below_lower, below_upper = self.sturm_counts([lower, upper])
        first, stop = int(below_lower), int(below_upper)
        if limit is not None:
            stop = min(stop, first + limit)
        index = np.arange(first, stop)
        if index.size == 0:
            return np.empty(0)

        lo = np.full(index.size, float(lower))
        hi = np.full(index.size, float(upper))
        fractions = np.arange(1, samples + 1) / (samples + 1)
        rows = np.arange(index.size)

        for _ in range(_MAX_SWEEPS):
            width = hi - lo
            floor = _ULP_FLOOR * np.spacing(np.maximum(np.abs(lo), np.abs(hi)))
            if np.all(width <= np.maximum(tol, floor)):
                break
            shifts = lo[:, None] + width[:, None] * fractions
            counts = self.sturm_counts(shifts.ravel()).reshape(shifts.shape)
            above = counts >= (index + 1)[:, None]
            first_above = np.where(above.any(axis=1), above.argmax(axis=1), samples)
            lo = np.where(first_above > 0, shifts[rows, np.maximum(first_above - 1, 0)], lo)
            hi = np.where(first_above < samples, shifts[rows, np.minimum(first_above, samples - 1)], hi)
        return 0.5 * (lo + hi)


# =========================================================================
# Public Operations
# =========================================================================

def sturm_count(well: Optional[DimensionlessWell], config: OracleConfig, ebar: float) -> int:
    """
    Eigenvalues of the discrete operator strictly below ebar.

    ``well=None`` counts for the empty box.
    """
    _check_domain(well, config)
    op = FiniteDifferenceOperator(well, config.half_steps, config.step)
    return int(op.sturm_counts(ebar)[0])


def box_spectrum(config: OracleConfig, count: int) -> np.ndarray:
    """
    Lowest ``count`` eigenvalues of the discrete operator with Vbar = 0.

    The exact discrete values are (4/h^2) sin^2(k pi h / (4 L)).
    """
    op = FiniteDifferenceOperator(None, config.half_steps, config.step)
    return op.eigenvalues(
        lower=0.0,
        upper=4.0 / config.step ** 2,
        tol=config.bisection_tol,
        samples=config.samples,
        limit=count,
    )


def oracle_spectrum(
    well: DimensionlessWell,
    config: Optional[OracleConfig] = None,
) -> OracleSpectrum:
    """
    Negative eigenvalues of the well, extrapolated to h -> 0.

    The domain is first widened to cover the shallowest state's decay length
    and then doubled at the coarse step until the deepest and shallowest
    eigenvalues stop moving; Richardson extrapolation then runs over
    ``refine_levels`` halvings of the step on that domain.

    Raises:
        ValueError: half_domain does not exceed the well edge
        OracleConvergenceError: no stable domain within max_doublings
    """
    config = config or OracleConfig.for_well(well)
    _check_domain(well, config)
    h = config.step
    half_steps = config.half_steps

    coarse = _negative_eigenvalues(well, half_steps, h, config)
    history = [tuple(coarse)]
    for _ in range(config.max_doublings):
        cover = _covering_steps(well, coarse, h)
        if cover > half_steps:
            half_steps = cover
            logger.debug("widening domain to L=%r for the shallowest state", half_steps * h)
            coarse = _negative_eigenvalues(well, half_steps, h, config)
            history.append(tuple(coarse))
        wider = _negative_eigenvalues(well, 2 * half_steps, h, config)
        history.append(tuple(wider))
        # A 1-d attractive well always binds, so an empty spectrum is never stable
        if coarse.size and _stable(coarse, wider, config.stability_tol):
            break
        half_steps *= 2
        logger.debug("doubling domain to L=%r", half_steps * h)
        coarse = wider
    else:
        raise OracleConvergenceError(
            f"spectrum of vbar0={well.vbar0!r} ({well.convention.value}) not stable "
            f"after {config.max_doublings} domain doublings",
            half_domain=half_steps * h,
            history=history,
        )

    levels = [coarse]
    for level in range(1, config.refine_levels):
        scale = 2 ** level
        levels.append(_negative_eigenvalues(well, half_steps * scale, h / scale, config))

    count = min(len(v) for v in levels)
    if any(len(v) != count for v in levels):
        logger.warning(
            "state count changes with grid level for vbar0=%r: %s",
            well.vbar0, [len(v) for v in levels],
        )
    extrapolated, error = richardson([v[:count] for v in levels])
    return OracleSpectrum(
        eigenvalues=tuple(float(e) for e in extrapolated),
        achieved_error_estimate=error,
        half_domain=half_steps * h,
        step=h,
        levels=tuple(tuple(float(e) for e in v) for v in levels),
    )


def richardson(levels: List[np.ndarray]) -> Tuple[np.ndarray, float]:
    """
    Romberg table for values on grids h, h/2, h/4, ... with even-power errors.

    Returns:
        (extrapolated values, max |last increment|)
    """
    table = [np.asarray(levels[0], dtype=float)]
    increment = np.zeros_like(table[0])
    for i in range(1, len(levels)):
        row = [np.asarray(levels[i], dtype=float)]
        for j in range(1, i + 1):
            increment = (row[j - 1] - table[j - 1]) / (4 ** j - 1)
            row.append(row[j - 1] + increment)
        table = row
        logger.debug("richardson row %d: %s", i, table[-1])
    error = float(np.max(np.abs(increment))) if increment.size else 0.0
    return table[-1], error


# =========================================================================
# Internal Helpers
# =========================================================================

def _check_domain(well: Optional[DimensionlessWell], config: OracleConfig) -> None:
    if well is not None and config.half_domain <= well.edge:
        raise ValueError(
            f"half_domain={config.half_domain!r} must exceed the well edge {well.edge!r}"
        )


def _negative_eigenvalues(
    well: DimensionlessWell,
    half_steps: int,
    step: float,
    config: OracleConfig,
) -> np.ndarray:
    op = FiniteDifferenceOperator(well, half_steps, step)
    # Gershgorin: nothing lies below min(Vbar) = -Vbar0
    return op.eigenvalues(
        lower=-well.vbar0 - 1.0,
        upper=-1e-12,
        tol=config.bisection_tol,
        samples=config.samples,
    )


def _covering_steps(well: DimensionlessWell, eigenvalues: np.ndarray, step: float) -> int:
    """Half steps reaching 12 decay lengths of the shallowest state past the edge."""
    shallow = eigenvalues[-1] if eigenvalues.size else weak_coupling_energy(well)
    return math.ceil((well.edge + 12.0 / math.sqrt(-shallow)) / step)


def _stable(old: np.ndarray, new: np.ndarray, tol: float) -> bool:
    if old.size != new.size:
        return False
    return abs(old[0] - new[0]) < tol and abs(old[-1] - new[-1]) < tol
