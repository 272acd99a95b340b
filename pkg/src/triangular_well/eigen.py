"""
Bound-state eigenvalues from the Airy matching conditions.

The potential is even, so every bound state is either even or odd and the
matching problem splits into two scalar determinants. Both are written in
the decay rate beta = sqrt(-Ebar) with exponent-scaled Airy values, and each
is divided by the root-sum-square of its two terms so it stays O(1):

    D_even = beta [Bi'(w0) Ai(w2) - Ai'(w0) Bi(w2)]
             + A^(1/3) [Bi'(w0) Ai'(w2) - Ai'(w0) Bi'(w2)]
    D_odd  = beta [Bi(w0) Ai(w2) - Ai(w0) Bi(w2)]
             + A^(1/3) [Bi(w0) Ai'(w2) - Ai(w0) Bi'(w2)]

Roots are bracketed on a uniform beta grid, refined with Brent's method and
checked against the state count implied by the critical depths.

Usage:
    from triangular_well import DimensionlessWell, solve_spectrum

    spectrum = solve_spectrum(DimensionlessWell(25.0))
    for state in spectrum.states:
        print(state.n, state.parity.value, state.ebar)
"""

from __future__ import annotations
from enum import Enum
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple
import logging
import math

import numpy as np
from scipy import optimize

from .airy import AiryRangeError, airy_eval, airy_eval_array, airy_scaled_array, scaling_exponent
from .model import Convention, DimensionlessWell, WellDomainError, airy_arguments, match_points

logger = logging.getLogger(__name__)

MIN_TOL = 1e-14
MAX_TOL = 1e-6

# |denominator| below which the P/Q equation is treated as sitting on a pole
POLE_THRESHOLD = 1e-300

# Threshold scan used by critical_depth and threshold_count
_THRESHOLD_STEP = 0.0025

_AIRY_AT_ZERO = airy_eval(0.0)


class Parity(str, Enum):
    """Symmetry class of a bound state."""
    EVEN = "even"
    ODD = "odd"

    @classmethod
    def for_index(cls, n: int) -> "Parity":
        """Ground state is even; parity alternates with the index."""
        return cls.EVEN if n % 2 == 0 else cls.ODD


class Eq26Status(str, Enum):
    CONSISTENT = "consistent"
    DISCREPANCY = "discrepancy"
    POLE = "pole"
    OVERFLOW = "overflow"


# =========================================================================
# Errors
# =========================================================================

class BracketRefinementError(RuntimeError):
    """Root refinement did not converge inside a sign-change bracket."""

    def __init__(self, bracket: Tuple[float, float], parity: Parity, iterations: int):
        self.bracket = bracket
        self.parity = parity
        self.iterations = iterations
        super().__init__(
            f"{parity.value} root not refined after {iterations} iterations "
            f"in ebar bracket [{bracket[0]!r}, {bracket[1]!r}]"
        )


class SpectrumError(RuntimeError):
    """Brackets found by the scan disagree with the expected state count or ordering."""


class Eq26PoleError(ArithmeticError):
    """A denominator of the P/Q equation vanishes at the requested energy."""

    def __init__(self, ebar: float, side: str, denominator: float):
        self.ebar = ebar
        self.side = side
        self.denominator = denominator
        super().__init__(f"P/Q equation {side} denominator is {denominator!r} at ebar={ebar!r}")


# =========================================================================
# Data Types
# =========================================================================

@dataclass
class SolverConfig:
    """Configuration for solve_spectrum."""
    tol: float = 1e-10              # target |delta Ebar| per root
    grid_factor: float = 8.0        # scan points per sqrt(Vbar0)
    min_grid: int = 64              # scan points at the least
    max_refinements: int = 4        # grid doublings when the count check fails
    max_iterations: int = 200       # Brent iterations per bracket

    def __post_init__(self):
        if not MIN_TOL <= self.tol <= MAX_TOL:
            raise ValueError(f"tol must lie in [{MIN_TOL:g}, {MAX_TOL:g}], got {self.tol!r}")
        if self.min_grid < 2 or self.grid_factor <= 0:
            raise ValueError("scan grid needs min_grid >= 2 and grid_factor > 0")
        if self.max_refinements < 0 or self.max_iterations < 1:
            raise ValueError("max_refinements must be >= 0 and max_iterations >= 1")

    def grid_size(self, well: DimensionlessWell) -> int:
        return max(self.min_grid, math.ceil(self.grid_factor * math.sqrt(well.vbar0)))


@dataclass(frozen=True)
class EigenState:
    """
    One bound state.

    Attributes:
        n: Index, 0 for the ground state
        ebar: Dimensionless energy, strictly inside (-Vbar0, 0)
        parity: EVEN for even n, ODD for odd n
        residual_abs: |normalised determinant| at the accepted root
    """
    n: int
    ebar: float
    parity: Parity
    residual_abs: float

    @property
    def beta(self) -> float:
        return math.sqrt(-self.ebar)

    def as_dict(self) -> Dict:
        return {
            "n": self.n,
            "parity": self.parity.value,
            "ebar": self.ebar,
            "residual": self.residual_abs,
        }


@dataclass(frozen=True)
class Spectrum:
    """All bound states of one well, ordered by energy."""
    well: DimensionlessWell
    states: Tuple[EigenState, ...]
    bracket_grid_size: int
    tolerance: float

    def __post_init__(self):
        if isinstance(self.states, list):
            object.__setattr__(self, "states", tuple(self.states))

    def __len__(self) -> int:
        return len(self.states)

    @property
    def energies(self) -> Tuple[float, ...]:
        return tuple(s.ebar for s in self.states)

    def state(self, n: int) -> EigenState:
        """
        Look up a state by index.

        Raises:
            IndexError: if the well has no state n
        """
        if not 0 <= n < len(self.states):
            count = len(self.states)
            raise IndexError(f"state {n} requested, {count} state{'s' if count != 1 else ''} available")
        return self.states[n]

    def to_dict(self) -> Dict:
        return {
            "vbar0": self.well.vbar0,
            "convention": self.well.convention.value,
            "tolerance": self.tolerance,
            "bracket_grid_size": self.bracket_grid_size,
            "states": [s.as_dict() for s in self.states],
        }


@dataclass(frozen=True)
class RatioPQ:
    """P = C2/C3 and Q = C4/C5 from the matching at -edge and +edge."""
    p: float
    q: float


@dataclass(frozen=True)
class Eq26Check:
    """P/Q equation evaluated at one accepted root."""
    n: int
    ebar: float
    parity: Parity
    residual: Optional[float]
    status: Eq26Status
    detail: str = ""

    def as_dict(self) -> Dict:
        return {
            "n": self.n,
            "ebar": self.ebar,
            "parity": self.parity.value,
            "residual": self.residual,
            "status": self.status.value,
            "detail": self.detail,
        }


# =========================================================================
# Residuals
# =========================================================================

def parity_determinant(well: DimensionlessWell, beta, parity: Parity):
    """
    Normalised parity determinant as a function of beta in [0, sqrt(Vbar0)].

    Vectorised over beta. At beta = 0 this is the threshold limit form.
    Returns 0 where both terms vanish.
    """
    beta = np.asarray(beta, dtype=float)
    cbrt_a, w0, w2 = airy_arguments(well, beta)
    ai0, aip0, bi0, bip0 = airy_eval_array(w0)
    ai2, aip2, bi2, bip2 = airy_scaled_array(w2)
    # Ai-family terms at w2 carry e^(-zeta2) twice after dividing by e^(zeta2)
    damp = np.exp(-2.0 * scaling_exponent(w2))
    if parity is Parity.EVEN:
        grow, decay = bip0, aip0
    else:
        grow, decay = bi0, ai0
    value_term = beta * (grow * ai2 * damp - decay * bi2)
    slope_term = cbrt_a * (grow * aip2 * damp - decay * bip2)
    value = _normalise(value_term, slope_term)
    return float(value) if value.ndim == 0 else value


def residual_even(well: DimensionlessWell, ebar: float) -> float:
    """
    Normalised even-parity determinant at ebar.

    Raises:
        WellDomainError: unless -Vbar0 < ebar < 0
    """
    return parity_determinant(well, _beta_of(well, ebar), Parity.EVEN)


def residual_odd(well: DimensionlessWell, ebar: float) -> float:
    """
    Normalised odd-parity determinant at ebar.

    Raises:
        WellDomainError: unless -Vbar0 < ebar < 0
    """
    return parity_determinant(well, _beta_of(well, ebar), Parity.ODD)


def ratios_pq(well: DimensionlessWell, ebar: float) -> RatioPQ:
    """
    P and Q as printed, from the edge matching at -edge (w1) and +edge (-w2).

    Either ratio is +-inf when its denominator vanishes.
    """
    mp = match_points(well, ebar)
    b, c = mp.beta, mp.cbrt_a
    left = airy_eval(mp.w1)
    right = airy_eval(-mp.w2)
    p = _ratio(b * left.bi - c * left.bi_prime, c * left.ai_prime - b * left.ai)
    q = _ratio(-(b * right.bi + c * right.bi_prime), b * right.ai + c * right.ai_prime)
    return RatioPQ(p=p, q=q)


def residual_eq26(well: DimensionlessWell, ebar: float) -> float:
    """
    Left-hand side minus right-hand side of the P/Q equation exactly as printed.

    Diagnostic only; the parity determinants are authoritative.

    Raises:
        WellDomainError: unless -Vbar0 < ebar < 0
        Eq26PoleError: if either denominator is below POLE_THRESHOLD
        AiryRangeError: if an unscaled Airy value overflows (very deep wells)
    """
    mp = match_points(well, ebar)
    b, c = mp.beta, mp.cbrt_a
    at_w1 = airy_eval(mp.w1)
    at_w0 = airy_eval(mp.w0)
    at_neg_w2 = airy_eval(-mp.w2)
    at_neg_w0 = airy_eval(-mp.w0)

    left_bi = b * at_w1.bi - c * at_w1.bi_prime
    left_ai = c * at_w1.ai_prime - b * at_w1.ai
    left_num = left_bi * at_w0.ai_prime + left_ai * at_w0.bi_prime
    left_den = left_bi * at_w0.ai + left_ai * at_w0.bi

    right_bi = b * at_neg_w2.bi + c * at_neg_w2.bi_prime
    right_ai = c * at_neg_w2.ai_prime + b * at_neg_w2.ai
    right_num = right_bi * at_neg_w0.ai_prime - right_ai * at_neg_w0.bi_prime
    right_den = right_bi * at_neg_w0.ai - right_ai * at_neg_w0.bi

    if abs(left_den) < POLE_THRESHOLD:
        raise Eq26PoleError(ebar, "left", left_den)
    if abs(right_den) < POLE_THRESHOLD:
        raise Eq26PoleError(ebar, "right", right_den)
    return left_num / left_den - right_num / right_den


def threshold_residual(parity: Parity, s):
    """
    beta -> 0 limit of the parity determinant, as a function of s = -w0.

    even: Bi'(-s) Ai'(0) - Ai'(-s) Bi'(0)
    odd:  Bi(-s) Ai'(0) - Ai(-s) Bi'(0)

    A zero at s > 0 marks a well whose threshold_argument equals s as the
    critical depth for a new state of that parity. Vectorised over s.
    """
    s = np.asarray(s, dtype=float)
    ai, aip, bi, bip = airy_eval_array(-s)
    zero = _AIRY_AT_ZERO
    if parity is Parity.EVEN:
        value = bip * zero.ai_prime - aip * zero.bi_prime
    else:
        value = bi * zero.ai_prime - ai * zero.bi_prime
    return float(value) if value.ndim == 0 else value


def threshold_count(well: DimensionlessWell) -> int:
    """
    Number of bound states of the well.

    One even state always exists; every positive threshold zero below the
    well's threshold_argument adds one more.
    """
    s_max = well.threshold_argument
    points = 256 + math.ceil(s_max / _THRESHOLD_STEP)
    s = np.linspace(s_max / points, s_max, points)
    count = 1
    for parity in Parity:
        count += len(_sign_changes(threshold_residual(parity, s)))
    return count


# =========================================================================
# Spectrum
# =========================================================================

def solve_spectrum(
    well: DimensionlessWell,
    tol: float = 1e-10,
    config: Optional[SolverConfig] = None,
) -> Spectrum:
    """
    All bound states of a well.

    Args:
        well: Well to solve
        tol: Target |delta Ebar| per root, within [1e-14, 1e-6]
        config: Scan and refinement settings (its tol wins when given)

    Returns:
        Spectrum ordered by energy, parities alternating from EVEN

    Raises:
        ValueError: tol out of range
        BracketRefinementError: Brent's method failed inside a bracket
        SpectrumError: count or parity ordering still wrong after the last grid doubling
    """
    config = config or SolverConfig(tol=tol)
    expected = threshold_count(well)
    beta_max = math.sqrt(well.vbar0)
    grid = config.grid_size(well)

    for attempt in range(config.max_refinements + 1):
        beta = np.linspace(0.0, beta_max, grid)
        roots: List[Tuple[float, Parity]] = []
        for parity in Parity:
            values = parity_determinant(well, beta, parity)
            for i in _sign_changes(values):
                root = _refine(well, parity, beta[i], beta[i + 1], config)
                if root > 0.0:
                    roots.append((root, parity))
                else:
                    logger.debug("dropping %s root at threshold (beta=%r)", parity.value, root)

        # Most negative energy first
        roots.sort(key=lambda item: -item[0])
        ordered = all(p is Parity.for_index(n) for n, (_, p) in enumerate(roots))
        if len(roots) == expected and ordered:
            break
        logger.debug(
            "scan with %d points found %d states (expected %d, ordered=%s); doubling grid",
            grid, len(roots), expected, ordered,
        )
        grid *= 2
    else:
        raise SpectrumError(
            f"found {len(roots)} states for vbar0={well.vbar0!r} "
            f"({well.convention.value}), threshold count is {expected}"
        )

    states = []
    for n, (root, parity) in enumerate(roots):
        states.append(EigenState(
            n=n,
            ebar=-root * root,
            parity=parity,
            residual_abs=abs(parity_determinant(well, root, parity)),
        ))
    return Spectrum(well=well, states=tuple(states), bracket_grid_size=grid, tolerance=config.tol)


def bracket_count(well: DimensionlessWell, parity: Parity, grid: Optional[int] = None) -> int:
    """Sign-change brackets of one parity determinant on the default scan grid."""
    grid = grid or SolverConfig().grid_size(well)
    beta = np.linspace(0.0, math.sqrt(well.vbar0), grid)
    return len(_sign_changes(parity_determinant(well, beta, parity)))


def critical_depth(
    n: int,
    tol: float = 1e-10,
    convention: Convention = Convention.EQ1,
) -> float:
    """
    Depth at which state n first binds.

    Finds the bracket of the relevant threshold zero in s = edge A^(1/3) and
    bisects in Vbar0 = s^3 / edge^2.

    Args:
        n: Excited-state index, 1 <= n <= 8
        tol: |delta Vbar0| target
        convention: Geometry convention

    Raises:
        ValueError: n out of range
    """
    if not 1 <= n <= 8:
        raise ValueError(f"n must lie in [1, 8], got {n!r}")
    convention = Convention(convention)
    edge = convention.edge
    parity = Parity.for_index(n)
    # n = 1, 2 -> first zero of their parity; n = 3, 4 -> second; ...
    which = (n + 1) // 2

    s = np.arange(_THRESHOLD_STEP, 20.0, _THRESHOLD_STEP)
    changes = _sign_changes(threshold_residual(parity, s))
    i = changes[which - 1]

    def depth(s_value: float) -> float:
        return s_value ** 3 / edge ** 2

    def condition(vbar0: float) -> float:
        return threshold_residual(parity, edge * (vbar0 / edge) ** (1.0 / 3.0))

    root = optimize.bisect(condition, depth(s[i]), depth(s[i + 1]), xtol=tol, maxiter=200)
    logger.debug("critical depth n=%d (%s): %r", n, convention.value, root)
    return float(root)


def eq26_diagnostics(spectrum: Spectrum, threshold: float = 1e-6) -> List[Eq26Check]:
    """
    Evaluate the P/Q equation as printed at every accepted root.

    Never raises; each pole, overflow or disagreement becomes an entry and a warning.
    """
    checks = []
    for state in spectrum.states:
        try:
            value = residual_eq26(spectrum.well, state.ebar)
        except Eq26PoleError as exc:
            logger.warning("P/Q equation pole at n=%d: %s", state.n, exc)
            checks.append(Eq26Check(state.n, state.ebar, state.parity, None, Eq26Status.POLE, str(exc)))
            continue
        except AiryRangeError as exc:
            logger.warning("P/Q equation not evaluable at n=%d: %s", state.n, exc)
            checks.append(Eq26Check(state.n, state.ebar, state.parity, None, Eq26Status.OVERFLOW, str(exc)))
            continue

        if math.isfinite(value) and abs(value) <= threshold:
            status, detail = Eq26Status.CONSISTENT, ""
        else:
            status = Eq26Status.DISCREPANCY
            detail = f"|residual| = {abs(value):.3e} exceeds {threshold:g} at a parity root"
            logger.warning(
                "P/Q equation disagrees at n=%d, vbar0=%r (%s): residual %r",
                state.n, spectrum.well.vbar0, spectrum.well.convention.value, value,
            )
        checks.append(Eq26Check(state.n, state.ebar, state.parity, value, status, detail))
    return checks


# =========================================================================
# Internal Helpers
# =========================================================================

def _beta_of(well: DimensionlessWell, ebar: float) -> float:
    if not well.contains(ebar):
        raise WellDomainError(
            f"ebar={ebar!r} outside the bound-state window ({-well.vbar0!r}, 0)"
        )
    return math.sqrt(-ebar)


def _normalise(first: np.ndarray, second: np.ndarray) -> np.ndarray:
    scale = np.hypot(first, second)
    return np.divide(first + second, scale, out=np.zeros_like(scale), where=scale > 0)


def _sign_changes(values: np.ndarray) -> List[int]:
    """Indices i with a sign change between values[i] and values[i+1]; zero counts as positive."""
    negative = np.signbit(values)
    return [int(i) for i in np.flatnonzero(negative[:-1] != negative[1:])]


def _refine(
    well: DimensionlessWell,
    parity: Parity,
    lo: float,
    hi: float,
    config: SolverConfig,
) -> float:
    """Brent refinement in beta; returns the root."""
    root, info = optimize.brentq(
        lambda b: parity_determinant(well, b, parity),
        lo,
        hi,
        xtol=config.tol * 1e-6,
        maxiter=config.max_iterations,
        full_output=True,
        disp=False,
    )
    if not info.converged:
        raise BracketRefinementError((-hi * hi, -lo * lo), parity, info.iterations)
    return float(root)


def _ratio(num: float, den: float) -> float:
    if den == 0.0:
        return math.copysign(math.inf, num) if num != 0.0 else math.nan
    return num / den
