"""
Piecewise eigenfunctions.

Regions (reduced units, e = edge):
    I    y <= -e        psi = C1 e^(beta y)
    II   -e <= y <= 0   psi = C2 Ai(w(|y|)) + C3 Bi(w(|y|))
    III  0 <= y <= e    psi = C4 Ai(w(y)) + C5 Bi(w(y))
    IV   y >= e         psi = C6 e^(-beta y)

with w(y) = A^(1/3) (y - B/A). The interior pair is fixed at one end and the
condition at the other end then holds to root accuracy and is checked:

    zeta_e <= CENTER_BUILD_LIMIT   parity condition at y = 0, edge slope checked
    zeta_e >  CENTER_BUILD_LIMIT   decaying tail at the edge (psi' + beta psi = 0),
                                   parity condition at y = 0 checked

A center-built interior loses about e^(2 zeta_e) ulps at the edge, where the
decaying combination is left over from Ai and Bi terms of size e^(+-zeta_e).

Inside the well the Bi term is carried as C5 = c5_s e^(-2 zeta_e), with
zeta_e = (2/3) w(e)^(3/2), and evaluated from exponent-scaled Airy values,
so no intermediate exceeds the size of psi itself in deep wells.
"""

from __future__ import annotations
from dataclasses import dataclass
from typing import Dict, Tuple, Union
import math

import numpy as np
from scipy import integrate

from .airy import airy_eval, airy_eval_scaled, airy_scaled_array, scaling_exponent
from .eigen import EigenState, Parity
from .model import DimensionlessWell, MatchPoints, match_points, potential_value

# Relative matching mismatch above which an energy is rejected
MISMATCH_LIMIT = 1e-6

# Largest edge exponent zeta_e at which the interior is built from y = 0
CENTER_BUILD_LIMIT = 5.0

QUAD_TOL = 1e-10

# exp() of anything larger overflows a double
_MAX_EXPONENT = 700.0


class NotAnEigenstateError(ValueError):
    """The energy does not satisfy the matching conditions (stale or wrong root)."""

    def __init__(self, ebar: float, mismatch: float, where: str):
        self.ebar = ebar
        self.mismatch = mismatch
        super().__init__(
            f"ebar={ebar!r} is not an eigenvalue: {where} mismatch {mismatch:.3e} "
            f"exceeds {MISMATCH_LIMIT:g}"
        )


@dataclass(frozen=True)
class PiecewiseState:
    """
    A normalised bound state.

    Attributes:
        well: The well it belongs to
        n: State index
        ebar: Energy
        parity: EVEN or ODD
        points: Airy arguments at the matching points
        weights: (C4, c5_s), the interior pair with the Bi weight scaled
        edge_value: psi(edge)
        norm: L2 norm before normalisation
        mismatch: Relative matching mismatch at the end opposite the construction
    """
    well: DimensionlessWell
    n: int
    ebar: float
    parity: Parity
    points: MatchPoints
    weights: Tuple[float, float]
    edge_value: float
    norm: float
    mismatch: float

    @property
    def beta(self) -> float:
        return self.points.beta

    @property
    def edge(self) -> float:
        return self.well.edge

    @property
    def extent(self) -> float:
        """Half-width of the sampling interval, edge + 5/beta."""
        return self.edge + 5.0 / self.beta

    @property
    def coeffs(self) -> Tuple[float, float, float, float, float, float]:
        """
        (C1, ..., C6) in the plain region formulas.

        C5 underflows to 0 and C1, C6 overflow to inf in very deep wells;
        evaluation never goes through them.
        """
        c4, c5_s = self.weights
        zeta_e = scaling_exponent(self.points.w2)
        c5 = c5_s * math.exp(-2.0 * zeta_e)
        grow = self.beta * self.edge
        c6 = self.edge_value * math.exp(grow) if grow < _MAX_EXPONENT else (
            math.copysign(math.inf, self.edge_value)
        )
        mirror = 1.0 if self.parity is Parity.EVEN else -1.0
        return (mirror * c6, mirror * c4, mirror * c5, c4, c5, c6)

    def interior(self, y) -> np.ndarray:
        """psi(y) for 0 <= y <= edge."""
        value, _ = _interior(self.points, self.weights, self._argument(y))
        return value

    def interior_slope(self, y) -> np.ndarray:
        _, slope = _interior(self.points, self.weights, self._argument(y))
        return self.points.cbrt_a * slope

    def _argument(self, y):
        return self.points.w0 + self.points.cbrt_a * np.asarray(y, dtype=float)


def build_state(well: DimensionlessWell, state: EigenState) -> PiecewiseState:
    """
    Reconstruct and normalise the eigenfunction of an accepted root.

    Sign convention: psi(0) > 0 for even states, psi'(0) > 0 for odd states.

    Raises:
        WellDomainError: energy outside the window
        NotAnEigenstateError: matching mismatch above MISMATCH_LIMIT
    """
    mp = match_points(well, state.ebar)
    c, beta = mp.cbrt_a, mp.beta
    even = state.parity is Parity.EVEN
    zeta_e = scaling_exponent(mp.w2)

    if zeta_e <= CENTER_BUILD_LIMIT:
        weights = _center_weights(mp, even, zeta_e)
        value, slope = (float(v) for v in _interior(mp, weights, mp.w2))
        slope *= c
        mismatch = abs(slope + beta * value) / max(abs(slope), beta * abs(value))
        where = "edge slope"
    else:
        weights = _edge_weights(mp)
        value, slope = (float(v) for v in _interior(mp, weights, mp.w0))
        mismatch = abs(slope if even else value) / math.hypot(value, slope)
        where = "center parity"
    if not mismatch <= MISMATCH_LIMIT:
        raise NotAnEigenstateError(state.ebar, mismatch, where)

    value0, slope0 = (float(v) for v in _interior(mp, weights, mp.w0))
    scale = math.hypot(value0, slope0)

    def density(y: float) -> float:
        psi, _ = _interior(mp, weights, mp.w0 + c * y)
        return float(psi) ** 2

    inner, _ = integrate.quad(
        density, 0.0, well.edge, epsabs=QUAD_TOL * scale ** 2, epsrel=QUAD_TOL, limit=200,
    )
    edge_value = float(_interior(mp, weights, mp.w2)[0])
    norm = math.sqrt(2.0 * inner + edge_value ** 2 / beta)

    gauge = value0 if even else slope0
    factor = math.copysign(1.0 / norm, gauge)
    return PiecewiseState(
        well=well,
        n=state.n,
        ebar=state.ebar,
        parity=state.parity,
        points=mp,
        weights=(weights[0] * factor, weights[1] * factor),
        edge_value=edge_value * factor,
        norm=norm,
        mismatch=mismatch,
    )


def evaluate(state: PiecewiseState, y: Union[float, np.ndarray]):
    """
    psi(y), region by region. Returns a float for scalar input.
    """
    y = np.asarray(y, dtype=float)
    distance = np.abs(y)
    mirror = _mirror(state, y)
    inside = distance <= state.edge
    psi = np.empty_like(distance)
    psi[inside] = state.interior(distance[inside])
    psi[~inside] = state.edge_value * np.exp(-state.beta * (distance[~inside] - state.edge))
    psi = mirror * psi
    return float(psi) if psi.ndim == 0 else psi


def derivative(state: PiecewiseState, y: Union[float, np.ndarray]):
    """psi'(y). At y = 0 the even-state slope is exactly 0."""
    y = np.asarray(y, dtype=float)
    distance = np.abs(y)
    inside = distance <= state.edge
    slope = np.empty_like(distance)
    slope[inside] = state.interior_slope(distance[inside])
    slope[~inside] = -state.beta * state.edge_value * np.exp(
        -state.beta * (distance[~inside] - state.edge)
    )
    # d/dy f(|y|) = sign(y) f'(|y|); odd states add another sign(y)
    if state.parity is Parity.EVEN:
        slope = np.sign(y) * slope
    return float(slope) if slope.ndim == 0 else slope


def sample(state: PiecewiseState, grid: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Uniform samples over [-edge - 5/beta, edge + 5/beta].

    The grid is exactly symmetric about 0.
    """
    if grid < 2:
        raise ValueError(f"grid must be >= 2, got {grid!r}")
    y = state.extent * np.linspace(-1.0, 1.0, grid)
    y = 0.5 * (y - y[::-1])
    return y, evaluate(state, y)


def count_nodes(state: PiecewiseState, grid_points: int = 2001) -> int:
    """Strict sign changes on the sampling interval, ignoring |psi| < 1e-12."""
    if grid_points < 1001:
        raise ValueError(f"grid_points must be >= 1001, got {grid_points!r}")
    _, psi = sample(state, grid_points)
    kept = psi[np.abs(psi) >= 1e-12]
    return int(np.count_nonzero(np.signbit(kept[:-1]) != np.signbit(kept[1:])))


def overlap(a: PiecewiseState, b: PiecewiseState) -> float:
    """
    Integral of psi_a psi_b over the real line.

    Quadrature inside the well, closed-form exponential tails.
    """
    if a.well != b.well:
        raise ValueError("states belong to different wells")
    edge = a.edge

    def product(y: float) -> float:
        return evaluate(a, y) * evaluate(b, y)

    inner = 0.0
    for lo, hi in ((-edge, 0.0), (0.0, edge)):
        part, _ = integrate.quad(product, lo, hi, epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=200)
        inner += part
    # Both tails, psi(+-edge) e^(-beta (|y| - edge)) on each side
    sides = 2.0 if a.parity is b.parity else 0.0
    return inner + sides * a.edge_value * b.edge_value / (a.beta + b.beta)


def schrodinger_residual(state: PiecewiseState, y: np.ndarray, h: float = 1e-4) -> np.ndarray:
    """-psi'' + Vbar psi - Ebar psi with a central second difference of step h."""
    y = np.asarray(y, dtype=float)
    psi = evaluate(state, y)
    second = (evaluate(state, y + h) - 2.0 * psi + evaluate(state, y - h)) / h ** 2
    return -second + (potential_value(state.well, y) - state.ebar) * psi


def continuity_defects(state: PiecewiseState) -> Dict[str, float]:
    """
    Jumps of psi and psi' at -edge, 0 and +edge, from the one-sided branch formulas.

    Each jump is divided by max(|left|, |right|, 1e-3).
    """
    edge, beta = state.edge, state.beta
    sign = 1.0 if state.parity is Parity.EVEN else -1.0
    inner_value = float(state.interior(edge))
    inner_slope = float(state.interior_slope(edge))
    zero_value = float(state.interior(0.0))
    zero_slope = float(state.interior_slope(0.0))
    tail = state.edge_value

    pairs = {
        "value@-edge": (sign * tail, sign * inner_value),
        "slope@-edge": (sign * beta * tail, -sign * inner_slope),
        "value@0": (sign * zero_value, zero_value),
        "slope@0": (-sign * zero_slope, zero_slope),
        "value@+edge": (inner_value, tail),
        "slope@+edge": (inner_slope, -beta * tail),
    }
    return {
        key: abs(left - right) / max(abs(left), abs(right), 1e-3)
        for key, (left, right) in pairs.items()
    }


def matching_determinant(well: DimensionlessWell, ebar: float) -> float:
    """
    |det| of the equilibrated 6x6 continuity system.

    Unknowns are (C1 e^(-beta edge), C2, C3, C4, C5, C6 e^(-beta edge)) with
    value and slope continuity at -edge, 0 and +edge, written with the
    arguments w(|y|). Columns, then rows, are scaled to unit 2-norm, so
    the result lies in [0, 1] and vanishes at eigenvalues of either parity.
    The Bi columns are assembled already divided by e^(zeta_e), which the
    column scaling absorbs.
    """
    mp = match_points(well, ebar)
    c, b = mp.cbrt_a, mp.beta
    e = airy_eval_scaled(mp.w2)
    z = airy_eval_scaled(mp.w0)
    decay = math.exp(-e.zeta)
    e_ai, e_aip = e.ai_s * decay, e.ai_prime_s * decay
    e_bi, e_bip = e.bi_s, e.bi_prime_s
    z_ai, z_aip = z.ai_s, z.ai_prime_s
    z_bi, z_bip = z.bi_s * decay, z.bi_prime_s * decay
    system = np.array([
        [1.0, -e_ai, -e_bi, 0.0, 0.0, 0.0],
        [b, c * e_aip, c * e_bip, 0.0, 0.0, 0.0],
        [0.0, z_ai, z_bi, -z_ai, -z_bi, 0.0],
        [0.0, -c * z_aip, -c * z_bip, -c * z_aip, -c * z_bip, 0.0],
        [0.0, 0.0, 0.0, e_ai, e_bi, -1.0],
        [0.0, 0.0, 0.0, c * e_aip, c * e_bip, b],
    ])
    system = system / np.linalg.norm(system, axis=0)
    system = system / np.linalg.norm(system, axis=1)[:, None]
    return float(abs(np.linalg.det(system)))


# =========================================================================
# Internal Helpers
# =========================================================================

def _mirror(state: PiecewiseState, y: np.ndarray) -> np.ndarray:
    if state.parity is Parity.EVEN:
        return np.ones_like(y)
    return np.where(y < 0, -1.0, 1.0)


def _interior(mp: MatchPoints, weights: Tuple[float, float], w) -> Tuple[np.ndarray, np.ndarray]:
    """psi and d psi/dw at Airy argument(s) w, for weights (C4, c5_s)."""
    c4, c5_s = weights
    ai_s, ai_prime_s, bi_s, bi_prime_s = airy_scaled_array(w)
    zeta = scaling_exponent(w)
    zeta_e = scaling_exponent(mp.w2)
    # Ai(w) = ai_s e^(-zeta); C5 Bi(w) = c5_s bi_s e^(zeta - 2 zeta_e), both exponents <= 0
    decay = np.exp(-zeta)
    growth = np.exp(zeta - 2.0 * zeta_e)
    value = c4 * ai_s * decay + c5_s * bi_s * growth
    slope = c4 * ai_prime_s * decay + c5_s * bi_prime_s * growth
    return value, slope


def _center_weights(mp: MatchPoints, even: bool, zeta_e: float) -> Tuple[float, float]:
    # Even: the psi' combination vanishes at w0; odd: the psi combination
    at_zero = airy_eval(mp.w0)
    if even:
        c4, c5 = at_zero.bi_prime, -at_zero.ai_prime
    else:
        c4, c5 = at_zero.bi, -at_zero.ai
    return c4, c5 * math.exp(2.0 * zeta_e)


def _edge_weights(mp: MatchPoints) -> Tuple[float, float]:
    # psi' + beta psi = 0 at the edge, each term in units of e^(-zeta_e)
    c, beta = mp.cbrt_a, mp.beta
    at_edge = airy_eval_scaled(mp.w2)
    return (
        c * at_edge.bi_prime_s + beta * at_edge.bi_s,
        -(c * at_edge.ai_prime_s + beta * at_edge.ai_s),
    )
