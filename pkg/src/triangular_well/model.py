"""
Well models for the finite-range linear potential.

A particle of mass m sits in V(x) = -V0 (1 - |x|/a) for |x| <= a and 0
outside. Lengths are measured in units of a/edge and energies in units of
hbar^2 / (2 m a^2), which turns the Schrodinger equation into

    -psi'' + Vbar(y) psi = Ebar psi

with a dimensionless depth Vbar0. Two readings of the reduced coordinate
exist and are kept side by side (see Convention).
"""

from __future__ import annotations
from enum import Enum
from dataclasses import dataclass
from typing import Tuple, Union
import math

import numpy as np


class Convention(str, Enum):
    """
    Reading of the reduced coordinate.

    EQ1:        y = x/a,     well on [-1, 1], Vbar(y) = -Vbar0 (1 - |y|)
    HALFWIDTH2: y = 2x/a,    well on [-2, 2], Vbar(y) = -Vbar0 (1 - |y|/2)

    The energy unit is hbar^2/(2 m a^2) for both.
    """
    EQ1 = "eq1"
    HALFWIDTH2 = "halfwidth2"

    @property
    def edge(self) -> float:
        """Half-width of the well in reduced units."""
        return 1.0 if self is Convention.EQ1 else 2.0


class WellDomainError(ValueError):
    """Parameter or energy outside the physically admissible domain."""


@dataclass(frozen=True)
class PhysicalWell:
    """
    A well in physical units.

    Attributes:
        mass: Particle mass m
        hbar: Reduced Planck constant in the same unit system
        depth: Depth V0 at the center
        half_width: Half-width a
    """
    mass: float
    hbar: float
    depth: float
    half_width: float

    def __post_init__(self):
        for name in ("mass", "hbar", "depth", "half_width"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise WellDomainError(f"{name} must be finite and > 0, got {value!r}")

    @property
    def energy_unit(self) -> float:
        """hbar^2 / (2 m a^2)."""
        return self.hbar ** 2 / (2.0 * self.mass * self.half_width ** 2)


@dataclass(frozen=True)
class DimensionlessWell:
    """
    A well in reduced units.

    Example:
        well = DimensionlessWell(25.0)                      # EQ1
        well = DimensionlessWell(25.0, "halfwidth2")        # string accepted
        well.slope   # Vbar0 / edge
    """
    vbar0: float
    convention: Convention = Convention.EQ1

    def __post_init__(self):
        # Accept plain strings for the convention
        if not isinstance(self.convention, Convention):
            object.__setattr__(self, "convention", Convention(self.convention))
        if not math.isfinite(self.vbar0) or self.vbar0 <= 0:
            raise WellDomainError(f"vbar0 must be finite and > 0, got {self.vbar0!r}")

    @property
    def edge(self) -> float:
        return self.convention.edge

    @property
    def slope(self) -> float:
        """A = Vbar0 / edge, the slope of Vbar inside the well."""
        return self.vbar0 / self.edge

    @property
    def cbrt_slope(self) -> float:
        return self.slope ** (1.0 / 3.0)

    @property
    def threshold_argument(self) -> float:
        """s = edge * A^(1/3), i.e. minus the Airy argument at y = 0 when Ebar = 0."""
        return self.edge * self.cbrt_slope

    @property
    def window(self) -> Tuple[float, float]:
        """Open interval that holds every bound-state energy."""
        return (-self.vbar0, 0.0)

    def contains(self, ebar: float) -> bool:
        return -self.vbar0 < ebar < 0.0


@dataclass(frozen=True)
class MatchPoints:
    """
    Airy arguments at the matching points for one trial energy.

    Inside the well w(y) = A^(1/3) (y - B/A) with B = Ebar + Vbar0, and the
    left half uses w(|y|).

    Attributes:
        cbrt_a: A^(1/3)
        w0: argument at y = 0
        w1: A^(1/3) (-edge - B/A)
        w2: argument at y = +edge (and at y = -edge through w(|y|))
        beta: sqrt(-Ebar), decay rate outside the well
    """
    cbrt_a: float
    w0: float
    w1: float
    w2: float
    beta: float


def to_dimensionless(well: PhysicalWell, convention: Convention = Convention.EQ1) -> DimensionlessWell:
    """
    Reduce a physical well.

    Raises:
        WellDomainError: if the reduced depth is not a finite positive number
    """
    vbar0 = well.depth / well.energy_unit
    if not math.isfinite(vbar0) or vbar0 <= 0:
        raise WellDomainError(f"reduced depth is not finite and positive: {vbar0!r}")
    return DimensionlessWell(vbar0, Convention(convention))


def to_physical(well: PhysicalWell, ebar: float) -> float:
    """Convert a reduced energy back to physical units."""
    return ebar * well.energy_unit


def potential_value(well: DimensionlessWell, y: Union[float, np.ndarray]):
    """
    Vbar(y): -Vbar0 (1 - |y|/edge) inside the well, 0 outside.

    Returns a float for scalar input and an array otherwise.
    """
    y = np.asarray(y, dtype=float)
    inside = np.abs(y) < well.edge
    value = np.where(inside, -well.vbar0 * (1.0 - np.abs(y) / well.edge), 0.0)
    return float(value) if value.ndim == 0 else value


def airy_arguments(well: DimensionlessWell, beta):
    """
    Vectorised (A^(1/3), w0, w2) for decay rates beta = sqrt(-Ebar).

    beta may run over the closed range [0, sqrt(Vbar0)].
    """
    beta = np.asarray(beta, dtype=float)
    cbrt_a = well.cbrt_slope
    shift = (well.vbar0 - beta * beta) / well.slope     # B / A
    w0 = -cbrt_a * shift
    w2 = w0 + cbrt_a * well.edge
    return cbrt_a, w0, w2


def match_points(well: DimensionlessWell, ebar: float) -> MatchPoints:
    """
    Airy arguments at the matching points.

    Raises:
        WellDomainError: unless -Vbar0 < ebar < 0
    """
    if not well.contains(ebar):
        raise WellDomainError(
            f"ebar={ebar!r} outside the bound-state window ({-well.vbar0!r}, 0)"
        )
    cbrt_a = well.cbrt_slope
    w0 = -cbrt_a * (ebar + well.vbar0) / well.slope
    half_span = cbrt_a * well.edge
    return MatchPoints(
        cbrt_a=cbrt_a,
        w0=w0,
        w1=w0 - half_span,
        w2=w0 + half_span,
        beta=math.sqrt(-ebar),
    )


def weak_coupling_energy(well: DimensionlessWell) -> float:
    """
    Leading shallow-well estimate of the ground-state energy.

    For a weak short-range well the ground state sits at
    -(integral of Vbar / 2)^2; the integral is Vbar0 * edge.
    """
    return -0.25 * (well.vbar0 * well.edge) ** 2
