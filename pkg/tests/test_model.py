"""Tests for the well models."""

import math

import numpy as np
import pytest

from triangular_well import (
    Convention,
    DimensionlessWell,
    PhysicalWell,
    WellDomainError,
    match_points,
    potential_value,
    to_dimensionless,
    to_physical,
    weak_coupling_energy,
)


def test_convention_edges():
    """Test the reduced half-widths of both conventions."""
    assert Convention.EQ1.edge == 1.0
    assert Convention.HALFWIDTH2.edge == 2.0
    assert DimensionlessWell(3.0, "halfwidth2").convention is Convention.HALFWIDTH2


@pytest.mark.parametrize("vbar0", [0.0, -1.0, math.nan, math.inf])
def test_invalid_depth(vbar0):
    """Test that non-positive or non-finite depths are rejected."""
    with pytest.raises(WellDomainError):
        DimensionlessWell(vbar0)


def test_potential_shape():
    """Test the potential at the center, inside, at the edges and outside."""
    well = DimensionlessWell(10.0)
    assert potential_value(well, 0.0) == -10.0
    assert potential_value(well, 0.5) == pytest.approx(-5.0)
    assert potential_value(well, -0.5) == pytest.approx(-5.0)
    assert potential_value(well, 1.0) == 0.0
    assert potential_value(well, 3.0) == 0.0

    wide = DimensionlessWell(10.0, Convention.HALFWIDTH2)
    assert potential_value(wide, 1.0) == pytest.approx(-5.0)
    assert potential_value(wide, 2.0) == 0.0

    values = potential_value(well, np.array([-2.0, 0.0, 2.0]))
    assert values.tolist() == [0.0, -10.0, 0.0]


def test_physical_round_trip():
    """Test reduction to and from physical units."""
    physical = PhysicalWell(mass=0.938, hbar=0.197, depth=1.7, half_width=0.8)
    well = to_dimensionless(physical)
    assert well.vbar0 * physical.energy_unit == pytest.approx(physical.depth, rel=1e-14)
    assert to_physical(physical, well.vbar0) == pytest.approx(physical.depth, rel=1e-14)


def test_physical_rejects_zero_mass():
    """Test that a zero mass is rejected rather than producing inf."""
    with pytest.raises(WellDomainError):
        PhysicalWell(mass=0.0, hbar=1.0, depth=1.0, half_width=1.0)


def test_slope_and_threshold_argument():
    """Test the derived slope and threshold argument."""
    well = DimensionlessWell(27.0)
    assert well.slope == 27.0
    assert well.cbrt_slope == pytest.approx(3.0)
    assert well.threshold_argument == pytest.approx(3.0)

    wide = DimensionlessWell(16.0, Convention.HALFWIDTH2)
    assert wide.slope == 8.0
    assert wide.threshold_argument == pytest.approx(4.0)


@pytest.mark.parametrize("convention", list(Convention))
def test_midpoint_identity(convention):
    """Test w0 = (w1 + w2) / 2 to 4 ulp over random depths and energies."""
    rng = np.random.default_rng(2024)
    for vbar0 in rng.uniform(0.01, 200.0, size=5000):
        well = DimensionlessWell(vbar0, convention)
        ebar = -vbar0 * rng.uniform(0.001, 0.999)
        mp = match_points(well, ebar)
        slack = 4.0 * np.spacing(max(abs(mp.w1), abs(mp.w2)))
        assert abs(mp.w0 - 0.5 * (mp.w1 + mp.w2)) <= slack
        assert mp.beta == pytest.approx(math.sqrt(-ebar))


def test_match_points_at_threshold_limit():
    """Test that w0 approaches minus the threshold argument as ebar -> 0."""
    well = DimensionlessWell(8.0)
    mp = match_points(well, -1e-12)
    assert mp.w0 == pytest.approx(-well.threshold_argument, rel=1e-9)
    assert mp.w2 == pytest.approx(0.0, abs=1e-9)


@pytest.mark.parametrize("ebar", [0.0, 0.5, -4.0, -7.0])
def test_match_points_outside_window(ebar):
    """Test that energies outside (-Vbar0, 0) are rejected."""
    with pytest.raises(WellDomainError):
        match_points(DimensionlessWell(4.0), ebar)


def test_weak_coupling_energy():
    """Test the shallow-well estimate in both conventions."""
    assert weak_coupling_energy(DimensionlessWell(0.1)) == pytest.approx(-0.0025)
    assert weak_coupling_energy(DimensionlessWell(0.1, Convention.HALFWIDTH2)) == pytest.approx(-0.01)


@pytest.mark.parametrize(
    "vbar0, ebar, expected",
    [
        (1.0, -0.25, (1.0, -0.75, -1.75, 0.25, 0.5)),
        (8.0, -4.0, (2.0, -1.0, -3.0, 1.0, 2.0)),
    ],
)
def test_match_points_examples(vbar0, ebar, expected):
    """Test the matching arguments for two hand-computed cases."""
    mp = match_points(DimensionlessWell(vbar0), ebar)
    assert (mp.cbrt_a, mp.w0, mp.w1, mp.w2, mp.beta) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("convention", list(Convention))
def test_match_points_lipschitz_in_energy(convention):
    """Test |delta w| <= (A^(-2/3) + 1) |delta Ebar| across the bound window."""
    rng = np.random.default_rng(11)
    for vbar0 in rng.uniform(0.05, 100.0, size=200):
        well = DimensionlessWell(vbar0, convention)
        bound = well.slope ** (-2.0 / 3.0) + 1.0
        e1, e2 = -vbar0 * rng.uniform(0.001, 0.999, size=2)
        a, b = match_points(well, e1), match_points(well, e2)
        slack = 8.0 * np.spacing(max(abs(a.w1), abs(b.w1), 1.0))
        for wa, wb in ((a.w0, b.w0), (a.w1, b.w1), (a.w2, b.w2)):
            assert abs(wa - wb) <= bound * abs(e1 - e2) + slack


@pytest.mark.parametrize(
    "mass, hbar, half_width, depth, vbar0",
    [(0.5, 1.0, 1.0, 3.0, 3.0), (1.0, 1.0, 2.0, 1.0, 8.0)],
)
def test_to_dimensionless_examples(mass, hbar, half_width, depth, vbar0):
    """Test the reduced depth for two unit scales, and the energy conversion back."""
    physical = PhysicalWell(mass=mass, hbar=hbar, depth=depth, half_width=half_width)
    well = to_dimensionless(physical)
    assert well.vbar0 == pytest.approx(vbar0, rel=1e-15)
    assert well.convention is Convention.EQ1
    assert to_physical(physical, -1.0) == pytest.approx(-depth / vbar0, rel=1e-15)


@pytest.mark.parametrize("convention", list(Convention))
def test_potential_is_even(convention):
    """Test V(y) = V(-y) at random points."""
    well = DimensionlessWell(7.5, convention)
    y = np.random.default_rng(5).uniform(-4.0, 4.0, size=1000)
    np.testing.assert_array_equal(potential_value(well, y), potential_value(well, -y))
