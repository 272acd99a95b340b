"""Tests for the piecewise eigenfunctions."""

import math

import numpy as np
import pytest
from scipy import integrate

from triangular_well import (
    Convention,
    DimensionlessWell,
    EigenState,
    NotAnEigenstateError,
    Parity,
    build_state,
    count_nodes,
    derivative,
    evaluate,
    matching_determinant,
    overlap,
    sample,
    solve_spectrum,
)
from triangular_well.wavefn import continuity_defects, schrodinger_residual

WELLS = [
    (1.0, Convention.EQ1),
    (5.0, Convention.EQ1),
    (25.0, Convention.EQ1),
    (40.0, Convention.EQ1),
    (5.0, Convention.HALFWIDTH2),
    (25.0, Convention.HALFWIDTH2),
]


@pytest.fixture(scope="module")
def states():
    """All normalised states of each test well, keyed by (vbar0, convention)."""
    built = {}
    for vbar0, convention in WELLS:
        well = DimensionlessWell(vbar0, convention)
        spectrum = solve_spectrum(well, tol=1e-12)
        built[(vbar0, convention)] = [build_state(well, s) for s in spectrum.states]
    return built


def _all(states):
    return [psi for group in states.values() for psi in group]


# =========================================================================
# Shape
# =========================================================================

def test_node_count_equals_index(states):
    """Test that state n has n nodes."""
    for psi in _all(states):
        assert count_nodes(psi) == psi.n


def test_continuity_at_matching_points(states):
    """Test value and slope continuity at -edge, 0 and +edge."""
    for psi in _all(states):
        defects = continuity_defects(psi)
        assert set(defects) == {
            "value@-edge", "slope@-edge", "value@0", "slope@0", "value@+edge", "slope@+edge",
        }
        assert max(defects.values()) <= 1e-9


def test_parity_symmetry(states):
    """Test psi(-y) = +-psi(y) at mirrored points."""
    y = np.linspace(0.0, 6.0, 200)
    for psi in _all(states):
        sign = 1.0 if psi.parity is Parity.EVEN else -1.0
        np.testing.assert_allclose(evaluate(psi, -y), sign * evaluate(psi, y), rtol=0, atol=1e-12)


def test_ground_state_peaks_at_center(states):
    """Test that the ground state is positive and largest at y = 0."""
    ground = states[(25.0, Convention.EQ1)][0]
    y, values = sample(ground, 2001)
    assert np.all(values > 0)
    assert values.argmax() == 1000
    assert y[1000] == 0.0


def test_sign_convention(states):
    """Test psi(0) > 0 for even states and psi'(0) > 0 for odd states."""
    for psi in _all(states):
        if psi.parity is Parity.EVEN:
            assert evaluate(psi, 0.0) > 0
            assert derivative(psi, 0.0) == 0.0
        else:
            assert evaluate(psi, 0.0) == pytest.approx(0.0, abs=1e-9)
            assert derivative(psi, 0.0) > 0


def test_tails_decay(states):
    """Test |psi| <= C e^(-beta |y|) beyond the edges."""
    for psi in _all(states):
        y = psi.edge + np.linspace(0.0, 40.0, 50)
        bound = abs(psi.coeffs[5]) * np.exp(-psi.beta * y) * (1 + 1e-12)
        assert np.all(np.abs(evaluate(psi, y)) <= bound)
        assert np.all(np.abs(evaluate(psi, -y)) <= bound)


def test_sample_grid_is_symmetric(states):
    """Test the sampling interval and its exact mirror symmetry."""
    psi = states[(5.0, Convention.HALFWIDTH2)][1]
    y, values = sample(psi, 1001)
    assert y[0] == -y[-1]
    assert y[-1] == pytest.approx(psi.edge + 5.0 / psi.beta)
    np.testing.assert_array_equal(y, -y[::-1])
    assert values[500] == pytest.approx(0.0, abs=1e-12)


def test_derivative_matches_finite_difference(states):
    """Test psi' against a central difference away from the kinks."""
    h = 1e-6
    for psi in states[(25.0, Convention.HALFWIDTH2)]:
        y = np.array([-3.1, -1.3, -0.4, 0.6, 1.7, 2.5])
        numeric = (evaluate(psi, y + h) - evaluate(psi, y - h)) / (2 * h)
        np.testing.assert_allclose(derivative(psi, y), numeric, rtol=1e-6, atol=1e-7)


# =========================================================================
# Integrals
# =========================================================================

def test_normalisation(states):
    """Test <psi|psi> = 1 with the analytic tails."""
    for psi in _all(states):
        assert overlap(psi, psi) == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("key, n", [((25.0, Convention.EQ1), 1), ((25.0, Convention.HALFWIDTH2), 2)])
def test_normalisation_against_extended_quadrature(states, key, n):
    """Test the norm against plain quadrature over [-30, 30]."""
    psi = states[key][n]
    edge = psi.edge
    total, _ = integrate.quad(
        lambda y: evaluate(psi, y) ** 2, -30.0, 30.0,
        points=[-edge, 0.0, edge], epsabs=1e-12, epsrel=1e-12, limit=400,
    )
    assert total == pytest.approx(1.0, abs=1e-8)


def test_orthogonality(states):
    """Test <psi_m|psi_n> = 0 for m != n."""
    for group in states.values():
        for i, a in enumerate(group):
            for b in group[i + 1:]:
                assert abs(overlap(a, b)) <= 1e-6


def test_overlap_requires_same_well(states):
    """Test that states of different wells are not compared."""
    with pytest.raises(ValueError, match="different wells"):
        overlap(states[(5.0, Convention.EQ1)][0], states[(25.0, Convention.EQ1)][0])


def test_schrodinger_residual(states):
    """Test -psi'' + (Vbar - Ebar) psi = 0 pointwise away from the kinks."""
    for psi in _all(states):
        edge = psi.edge
        y = np.concatenate([
            np.linspace(-edge - 3.0, -edge - 0.01, 125),
            np.linspace(-edge + 0.01, -0.01, 125),
            np.linspace(0.01, edge - 0.01, 125),
            np.linspace(edge + 0.01, edge + 3.0, 125),
        ])
        assert np.max(np.abs(schrodinger_residual(psi, y))) <= 1e-4


# =========================================================================
# Matching
# =========================================================================

def test_wrong_energy_is_rejected():
    """Test that a shifted energy fails the matching at the center."""
    well = DimensionlessWell(25.0)
    ground = solve_spectrum(well).state(0)
    stale = EigenState(n=0, ebar=ground.ebar + 0.1, parity=Parity.EVEN, residual_abs=0.0)
    with pytest.raises(NotAnEigenstateError, match="not an eigenvalue"):
        build_state(well, stale)


def test_matching_determinant_vanishes_at_roots():
    """Test the full 6x6 determinant at the roots and away from them."""
    for vbar0, convention in WELLS:
        well = DimensionlessWell(vbar0, convention)
        energies = solve_spectrum(well, tol=1e-12).energies
        for ebar in energies:
            assert matching_determinant(well, ebar) <= 1e-8
        gaps = [-vbar0] + list(energies) + [0.0]
        for low, high in zip(gaps, gaps[1:]):
            midpoint = 0.5 * (low + high)
            assert matching_determinant(well, midpoint) > 1e-6


def test_state_metadata(states):
    """Test the stored norm, extent and parity mismatch."""
    psi = states[(1.0, Convention.EQ1)][0]
    assert psi.norm > 0
    assert psi.extent == pytest.approx(1.0 + 5.0 / math.sqrt(-psi.ebar))
    assert psi.mismatch <= 1e-6


# =========================================================================
# Deep Wells
# =========================================================================

@pytest.fixture(scope="module")
def deep_states():
    """Every state of two deep wells, where Bi(w) at the edge reaches ~e^18."""
    built = {}
    for vbar0 in (500.0, 1000.0):
        well = DimensionlessWell(vbar0)
        spectrum = solve_spectrum(well, tol=1e-12)
        built[vbar0] = [build_state(well, s) for s in spectrum.states]
    return built


def test_deep_wells_build_every_state(deep_states):
    """Test that every accepted root of a deep well yields a normalised state."""
    for group in deep_states.values():
        assert len(group) >= 9
        for psi in group:
            assert psi.mismatch <= 1e-6
            assert overlap(psi, psi) == pytest.approx(1.0, abs=1e-8)
            defects = continuity_defects(psi)
            assert max(v for k, v in defects.items() if k.endswith("edge")) <= 1e-9
            assert max(defects["value@0"], defects["slope@0"]) <= 1e-7


def test_deep_wells_sign_and_nodes(deep_states):
    """Test the gauge of every deep state and the node count of the lowest four."""
    for group in deep_states.values():
        for psi in group:
            if psi.parity is Parity.EVEN:
                assert evaluate(psi, 0.0) > 0
            else:
                assert derivative(psi, 0.0) > 0
        for psi in group[:4]:
            assert count_nodes(psi, 20001) == psi.n


def test_deep_ground_state_edge_value(deep_states):
    """Test psi(edge) against the tail branch and its exponential smallness."""
    psi = deep_states[1000.0][0]
    assert 0.0 < evaluate(psi, 1.0) < 1e-6
    assert evaluate(psi, 1.0 + 1e-12) == pytest.approx(evaluate(psi, 1.0), rel=1e-9)
    assert all(math.isfinite(c) for c in psi.coeffs)
