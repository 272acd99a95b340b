"""Tests for the Airy function layer."""

import math

import numpy as np
import pytest
from scipy import optimize

from triangular_well import (
    AiryRangeError,
    WRONSKIAN,
    airy_eval,
    airy_eval_array,
    airy_eval_scaled,
    airy_scaled_array,
)

# Closed forms at the origin: 1/(3^(2/3) Gamma(2/3)) etc.
AI0 = 0.3550280538878172
BI0 = 0.6149266274460007
AIP0 = -0.2588194037928068
BIP0 = 0.4482883573538264


def test_anchors_at_origin():
    """Test the four closed-form values at x = 0."""
    quad = airy_eval(0.0)
    assert quad.ai == pytest.approx(AI0, rel=1e-14)
    assert quad.bi == pytest.approx(BI0, rel=1e-14)
    assert quad.ai_prime == pytest.approx(AIP0, rel=1e-14)
    assert quad.bi_prime == pytest.approx(BIP0, rel=1e-14)


def test_wronskian_on_dense_grid():
    """Test Ai Bi' - Ai' Bi = 1/pi at 10,000 points in [-30, 8]."""
    x = np.linspace(-30.0, 8.0, 10_000)
    ai, aip, bi, bip = airy_eval_array(x)
    wronskian = ai * bip - aip * bi
    assert np.max(np.abs(wronskian / WRONSKIAN - 1.0)) <= 1e-10


def test_wronskian_property_on_quad():
    """Test the wronskian property on single evaluations."""
    rng = np.random.default_rng(7)
    for x in rng.uniform(-20.0, 6.0, size=25):
        assert airy_eval(x).wronskian == pytest.approx(WRONSKIAN, rel=1e-10)


def test_first_zero_of_ai():
    """Test locating the first zero of Ai."""
    root = optimize.brentq(lambda x: airy_eval(x).ai, -3.0, -2.0, xtol=1e-15)
    assert root == pytest.approx(-2.338107410459767, abs=1e-10)


def test_scaled_matches_plain():
    """Test that undoing the scaling reproduces the plain values."""
    for x in np.linspace(-10.0, 10.0, 41):
        plain = airy_eval(x)
        back = airy_eval_scaled(x).unscaled()
        assert back.ai == pytest.approx(plain.ai, rel=1e-12, abs=1e-300)
        assert back.bi == pytest.approx(plain.bi, rel=1e-12)
        assert back.ai_prime == pytest.approx(plain.ai_prime, rel=1e-12, abs=1e-300)
        assert back.bi_prime == pytest.approx(plain.bi_prime, rel=1e-12)


def test_scaled_equals_plain_for_non_positive_arguments():
    """Test that no scaling applies for x <= 0."""
    scaled = airy_eval_scaled(-4.5)
    plain = airy_eval(-4.5)
    assert scaled.zeta == 0.0
    assert (scaled.ai_s, scaled.bi_s) == (plain.ai, plain.bi)


def test_large_positive_argument():
    """Test that Bi overflow is reported and the scaled variant stays finite."""
    with pytest.raises(AiryRangeError):
        airy_eval(200.0)

    scaled = airy_eval_scaled(200.0)
    values = (scaled.ai_s, scaled.bi_s, scaled.ai_prime_s, scaled.bi_prime_s)
    assert all(math.isfinite(v) for v in values)
    # Leading asymptotics: Ai e^zeta ~ 1/(2 sqrt(pi) x^(1/4))
    assert scaled.ai_s == pytest.approx(1.0 / (2.0 * math.sqrt(math.pi) * 200.0 ** 0.25), rel=1e-3)


@pytest.mark.parametrize("x", [1e9, -1e9, math.inf, math.nan])
def test_out_of_range_arguments(x):
    """Test that unsupported arguments raise rather than overflow."""
    with pytest.raises(AiryRangeError, match="out of supported range"):
        airy_eval(x)
    with pytest.raises(AiryRangeError):
        airy_eval_scaled(x)


def test_array_matches_scalar():
    """Test vectorised evaluation against scalar evaluation."""
    x = np.array([-7.0, -1.25, 0.0, 0.5, 3.0])
    ai, aip, bi, bip = airy_eval_array(x)
    ai_s, aip_s, bi_s, bip_s = airy_scaled_array(x)
    for i, value in enumerate(x):
        quad = airy_eval(value)
        scaled = airy_eval_scaled(value)
        assert (ai[i], aip[i], bi[i], bip[i]) == pytest.approx(
            (quad.ai, quad.ai_prime, quad.bi, quad.bi_prime), rel=1e-15
        )
        assert (ai_s[i], aip_s[i], bi_s[i], bip_s[i]) == pytest.approx(
            (scaled.ai_s, scaled.ai_prime_s, scaled.bi_s, scaled.bi_prime_s), rel=1e-15
        )


def test_scaled_array_keeps_shape():
    """Test that the scaled array form preserves scalar and 2-d shapes."""
    values = airy_scaled_array(1.5)
    assert all(np.ndim(v) == 0 for v in values)
    grid = np.linspace(-2.0, 2.0, 6).reshape(2, 3)
    assert all(v.shape == (2, 3) for v in airy_scaled_array(grid))


def test_derivatives_match_central_differences():
    """Test ai_prime and bi_prime against central differences (h = 1e-6) on [-10, 5]."""
    h = 1e-6
    x = np.linspace(-10.0, 5.0, 100)
    ai_hi, _, bi_hi, _ = airy_eval_array(x + h)
    ai_lo, _, bi_lo, _ = airy_eval_array(x - h)
    _, aip, _, bip = airy_eval_array(x)
    assert np.max(np.abs((ai_hi - ai_lo) / (2 * h) - aip)) <= 1e-5
    assert np.max(np.abs((bi_hi - bi_lo) / (2 * h) - bip)) <= 1e-5


def test_airy_equation_residual():
    """Test f'' = x f for both families with a second difference on [-10, 5]."""
    # Dyadic points and step keep x +- h exact
    h = 2.0 ** -13
    x = -10.0 + np.arange(100) * (19.0 / 128.0)
    for index in (0, 2):
        hi, mid, lo = (airy_eval_array(v)[index] for v in (x + h, x, x - h))
        second = (hi - 2.0 * mid + lo) / h ** 2
        assert np.max(np.abs(second - x * mid)) <= 1e-4


def test_ai_strictly_decreasing_on_positive_axis():
    """Test that Ai falls monotonically on [0, 30]."""
    ai, aip, _, _ = airy_eval_array(np.linspace(0.0, 30.0, 3001))
    assert np.all(np.diff(ai) < 0)
    assert np.all(aip < 0)
    assert ai[-1] > 0
