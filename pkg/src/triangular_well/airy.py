"""
Airy functions Ai, Bi and their first derivatives for real arguments.

Plain values come from ``scipy.special.airy`` (Cephes: Maclaurin series near
the origin, asymptotic expansions far out, a stabilised scheme in between).
Exponent-scaled values come from ``scipy.special.airye`` (AMOS), which keeps
the Bi-family finite where the plain values overflow.

Scaling convention, for x > 0 with zeta = (2/3) x^(3/2):
    ai_s = Ai(x) e^(+zeta),  bi_s = Bi(x) e^(-zeta)   (same for the derivatives)
For x <= 0 the scaled values equal the plain ones.
"""

from __future__ import annotations
from dataclasses import dataclass
from typing import Dict, Tuple
import math

import numpy as np
from scipy import special


# Largest |x| either entry point accepts
MAX_ARGUMENT = 1.0e4

# Ai(x) Bi'(x) - Ai'(x) Bi(x)
WRONSKIAN = 1.0 / math.pi


class AiryRangeError(ValueError):
    """Argument outside the supported range, or a value past double range."""

    def __init__(self, x: float, reason: str):
        self.x = x
        self.reason = reason
        super().__init__(f"x={x!r} is out of supported range: {reason}")


@dataclass(frozen=True)
class AiryQuad:
    """
    Ai, Bi, Ai', Bi' at one real argument.

    Example at the origin:
        ai = 0.3550280538878172, bi = 0.6149266274460007
        ai_prime = -0.2588194037928068, bi_prime = 0.4482883573538264
    """
    x: float
    ai: float
    bi: float
    ai_prime: float
    bi_prime: float

    @property
    def wronskian(self) -> float:
        """Ai Bi' - Ai' Bi, equal to 1/pi for exact values."""
        return self.ai * self.bi_prime - self.ai_prime * self.bi

    def as_dict(self) -> Dict[str, float]:
        return {
            "x": self.x,
            "ai": self.ai,
            "bi": self.bi,
            "ai_prime": self.ai_prime,
            "bi_prime": self.bi_prime,
        }


@dataclass(frozen=True)
class ScaledAiryQuad:
    """Airy values with the dominant exponential removed (see module docstring)."""
    x: float
    ai_s: float
    bi_s: float
    ai_prime_s: float
    bi_prime_s: float

    @property
    def zeta(self) -> float:
        """Exponent removed by the scaling; zero for x <= 0."""
        return scaling_exponent(self.x)

    def unscaled(self) -> AiryQuad:
        """
        Undo the scaling.

        Raises:
            AiryRangeError: if Bi or Bi' no longer fits in a double
        """
        zeta = self.zeta
        decay, growth = math.exp(-zeta), _safe_exp(zeta)
        quad = AiryQuad(
            x=self.x,
            ai=self.ai_s * decay,
            bi=self.bi_s * growth,
            ai_prime=self.ai_prime_s * decay,
            bi_prime=self.bi_prime_s * growth,
        )
        _require_finite(quad)
        return quad

    def as_dict(self) -> Dict[str, float]:
        return {
            "x": self.x,
            "ai_s": self.ai_s,
            "bi_s": self.bi_s,
            "ai_prime_s": self.ai_prime_s,
            "bi_prime_s": self.bi_prime_s,
        }


def scaling_exponent(x):
    """zeta = (2/3) x^(3/2) for x > 0, else 0. Accepts scalars or arrays."""
    positive = np.maximum(np.asarray(x, dtype=float), 0.0)
    zeta = (2.0 / 3.0) * positive * np.sqrt(positive)
    return float(zeta) if zeta.ndim == 0 else zeta


def airy_eval(x: float) -> AiryQuad:
    """
    Evaluate Ai, Bi, Ai', Bi' at a real argument.

    Args:
        x: Finite argument, |x| <= MAX_ARGUMENT

    Returns:
        AiryQuad with all four values

    Raises:
        AiryRangeError: non-finite or too large argument, or Bi/Bi' overflow
            (use airy_eval_scaled for large positive x)
    """
    x = _check_argument(x)
    ai, ai_prime, bi, bi_prime = special.airy(x)
    quad = AiryQuad(x, float(ai), float(bi), float(ai_prime), float(bi_prime))
    _require_finite(quad)
    return quad


def airy_eval_scaled(x: float) -> ScaledAiryQuad:
    """
    Evaluate the exponent-scaled Airy values at a real argument.

    All four values stay finite on the whole supported range.

    Raises:
        AiryRangeError: non-finite or too large argument
    """
    x = _check_argument(x)
    if x > 0:
        ai_s, ai_prime_s, bi_s, bi_prime_s = special.airye(x)
    else:
        ai_s, ai_prime_s, bi_s, bi_prime_s = special.airy(x)
    return ScaledAiryQuad(x, float(ai_s), float(bi_s), float(ai_prime_s), float(bi_prime_s))


def airy_eval_array(x) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    Vectorised airy_eval.

    Returns:
        (ai, ai_prime, bi, bi_prime) arrays shaped like ``x``
        (scipy.special ordering)

    Raises:
        AiryRangeError: if any argument is out of range or any value overflows
    """
    x = _check_array(x)
    values = special.airy(x)
    for v in values:
        if not np.all(np.isfinite(v)):
            bad = x[~np.isfinite(v)] if x.ndim else x
            raise AiryRangeError(
                float(np.max(bad)), "Bi overflows double range; use the scaled variant"
            )
    return values


def airy_scaled_array(x) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    Vectorised airy_eval_scaled.

    Returns:
        (ai_s, ai_prime_s, bi_s, bi_prime_s) arrays shaped like ``x``
    """
    x = _check_array(x)
    flat = np.atleast_1d(x)
    out = np.empty((4,) + flat.shape)
    positive = flat > 0
    if positive.any():
        out[:, positive] = np.asarray(special.airye(flat[positive]))
    if (~positive).any():
        out[:, ~positive] = np.asarray(special.airy(flat[~positive]))
    return tuple(v.reshape(x.shape) for v in out)


# =========================================================================
# Internal Helpers
# =========================================================================

def _check_argument(x: float) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise AiryRangeError(x, "argument is not finite")
    if abs(x) > MAX_ARGUMENT:
        raise AiryRangeError(x, f"|x| exceeds {MAX_ARGUMENT:g}")
    return x


def _check_array(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise AiryRangeError(float("nan"), "argument is not finite")
    if x.size and np.max(np.abs(x)) > MAX_ARGUMENT:
        raise AiryRangeError(float(np.max(np.abs(x))), f"|x| exceeds {MAX_ARGUMENT:g}")
    return x


def _require_finite(quad: AiryQuad) -> None:
    if not all(math.isfinite(v) for v in (quad.ai, quad.bi, quad.ai_prime, quad.bi_prime)):
        raise AiryRangeError(quad.x, "Bi overflows double range; use airy_eval_scaled")


def _safe_exp(v: float) -> float:
    try:
        return math.exp(v)
    except OverflowError:
        return math.inf
