"""Smooth depth-weight family and its derivative.

The weight is 1 on [C, 1] and decays smoothly to 0 at depth 0:

    w_i(r) = (exp(-K * g(r)) - exp(-K)) / (1 - exp(-K)),   r < C,
    g(r)   = (1 - (r/C)^2)^(2i),

with cutoff 0 < C < 1 and steepness K > 0.  The moment order i in {1, 2}
selects the location (i=1) or scatter (i=2) weight.  w is C^1 on [0, 1]:
both w' -> 0 as r -> C from below and w'(0) = 0, and w(r) = O(r^2) near 0,
within the r^i envelope required for the breakdown-point results.

``_g_poly`` isolates the polynomial profile so an alternate grouping of the
exponents is a one-line swap.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "WeightSpec",
    "weight_eval",
    "weight_deriv",
    "default_cutoff",
    "alt_cutoff",
    "xi_cutoff",
]

# MAD of the standard normal, Phi^{-1}(3/4)
_PHI34 = 0.674489750196081749


@dataclass(frozen=True)
class WeightSpec:
    """Parameters of one weight function: moment order, cutoff, steepness."""

    order: int
    cutoff: float
    steepness: float

    def __post_init__(self):
        if self.order not in (1, 2):
            raise DomainError(f"weight order must be 1 or 2, got {self.order}")
        if not 0.0 < self.cutoff < 1.0:
            raise DomainError(f"cutoff must be in (0, 1), got {self.cutoff}")
        if not self.steepness > 0.0:
            raise DomainError(f"steepness must be > 0, got {self.steepness}")


def default_cutoff(d: int) -> float:
    """Cutoff 1/(1 + sqrt(d)/Phi^{-1}(3/4)), close to the median depth at N(0, I_d)."""
    return 1.0 / (1.0 + np.sqrt(d) / _PHI34)


def alt_cutoff(d: int) -> float:
    """The more conservative cutoff family 1/(1 + sqrt(2d))."""
    return 1.0 / (1.0 + np.sqrt(2.0 * d))


def xi_cutoff(d: int, xi: float) -> float:
    """Tuned cutoff 1/(1 + sqrt(xi * d)) used for the sensitivity-index rows."""
    return 1.0 / (1.0 + np.sqrt(xi * d))


def _check_r(r):
    r = np.asarray(r, dtype=float)
    if np.any(r < -1e-12) or np.any(r > 1.0 + 1e-12):
        raise DomainError("weight argument outside [0, 1]")
    return np.clip(r, 0.0, 1.0)


def _g_poly(u: np.ndarray, i: int) -> tuple[np.ndarray, np.ndarray]:
    """Return (g, 1-g) for u = (r/C)^2, evaluated without cancellation.

    g = (1 - u)^(2i); 1-g is computed through expm1/log1p so that weights of
    deeply outlying points (r -> 0) keep full relative accuracy.
    """
    usafe = np.where(u < 1.0, u, 0.5)
    log1mu = np.log1p(-usafe)
    g = np.where(u < 1.0, np.exp(2 * i * log1mu), 0.0)
    one_minus_g = np.where(u < 1.0, -np.expm1(2 * i * log1mu), 1.0)
    return g, one_minus_g


def weight_eval(spec: WeightSpec, r) -> np.ndarray | float:
    """Evaluate the weight at depth r in [0, 1]; 1 for r >= cutoff."""
    r = _check_r(r)
    scalar = r.ndim == 0
    r = np.atleast_1d(r)
    C, K, i = spec.cutoff, spec.steepness, spec.order
    u = (r / C) ** 2
    _, one_minus_g = _g_poly(u, i)
    # (exp(-K g) - exp(-K)) / (1 - exp(-K)), stable for g near 1
    val = np.exp(-K) * np.expm1(K * one_minus_g) / (-np.expm1(-K))
    out = np.where(r >= C, 1.0, val)
    return float(out[0]) if scalar else out


def weight_deriv(spec: WeightSpec, r) -> np.ndarray | float:
    """Analytic derivative of ``weight_eval``; 0 for r >= cutoff and at r = 0."""
    r = _check_r(r)
    scalar = r.ndim == 0
    r = np.atleast_1d(r)
    C, K, i = spec.cutoff, spec.steepness, spec.order
    u = (r / C) ** 2
    g, _ = _g_poly(u, i)
    base = np.where(u < 1.0, 1.0 - u, 0.0)
    val = (
        K * 4.0 * i * r / C**2 * base ** (2 * i - 1)
        * np.exp(-K * g) / (-np.expm1(-K))
    )
    out = np.where(r >= C, 0.0, val)
    return float(out[0]) if scalar else out
