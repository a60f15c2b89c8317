"""Elliptical population models and their one-dimensional quadrature reductions.

Every population constant in this package is an expectation over either the
radius ||Z|| of the standardized spherical vector or the first coordinate U_1
of a uniform direction on the unit sphere.  Both reduce to one-dimensional
adaptive quadrature; this module owns those two reductions plus the model
container holding (theta, Sigma, scalar law).
"""
from __future__ import annotations

import warnings
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate, special

from .errors import DomainError, NumericError
from .univariate import RadialLaw, solve_m

__all__ = [
    "EllipticalModel",
    "expect_radial",
    "expect_direction",
    "radial_m0",
    "radius_quantile",
]

_QUAD_LIMIT = 400
_TAIL = 1e-13  # upper truncation quantile for radial integrals


def radial_m0(law: RadialLaw) -> float:
    """The MAD of the scalar law: unique m with P(|Y| <= m) = 1/2."""
    return solve_m(law, 0.0, 0.0, 1)


# ---------------------------------------------------------------------------
# Radius law of ||Z||
# ---------------------------------------------------------------------------


def _radius_pdf(law: RadialLaw, d: int) -> Callable[[np.ndarray], np.ndarray]:
    if d == 1:
        return lambda r: 2.0 * np.vectorize(law.pdf)(r)
    if law.radius_pdf is None:
        raise DomainError(
            f"law {law.name!r} carries no radius profile for d={d}; "
            "supply radius_pdf/radius_quantile to use it beyond d=1"
        )
    return lambda r: law.radius_pdf(r, d)


def radius_quantile(law: RadialLaw, d: int, p: float) -> float:
    """Quantile of ||Z|| for the d-variate spherical extension of the law."""
    if d == 1:
        return law.quantile(0.5 * (1.0 + p))
    if law.radius_quantile is None:
        raise DomainError(
            f"law {law.name!r} carries no radius quantile for d={d}"
        )
    return law.radius_quantile(p, d)


def _quad(f, a, b, points=None) -> float:
    pts = None
    if points:
        pts = sorted(p for p in points if a < p < b)
        pts = pts or None
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(
                f, a, b, points=pts, limit=_QUAD_LIMIT, epsabs=1e-11, epsrel=1e-11
            )
        except integrate.IntegrationWarning as exc:
            raise NumericError(f"quadrature did not converge: {exc}") from exc
    if not np.isfinite(val):
        raise NumericError("quadrature returned a non-finite value")
    return val


def expect_radial(
    g: Callable[[float], float],
    d: int,
    law: RadialLaw,
    points: Optional[Sequence[float]] = None,
) -> float:
    """E g(||Z||) for the d-variate spherical vector Z induced by the law.

    For the Gaussian law ||Z|| follows the chi law with d degrees of freedom.
    ``points`` may list known kink locations of g to help the quadrature.
    """
    if d < 1:
        raise DomainError(f"dimension must be >= 1, got {d}")
    rho = _radius_pdf(law, d)
    rmax = radius_quantile(law, d, 1.0 - _TAIL)
    return _quad(lambda r: g(r) * rho(r), 0.0, rmax, points=points)


def expect_direction(
    g: Callable[[float], float],
    d: int,
    points: Optional[Sequence[float]] = None,
) -> float:
    """E g(U_1) for U uniform on the unit sphere in R^d.

    The marginal density of U_1 on [-1, 1] is proportional to
    (1 - t^2)^((d-3)/2); the substitution t = cos(theta) removes the d = 2
    endpoint singularity.  d = 1 is the two-point law on {-1, +1}.
    """
    if d < 1:
        raise DomainError(f"dimension must be >= 1, got {d}")
    if d == 1:
        return 0.5 * (g(1.0) + g(-1.0))
    znorm = np.exp(special.gammaln(d / 2.0) - special.gammaln((d - 1) / 2.0))
    znorm /= np.sqrt(np.pi)
    theta_pts = None
    if points:
        theta_pts = [np.arccos(np.clip(p, -1.0, 1.0)) for p in points]
    return _quad(
        lambda th: g(np.cos(th)) * znorm * np.sin(th) ** (d - 2),
        0.0,
        np.pi,
        points=theta_pts,
    )


# ---------------------------------------------------------------------------
# Model container
# ---------------------------------------------------------------------------


class EllipticalModel:
    """Center theta, positive definite Sigma and a symmetric scalar law.

    The symmetric square root of Sigma and its inverse are computed once at
    construction; models are immutable afterwards and safe to share.

    Attributes
    ----------
    theta : (d,) ndarray
    sigma : (d, d) ndarray
    law : RadialLaw
    m0 : float
        MAD of the scalar law.
    dim : int
    sigma_half, sigma_half_inv : (d, d) ndarray
    lambda1 : float
        Largest eigenvalue of sigma.
    """

    def __init__(self, theta, sigma, law: Optional[RadialLaw] = None):
        from .univariate import normal_law

        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        sigma = np.atleast_2d(np.asarray(sigma, dtype=float))
        if theta.ndim != 1 or sigma.shape != (theta.size, theta.size):
            raise DomainError("theta must be a d-vector and sigma a d x d matrix")
        if not np.allclose(sigma, sigma.T, atol=1e-10 * (1 + np.abs(sigma).max())):
            raise DomainError("sigma must be symmetric")
        evals, evecs = np.linalg.eigh(0.5 * (sigma + sigma.T))
        if evals.min() <= 1e-12 * evals.max() or evals.max() <= 0.0:
            raise DomainError("sigma must be positive definite")
        self.theta = theta
        self.sigma = sigma
        self.law = law if law is not None else normal_law()
        self.law.validate()
        self.dim = theta.size
        self.m0 = radial_m0(self.law)
        self.sigma_half = (evecs * np.sqrt(evals)) @ evecs.T
        self.sigma_half_inv = (evecs / np.sqrt(evals)) @ evecs.T
        self.lambda1 = float(evals.max())

    def standardize(self, x) -> np.ndarray:
        """Sigma^{-1/2} (x - theta) for one point or a stack of points."""
        x = np.asarray(x, dtype=float)
        return (x - self.theta) @ self.sigma_half_inv

    def __repr__(self):
        return (
            f"EllipticalModel(d={self.dim}, law={self.law.name!r}, "
            f"m0={self.m0:.6g})"
        )
