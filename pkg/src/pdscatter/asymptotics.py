"""Asymptotic constants, efficiency, influence functions and limit covariance.

All quantities live on the standardized scale Z = Sigma^{-1/2}(X - theta):
with R = ||Z|| and U = Z/||Z|| uniform on the sphere,

    s0(x)  = 1/(1 + x/m0)                       population depth profile
    s_i(x) = E U_1^{2(i-1)} sign(|U_1| x - m0)   direction sign moments
    c0     = E w2(s0(R))
    c1     = E R^2 w2(s0(R)) / (d c0)            Fisher-consistency factor
    c_j    = E R^{2j-3} s0(R)^2 w2'(s0(R)) / (4 m0^2 p(m0)),  j = 2, 3

and the influence kernel of the scatter functional is

    K(x) = Sigma^{1/2} (t1(R) UU' + t2(R) I) Sigma^{1/2} / c0.

The direction sign moments have closed forms through the regularized
incomplete beta function (U_1^2 is Beta(1/2, (d-1)/2)); the radial
expectations are one-dimensional adaptive quadratures.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DegenerateWeightsError, DomainError, SingularDirectionError
from .model import EllipticalModel, expect_radial, radial_m0, radius_quantile
from .univariate import RadialLaw, normal_law
from .weights import WeightSpec, weight_deriv, weight_eval

__all__ = [
    "AsymptoticConstants",
    "s0_eval",
    "s_moments",
    "c_constants",
    "t_funcs",
    "sigma_pair",
    "are_shape",
    "g2_index",
    "if_pws",
    "if_pd",
    "v_matrix",
    "commutation_matrix",
    "lrt_limit_scale",
]


def s0_eval(x: float, m0: float) -> float:
    """Population depth profile 1/(1 + x/m0) for radius x >= 0."""
    if x < 0.0:
        raise DomainError("s0 argument must be nonnegative")
    if m0 <= 0.0:
        raise DomainError("m0 must be positive")
    return 1.0 / (1.0 + x / m0)


def s_moments(x, d: int, m0: float):
    """(s1, s2): sign moments of |U_1| x - m0 over the sphere marginal.

    s1 = 1 - 2 P(|U_1| <= m0/x), s2 = 1/d - 2 E[U_1^2; |U_1| <= m0/x];
    both pieces are regularized incomplete beta values.  For d = 1 the
    marginal is the two-point law, so s1 = s2 = sign(x - m0).
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0.0):
        raise DomainError("s_moments argument must be nonnegative")
    if d == 1:
        s = np.sign(x - m0)
        return s, s
    q = np.clip(m0 / np.maximum(x, 1e-300), 0.0, 1.0)
    q2 = q * q
    p_le = special.betainc(0.5, (d - 1) / 2.0, q2)
    e2_le = special.betainc(1.5, (d - 1) / 2.0, q2) / d
    return 1.0 - 2.0 * p_le, 1.0 / d - 2.0 * e2_le


@dataclass(frozen=True)
class AsymptoticConstants:
    d: int
    w2: WeightSpec
    law: RadialLaw
    m0: float
    pm0: float
    p0: float
    c0: float
    c1: float
    c2: float
    c3: float
    sigma1: float
    sigma2: float

    def t1(self, r):
        return t_funcs(r, self)[0]

    def t2(self, r):
        return t_funcs(r, self)[1]


def _kink_points(m0: float, cutoff: float):
    # s0(r) crosses the weight cutoff at r = m0 (1/C - 1); s_i kink at r = m0
    return [m0, m0 * (1.0 / cutoff - 1.0)]


def c_constants(d: int, w2: WeightSpec, law: RadialLaw | None = None) -> AsymptoticConstants:
    """Compute the full constant set for dimension d and scatter weight w2."""
    if law is None:
        law = normal_law()
    if d < 1:
        raise DomainError(f"dimension must be >= 1, got {d}")
    m0 = radial_m0(law)
    pm0 = law.pdf(m0)
    p0 = law.pdf(0.0)
    pts = _kink_points(m0, w2.cutoff)

    def s0r(r):
        return 1.0 / (1.0 + r / m0)

    c0 = expect_radial(lambda r: weight_eval(w2, s0r(r)), d, law, points=pts)
    if not c0 > 0.0:
        raise DegenerateWeightsError("c0 = 0: weight support excludes all depth mass")
    c1 = expect_radial(lambda r: r * r * weight_eval(w2, s0r(r)), d, law, points=pts)
    c1 /= d * c0
    denom = 4.0 * m0 * m0 * pm0
    c2 = expect_radial(
        lambda r: r * s0r(r) ** 2 * weight_deriv(w2, s0r(r)), d, law, points=pts
    ) / denom
    c3 = expect_radial(
        lambda r: r ** 3 * s0r(r) ** 2 * weight_deriv(w2, s0r(r)), d, law, points=pts
    ) / denom

    consts = AsymptoticConstants(
        d=d, w2=w2, law=law, m0=m0, pm0=pm0, p0=p0,
        c0=c0, c1=c1, c2=c2, c3=c3, sigma1=np.nan, sigma2=np.nan,
    )
    sigma1, sigma2 = sigma_pair(consts)
    return AsymptoticConstants(
        d=d, w2=w2, law=law, m0=m0, pm0=pm0, p0=p0,
        c0=c0, c1=c1, c2=c2, c3=c3, sigma1=sigma1, sigma2=sigma2,
    )


def t_funcs(r, consts: AsymptoticConstants):
    """Influence kernel profiles (t1, t2) at radius r (vectorized)."""
    r = np.asarray(r, dtype=float)
    d, m0 = consts.d, consts.m0
    s1, s2 = s_moments(r, d, m0)
    stilde = np.zeros_like(s1) if d == 1 else (s1 - s2) / (d - 1)
    w = weight_eval(consts.w2, 1.0 / (1.0 + r / m0))
    t1 = consts.c3 * (s2 - stilde) + r * r * w
    t2 = consts.c3 * stilde - consts.c1 * consts.c2 * s1 - consts.c1 * w
    return t1, t2


def sigma_pair(consts: AsymptoticConstants) -> tuple[float, float]:
    """(sigma1, sigma2) of the limiting covariance, by radial quadrature."""
    d, law = consts.d, consts.law
    pts = _kink_points(consts.m0, consts.w2.cutoff)

    def t12(r):
        return t_funcs(r, consts)

    e_t1sq = expect_radial(lambda r: float(t12(r)[0] ** 2), d, law, points=pts)
    e_t1t2 = expect_radial(lambda r: float(t12(r)[0] * t12(r)[1]), d, law, points=pts)
    e_t2sq = expect_radial(lambda r: float(t12(r)[1] ** 2), d, law, points=pts)
    c0sq = consts.c0 ** 2
    sigma1 = e_t1sq / (d * (d + 2) * c0sq)
    sigma2 = sigma1 + 2.0 * e_t1t2 / (d * c0sq) + e_t2sq / c0sq
    return float(sigma1), float(sigma2)


def are_shape(d: int, w2: WeightSpec, kappa: float = 0.0,
              law: RadialLaw | None = None,
              consts: AsymptoticConstants | None = None) -> float:
    """Asymptotic relative efficiency of the shape estimate: c1^2 (1 + kappa) / sigma1.

    kappa is the model kurtosis parameter of the benchmark sample covariance
    (0 at the normal).
    """
    if kappa < -1.0:
        raise DomainError("kappa must be >= -1")
    if consts is None:
        consts = c_constants(d, w2, law)
    return consts.c1 ** 2 * (1.0 + kappa) / consts.sigma1


def _sup_on_grid(f, grid):
    vals = f(grid)
    i = int(np.argmax(vals))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, grid.size - 1)]
    from .depth import _golden_max
    fval, _ = _golden_max(lambda r: float(f(np.array([r]))[0]), lo, hi)
    return max(float(vals[i]), fval)


def g2_index(d: int, w2: WeightSpec, law: RadialLaw | None = None,
             consts: AsymptoticConstants | None = None,
             grid_size: int = 4096) -> float:
    """Gross-error-sensitivity index of the shape: sup_r t1(r) / (c0 (d + 2))."""
    if consts is None:
        consts = c_constants(d, w2, law)
    rmax = radius_quantile(consts.law, d, 1.0 - 1e-10)
    grid = np.linspace(1e-9, rmax, grid_size)
    sup = _sup_on_grid(lambda r: t_funcs(r, consts)[0], grid)
    return sup / (consts.c0 * (d + 2))


def if_pws(x, model: EllipticalModel, consts: AsymptoticConstants) -> np.ndarray:
    """Influence function of the scatter functional at contamination point x.

    Sigma^{1/2} (t1(||z||) zz'/||z||^2 + t2(||z||) I) Sigma^{1/2} / c0; the
    rank-one term extends continuously to 0 at x = theta since t1(0) = 0.
    """
    z = model.standardize(np.asarray(x, dtype=float))
    r = float(np.linalg.norm(z))
    t1, t2 = t_funcs(r, consts)
    core = float(t2) * np.eye(model.dim)
    if r > 0.0:
        u = z / r
        core = core + float(t1) * np.outer(u, u)
    return model.sigma_half @ core @ model.sigma_half / consts.c0


def if_pd(x, y, model: EllipticalModel) -> float:
    """Influence of contamination at x on the projection depth of y.

    Piecewise constant in x between the two sign surfaces: with
    ytil = Sigma^{-1/2}(y - theta) and inner = ytil' Sigma^{-1/2}(x - theta),

        s0(||ytil||)^2/m0 * ( ||ytil|| sign(|inner| - m0 ||ytil||)/(4 m0 p(m0))
                              + sign(inner)/(2 p(0)) ).
    """
    xt = model.standardize(np.asarray(x, dtype=float))
    yt = model.standardize(np.asarray(y, dtype=float))
    ry = float(np.linalg.norm(yt))
    if ry == 0.0:
        raise SingularDirectionError(
            "depth influence undefined at y = theta (maximizing direction not unique)"
        )
    m0 = model.m0
    inner = float(yt @ xt)
    s0sq = (1.0 / (1.0 + ry / m0)) ** 2
    mad_part = ry * np.sign(abs(inner) - m0 * ry) / (4.0 * m0 * model.law.pdf(m0))
    med_part = np.sign(inner) / (2.0 * model.law.pdf(0.0))
    return s0sq / m0 * (mad_part + med_part)


def commutation_matrix(d: int) -> np.ndarray:
    """K_{d,d}: the d^2 x d^2 matrix with K vec(M) = vec(M')."""
    K = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            K[i + j * d, j + i * d] = 1.0
    return K


def v_matrix(consts: AsymptoticConstants, sigma) -> np.ndarray:
    """Limiting covariance of vec of the scatter estimate:

    sigma1 (I + K_{d,d}) (Sigma (x) Sigma) + sigma2 vec(Sigma) vec(Sigma)'.
    """
    sigma = np.asarray(sigma, dtype=float)
    d = sigma.shape[0]
    if sigma.shape != (d, d):
        raise DomainError("sigma must be square")
    if np.linalg.eigvalsh(0.5 * (sigma + sigma.T)).min() <= 0.0:
        raise DomainError("sigma must be positive definite")
    vec = sigma.reshape(-1, order="F")
    kron = np.kron(sigma, sigma)
    eye = np.eye(d * d)
    return (consts.sigma1 * (eye + commutation_matrix(d)) @ kron
            + consts.sigma2 * np.outer(vec, vec))


def lrt_limit_scale(consts: AsymptoticConstants) -> tuple[float, int]:
    """Scale and degrees of freedom of the limiting chi-square of n log phi0.

    For the depth-weighted scatter the scale is sigma1/c1^2; the degrees of
    freedom are (d - 1)(d + 2)/2.
    """
    d = consts.d
    return consts.sigma1 / consts.c1 ** 2, (d - 1) * (d + 2) // 2
