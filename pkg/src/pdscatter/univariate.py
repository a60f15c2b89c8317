"""Order-statistic medians, the k-modified MAD, and contaminated-quantile solvers.

The k-shifted median ``med_k`` averages the order statistics with (1-based)
indices floor((n+k)/2) and floor((n+1+k)/2); k=1 is the conventional median.
``mad_k`` nests the conventional median inside the k-shifted one, which is the
lever that raises the breakdown point of the projection-based estimators
downstream.

The contaminated-quantile solvers return the quantities d1, m1, m2 describing
how the median and the MAD of a symmetric scalar law move under an eps amount
of point-mass contamination, plus the resulting closed-form contaminated
(median, MAD) pair.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ContaminationError, DomainError, NumericError

__all__ = [
    "RadialLaw",
    "normal_law",
    "med_k",
    "mad_k",
    "solve_d1",
    "solve_m",
    "contaminated_med_mad",
    "bisect_root",
]

_BISECT_TOL = 1e-12


# ---------------------------------------------------------------------------
# Scalar law container
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RadialLaw:
    """A symmetric scalar law given by its cdf, density and quantile function.

    ``radius_pdf(r, d)`` and ``radius_quantile(p, d)``, when provided, describe
    the law of the Euclidean norm of the d-variate spherical vector whose
    one-dimensional projections follow this law.  They are required for the
    d >= 2 population computations; the Gaussian factory supplies the chi
    distribution.  For d = 1 the folded law is always available.
    """

    name: str
    cdf: Callable[[float], float]
    pdf: Callable[[float], float]
    quantile: Callable[[float], float]
    radius_pdf: Optional[Callable[[np.ndarray, int], np.ndarray]] = field(
        default=None, compare=False
    )
    radius_quantile: Optional[Callable[[float, int], float]] = field(
        default=None, compare=False
    )

    def validate(self, grid: Sequence[float] = (0.1, 0.3, 0.7, 1.1, 1.9, 3.0)) -> None:
        """Check symmetry and that quantile inverts cdf on a test grid.

        Laws with flat cdf regions fail the inverse check and are rejected,
        which is what makes the downstream root solvers well defined.
        """
        for y in grid:
            if abs(self.cdf(-y) - (1.0 - self.cdf(y))) > 1e-12:
                raise DomainError(f"law {self.name!r} is not symmetric at y={y}")
        for p in (0.05, 0.25, 0.5, 0.75, 0.9, 0.99):
            if abs(self.cdf(self.quantile(p)) - p) > 1e-10:
                raise DomainError(
                    f"law {self.name!r}: quantile is not the inverse of cdf at p={p}"
                )
        if self.pdf(0.0) <= 0.0:
            raise DomainError(f"law {self.name!r} has vanishing density at 0")
        m0 = solve_m(self, 0.0, 0.0, 1)
        if self.pdf(m0) <= 0.0:
            raise DomainError(f"law {self.name!r} has vanishing density at its MAD")


def normal_law() -> RadialLaw:
    """The standard normal scalar law, with chi radius profiles attached."""
    from scipy import stats

    norm = stats.norm()

    def radius_pdf(r, d):
        return stats.chi(d).pdf(r)

    def radius_quantile(p, d):
        return float(stats.chi(d).ppf(p))

    return RadialLaw(
        name="normal",
        cdf=lambda y: float(norm.cdf(y)),
        pdf=lambda y: float(norm.pdf(y)),
        quantile=lambda p: float(norm.ppf(p)),
        radius_pdf=radius_pdf,
        radius_quantile=radius_quantile,
    )


# ---------------------------------------------------------------------------
# Order-statistic medians
# ---------------------------------------------------------------------------


def med_k(xs: Sequence[float], k: int) -> float:
    """k-shifted median: average of order statistics floor((n+k)/2), floor((n+1+k)/2)."""
    x = np.asarray(xs, dtype=float)
    n = x.size
    if n == 0:
        raise DomainError("med_k: empty input")
    if not 1 <= k <= n:
        raise DomainError(f"med_k: k={k} outside [1, {n}]")
    s = np.sort(x)
    i1 = (n + k) // 2
    i2 = (n + 1 + k) // 2
    return 0.5 * (s[i1 - 1] + s[i2 - 1])


def mad_k(xs: Sequence[float], k: int) -> float:
    """k-shifted median absolute deviation about the conventional median."""
    x = np.asarray(xs, dtype=float)
    center = med_k(x, 1)
    return med_k(np.abs(x - center), k)


# ---------------------------------------------------------------------------
# Root solving
# ---------------------------------------------------------------------------


def bisect_root(f: Callable[[float], float], lo: float, hi: float,
                tol: float = _BISECT_TOL, max_expand: int = 200) -> float:
    """Bracketing bisection with an upward bracket-expansion phase.

    ``f`` must be nondecreasing with f(lo) <= 0; the bracket [lo, hi] is
    doubled until f(hi) >= 0.
    """
    flo = f(lo)
    if flo > 0.0:
        raise NumericError("bisect_root: f(lo) > 0, no bracket")
    if flo == 0.0:
        return lo
    span = hi - lo
    for _ in range(max_expand):
        if f(hi) >= 0.0:
            break
        span *= 2.0
        hi = lo + span
    else:
        raise NumericError("bisect_root: bracket expansion failed")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol:
            return mid
        if f(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _check_eps(eps: float) -> None:
    if not 0.0 <= eps < 0.5:
        raise ContaminationError(f"contamination fraction {eps} outside [0, 1/2)")


def solve_d1(law: RadialLaw, eps: float) -> float:
    """Shift of the contaminated median: root of P(Y <= d1) = 1/(2(1-eps))."""
    _check_eps(eps)
    if eps == 0.0:
        return 0.0  # median of the symmetric law
    target = 1.0 / (2.0 * (1.0 - eps))
    if not 0.0 < target < 1.0:
        raise ContaminationError(f"target probability {target} outside (0, 1)")
    return bisect_root(lambda y: law.cdf(y) - target, -1.0, 1.0)


def solve_m(law: RadialLaw, c: float, eps: float, kind: int) -> float:
    """Contaminated MAD bracket root: P(|Y - c| <= m) equals the kind-specific target.

    kind=1 solves for (1-2*eps)/(2(1-eps)); kind=2 for 1/(2(1-eps)).  The map
    m -> cdf(c+m) - cdf(c-m) is nondecreasing, so bisection is safe.
    """
    _check_eps(eps)
    if kind == 1:
        target = (1.0 - 2.0 * eps) / (2.0 * (1.0 - eps))
    elif kind == 2:
        target = 1.0 / (2.0 * (1.0 - eps))
    else:
        raise DomainError(f"solve_m: kind must be 1 or 2, got {kind}")
    if not 0.0 < target < 1.0:
        raise DomainError(f"solve_m: target probability {target} outside (0, 1)")
    return bisect_root(lambda m: law.cdf(c + m) - law.cdf(c - m) - target, 0.0, 1.0)


def contaminated_med_mad(law: RadialLaw, t: float, eps: float) -> tuple[float, float]:
    """Median and MAD of the eps-contaminated law with point mass projected at t.

    Standardized form (unit projection scale): the contaminated median is the
    middle of {-d1, t, d1} and the contaminated MAD the middle of
    {m1(med), |t - med|, m2(med)}.
    """
    _check_eps(eps)
    if not math.isfinite(t):
        raise DomainError("contaminated_med_mad: t must be finite")
    d1 = solve_d1(law, eps)
    med = min(max(t, -d1), d1)
    m1 = solve_m(law, med, eps, 1)
    m2 = solve_m(law, med, eps, 2)
    mad = sorted((m1, abs(t - med), m2))[1]
    return med, mad
