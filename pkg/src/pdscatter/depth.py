"""Projection outlyingness and projection depth.

Empirical outlyingness of x is the largest standardized projection deviation

    O(x) = sup_{||u||=1} (u'x - med_k=1(u'X)) / mad_k(u'X)

over unit directions.  The supremum is approximated from below by a
direction-search method:

* ``Exact1D``     d = 1, closed form |x - med| / mad_k.
* ``Candidate2D`` d = 2, candidate directions are the unit normals to all
  pairwise differences plus the directions from x to each sample point,
  optionally refined by golden-section ascent on the angle.  Cost
  O(n^3 log n) over a whole sample.
* ``Sampled``     any d, seeded uniform directions with optional local
  ascent in random 2-planes through the incumbent.

A direction with zero mad_k contributes +inf when its numerator is positive
(depth 0 downstream) and is skipped otherwise, so the estimators stay defined
off general position.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import DomainError
from .model import EllipticalModel

__all__ = [
    "DataMatrix",
    "Exact1D",
    "Candidate2D",
    "Sampled",
    "DepthMethod",
    "OutlyingnessResult",
    "outlyingness_empirical",
    "pd_empirical",
    "pd_empirical_batch",
    "pd_population",
    "mahalanobis_depth",
]

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


# ---------------------------------------------------------------------------
# Containers
# ---------------------------------------------------------------------------


class DataMatrix:
    """n observations of dimension d, stored as an (n, d) float array."""

    def __init__(self, rows):
        rows = np.asarray(rows, dtype=float)
        if rows.ndim == 1:
            rows = rows[:, None]
        if rows.ndim != 2 or rows.shape[0] < 1 or rows.shape[1] < 1:
            raise DomainError("data must be a nonempty n x d array")
        if not np.all(np.isfinite(rows)):
            raise DomainError("data contains non-finite entries")
        self.rows = rows
        self.n, self.d = rows.shape

    def in_general_position(self, seed: int = 0) -> bool:
        """No more than d points on any (d-1)-dimensional affine subspace.

        Exhaustive for d <= 2, random d-subset heuristic otherwise.
        """
        x, n, d = self.rows, self.n, self.d
        if d == 1:
            return np.unique(x[:, 0]).size == n
        scale = max(1.0, float(np.abs(x).max()))
        if d == 2:
            for i in range(n - 2):
                u = x[i + 1:] - x[i]  # vectors from x_i to later points
                cross = np.abs(u[:, None, 0] * u[None, :, 1]
                               - u[:, None, 1] * u[None, :, 0])
                iu = np.triu_indices(u.shape[0], 1)
                if np.any(cross[iu] < 1e-9 * scale**2):
                    return False
            return True
        rng = np.random.default_rng(seed)
        for _ in range(500):
            idx = rng.choice(n, size=d, replace=False)
            base = x[idx[0]]
            span = x[idx[1:]] - base
            try:
                normal = np.linalg.svd(span)[2][-1]
            except np.linalg.LinAlgError:
                continue
            dist = np.abs((x - base) @ normal)
            if np.count_nonzero(dist < 1e-9 * scale) > d:
                return False
        return True


@dataclass(frozen=True)
class Exact1D:
    pass


@dataclass(frozen=True)
class Candidate2D:
    refine: bool = True


@dataclass(frozen=True)
class Sampled:
    count: int
    refine_steps: int = 0
    seed: int = 0


DepthMethod = Union[Exact1D, Candidate2D, Sampled]


@dataclass(frozen=True)
class OutlyingnessResult:
    value: float
    direction: np.ndarray


# ---------------------------------------------------------------------------
# Per-direction machinery
# ---------------------------------------------------------------------------


def _med_cols(a: np.ndarray, k: int) -> np.ndarray:
    """k-shifted median of each column of a (rows are observations)."""
    n = a.shape[0]
    if not 1 <= k <= n:
        raise DomainError(f"k={k} outside [1, {n}]")
    i1, i2 = (n + k) // 2 - 1, (n + 1 + k) // 2 - 1
    part = np.partition(a, (i1, i2), axis=0)
    return 0.5 * (part[i1] + part[i2])


def _med_mad_cols(proj: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    med = _med_cols(proj, 1)
    mad = _med_cols(np.abs(proj - med), k)
    return med, mad


def _ratios(num: np.ndarray, mad: np.ndarray) -> np.ndarray:
    """num/mad with the degenerate-direction conventions applied.

    num is nonnegative; a zero-mad direction yields +inf for a positive
    numerator and is skipped (contributes 0) for a zero one.  Broadcasts.
    """
    with np.errstate(divide="ignore", invalid="ignore"):
        out = num / mad
    return np.where(np.isnan(out), 0.0, out)


def _candidate_dirs_2d(data: np.ndarray, x: Optional[np.ndarray]) -> np.ndarray:
    """Normals to pairwise differences, plus directions from sample points to x."""
    n = data.shape[0]
    ii, jj = np.triu_indices(n, 1)
    diff = data[ii] - data[jj]
    dirs = [np.column_stack([-diff[:, 1], diff[:, 0]])]
    if x is not None:
        dirs.append(x[None, :] - data)
    else:
        dirs.append(diff)  # batch: every x - x_i is some pairwise difference
    dirs = np.concatenate(dirs)
    nrm = np.linalg.norm(dirs, axis=1)
    dirs = dirs[nrm > 0.0] / nrm[nrm > 0.0, None]
    if dirs.shape[0] == 0:
        raise DomainError("all candidate directions degenerate (identical data)")
    # antipodal pairs evaluate identically; canonicalize the sign
    sgn = np.where(dirs[:, 0] != 0.0, np.sign(dirs[:, 0]), np.sign(dirs[:, 1]))
    return dirs * sgn[:, None]


def _best_direction(dirs, ratios, num_signed) -> tuple[float, np.ndarray]:
    """Max ratio with deterministic ties: lexicographically smallest signed direction."""
    best = np.max(ratios)
    idx = np.flatnonzero(ratios == best)
    signed = dirs[idx] * np.where(num_signed[idx] >= 0.0, 1.0, -1.0)[:, None]
    order = np.lexsort(signed.T[::-1])
    return float(best), signed[order[0]]


def _profile_ratio_2d(angles, data, x, k):
    """Empirical ratio |u'x - med|/mad at unit directions u(angle)."""
    u = np.column_stack([np.cos(angles), np.sin(angles)])
    proj = data @ u.T
    med, mad = _med_mad_cols(proj, k)
    return _ratios(np.abs(x @ u.T - med), mad)


def _bracket(sorted_angles: np.ndarray, a: float) -> tuple[float, float]:
    """Neighbors of angle a in the sorted candidate angles, wrapping mod pi."""
    m = sorted_angles.size
    left = np.searchsorted(sorted_angles, a, side="left")
    right = np.searchsorted(sorted_angles, a, side="right")
    lo = sorted_angles[left - 1] if left > 0 else sorted_angles[-1] - np.pi
    hi = sorted_angles[right] if right < m else sorted_angles[0] + np.pi
    if hi <= lo:
        lo, hi = a - np.pi / max(m, 4), a + np.pi / max(m, 4)
    return float(lo), float(hi)


def _golden_max(f, lo, hi, iters=60):
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
        if b - a < 1e-12:
            break
    return (fc, c) if fc >= fd else (fd, d)


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------


def outlyingness_empirical(x, data: DataMatrix, k: int,
                           method: DepthMethod) -> OutlyingnessResult:
    """Empirical projection outlyingness of x with the chosen direction search."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if not np.all(np.isfinite(x)):
        raise DomainError("query point contains non-finite entries")
    if x.shape != (data.d,):
        raise DomainError(f"query point has dimension {x.shape}, data is d={data.d}")

    if isinstance(method, Exact1D):
        if data.d != 1:
            raise DomainError("Exact1D requires d = 1")
        from .univariate import mad_k as _madk, med_k as _medk
        med = _medk(data.rows[:, 0], 1)
        mad = _madk(data.rows[:, 0], k)
        num = x[0] - med
        if mad == 0.0:
            val = np.inf if abs(num) > 0.0 else 0.0
        else:
            val = abs(num) / mad
        direction = np.array([1.0 if num >= 0.0 else -1.0])
        return OutlyingnessResult(float(val), direction)

    if isinstance(method, Candidate2D):
        if data.d != 2:
            raise DomainError("Candidate2D requires d = 2")
        dirs = _candidate_dirs_2d(data.rows, x)
        proj = data.rows @ dirs.T
        med, mad = _med_mad_cols(proj, k)
        num_signed = x @ dirs.T - med
        ratios = _ratios(np.abs(num_signed), mad)
        val, direction = _best_direction(dirs, ratios, num_signed)
        if method.refine and np.isfinite(val):
            # deviation-rank switches create kinks at angles outside the
            # candidate set, so probe a uniform fill and golden-polish the
            # best brackets of the merged angle grid
            cand = np.arctan2(dirs[:, 1], dirs[:, 0]) % np.pi
            fill = np.arange(max(2048, 4 * data.n)) * np.pi / max(2048, 4 * data.n)
            angles = np.unique(np.concatenate([cand, fill]))
            prof = _profile_ratio_2d(angles, data.rows, x, k)
            if np.all(np.isfinite(prof)):
                for i in np.argsort(prof)[-12:]:
                    lo, hi = _bracket(angles, float(angles[i]))
                    fval, abest = _golden_max(
                        lambda a: float(_profile_ratio_2d(
                            np.array([a]), data.rows, x, k)[0]),
                        lo, hi)
                    if fval > val:
                        val = fval
                        u = np.array([np.cos(abest), np.sin(abest)])
                        s = np.sign(x @ u - _med_cols(data.rows @ u[:, None], 1)[0])
                        direction = u * (s if s != 0 else 1.0)
        return OutlyingnessResult(float(val), direction)

    if isinstance(method, Sampled):
        if method.count < data.d + 1:
            raise DomainError("Sampled.count must be at least d + 1")
        rng = np.random.default_rng(method.seed)
        dirs = rng.standard_normal((method.count, data.d))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        proj = data.rows @ dirs.T
        med, mad = _med_mad_cols(proj, k)
        num_signed = x @ dirs.T - med
        ratios = _ratios(np.abs(num_signed), mad)
        val, direction = _best_direction(dirs, ratios, num_signed)
        for _ in range(method.refine_steps):
            if not np.isfinite(val):
                break
            v = rng.standard_normal(data.d)
            v -= (v @ direction) * direction
            nv = np.linalg.norm(v)
            if nv < 1e-12:
                continue
            v /= nv

            def ascent(beta, u0=direction, w0=v):
                u = np.cos(beta) * u0 + np.sin(beta) * w0
                p = data.rows @ u
                m, s = _med_mad_cols(p[:, None], k)
                return float(_ratios(np.abs(np.array([x @ u - m[0]])),
                                     np.array([s[0]]))[0])

            grid = np.linspace(-np.pi / 2, np.pi / 2, 33)
            vals = np.array([ascent(b) for b in grid])
            bi = int(np.argmax(vals))
            lo = grid[max(bi - 1, 0)]
            hi = grid[min(bi + 1, grid.size - 1)]
            fval, beta = _golden_max(ascent, lo, hi, iters=40)
            if fval > val:
                val = fval
                direction = np.cos(beta) * direction + np.sin(beta) * v
                direction /= np.linalg.norm(direction)
        return OutlyingnessResult(float(val), direction)

    raise DomainError(f"unknown depth method {method!r}")


def pd_empirical(x, data: DataMatrix, k: int, method: DepthMethod) -> float:
    """Projection depth 1/(1 + O(x)); infinite outlyingness maps to 0."""
    value = outlyingness_empirical(x, data, k, method).value
    if np.isinf(value):
        return 0.0
    return 1.0 / (1.0 + value)


def pd_empirical_batch(data: DataMatrix, k: int, method: DepthMethod) -> np.ndarray:
    """Depths of every sample point, sharing one candidate set and one med/mad pass.

    For Candidate2D the shared set is the union of all pairwise-difference
    directions and their normals, a superset of each point's own candidate
    set; the approximation can only move toward the true supremum.
    """
    x = data.rows
    if isinstance(method, Exact1D):
        if data.d != 1:
            raise DomainError("Exact1D requires d = 1")
        from .univariate import mad_k as _madk, med_k as _medk
        med = _medk(x[:, 0], 1)
        mad = _madk(x[:, 0], k)
        o = _ratios(np.abs(x[:, 0] - med), np.full(data.n, mad))
    elif isinstance(method, Candidate2D):
        if data.d != 2:
            raise DomainError("Candidate2D requires d = 2")
        dirs = _candidate_dirs_2d(x, None)
        o = _batch_max_ratio(x, dirs, k)
        if method.refine:
            # full per-point search: kink-robust but O(n^3 log n)
            for i in range(data.n):
                res = outlyingness_empirical(x[i], data, k, method)
                o[i] = max(o[i], res.value)
    elif isinstance(method, Sampled):
        if method.count < data.d + 1:
            raise DomainError("Sampled.count must be at least d + 1")
        rng = np.random.default_rng(method.seed)
        dirs = rng.standard_normal((method.count, data.d))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        o = _batch_max_ratio(x, dirs, k)
        # local ascent per point is delegated to the single-point path
        if method.refine_steps > 0:
            for i in range(data.n):
                res = outlyingness_empirical(x[i], data, k, method)
                o[i] = max(o[i], res.value)
    else:
        raise DomainError(f"unknown depth method {method!r}")
    with np.errstate(invalid="ignore"):
        depths = np.where(np.isinf(o), 0.0, 1.0 / (1.0 + o))
    return depths


def _batch_max_ratio(x, dirs, k, chunk=20000):
    n = x.shape[0]
    out = np.zeros(n)
    for start in range(0, dirs.shape[0], chunk):
        dd = dirs[start:start + chunk]
        proj = x @ dd.T
        med, mad = _med_mad_cols(proj, k)
        out = np.maximum(out, _ratios(np.abs(proj - med), mad).max(axis=1))
    return out


def pd_population(x, model: EllipticalModel) -> float:
    """Population projection depth at an elliptical model: 1/(1 + ||z|| / m0)."""
    z = model.standardize(np.asarray(x, dtype=float))
    return 1.0 / (1.0 + np.linalg.norm(z) / model.m0)


def mahalanobis_depth(x, center, scatter) -> float:
    """1/(1 + squared Mahalanobis distance); a cheap second depth."""
    x = np.asarray(x, dtype=float)
    center = np.asarray(center, dtype=float)
    scatter = np.asarray(scatter, dtype=float)
    evals = np.linalg.eigvalsh(0.5 * (scatter + scatter.T))
    if evals.min() <= 0.0:
        raise DomainError("scatter matrix must be positive definite")
    diff = x - center
    d2 = diff @ np.linalg.solve(scatter, diff)
    return 1.0 / (1.0 + float(d2))
