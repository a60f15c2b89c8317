"""Depth-weighted location and scatter, and the sphericity statistic.

The location is the w1-weighted average of the observations with weights
evaluated at their projection depths; the scatter is the w2-weighted second
moment matrix about that location, divided by the total w2 weight.  Depths
are computed once per point and shared by both stages.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .depth import DataMatrix, DepthMethod, pd_empirical_batch
from .errors import DegenerateWeightsError, DomainError
from .weights import WeightSpec, weight_eval

__all__ = [
    "ScatterEstimate",
    "weighted_location",
    "weighted_scatter",
    "pws_fit",
    "phi0",
]


@dataclass(frozen=True)
class ScatterEstimate:
    location: np.ndarray
    scatter: np.ndarray
    depths: np.ndarray
    weights1: np.ndarray
    weights2: np.ndarray


def _weights(depths, spec: WeightSpec, what: str) -> np.ndarray:
    w = np.asarray(weight_eval(spec, np.asarray(depths, dtype=float)))
    total = w.sum()
    if not total > 0.0:
        raise DegenerateWeightsError(
            f"total {what} weight is zero; every depth fell below the weight support"
        )
    return w


def weighted_location(data: DataMatrix, depths, w1: WeightSpec) -> np.ndarray:
    """Depth-weighted mean: sum x_i w1(depth_i) / sum w1(depth_i)."""
    w = _weights(depths, w1, "location")
    return (w[:, None] * data.rows).sum(axis=0) / w.sum()


def weighted_scatter(data: DataMatrix, depths, location, w2: WeightSpec) -> np.ndarray:
    """Depth-weighted scatter about ``location`` (divisor: total w2 weight)."""
    w = _weights(depths, w2, "scatter")
    xc = data.rows - np.asarray(location, dtype=float)
    s = (w[:, None, None] * (xc[:, :, None] * xc[:, None, :])).sum(axis=0) / w.sum()
    return 0.5 * (s + s.T)


def pws_fit(data: DataMatrix, k: int, method: DepthMethod,
            w1: WeightSpec, w2: WeightSpec) -> ScatterEstimate:
    """Full pipeline: per-point depths once, then weighted location and scatter."""
    depths = pd_empirical_batch(data, k, method)
    location = weighted_location(data, depths, w1)
    scatter = weighted_scatter(data, depths, location, w2)
    return ScatterEstimate(
        location=location,
        scatter=scatter,
        depths=depths,
        weights1=np.asarray(weight_eval(w1, depths)),
        weights2=np.asarray(weight_eval(w2, depths)),
    )


def phi0(T) -> float:
    """Sphericity statistic (trace(T)/d)^d / det(T); 1 iff T is a multiple of I.

    Computed through the eigenvalues for scale stability.
    """
    T = np.asarray(T, dtype=float)
    if T.ndim != 2 or T.shape[0] != T.shape[1]:
        raise DomainError("phi0 expects a square matrix")
    if not np.allclose(T, T.T, atol=1e-10 * (1.0 + np.abs(T).max())):
        raise DomainError("phi0 expects a symmetric matrix")
    evals = np.linalg.eigvalsh(0.5 * (T + T.T))
    if evals.min() <= 0.0:
        raise DomainError("phi0 expects a positive definite matrix")
    d = T.shape[0]
    return float(np.exp(d * np.log(evals.mean()) - np.log(evals).sum()))
