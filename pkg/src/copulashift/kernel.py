"""Positive-definite kernel on the copula square and bandwidth selection."""

from __future__ import annotations

import math

import numpy as np
from scipy.spatial.distance import pdist

from .core import DataError

DEFAULT_SUBSAMPLE_CAP = 1000


class TooFewPoints(DataError):
    def __init__(self, m: int):
        super().__init__(f"median heuristic needs at least 2 points, got {m}")


def gaussian(u, v, gamma: float) -> float | np.ndarray:
    """exp(-gamma * ||u - v||^2) for points in the unit square.

    Symmetric in (u, v), strictly decreasing in the distance, valued in
    (0, 1].  Accepts single points (length-2) or broadcastable arrays whose
    last axis is the coordinate pair.
    """
    du = np.asarray(u, dtype=np.float64) - np.asarray(v, dtype=np.float64)
    out = np.exp(-gamma * (du * du).sum(axis=-1))
    return float(out) if out.ndim == 0 else out


def median_heuristic(points: np.ndarray, cap: int = DEFAULT_SUBSAMPLE_CAP) -> float:
    """Bandwidth gamma = 1 / (2 * sigma^2), sigma the median pairwise distance.

    For clouds above ``cap`` points an even-stride thinning keeps the
    computation quadratic in ``cap`` only; below the cap every pair enters
    and the result is invariant to the order of ``points``.  Callers should
    pass points in a canonical (row) order so the stride rule is
    reproducible.  A degenerate cloud (sigma = 0) falls back to gamma = 1.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2:
        pts = pts.reshape(len(pts), -1)
    m = pts.shape[0]
    if m < 2:
        raise TooFewPoints(m)
    if m > cap:
        stride = math.ceil(m / cap)
        pts = pts[::stride]
    sigma = float(np.median(pdist(pts)))
    if sigma == 0.0:
        return 1.0
    return 1.0 / (2.0 * sigma * sigma)


def rank_table(kernel: str, gamma: float, k: int) -> np.ndarray:
    """Kernel values on the pseudo-observation grid, indexed by rank offsets.

    Pseudo-observations built from a k-neighbourhood live on the lattice
    {1/k, ..., 1}^2, so the kernel value between any two of them depends only
    on the pair of absolute rank differences (a, b), 0 <= a, b < k.  The
    returned (k, k) table maps those offsets to kernel values; estimator
    sums become exact integer-indexed lookups.
    """
    if kernel == "constant":
        return np.ones((k, k))
    if kernel == "gaussian":
        d = np.arange(k, dtype=np.float64)
        return np.exp(-gamma * (d[:, None] ** 2 + d[None, :] ** 2) / float(k * k))
    raise ValueError(f"unknown kernel {kernel!r}")
