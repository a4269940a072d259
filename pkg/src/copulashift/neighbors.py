"""k-nearest-neighbour queries over a confounder point cloud.

Euclidean metric throughout.  Results are totally deterministic: neighbours
are ordered by (distance, original point index), so ties at any position --
including exact duplicates of the query -- always resolve to the lowest
index.  A query point that is itself a member of the cloud is eligible and,
being at distance zero, is returned; there is no self-exclusion.

Three interchangeable query paths sit behind :class:`NeighborIndex`:

* a sorted-array scan for one-dimensional clouds (the common case here),
* a kd-tree (scipy ``cKDTree``) for moderate dimensions, with a
  tie-resolution pass so its output is indistinguishable from brute force,
* plain brute force for tiny clouds (m < 64) or high dimension (d > 16),
  where a tree buys nothing.

:func:`brute_force_knn` is public and serves as the reference
implementation the fast paths are tested against.
"""

from __future__ import annotations

import numpy as np
from numba import njit
from scipy.spatial import cKDTree

from .core import ConfigError, DataError

BRUTE_MAX_POINTS = 64
BRUTE_MIN_DIM = 17


class EmptyCloud(DataError):
    def __init__(self):
        super().__init__("cannot build an index over zero points")


class KTooLarge(ConfigError):
    def __init__(self, k: int, m: int):
        super().__init__(f"requested k={k} neighbours from a cloud of {m} points")


def _sq_dists(points: np.ndarray, queries: np.ndarray) -> np.ndarray:
    # Accumulate per coordinate in order; matches the kd-tree's arithmetic
    # bit for bit, so distance ties agree across paths.
    out = np.zeros((queries.shape[0], points.shape[0]))
    for j in range(points.shape[1]):
        out += (queries[:, j, None] - points[None, :, j]) ** 2
    return out


def brute_force_knn(
    points: np.ndarray, queries: np.ndarray, k: int
) -> tuple[np.ndarray, np.ndarray]:
    """All-pairs reference query: indices and distances, shape (nq, k).

    Neighbours are sorted by (distance, index); a stable argsort on the
    distance matrix implements exactly that tie rule.
    """
    dist = np.sqrt(_sq_dists(points, queries))
    order = np.argsort(dist, axis=1, kind="stable")[:, :k]
    return order, np.take_along_axis(dist, order, axis=1)


@njit(cache=True)
def _knn_sorted_1d(sv, sidx, q, k, out):
    # sv: cloud values sorted ascending, stable in original index; sidx: the
    # original indices in that order.  Fills `out` with k original indices
    # ordered by (|value - q|, original index).  Runs of equal values are
    # emitted run-at-a-time so equidistant points come out index-ascending.
    m = sv.shape[0]
    lo, hi = 0, m
    while lo < hi:
        mid = (lo + hi) // 2
        if sv[mid] < q:
            lo = mid + 1
        else:
            hi = mid
    left = lo - 1
    right = lo
    filled = 0
    while filled < k:
        dl = q - sv[left] if left >= 0 else np.inf
        dr = sv[right] - q if right < m else np.inf
        if dl < dr:
            la = left
            while la - 1 >= 0 and sv[la - 1] == sv[left]:
                la -= 1
            i = la
            while filled < k and i <= left:
                out[filled] = sidx[i]
                filled += 1
                i += 1
            left = la - 1
        elif dr < dl:
            rb = right
            while rb + 1 < m and sv[rb + 1] == sv[right]:
                rb += 1
            j = right
            while filled < k and j <= rb:
                out[filled] = sidx[j]
                filled += 1
                j += 1
            right = rb + 1
        else:
            # Equal distance on both sides: merge the two equal-value runs by
            # ascending original index.
            la = left
            while la - 1 >= 0 and sv[la - 1] == sv[left]:
                la -= 1
            rb = right
            while rb + 1 < m and sv[rb + 1] == sv[right]:
                rb += 1
            i = la
            j = right
            sentinel = np.int64(1) << 62
            while filled < k and (i <= left or j <= rb):
                ii = sidx[i] if i <= left else sentinel
                jj = sidx[j] if j <= rb else sentinel
                if ii < jj:
                    out[filled] = ii
                    i += 1
                else:
                    out[filled] = jj
                    j += 1
                filled += 1
            left = la - 1
            right = rb + 1


@njit(cache=True)
def _knn_1d_batch(sv, sidx, queries, k):
    nq = queries.shape[0]
    out = np.empty((nq, k), np.int64)
    for i in range(nq):
        _knn_sorted_1d(sv, sidx, queries[i], k, out[i])
    return out


def _lex_resort(idx: np.ndarray, dist: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Row-wise sort by (distance, index) via one global lexsort.
    nq, kq = idx.shape
    rows = np.repeat(np.arange(nq), kq)
    order = np.lexsort((idx.ravel(), dist.ravel(), rows)).reshape(nq, kq)
    order -= (np.arange(nq) * kq)[:, None]
    return (
        np.take_along_axis(idx, order, axis=1),
        np.take_along_axis(dist, order, axis=1),
    )


class NeighborIndex:
    """Space-partitioning index over an m x d point cloud."""

    def __init__(self, points: np.ndarray):
        pts = np.ascontiguousarray(points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.shape[0] == 0:
            raise EmptyCloud()
        if not np.isfinite(pts).all():
            raise DataError("point cloud contains non-finite entries")
        self.points = pts
        self.m, self.d = pts.shape
        if self.m < BRUTE_MAX_POINTS or self.d >= BRUTE_MIN_DIM:
            self._mode = "brute"
        elif self.d == 1:
            self._mode = "sorted"
            order = np.argsort(pts[:, 0], kind="stable")
            self._sorted_vals = pts[order, 0].copy()
            self._sorted_idx = order.astype(np.int64)
        else:
            self._mode = "tree"
            self._tree = cKDTree(pts)

    def query(self, z: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
        """Indices and distances of the k nearest points to each query.

        ``z`` may be a single d-vector or an (nq, d) batch; the output
        shapes follow ((k,), (k,)) or ((nq, k), (nq, k)).  Distances are
        nondecreasing along each row and ties are index-ascending.
        """
        q = np.ascontiguousarray(z, dtype=np.float64)
        single = q.ndim == 1
        if single:
            q = q.reshape(1, -1)
        if q.shape[1] != self.d:
            raise DataError(f"query dimension {q.shape[1]} != cloud dimension {self.d}")
        if not np.isfinite(q).all():
            raise DataError("query contains non-finite entries")
        if not 1 <= k <= self.m:
            raise KTooLarge(k, self.m)
        if self._mode == "brute":
            idx, dist = brute_force_knn(self.points, q, k)
        elif self._mode == "sorted":
            idx = _knn_1d_batch(self._sorted_vals, self._sorted_idx, q[:, 0], k)
            dist = np.abs(self.points[idx, 0] - q[:, 0, None])
        else:
            idx, dist = self._query_tree(q, k)
        if single:
            return idx[0], dist[0]
        return idx, dist

    def _query_tree(self, q: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
        kq = min(k + 1, self.m)
        dist, idx = self._tree.query(q, k=kq)
        dist = dist.reshape(q.shape[0], kq)
        idx = idx.reshape(q.shape[0], kq)
        if kq > k:
            # A tie across the k-th boundary means the tree's cut is
            # arbitrary; re-resolve those rows from the full tied ball.
            tied = np.flatnonzero(dist[:, k - 1] == dist[:, k])
            idx, dist = idx[:, :k], dist[:, :k]
            for row in tied:
                # Inflate the radius a hair: the tree compares squared
                # distances against r**2, and squaring the reported sqrt can
                # round below the true squared distance.  Extra points sort
                # strictly after the tied ones, so the top-k is unaffected.
                radius = dist[row, k - 1] * (1.0 + 1e-9) + 1e-300
                ball = np.array(
                    self._tree.query_ball_point(q[row], r=radius),
                    dtype=np.int64,
                )
                bd = np.sqrt(_sq_dists(self.points[ball], q[row : row + 1])[0])
                order = np.lexsort((ball, bd))[:k]
                idx[row] = ball[order]
                dist[row] = bd[order]
            untied = np.ones(q.shape[0], dtype=bool)
            untied[tied] = False
            idx[untied], dist[untied] = _lex_resort(idx[untied], dist[untied])
            return idx, dist
        return _lex_resort(idx, dist)
