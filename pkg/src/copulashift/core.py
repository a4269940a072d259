"""Domain types shared by every other module.

A :class:`Dataset` holds the raw observable sample: a scalar driver ``x``, a
scalar outcome ``y`` and a matrix of confounders ``z``, all over ``n``
time-ordered rows.  Row order is meaningful everywhere in this package and is
never rearranged here.  A :class:`SplitView` pairs a dataset with a split
index ``eta`` that partitions the rows into a pre segment (the first ``eta``
rows) and a post segment (the rest).

All containers are frozen after construction and safe to share across
concurrent workers.  External interfaces (CLI, JSON) report 0-based row
indices; ``eta`` counts the rows in the pre segment, i.e. it equals the
0-based index of the first post-segment row.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class Error(Exception):
    """Base class for all errors raised by this package."""


class DataError(Error):
    """A dataset or series violates a value-level invariant."""


class ConfigError(Error):
    """A parameter combination is outside its documented domain."""


class NonFinite(DataError):
    def __init__(self, row: int, column: str):
        self.row = row
        self.column = column
        super().__init__(f"non-finite value at row {row}, column {column!r}")


class LengthMismatch(DataError):
    def __init__(self, detail: str):
        super().__init__(f"length mismatch: {detail}")


class TooShort(DataError):
    def __init__(self, n: int, minimum: int):
        self.n = n
        self.minimum = minimum
        super().__init__(f"need at least {minimum} rows, got {n}")


class EtaOutOfRange(ConfigError):
    def __init__(self, eta: int, n: int):
        self.eta = eta
        self.n = n
        super().__init__(f"split index eta={eta} outside [1, {n - 1}]")


def _frozen_1d(a, name: str) -> np.ndarray:
    arr = np.array(a, dtype=np.float64, copy=True)
    if arr.ndim != 1:
        raise LengthMismatch(f"{name} must be one-dimensional, got shape {arr.shape}")
    arr.flags.writeable = False
    return arr


def _frozen_2d(a) -> np.ndarray:
    arr = np.array(a, dtype=np.float64, copy=True)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise LengthMismatch(f"z must be two-dimensional, got shape {arr.shape}")
    if arr.shape[1] < 1:
        raise LengthMismatch("z must have at least one column")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Dataset:
    """Time-ordered sample of (x, y, z) triples.

    ``x`` and ``y`` are length-``n`` vectors, ``z`` is an ``n x d`` matrix
    with ``d >= 1``.  Construction freezes copies of the inputs; call
    :func:`validate` to check the full invariants (equal lengths, ``n >= 4``,
    all entries finite).
    """

    x: np.ndarray
    y: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", _frozen_1d(self.x, "x"))
        object.__setattr__(self, "y", _frozen_1d(self.y, "y"))
        object.__setattr__(self, "z", _frozen_2d(self.z))

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def d(self) -> int:
        return self.z.shape[1]


MIN_ROWS = 4


def validate(data: Dataset) -> Dataset:
    """Check all dataset invariants and return the dataset unchanged.

    Raises :class:`LengthMismatch` when the three containers disagree on the
    row count, :class:`TooShort` when ``n < 4``, and :class:`NonFinite`
    (reporting the first offending 0-based row and column name) when any
    entry is NaN or infinite.  Idempotent.
    """
    n = data.x.shape[0]
    if data.y.shape[0] != n or data.z.shape[0] != n:
        raise LengthMismatch(
            f"x has {n} rows, y has {data.y.shape[0]}, z has {data.z.shape[0]}"
        )
    if n < MIN_ROWS:
        raise TooShort(n, MIN_ROWS)
    for name, col in (("x", data.x), ("y", data.y)):
        bad = np.flatnonzero(~np.isfinite(col))
        if bad.size:
            raise NonFinite(int(bad[0]), name)
    finite = np.isfinite(data.z)
    if not finite.all():
        rows, cols = np.nonzero(~finite)
        raise NonFinite(int(rows[0]), f"z_{int(cols[0]) + 1}")
    return data


@dataclass(frozen=True)
class SplitView:
    """A dataset plus a split index ``eta`` (pre = first ``eta`` rows)."""

    data: Dataset
    eta: int

    def __post_init__(self):
        n = self.data.n
        if not 1 <= self.eta <= n - 1:
            raise EtaOutOfRange(self.eta, n)

    @property
    def pre(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        e = self.eta
        return self.data.x[:e], self.data.y[:e], self.data.z[:e]

    @property
    def post(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        e = self.eta
        return self.data.x[e:], self.data.y[e:], self.data.z[e:]


def split(data: Dataset, eta: int) -> SplitView:
    """Return the view that splits ``data`` after its first ``eta`` rows.

    ``eta`` must satisfy ``1 <= eta <= n - 1``; otherwise
    :class:`EtaOutOfRange` is raised.  Whether the segments are large enough
    for estimation with a given neighbour count is checked at estimation
    time, not here.
    """
    return SplitView(data=data, eta=int(eta))


@dataclass(frozen=True)
class EstimatorConfig:
    """Tuning knobs for the split statistic.

    ``gamma=None`` selects the bandwidth by the median heuristic on the
    pooled marginal rank pairs of the full sample (see :mod:`kernel`);
    a positive float fixes it.  ``kernel`` is ``"gaussian"`` for real use;
    ``"constant"`` substitutes K = 1 and exists for counting-identity tests.
    """

    k: int = 30
    gamma: float | None = None
    kernel: str = "gaussian"

    def __post_init__(self):
        if self.k < 2:
            raise ConfigError(f"neighbour count k must be >= 2, got {self.k}")
        if self.gamma is not None and not (np.isfinite(self.gamma) and self.gamma > 0):
            raise ConfigError(f"gamma must be finite and positive, got {self.gamma}")
        if self.kernel not in ("gaussian", "constant"):
            raise ConfigError(f"unknown kernel {self.kernel!r}")


@dataclass(frozen=True)
class StatResult:
    """The split statistic and its three components.

    ``q_hat == t1 + t2 - t3`` holds as an arithmetic identity.  With a kernel
    bounded in (0, 1], ``t1, t2`` lie in [0, 1], ``t3`` in [0, 2] and hence
    ``q_hat`` in [-2, 2].  ``gamma`` and ``k`` record the values actually
    used, for reproducibility.
    """

    q_hat: float
    t1: float
    t2: float
    t3: float
    gamma: float
    k: int
