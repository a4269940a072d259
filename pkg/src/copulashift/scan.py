"""Multi-change-point detection over a series via a sliding window.

The statistic trace evaluates the split statistic on every window of 2W
consecutive rows split at its midpoint: trace position i (0-based, W <= i <=
n - W) uses rows [i - W, i) against rows [i, i + W), so i is the index of the
first post-window row.  Candidates are then selected greedily -- take the
arg-max of the remaining trace, suppress every position strictly closer than
W, repeat until the trace is exhausted -- and each candidate's window is
re-tested with the permutation test.  A candidate enters the accepted set
when its p-value passes the threshold, either raw or after a
Benjamini-Yekutieli step-up over the candidate family.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._rng import DOMAIN_SCAN, derive_seed
from .core import ConfigError, Dataset, EstimatorConfig, SplitView
from .estimator import estimate_q
from .inference import PermutationPlan, permutation_test

CORRECTIONS = ("none", "benjamini_yekutieli")


class WindowTooLarge(ConfigError):
    def __init__(self, window: int, n: int):
        super().__init__(f"window W={window} needs 2W <= n, got n={n}")


@dataclass(frozen=True)
class ScanConfig:
    """Window half-width, trace stride, threshold and correction policy."""

    window: int
    step: int = 1
    p_bar: float = 0.05
    b: int = 499
    correction: str = "benjamini_yekutieli"
    estimator: EstimatorConfig = field(default_factory=EstimatorConfig)
    seed: int = 0

    def __post_init__(self):
        if self.window < 2 * self.estimator.k:
            raise ConfigError(
                f"window W={self.window} must be at least 2k={2 * self.estimator.k}"
            )
        if self.step < 1:
            raise ConfigError(f"step must be >= 1, got {self.step}")
        if not 0.0 < self.p_bar < 1.0:
            raise ConfigError(f"p_bar must lie in (0, 1), got {self.p_bar}")
        if self.correction not in CORRECTIONS:
            raise ConfigError(f"correction must be one of {CORRECTIONS}")


@dataclass(frozen=True)
class ScanResult:
    """Trace, candidates in discovery order, their p-values, accepted set."""

    trace_index: np.ndarray
    trace_value: np.ndarray
    candidates: list[int]
    p_values: list[float]
    accepted: list[int]


def statistic_trace(data: Dataset, cfg: ScanConfig) -> tuple[np.ndarray, np.ndarray]:
    """Split statistic of every 2W-row window, stepping by ``cfg.step``."""
    n = data.n
    w = cfg.window
    if 2 * w > n:
        raise WindowTooLarge(w, n)
    positions = np.arange(w, n - w + 1, cfg.step)
    values = np.empty(len(positions))
    for j, i in enumerate(positions):
        window = Dataset(
            x=data.x[i - w : i + w], y=data.y[i - w : i + w], z=data.z[i - w : i + w]
        )
        values[j] = estimate_q(SplitView(window, w), cfg.estimator).q_hat
    return positions, values


def select_candidates(
    trace_index: np.ndarray, trace_value: np.ndarray, window: int
) -> list[int]:
    """Greedy arg-max selection with suppression radius strictly below W.

    Ties at the maximum resolve to the smallest index.  Discovery order is
    preserved; surviving candidates are therefore pairwise at least W apart.
    """
    idx = np.asarray(trace_index)
    val = np.asarray(trace_value)
    if len(idx) == 0:
        raise ConfigError("empty trace")
    alive = np.ones(len(idx), dtype=bool)
    chosen: list[int] = []
    while alive.any():
        live = np.flatnonzero(alive)
        best = live[np.argmax(val[live])]  # argmax returns the first maximum
        chosen.append(int(idx[best]))
        alive &= np.abs(idx - idx[best]) >= window
    return chosen


def benjamini_yekutieli_accept(p_values: list[float], level: float) -> list[bool]:
    """Step-up acceptance mask controlling FDR under arbitrary dependence.

    With m p-values sorted ascending, find the largest rank r with
    p_(r) <= r * level / (m * H_m), H_m the m-th harmonic number, and accept
    everything at or below p_(r).
    """
    m = len(p_values)
    if m == 0:
        return []
    harmonic = float(np.sum(1.0 / np.arange(1, m + 1)))
    p = np.asarray(p_values, dtype=np.float64)
    order = np.argsort(p, kind="stable")
    thresholds = level * np.arange(1, m + 1) / (m * harmonic)
    passing = np.flatnonzero(p[order] <= thresholds)
    if passing.size == 0:
        return [False] * m
    cutoff = p[order[passing[-1]]]
    return [bool(pi <= cutoff) for pi in p]


def test_candidates(
    data: Dataset, candidates: list[int], cfg: ScanConfig, n_jobs: int = 1
) -> tuple[list[float], list[int]]:
    """Permutation-test each candidate window; apply the acceptance policy.

    Candidate i uses its own permutation stream keyed by (seed, i), so the
    result set does not depend on how many candidates precede it.
    """
    w = cfg.window
    p_values = []
    for i in candidates:
        window = Dataset(
            x=data.x[i - w : i + w], y=data.y[i - w : i + w], z=data.z[i - w : i + w]
        )
        plan = PermutationPlan(b=cfg.b, seed=derive_seed(cfg.seed, DOMAIN_SCAN, i))
        outcome = permutation_test(SplitView(window, w), cfg.estimator, plan, n_jobs=n_jobs)
        p_values.append(outcome.p_value)
    if cfg.correction == "benjamini_yekutieli":
        mask = benjamini_yekutieli_accept(p_values, cfg.p_bar)
    else:
        mask = [p <= cfg.p_bar for p in p_values]
    accepted = [i for i, ok in zip(candidates, mask) if ok]
    return p_values, accepted


def scan(data: Dataset, cfg: ScanConfig, n_jobs: int = 1) -> ScanResult:
    """Full pipeline: trace, candidate selection, testing, acceptance."""
    trace_index, trace_value = statistic_trace(data, cfg)
    candidates = select_candidates(trace_index, trace_value, cfg.window)
    p_values, accepted = test_candidates(data, candidates, cfg, n_jobs=n_jobs)
    return ScanResult(
        trace_index=trace_index,
        trace_value=trace_value,
        candidates=candidates,
        p_values=p_values,
        accepted=accepted,
    )
