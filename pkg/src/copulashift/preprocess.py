"""Stationarity and volatility normalization for real data series.

Applied per column, in order: (1) transform the raw level series to returns
according to its asset class -- log differences for prices, first
differences for rates/spreads/vol indices -- then (2) divide by a recursive
EWMA volatility estimate so regimes with different volatility become
comparable.

The EWMA recursion with span S and alpha = 2 / (S + 1):

    mu_i     = (1 - alpha) * mu_{i-1} + alpha * x_i        (mu_1 = x_1)
    sigma2_i = (1 - alpha) * sigma2_{i-1} + alpha * (x_i - mu_i)^2
    out_i    = x_i / (sigma_i + eps)

sigma2_0 seeds from the sample variance of the first min(S, n) observations
(avoids the zero-variance degeneracy of a self-referential first step), and
eps sits in the denominator as a stability offset.  The centring series mu
is an EWMA mean with the same alpha; ``mean="zero"`` switches it off for
sensitivity analysis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ConfigError, DataError, TooShort

KIND_PRICE = "price"
KIND_RATE = "rate"
SERIES_KINDS = (KIND_PRICE, KIND_RATE)

MEAN_MODES = ("ewma", "zero")

DEFAULT_SPAN_DAILY = 63
DEFAULT_SPAN_MONTHLY = 12
DEFAULT_EPSILON = 1e-6


class NonPositivePrice(DataError):
    def __init__(self, index: int):
        self.index = index
        super().__init__(f"price at index {index} is not strictly positive")


@dataclass(frozen=True)
class EwmaConfig:
    span: int = DEFAULT_SPAN_DAILY
    epsilon: float = DEFAULT_EPSILON
    mean: str = "ewma"

    def __post_init__(self):
        if self.span < 2:
            raise ConfigError(f"span must be >= 2, got {self.span}")
        if self.mean not in MEAN_MODES:
            raise ConfigError(f"mean must be one of {MEAN_MODES}")

    @property
    def alpha(self) -> float:
        return 2.0 / (self.span + 1.0)


def to_returns(series: np.ndarray, kind: str) -> np.ndarray:
    """Level series to returns; output has length n - 1.

    ``kind="price"``: log(P_i) - log(P_{i-1}), requiring strictly positive
    levels (:class:`NonPositivePrice` reports the first offender).
    ``kind="rate"``: plain first differences.
    """
    s = np.asarray(series, dtype=np.float64)
    if kind == KIND_PRICE:
        bad = np.flatnonzero(s <= 0.0)
        if bad.size:
            raise NonPositivePrice(int(bad[0]))
        logs = np.log(s)
        return logs[1:] - logs[:-1]
    if kind == KIND_RATE:
        return s[1:] - s[:-1]
    raise ConfigError(f"kind must be one of {SERIES_KINDS}, got {kind!r}")


def ewma_normalize(x: np.ndarray, cfg: EwmaConfig) -> np.ndarray:
    """Divide each value by its recursive EWMA volatility estimate.

    Series shorter than the span are allowed (the variance seed then uses
    the whole series); two observations are the hard minimum.
    """
    v = np.asarray(x, dtype=np.float64)
    n = len(v)
    if n < 2:
        raise TooShort(n, 2)
    alpha = cfg.alpha
    seed_len = min(cfg.span, n)
    sigma2 = float(np.var(v[:seed_len], ddof=1))
    mu = v[0]
    out = np.empty(n)
    for i in range(n):
        if cfg.mean == "ewma":
            mu = v[0] if i == 0 else (1.0 - alpha) * mu + alpha * v[i]
        else:
            mu = 0.0
        sigma2 = (1.0 - alpha) * sigma2 + alpha * (v[i] - mu) ** 2
        out[i] = v[i] / (np.sqrt(sigma2) + cfg.epsilon)
    return out


def pipeline(series: np.ndarray, kind: str, cfg: EwmaConfig) -> np.ndarray:
    """Returns transform followed by volatility normalization."""
    return ewma_normalize(to_returns(series, kind), cfg)
