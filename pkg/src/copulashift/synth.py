"""Seeded generators for the synthetic benchmark scenarios.

Each scenario emits a :class:`~copulashift.core.Dataset` with a single
change at row index ``tau`` (rows 0..tau-1 follow the pre mechanism, rows
tau..n-1 the post mechanism) plus ground-truth metadata.  Scenario ids
starting with ``P`` are positive controls (the conditional mechanism
p(y | x, z) truly changes); ids starting with ``N`` are negative controls
(nulls) that stress marginal drift, rescaling, monotone transforms and
similar nuisances without touching the conditional mechanism.

Unless a scenario says otherwise: z ~ N(0,1) scalar, the driver is
confounded as x = z + e_x, the response mean is y = 0.5 z + 0.6 x + e_y,
and the noise scales are sigma_x = sigma_y = 0.10.

Every stochastic component (z, driver noise, response noise, auxiliary
draws, shared factors, hidden confounders) draws from its own counter-based
stream keyed by (seed, component), so adding a component to a scenario never
shifts the draws of another.  Identical specs produce byte-identical data.

Scenarios with several candidate drivers emit the designated driver as the
``x`` column and append the remaining candidates to the confounder block;
``meta["z_columns"]`` records that layout.  Parameters the scenario family
leaves unspecified (dimensions, mixture weights, correlation levels, the
monotone transforms of the invariance nulls) have package-chosen defaults,
listed per scenario in ``meta["free_defaults"]`` and overridable through
``ScenarioSpec.params``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from . import core
from ._rng import DOMAIN_SYNTH, stream
from .core import ConfigError, Dataset

# Component stream tags.
_Z, _EPS_X, _EPS_Y, _AUX, _FACTOR, _HIDDEN = range(6)


class UnknownScenario(ConfigError):
    def __init__(self, name: str):
        super().__init__(f"unknown scenario {name!r}")


class BadParams(ConfigError):
    def __init__(self, detail: str):
        super().__init__(f"bad scenario parameters: {detail}")


@dataclass(frozen=True)
class ScenarioSpec:
    """Scenario id (full or unique prefix), length, change index, seed."""

    id: str
    n: int = 800
    tau: int | None = None
    seed: int = 0
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ScenarioOutput:
    data: Dataset
    is_null: bool
    driver_column: int
    true_tau: int
    meta: dict


class _Bank:
    """Lazily-created per-component generators for one (seed, scenario) run."""

    def __init__(self, seed: int):
        self._seed = seed
        self._gens: dict[int, np.random.Generator] = {}

    def __call__(self, component: int) -> np.random.Generator:
        if component not in self._gens:
            self._gens[component] = stream(self._seed, DOMAIN_SYNTH, component)
        return self._gens[component]


def smooth_ramp(n: int, tau: int, width: int) -> np.ndarray:
    """Logistic mixing weight w_t = expit((t - tau) / kappa), t = 1..n.

    kappa = max(width / 6, 1); w equals exactly 1/2 at t = tau and is
    nondecreasing in t.
    """
    kappa = max(width / 6.0, 1.0)
    t = np.arange(1, n + 1, dtype=np.float64)
    return expit((t - tau) / kappa)


# --- scenario generators -----------------------------------------------
#
# Each generator receives (n, tau, bank, p, post) where `p` is the resolved
# parameter dict and `post` the boolean post-regime mask (all False when the
# caller forces the pre mechanism everywhere), and returns
# (x, y, z_matrix, extra_meta).


def _default_driver(z, bank, p, n):
    return z + bank(_EPS_X).normal(0.0, p["sigma_x"], n)


def _multi_x(z, bank, p, n, m):
    return z[:, None] + bank(_EPS_X).normal(0.0, p["sigma_x"], (n, m))


def _pmb01(n, tau, bank, p, post):
    z = bank(_Z).normal(0.0, 1.0, n)
    x = _default_driver(z, bank, p, n)
    ey = bank(_EPS_Y).normal(0.0, p["sigma_y"], n)
    y = np.where(post, x + z + ey, z + ey)
    return x, y, z[:, None], {}


def _pmb02(n, tau, bank, p, post):
    z = bank(_Z).normal(0.0, 1.0, n)
    x = _default_driver(z, bank, p, n)
    ey = bank(_EPS_Y).normal(0.0, p["sigma_y"], n)
    y = np.sin(z) + np.where(post, 0.6 * np.tanh(x), 0.0) + ey
    return x, y, z[:, None], {}


def _pmb03(n, tau, bank, p, post):
    m = int(p["m"])
    z = bank(_Z).normal(0.0, 1.0, n)
    xs = _multi_x(z, bank, p, n, m)
    ey = bank(_EPS_Y).normal(0.0, p["sigma_y"], n)
    y = 0.6 * xs[:, 0] + np.where(post, 0.6 * xs[:, 1], 0.0) + 0.5 * z + ey
    zblock = np.column_stack([z, xs[:, 1:]])
    return xs[:, 0], y, zblock, {"z_columns": ["z"] + [f"x_{j + 2}" for j in range(m - 1)]}


def _pmb04(n, tau, bank, p, post):
    z = bank(_Z).normal(0.0, 1.0, n)
    x = _default_driver(z, bank, p, n)
    ey = bank(_EPS_Y).normal(0.0, p["sigma_y"], n)
    y = np.sin(z) + np.where(post, 0.0, 0.6 * np.tanh(x)) + ey
    return x, y, z[:, None], {}


def _pmb05(n, tau, bank, p, post):
    m = int(p["m"])
    z = bank(_Z).normal(0.0, 1.0, n)
    f = bank(_FACTOR).normal(0.0, 1.0, n)
    xs = (
        p["rho_f"] * f[:, None]
        + p["rho_z"] * z[:, None]
        + bank(_EPS_X).normal(0.0, p["sigma_x"], (n, m))
    )
    ey = bank(_EPS_Y).normal(0.0, p["sigma_y"], n)
    y = 0.5 * z + np.where(post, 0.6 * xs[:, 0], 0.0) + ey
    zblock = np.column_stack([z, xs[:, 1:]])
    return xs[:, 0], y, zblock, {"z_columns": ["z"] + [f"x_{j + 2}" for j in range(m - 1)]}


def _effect_shift(pre_coef, post_coef):
    def gen(n, tau, bank, p, post):
        z = bank(_Z).normal(0.0, 1.0, n)
        x = _default_driver(z, bank, p, n)
        ey = bank(_EPS_Y).normal(0.0, p["sigma_y"], n)
        coef = np.where(post, post_coef, pre_coef)
        y = 0.5 * z + coef * x + ey
        return x, y, z[:, None], {}

    return gen


def _pef_multiz(scaled):
    def gen(n, tau, bank, p, post):
        d_z = int(p["d_z"])
        z = bank(_Z).normal(0.0, 1.0, (n, d_z))
        denom = np.sqrt(d_z) if scaled else 1.0
        gamma = np.full(d_z, 0.5 / denom)
        beta = np.full(d_z, 0.4 / denom)
        x = z @ gamma + bank(_EPS_X).normal(0.0, p["sigma_x"], n)
        ey = bank(_EPS_Y).normal(0.0, p["sigma_y"], n)
        coef = np.where(post, 0.9, 0.3)
        y = z @ beta + coef * x + ey
        return x, y, z, {}

    return gen


def _pef04(n, tau, bank, p, post):
    d_s, d_n = int(p["d_s"]), int(p["d_n"])
    z = bank(_Z).normal(0.0, 1.0, (n, d_s + d_n))
    signal = z[:, :d_s]
    gamma = np.full(d_s, 0.5 / np.sqrt(d_s))
    beta = np.full(d_s, 0.4 / np.sqrt(d_s))
    x = signal @ gamma + bank(_EPS_X).normal(0.0, p["sigma_x"], n)
    ey = bank(_EPS_Y).normal(0.0, p["sigma_y"], n)
    coef = np.where(post, 0.9, 0.3)
    y = signal @ beta + coef * x + ey
    return x, y, z, {}


def _pef07(n, tau, bank, p, post):
    m = int(p["m"])
    z = bank(_Z).normal(0.0, 1.0, n)
    f = bank(_FACTOR).normal(0.0, 1.0, n)
    xs = 0.8 * f[:, None] + 0.6 * z[:, None] + bank(_EPS_X).normal(0.0, p["sigma_x"], (n, m))
    ey = bank(_EPS_Y).normal(0.0, p["sigma_y"], n)
    active = np.where(post, xs[:, 1], xs[:, 0])
    y = 0.5 * z + 0.6 * active + ey
    zblock = np.column_stack([z, xs[:, 1:]])
    return xs[:, 0], y, zblock, {"z_columns": ["z"] + [f"x_{j + 2}" for j in range(m - 1)]}


def _pef08(n, tau, bank, p, post):
    zp_pre = bank(_Z).poisson(p["lambda_pre"], n).astype(np.float64)
    zp_post = bank(_AUX).poisson(p["lambda_post"], n).astype(np.float64)
    zp = np.where(post, zp_post, zp_pre)
    x = zp + bank(_EPS_X).normal(0.0, p["sigma_x"], n)
    ey = bank(_EPS_Y).normal(0.0, p["sigma_y"], n)
    y = zp * x + ey
    return x, y, zp[:, None], {}


def _pnl01(n, tau, bank, p, post):
    z = bank(_Z).normal(0.0, 1.0, n)
    x = _default_driver(z, bank, p, n)
    ey = bank(_EPS_Y).normal(0.0, p["sigma_y"], n)
    y = 0.5 * z + np.where(post, np.cos(2.0 * x), np.tanh(1.5 * x)) + ey
    return x, y, z[:, None], {}


def _pnl02(n, tau, bank, p, post):
    z = bank(_Z).normal(0.0, 1.0, n)
    x = _default_driver(z, bank, p, n)
    ey = bank(_EPS_Y).normal(0.0, p["sigma_y"], n)
    y = 0.5 * z + 0.6 * x + np.where(post, 0.6 * x * np.tanh(z), 0.0) + ey
    return x, y, z[:, None], {}


def _pnl03(n, tau, bank, p, post):
    z = bank(_Z).normal(0.0, 1.0, n)
    x = _default_driver(z, bank, p, n)
    ey = bank(_EPS_Y).normal(0.0, p["sigma_y"], n)
    a = np.abs(x)
    theta = np.quantile(a[tau:], p["q"])  # gate level set on the post segment
    gate = expit(10.0 * (a - theta))
    y = 0.5 * z + np.where(post, 0.6 * gate * x, 0.0) + ey
    return x, y, z[:, None], {"theta_q": float(theta)}


def _pnl04(n, tau, bank, p, post):
    z = bank(_Z).normal(0.0, 1.0, n)
    x = _default_driver(z, bank, p, n)
    ey = bank(_EPS_Y).normal(0.0, p["sigma_y"], n)
    beta = np.where(post, -p["beta"], p["beta"])
    y = beta * x * x + 0.5 * z + ey
    return x, y, z[:, None], {}


def _pnl05(n, tau, bank, p, post):
    z = bank(_Z).normal(0.0, 1.0, n)
    x = _default_driver(z, bank, p, n)
    ey = bank(_EPS_Y).normal(0.0, p["sigma_y"], n)
    y = np.where(post, 0.0, np.sin(8.0 * np.pi * x)) + 0.5 * z + ey
    return x, y, z[:, None], {}


def _lognormal_mu(s):
    return np.exp(s * s / 2.0)


def _lognormal_var(s):
    return (np.exp(s * s) - 1.0) * np.exp(s * s)


def _pnm01(n, tau, bank, p, post):
    # Response is pure noise; the post regime makes the noise skewness
    # depend on |x| while keeping mean 0 and variance sigma_y^2 pointwise.
    z = bank(_Z).normal(0.0, 1.0, n)
    x = _default_driver(z, bank, p, n)
    g = bank(_EPS_Y).normal(0.0, 1.0, n)
    s0 = p["sigma_y"]
    shape = 0.1 + 2.0 * np.abs(x)
    skewed = s0 * (np.exp(shape * g) - _lognormal_mu(shape)) / np.sqrt(_lognormal_var(shape))
    y = np.where(post, skewed, s0 * g)
    return x, y, z[:, None], {}


def _pnm02(n, tau, bank, p, post):
    z = bank(_Z).normal(0.0, 1.0, n)
    x = _default_driver(z, bank, p, n)
    g = bank(_EPS_Y).normal(0.0, 1.0, n)
    sign = np.where(bank(_AUX).uniform(size=n) < 0.5, -1.0, 1.0)
    s0 = p["sigma_y"]
    shape = 0.1 + 2.0 * np.abs(x)
    heavy = s0 * sign * np.exp(shape * g) / np.sqrt(np.exp(2.0 * shape * shape))
    y = np.where(post, heavy, s0 * g)
    return x, y, z[:, None], {}


def _pnm03(n, tau, bank, p, post):
    z = bank(_Z).normal(0.0, 1.0, n)
    x = _default_driver(z, bank, p, n)
    g = bank(_EPS_Y).normal(0.0, 1.0, n)
    u = bank(_AUX).uniform(size=n)
    s0 = p["sigma_y"]
    w = expit(p["slope"] * x)
    raw = np.where(u < w, -3.0 + 0.5 * g, 3.0 + 0.5 * g)
    y = s0 * g.copy()
    if post.any():
        seg = raw[post]
        y[post] = (seg - seg.mean()) / seg.std() * s0
    return x, y, z[:, None], {}


def _pvr01(n, tau, bank, p, post):
    z = bank(_Z).normal(0.0, 1.0, n)
    x = _default_driver(z, bank, p, n)
    g = bank(_EPS_Y).normal(0.0, 1.0, n)
    s0 = p["sigma_y"]
    theta = p["theta"]
    eps = s0 * g * np.where(post, np.sqrt((1.0 - theta) + theta * x * x), 1.0)
    y = 0.5 * z + 0.6 * x + eps
    return x, y, z[:, None], {}


def _pvr02(n, tau, bank, p, post):
    z = bank(_Z).normal(0.0, 1.0, n)
    x = _default_driver(z, bank, p, n)
    xi = bank(_EPS_Y).normal(0.0, 1.0, n)
    eps = 0.10 * xi
    for t in range(n):  # ARCH recursion on post rows, seeded by the last pre value
        if post[t] and t > 0:
            eps[t] = np.sqrt(0.2 + 0.6 * eps[t - 1] ** 2) * xi[t]
    y = 0.5 * z + 0.6 * x + eps
    return x, y, z[:, None], {}


def _pvr03(n, tau, bank, p, post):
    z = bank(_Z).normal(0.0, 1.0, n)
    x = _default_driver(z, bank, p, n)
    g = bank(_EPS_Y).normal(0.0, 1.0, n)
    eps = np.where(post, p["sd_post"], p["sd_pre"]) * g
    y = 0.5 * z + 0.6 * x + eps
    return x, y, z[:, None], {}


def _psm01(n, tau, bank, p, post):
    z = bank(_Z).normal(0.0, 1.0, n)
    x = _default_driver(z, bank, p, n)
    ey = bank(_EPS_Y).normal(0.0, p["sigma_y"], n)
    w = smooth_ramp(n, tau, int(p["width"])) if post.any() else np.zeros(n)
    y = np.sin(z) + w * 0.6 * np.tanh(x) + ey
    return x, y, z[:, None], {}


def _ncl01(n, tau, bank, p, post):
    z = bank(_Z).normal(0.0, 1.0, n)
    x = _default_driver(z, bank, p, n)
    ey = bank(_EPS_Y).normal(0.0, p["sigma_y"], n)
    y = 0.5 * z + ey
    return x, y, z[:, None], {}


def _ncl02(n, tau, bank, p, post):
    m = int(p["m"])
    z = bank(_Z).normal(0.0, 1.0, n)
    xs = _multi_x(z, bank, p, n, m)
    ey = bank(_EPS_Y).normal(0.0, p["sigma_y"], n)
    y = 0.6 * xs[:, 0] + 0.5 * z + ey
    zblock = np.column_stack([z, xs[:, 1:]])
    return xs[:, 0], y, zblock, {"z_columns": ["z"] + [f"x_{j + 2}" for j in range(m - 1)]}


def _stationary_default(n, bank, p):
    z = bank(_Z).normal(0.0, 1.0, n)
    x = _default_driver(z, bank, p, n)
    y = 0.5 * z + 0.6 * x + bank(_EPS_Y).normal(0.0, p["sigma_y"], n)
    return x, y, z


def _niv01(n, tau, bank, p, post):
    x, y, z = _stationary_default(n, bank, p)
    lam = np.where(post, p["scale"], 1.0)
    return lam * x, lam * y, (lam * z)[:, None], {}


_MONOTONE = {
    "asinh": np.arcsinh,
    "cbrt": np.cbrt,
    "cube": lambda v: v**3,
    "expm1": np.expm1,
}


def _niv02(n, tau, bank, p, post):
    x, y, z = _stationary_default(n, bank, p)
    phi = _MONOTONE.get(p["phi"])
    if phi is None:
        raise BadParams(f"phi must be one of {sorted(_MONOTONE)}, got {p['phi']!r}")
    y = np.where(post, phi(y), y)
    return x, y, z[:, None], {}


def _niv03(n, tau, bank, p, post):
    x, y, z = _stationary_default(n, bank, p)
    phi = _MONOTONE.get(p["phi"])
    if phi is None:
        raise BadParams(f"phi must be one of {sorted(_MONOTONE)}, got {p['phi']!r}")
    x = np.where(post, (1.0 + expit(z)) * phi(x) + z * z, x)
    return x, y, z[:, None], {}


def _nmd01(n, tau, bank, p, post):
    base = bank(_Z).normal(0.0, 1.0, n)
    z = np.where(post, 0.5 + 1.6 * base, base)
    x = _default_driver(z, bank, p, n)
    y = 0.5 * z + bank(_EPS_Y).normal(0.0, p["sigma_y"], n)
    return x, y, z[:, None], {}


def _nmd02(n, tau, bank, p, post):
    z = bank(_Z).normal(0.0, 1.0, n)
    x = z + np.where(post, 2.0, 0.0) + bank(_EPS_X).normal(0.0, p["sigma_x"], n)
    y = 0.5 * z + bank(_EPS_Y).normal(0.0, p["sigma_y"], n)
    return x, y, z[:, None], {}


def _nmd03(n, tau, bank, p, post):
    z = bank(_Z).normal(0.0, 1.0, n)
    x = _default_driver(z, bank, p, n)
    t = np.arange(n, dtype=np.float64)
    y = 0.5 * x + 0.02 * t + bank(_EPS_Y).normal(0.0, p["sigma_y"], n)
    return x, y, z[:, None], {}


def _nmd04(n, tau, bank, p, post):
    z = bank(_Z).normal(0.0, 1.0, n)
    x = _default_driver(z, bank, p, n)
    t = np.arange(n, dtype=np.float64)
    y = 0.5 * x + 2.0 * np.sin(2.0 * np.pi * t / 50.0) + bank(_EPS_Y).normal(0.0, p["sigma_y"], n)
    return x, y, z[:, None], {}


def _nns01(n, tau, bank, p, post):
    z = bank(_Z).normal(0.0, 1.0, n)
    x = _default_driver(z, bank, p, n)
    sy = p["sigma_y"]
    gauss = bank(_EPS_Y).normal(0.0, sy, n)
    laplace = bank(_AUX).laplace(0.0, sy / np.sqrt(2.0), n)
    y = 0.5 * z + np.where(post, laplace, gauss)
    return x, y, z[:, None], {}


def _nns02(n, tau, bank, p, post):
    z = bank(_Z).normal(0.0, 1.0, n)
    x = _default_driver(z, bank, p, n)
    sy = p["sigma_y"]
    gauss = bank(_EPS_Y).normal(0.0, sy, n)
    heavy = sy * np.sqrt(1.0 / 3.0) * bank(_AUX).standard_t(3, n)
    y = 0.5 * x + np.where(post, heavy, gauss)
    return x, y, z[:, None], {}


def _ncf01(n, tau, bank, p, post):
    z = bank(_Z).normal(0.0, 1.0, n)
    base = np.sin(z) + bank(_EPS_X).normal(0.0, p["sigma_x"], n)
    x = np.where(post, 5.0 * base + 10.0, base)
    y = 0.5 * z + bank(_EPS_Y).normal(0.0, p["sigma_y"], n)
    return x, y, z[:, None], {}


def _ncf02(n, tau, bank, p, post):
    d_z = int(p["d_z"])
    shared = bank(_FACTOR).normal(0.0, 1.0, n)
    own = bank(_Z).normal(0.0, 1.0, (n, d_z))
    rho = np.where(post, p["rho_post"], p["rho_pre"])
    z = np.sqrt(rho)[:, None] * shared[:, None] + np.sqrt(1.0 - rho)[:, None] * own
    ones = np.ones(d_z) / np.sqrt(d_z)
    x = z @ ones + bank(_EPS_X).normal(0.0, p["sigma_x"], n)
    y = 0.5 * (z @ ones) + bank(_EPS_Y).normal(0.0, p["sigma_y"], n)
    return x, y, z, {}


def _ncf03(n, tau, bank, p, post):
    z = bank(_Z).normal(0.0, 1.0, n)
    ex = bank(_EPS_X).normal(0.0, 1.0, n)  # unit noise: keeps x marginal N(0,1)
    rho = np.where(post, p["rho_post"], p["rho_pre"])
    x = rho * z + np.sqrt(1.0 - rho * rho) * ex
    y = 0.5 * z + bank(_EPS_Y).normal(0.0, p["sigma_y"], n)
    return x, y, z[:, None], {}


def _ncf04(n, tau, bank, p, post):
    z = bank(_Z).normal(0.0, 1.0, n)
    x = _default_driver(z, bank, p, n)
    y = np.where(post, np.tanh(z), np.sin(z)) + bank(_EPS_Y).normal(0.0, p["sigma_y"], n)
    return x, y, z[:, None], {}


def _ncf05(n, tau, bank, p, post):
    u = bank(_Z).uniform(size=n)
    z = (u < np.where(post, p["p_post"], p["p_pre"])).astype(np.float64)
    x = 1.0 * z + bank(_EPS_X).normal(0.0, p["sigma_x"], n)
    y = 0.5 * z + bank(_EPS_Y).normal(0.0, p["sigma_y"], n)
    return x, y, z[:, None], {}


def _ndr01(n, tau, bank, p, post):
    m = int(p["m"])
    z = bank(_Z).normal(0.0, 1.0, n)
    xs = _multi_x(z, bank, p, n, m)
    ey = bank(_EPS_Y).normal(0.0, p["sigma_y"], n)
    y = 0.6 * xs[:, 0] + 0.5 * z + ey
    others = xs[:, 1:]
    if others.shape[1] > 1:
        rotated = np.roll(others, -1, axis=1)  # cyclic shift of non-driver columns
        others = np.where(post[:, None], rotated, others)
    zblock = np.column_stack([z, others])
    return (
        xs[:, 0],
        y,
        zblock,
        {
            "z_columns": ["z"] + [f"x_{j + 2}" for j in range(m - 1)],
            "post_permutation": "cyclic shift of non-driver columns",
        },
    )


def _npo01(n, tau, bank, p, post):
    z_obs = bank(_Z).normal(0.0, 1.0, n)
    z_hid = bank(_HIDDEN).normal(0.0, 1.0, n)
    x = z_obs + z_hid + bank(_EPS_X).normal(0.0, p["sigma_x"], n)
    y = 0.5 * z_obs + 0.5 * z_hid + bank(_EPS_Y).normal(0.0, p["sigma_y"], n)
    return x, y, z_obs[:, None], {}


_BASE = {"sigma_x": 0.10, "sigma_y": 0.10}


def _d(extra=None, free=()):
    merged = dict(_BASE)
    if extra:
        merged.update(extra)
    return merged, tuple(free)


@dataclass(frozen=True)
class _Scenario:
    id: str
    summary: str
    gen: object
    defaults: dict
    free_defaults: tuple


_SCENARIOS = [
    _Scenario("PMB01_EDGE_ON_LINEAR", "edge appears: pre y<-z, post y<-x+z", _pmb01, *_d()),
    _Scenario("PMB02_EDGE_ON_NONLIN", "edge appears under nonlinear baseline", _pmb02, *_d()),
    _Scenario("PMB03_EDGE_ON_NEWDRV", "new driver becomes causal post-change", _pmb03, *_d({"m": 3}, ["m"])),
    _Scenario("PMB04_EDGE_OFF", "driver edge removed post-change", _pmb04, *_d()),
    _Scenario("PMB05_EDGE_ON_COLLINEAR_X", "edge-on under collinear candidate drivers", _pmb05, *_d({"m": 3, "rho_f": 0.8, "rho_z": 0.6}, ["m", "rho_f", "rho_z"])),
    _Scenario("PEF01_SIGN_FLIP", "driver coefficient +0.6 -> -0.6", _effect_shift(0.6, -0.6), *_d()),
    _Scenario("PEF02_STRENGTH_SHIFT", "driver coefficient 0.3 -> 0.9", _effect_shift(0.3, 0.9), *_d()),
    _Scenario("PEF03_STRENGTH_SHIFT_MULTIZ", "strength shift, multi-dim z, scaled coefficients", _pef_multiz(True), *_d({"d_z": 5}, ["d_z"])),
    _Scenario("PEF04_STRENGTH_SHIFT_DISTRACTORS", "strength shift with distractor z dimensions", _pef04, *_d({"d_s": 2, "d_n": 3}, ["d_s", "d_n"])),
    _Scenario("PEF05_STRENGTH_SHIFT_MULTIZ_NOSCALE", "strength shift, multi-dim z, unscaled coefficients", _pef_multiz(False), *_d({"d_z": 5}, ["d_z"])),
    _Scenario("PEF06_SIGN_FLIP_GAUSS", "sign flip in the jointly Gaussian linear design", _effect_shift(0.6, -0.6), *_d()),
    _Scenario("PEF07_SPARSE_CHANGE_CORR_X", "active driver identity changes among correlated candidates", _pef07, *_d({"m": 3}, ["m"])),
    _Scenario("PEF08_POISSON_SLOPE", "Poisson-valued multiplicative coupling, rate 0.5 -> 5", _pef08, *_d({"lambda_pre": 0.5, "lambda_post": 5.0})),
    _Scenario("PNL01_SHAPE_CHANGE", "driver link tanh -> cosine", _pnl01, *_d()),
    _Scenario("PNL02_INTERACTION_EDGE_ON_XZ", "x*tanh(z) interaction appears post-change", _pnl02, *_d()),
    _Scenario("PNL03_TAIL_GATED_EDGE_ON", "driver effect gated to large |x|", _pnl03, *_d({"q": 0.6})),
    _Scenario("PNL04_QUADRATIC_FLIP", "quadratic dependence flips convex -> concave", _pnl04, *_d({"beta": 3.0})),
    _Scenario("PNL05_HIGH_FREQ_SINE", "high-frequency sine dependence vanishes", _pnl05, *_d()),
    _Scenario("PNM01_COND_SKEW", "x-dependent noise skewness, moments matched pointwise", _pnm01, *_d()),
    _Scenario("PNM02_COND_TAILS", "x-dependent symmetric heavy tails, variance matched", _pnm02, *_d()),
    _Scenario("PNM03_COND_MIXTURE", "x-gated bimodal noise, post segment standardized", _pnm03, *_d({"slope": 5.0})),
    _Scenario("PVR01_COND_HETSKED", "quadratic conditional heteroskedasticity, variance matched", _pvr01, *_d({"theta": 0.99})),
    _Scenario("PVR02_VOL_CLUSTER", "ARCH(1) residual dynamics post-change", _pvr02, *_d()),
    _Scenario("PVR03_GLOBAL_NOISE_SCALE", "noise sd 0.10 -> 0.50", _pvr03, *_d({"sd_pre": 0.10, "sd_post": 0.50})),
    _Scenario("PSM01_SMOOTH_TRANSITION", "driver effect ramps in smoothly around tau", _psm01, *_d({"width": 100}, ["width"])),
    _Scenario("NCL01_BASE_NULL", "stationary null, no driver effect", _ncl01, *_d()),
    _Scenario("NCL02_MULTIX_ALIGN", "multi-driver stationary null", _ncl02, *_d({"m": 3}, ["m"])),
    _Scenario("NIV01_GLOBAL_RESCALE", "post triples multiplied by a constant", _niv01, *_d({"scale": 10.0})),
    _Scenario("NIV02_Y_MONO_TRANSFORM", "strictly increasing transform of y post-change", _niv02, *_d({"phi": "asinh"}, ["phi"])),
    _Scenario("NIV03_X_MONO_GIVEN_Z", "z-dependent increasing transform of x post-change", _niv03, *_d({"phi": "cbrt"}, ["phi"])),
    _Scenario("NMD01_Z_LOC_SCALE", "confounder marginal shifts location and scale", _nmd01, *_d()),
    _Scenario("NMD02_X_MEAN_SHIFT", "driver marginal mean shift, no response effect", _nmd02, *_d()),
    _Scenario("NMD03_Y_TREND", "deterministic linear trend in y", _nmd03, *_d()),
    _Scenario("NMD04_Y_SEASON", "deterministic seasonal component in y", _nmd04, *_d()),
    _Scenario("NNS01_NOISE_LAW_SHIFT", "Gaussian -> Laplace noise, variance matched", _nns01, *_d()),
    _Scenario("NNS02_TAILS_SHIFT", "Gaussian -> Student-t(3) noise, variance matched", _nns02, *_d()),
    _Scenario("NCF01_XGZ_DRIFT", "location/scale drift in x given z", _ncf01, *_d()),
    _Scenario("NCF02_Z_COV_SHIFT", "equicorrelation of z shifts", _ncf02, *_d({"d_z": 3, "rho_pre": 0.2, "rho_post": 0.8}, ["d_z", "rho_pre", "rho_post"])),
    _Scenario("NCF03_XGZ_DRIFT_COPULA", "x|z copula drifts with matched marginals", _ncf03, *_d({"rho_pre": 0.2, "rho_post": 0.8}, ["rho_pre", "rho_post"])),
    _Scenario("NCF04_FZ_DRIFT_ONLY", "z-only response component changes shape", _ncf04, *_d()),
    _Scenario("NCF05_DISCRETE_Z", "binary confounder with drifting class weight", _ncf05, *_d({"p_pre": 0.3, "p_post": 0.7}, ["p_pre", "p_post"])),
    _Scenario("NDR01_FEATURE_PERMUTE", "non-driver columns permuted post-change", _ndr01, *_d({"m": 3}, ["m"])),
    _Scenario("NPO01_LATENT_Z_STABLE", "stable regime with a hidden confounder", _npo01, *_d()),
]

_BY_ID = {s.id: s for s in _SCENARIOS}


def list_scenarios() -> tuple[str, ...]:
    """All scenario ids, in registry order."""
    return tuple(s.id for s in _SCENARIOS)


def resolve_id(name: str) -> str:
    """Map a full id or unique short prefix (e.g. ``PMB01``) to the full id."""
    if name in _BY_ID:
        return name
    upper = name.upper()
    matches = [s.id for s in _SCENARIOS if s.id.startswith(upper)]
    if len(matches) == 1:
        return matches[0]
    raise UnknownScenario(name)


def generate(spec: ScenarioSpec, force_pre_mechanism: bool = False) -> ScenarioOutput:
    """Generate one scenario draw.

    ``force_pre_mechanism=True`` applies the pre-change mechanism to every
    row (the scenario's own no-change twin), which the benchmark harness
    uses as the negative class for AUC.
    """
    scenario = _BY_ID[resolve_id(spec.id)]
    n = int(spec.n)
    tau = n // 2 if spec.tau is None else int(spec.tau)
    if not 1 <= tau <= n - 1:
        raise BadParams(f"tau={tau} outside [1, {n - 1}]")
    params = dict(scenario.defaults)
    unknown = set(spec.params) - set(params)
    if unknown:
        raise BadParams(f"unknown parameters for {scenario.id}: {sorted(unknown)}")
    params.update(spec.params)
    post = np.zeros(n, dtype=bool)
    if not force_pre_mechanism:
        post[tau:] = True
    bank = _Bank(spec.seed)
    x, y, z, extra = scenario.gen(n, tau, bank, params, post)
    data = core.validate(Dataset(x=x, y=y, z=z))
    meta = {
        "scenario": scenario.id,
        "summary": scenario.summary,
        "is_null": scenario.id.startswith("N"),
        "true_tau": tau,
        "n": n,
        "seed": int(spec.seed),
        "driver_column": 0,
        "params": params,
        "free_defaults": list(scenario.free_defaults),
        "forced_pre_mechanism": bool(force_pre_mechanism),
    }
    meta.update(extra)
    return ScenarioOutput(
        data=data,
        is_null=meta["is_null"],
        driver_column=0,
        true_tau=tau,
        meta=meta,
    )
