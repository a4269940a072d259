"""Monte-Carlo evaluation of detection power over the scenario suite.

For each scenario and replicate the harness generates one draw, computes the
split statistic at the true change index, and runs the permutation test.
The AUC negative class is the scenario's own no-change twin -- the same
draws with the pre-change mechanism applied to both segments -- so the AUC
measures detection of the mechanism change itself rather than marginal
artifacts.  Null scenarios (N*) pair with the stationary baseline NCL01
instead, since their twins would erase the very drift they exist to stress.

AUC is the Mann-Whitney probability that a scenario statistic exceeds a
twin statistic (ties count one half), with the Hanley-McNeil standard
error.  Replicates draw from per-replicate seeded streams and may run in
parallel; aggregation is in replicate order, so results are independent of
worker count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from joblib import Parallel, delayed

from ._rng import DOMAIN_BENCH, derive_seed
from .core import ConfigError, EstimatorConfig, SplitView
from .estimator import estimate_q
from .inference import PermutationPlan, permutation_test
from .synth import ScenarioSpec, generate, resolve_id

ALPHA = 0.05
_NULL_BASELINE = "NCL01_BASE_NULL"


class EmptyInput(ConfigError):
    def __init__(self, what: str):
        super().__init__(f"{what} must be nonempty")


@dataclass(frozen=True)
class BenchConfig:
    scenarios: tuple[str, ...]
    replicates: int = 50
    n: int = 800
    b: int = 499
    k: int = 30
    seed: int = 0
    n_jobs: int = 1

    def __post_init__(self):
        if len(self.scenarios) == 0:
            raise EmptyInput("scenario list")
        if self.replicates < 2:
            raise ConfigError(f"need at least 2 replicates, got {self.replicates}")


@dataclass(frozen=True)
class BenchRow:
    scenario: str
    auc: float
    auc_se: float
    median_p: float
    rejections: int
    replicates: int


def mann_whitney_auc(a: np.ndarray, b: np.ndarray) -> float:
    """P(a > b) + 0.5 P(a = b) over all cross pairs."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.size == 0 or b.size == 0:
        raise EmptyInput("both value sets")
    wins = (a[:, None] > b[None, :]).sum()
    ties = (a[:, None] == b[None, :]).sum()
    return (float(wins) + 0.5 * float(ties)) / (a.size * b.size)


def auc_standard_error(auc: float, n_a: int, n_b: int) -> float:
    """Hanley-McNeil standard error of the Mann-Whitney AUC."""
    q1 = auc / (2.0 - auc)
    q2 = 2.0 * auc * auc / (1.0 + auc)
    var = (
        auc * (1.0 - auc)
        + (n_a - 1) * (q1 - auc * auc)
        + (n_b - 1) * (q2 - auc * auc)
    ) / (n_a * n_b)
    return float(np.sqrt(max(var, 0.0)))


def _one_replicate(scenario_id: str, cfg: BenchConfig, r: int) -> tuple[float, float, float]:
    seed_r = derive_seed(cfg.seed, DOMAIN_BENCH, r)
    tau = cfg.n // 2
    spec = ScenarioSpec(id=scenario_id, n=cfg.n, tau=tau, seed=seed_r)
    est = EstimatorConfig(k=cfg.k)
    out = generate(spec)
    view = SplitView(out.data, tau)
    test = permutation_test(view, est, PermutationPlan(b=cfg.b, seed=seed_r))
    if scenario_id.startswith("N"):
        twin_spec = ScenarioSpec(id=_NULL_BASELINE, n=cfg.n, tau=tau, seed=seed_r)
        twin = generate(twin_spec)
    else:
        twin = generate(spec, force_pre_mechanism=True)
    q_twin = estimate_q(SplitView(twin.data, tau), est).q_hat
    return test.q_obs, q_twin, test.p_value


def run_bench(cfg: BenchConfig, log=None) -> list[BenchRow]:
    """One BenchRow per scenario: AUC vs twin, median p, rejection count."""
    ids = [resolve_id(s) for s in cfg.scenarios]
    rows = []
    for scenario_id in ids:
        if log is not None:
            print(f"bench {scenario_id}: R={cfg.replicates} B={cfg.b} n={cfg.n}", file=log)
        results = Parallel(n_jobs=cfg.n_jobs)(
            delayed(_one_replicate)(scenario_id, cfg, r) for r in range(cfg.replicates)
        )
        q_scn = np.array([t[0] for t in results])
        q_twin = np.array([t[1] for t in results])
        p_values = np.array([t[2] for t in results])
        auc = mann_whitney_auc(q_scn, q_twin)
        rows.append(
            BenchRow(
                scenario=scenario_id,
                auc=auc,
                auc_se=auc_standard_error(auc, len(q_scn), len(q_twin)),
                median_p=float(np.median(p_values)),
                rejections=int(np.count_nonzero(p_values <= ALPHA)),
                replicates=cfg.replicates,
            )
        )
        if log is not None:
            row = rows[-1]
            print(
                f"  auc={row.auc:.3f} (se {row.auc_se:.3f})"
                f" median_p={row.median_p:.3f} rejections={row.rejections}/{row.replicates}",
                file=log,
            )
    return rows
