"""Kernel conditional-copula change detection.

Decide whether the causal dependence of an outcome y on a driver x given
confounders z changes at a known split point, and scan a series for change
points at unknown locations.  See the README for the CLI and file formats.
"""

from .core import (
    ConfigError,
    DataError,
    Dataset,
    Error,
    EstimatorConfig,
    EtaOutOfRange,
    LengthMismatch,
    NonFinite,
    SplitView,
    StatResult,
    TooShort,
    split,
    validate,
)
from .estimator import (
    NeighborhoodTables,
    PseudoObs,
    SegmentTooSmall,
    build_neighborhood_tables,
    estimate_q,
    pooled_rank_points,
    pseudo_obs,
    resolve_gamma,
)
from .harness import BenchConfig, BenchRow, mann_whitney_auc, run_bench
from .inference import PermutationPlan, TestOutcome, permutation_test
from .kernel import gaussian, median_heuristic
from .neighbors import EmptyCloud, KTooLarge, NeighborIndex, brute_force_knn
from .preprocess import EwmaConfig, NonPositivePrice, ewma_normalize, to_returns
from .scan import (
    ScanConfig,
    ScanResult,
    WindowTooLarge,
    benjamini_yekutieli_accept,
    scan,
    select_candidates,
    statistic_trace,
    test_candidates,
)
from .synth import (
    BadParams,
    ScenarioOutput,
    ScenarioSpec,
    UnknownScenario,
    generate,
    list_scenarios,
)

__version__ = "0.1.0"
