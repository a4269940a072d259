import numpy as np
import pytest

from copulashift import (
    EstimatorConfig,
    PermutationPlan,
    ScanConfig,
    ScenarioSpec,
    WindowTooLarge,
    benjamini_yekutieli_accept,
    generate,
    permutation_test,
    scan,
    select_candidates,
    split,
    statistic_trace,
)
from copulashift.core import ConfigError
from copulashift.scan import test_candidates as run_candidate_tests


def small_cfg(window, **kw):
    base = dict(
        window=window,
        step=1,
        p_bar=0.05,
        b=19,
        correction="none",
        estimator=EstimatorConfig(k=5),
        seed=0,
    )
    base.update(kw)
    return ScanConfig(**base)


# --- candidate selection --------------------------------------------------


def test_single_point_trace():
    assert select_candidates(np.array([100]), np.array([0.5]), 100) == [100]


def test_suppression_rule():
    idx = np.array([100, 150, 300])
    val = np.array([0.9, 0.8, 0.7])
    assert select_candidates(idx, val, 100) == [100, 300]


def test_tie_prefers_smallest_index():
    # equal maxima at 100 and 400: the smaller index is discovered first;
    # 250 survives both suppressions and is discovered last
    idx = np.array([100, 250, 400])
    val = np.array([0.9, 0.1, 0.9])
    assert select_candidates(idx, val, 100) == [100, 400, 250]


def test_candidates_at_least_window_apart():
    rng = np.random.default_rng(0)
    for _ in range(20):
        n = int(rng.integers(50, 400))
        idx = np.arange(n)
        val = rng.normal(size=n)
        w = int(rng.integers(5, 60))
        chosen = select_candidates(idx, val, w)
        gaps = np.abs(np.subtract.outer(chosen, chosen))
        assert (gaps[~np.eye(len(chosen), dtype=bool)] >= w).all()


def test_candidate_count_bound():
    # dense trace of length L: at most ceil(L / W) + 1 survivors
    rng = np.random.default_rng(1)
    for _ in range(20):
        length = int(rng.integers(10, 500))
        w = int(rng.integers(2, 80))
        chosen = select_candidates(np.arange(length), rng.normal(size=length), w)
        assert len(chosen) <= int(np.ceil(length / w)) + 1


def test_selection_invariant_to_increasing_transform():
    rng = np.random.default_rng(2)
    idx = np.arange(120)
    val = rng.normal(size=120)
    base = select_candidates(idx, val, 25)
    assert select_candidates(idx, 3.0 * val + 7.0, 25) == base
    assert select_candidates(idx, np.exp(val), 25) == base


def test_empty_trace_rejected():
    with pytest.raises(ConfigError):
        select_candidates(np.array([]), np.array([]), 10)


# --- Benjamini-Yekutieli ----------------------------------------------------


def test_by_worked_example():
    # thresholds r * 0.05 / (3 * (1 + 1/2 + 1/3)) = r * 0.05 / 5.5:
    # 0.00909, 0.01818, 0.02727 -> only 0.001 passes step-up
    accepted = benjamini_yekutieli_accept([0.001, 0.02, 0.2], 0.05)
    assert accepted == [True, False, False]


def test_by_accepts_everything_below_cutoff_in_input_order():
    accepted = benjamini_yekutieli_accept([0.2, 0.001, 0.02], 0.05)
    assert accepted == [False, True, False]


def test_by_empty_and_none_accepted():
    assert benjamini_yekutieli_accept([], 0.05) == []
    assert benjamini_yekutieli_accept([0.5, 0.9], 0.05) == [False, False]


def test_by_matches_stepup_reimplementation():
    rng = np.random.default_rng(3)
    for _ in range(200):
        m = int(rng.integers(1, 12))
        p = np.round(rng.random(m), 3).tolist()
        level = float(rng.choice([0.01, 0.05, 0.1, 0.3]))
        got = benjamini_yekutieli_accept(p, level)
        # independent step-up: scan ranks from largest to smallest
        harmonic = sum(1.0 / j for j in range(1, m + 1))
        srt = sorted(p)
        cutoff = None
        for r in range(m, 0, -1):
            if srt[r - 1] <= r * level / (m * harmonic):
                cutoff = srt[r - 1]
                break
        want = [cutoff is not None and pi <= cutoff for pi in p]
        assert got == want


def test_by_monotone_in_level():
    p = [0.001, 0.011, 0.02, 0.4]
    low = benjamini_yekutieli_accept(p, 0.01)
    high = benjamini_yekutieli_accept(p, 0.2)
    assert all(h or not l for l, h in zip(low, high))


# --- trace -------------------------------------------------------------------


def test_trace_boundary_single_point():
    out = generate(ScenarioSpec(id="NCL01", n=80, tau=40, seed=0))
    idx, val = statistic_trace(out.data, small_cfg(window=40))
    assert idx.tolist() == [40]
    assert len(val) == 1


def test_trace_positions_and_window_content():
    out = generate(ScenarioSpec(id="NCL01", n=100, tau=50, seed=1))
    cfg = small_cfg(window=30, step=5)
    idx, val = statistic_trace(out.data, cfg)
    assert idx.tolist() == [30, 35, 40, 45, 50, 55, 60, 65, 70]
    # each trace value equals the split statistic of its own 2W window
    i = 45
    window = split(
        type(out.data)(x=out.data.x[i - 30 : i + 30], y=out.data.y[i - 30 : i + 30], z=out.data.z[i - 30 : i + 30]),
        30,
    )
    from copulashift import estimate_q

    assert val[3] == estimate_q(window, cfg.estimator).q_hat


def test_window_too_large():
    out = generate(ScenarioSpec(id="NCL01", n=100, tau=50, seed=2))
    with pytest.raises(WindowTooLarge):
        statistic_trace(out.data, small_cfg(window=51))


def test_window_below_twice_k_rejected():
    with pytest.raises(ConfigError):
        ScanConfig(window=9, estimator=EstimatorConfig(k=5))


# --- localization behaviour ---------------------------------------------------


def test_trace_peaks_near_true_change():
    hits = 0
    seeds = 10
    for s in range(seeds):
        out = generate(ScenarioSpec(id="PMB01", n=800, tau=400, seed=s))
        cfg = ScanConfig(window=200, step=4, estimator=EstimatorConfig(k=30), b=19)
        idx, val = statistic_trace(out.data, cfg)
        if abs(idx[np.argmax(val)] - 400) <= 200:
            hits += 1
    assert hits >= int(0.8 * seeds)


def test_stationary_trace_stays_below_permutation_quantile():
    # near-disjoint windows (stride = W/2) so the trace max behaves like a
    # handful of draws from the single-window null
    hits = 0
    seeds = 10
    for s in range(seeds):
        out = generate(ScenarioSpec(id="NCL01", n=800, tau=400, seed=s))
        cfg = ScanConfig(window=200, step=100, estimator=EstimatorConfig(k=30), b=19)
        idx, val = statistic_trace(out.data, cfg)
        center = split(
            type(out.data)(x=out.data.x[200:600], y=out.data.y[200:600], z=out.data.z[200:600]),
            200,
        )
        res = permutation_test(center, cfg.estimator, PermutationPlan(b=199, seed=s))
        if val.max() < np.quantile(res.q_perm, 0.99):
            hits += 1
    assert hits >= int(0.9 * seeds)


# --- candidate testing ----------------------------------------------------------


def test_single_strong_candidate_accepted():
    out = generate(ScenarioSpec(id="PEF01", n=240, tau=120, seed=3))
    cfg = small_cfg(window=60, b=99)
    idx, val = statistic_trace(out.data, cfg)
    candidates = select_candidates(idx, val, 60)
    p_values, accepted = run_candidate_tests(out.data, candidates, cfg)
    strong = [i for i, p in zip(candidates, p_values) if p <= 0.05]
    assert accepted == strong
    assert any(abs(i - 120) <= 60 for i in accepted)


def test_threshold_none_keeps_only_small_p():
    # fabricate candidates at both a true change and a quiet region
    out = generate(ScenarioSpec(id="PEF01", n=320, tau=80, seed=4))
    cfg = small_cfg(window=60, b=39)
    p_values, accepted = run_candidate_tests(out.data, [80, 240], cfg)
    assert accepted == [i for i, p in zip([80, 240], p_values) if p <= cfg.p_bar]


def test_scan_determinism_and_structure():
    out = generate(ScenarioSpec(id="PMB01", n=240, tau=120, seed=5))
    cfg = small_cfg(window=60, b=39, correction="benjamini_yekutieli")
    a = scan(out.data, cfg)
    b = scan(out.data, cfg)
    assert a.candidates == b.candidates
    assert a.p_values == b.p_values
    assert a.accepted == b.accepted
    assert set(a.accepted).issubset(set(a.candidates))
    assert len(a.p_values) == len(a.candidates)
    gaps = np.abs(np.subtract.outer(a.accepted, a.accepted))
    if len(a.accepted) > 1:
        assert (gaps[~np.eye(len(a.accepted), dtype=bool)] >= 60).all()
