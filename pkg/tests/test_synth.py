import numpy as np
import pytest

from copulashift import (
    BadParams,
    ScenarioSpec,
    UnknownScenario,
    generate,
    list_scenarios,
)
from copulashift.synth import resolve_id, smooth_ramp


def gen(sid, n=400, tau=None, seed=0, force_pre=False, **params):
    return generate(
        ScenarioSpec(id=sid, n=n, tau=tau, seed=seed, params=params),
        force_pre_mechanism=force_pre,
    )


# --- registry ----------------------------------------------------------------


def test_registry_size_and_families():
    ids = list_scenarios()
    assert len(ids) == 43
    prefixes = {"PMB": 5, "PEF": 8, "PNL": 5, "PNM": 3, "PVR": 3, "PSM": 1,
                "NCL": 2, "NIV": 3, "NMD": 4, "NNS": 2, "NCF": 5, "NDR": 1, "NPO": 1}
    for prefix, count in prefixes.items():
        assert sum(1 for i in ids if i.startswith(prefix)) == count, prefix


def test_registry_contains_known_ids():
    ids = list_scenarios()
    for sid in ("PNL04_QUADRATIC_FLIP", "PMB01_EDGE_ON_LINEAR", "NIV02_Y_MONO_TRANSFORM",
                "PEF08_POISSON_SLOPE", "NPO01_LATENT_Z_STABLE"):
        assert sid in ids


def test_unknown_scenario():
    with pytest.raises(UnknownScenario):
        gen("PXX99")
    with pytest.raises(UnknownScenario):
        resolve_id("N")  # ambiguous prefix


def test_prefix_resolution():
    assert resolve_id("PMB01") == "PMB01_EDGE_ON_LINEAR"
    assert resolve_id("pnl04") == "PNL04_QUADRATIC_FLIP"


def test_is_null_matches_prefix():
    for sid in list_scenarios():
        out = generate(ScenarioSpec(id=sid, n=200, seed=0))
        assert out.is_null == sid.startswith("N")
        assert out.driver_column == 0
        assert out.true_tau == 100


# --- determinism ---------------------------------------------------------------


def test_seed_determinism_byte_identical():
    for sid in ("PMB01", "PEF08", "NCF02", "PNM03"):
        a = gen(sid, seed=9).data
        b = gen(sid, seed=9).data
        assert a.x.tobytes() == b.x.tobytes()
        assert a.y.tobytes() == b.y.tobytes()
        assert a.z.tobytes() == b.z.tobytes()
        c = gen(sid, seed=10).data
        assert a.x.tobytes() != c.x.tobytes()


def test_null_scenarios_prefix_stable_in_tau():
    # moving tau only changes which rows land in the post regime; everything
    # before the earlier tau is identical
    n = 300
    for sid in (s for s in list_scenarios() if s.startswith("N")):
        a = generate(ScenarioSpec(id=sid, n=n, tau=n // 2, seed=3)).data
        b = generate(ScenarioSpec(id=sid, n=n, tau=n // 3, seed=3)).data
        cut = n // 3
        assert np.array_equal(a.x[:cut], b.x[:cut]), sid
        assert np.array_equal(a.y[:cut], b.y[:cut]), sid
        assert np.array_equal(a.z[:cut], b.z[:cut]), sid


def test_trend_and_seasonal_nulls_ignore_tau_entirely():
    for sid in ("NMD03", "NMD04"):
        a = generate(ScenarioSpec(id=sid, n=200, tau=100, seed=1)).data
        b = generate(ScenarioSpec(id=sid, n=200, tau=50, seed=1)).data
        assert np.array_equal(a.y, b.y)


# --- structural checks (noise silenced where that makes mechanisms exact) -----


def test_pmb01_mechanism():
    out = gen("PMB01", n=200, tau=100, sigma_y=0.0)
    x, y, z = out.data.x, out.data.y, out.data.z[:, 0]
    assert np.allclose(y[:100], z[:100])
    assert np.allclose(y[100:], x[100:] + z[100:])


def test_pef01_sign_flip():
    out = gen("PEF01", n=200, tau=100, sigma_y=0.0)
    x, y, z = out.data.x, out.data.y, out.data.z[:, 0]
    assert np.allclose(y[:100], 0.5 * z[:100] + 0.6 * x[:100])
    assert np.allclose(y[100:], 0.5 * z[100:] - 0.6 * x[100:])


def test_pef02_strength_shift():
    out = gen("PEF02", n=200, tau=100, sigma_y=0.0)
    x, y, z = out.data.x, out.data.y, out.data.z[:, 0]
    assert np.allclose(y[:100], 0.5 * z[:100] + 0.3 * x[:100])
    assert np.allclose(y[100:], 0.5 * z[100:] + 0.9 * x[100:])


def test_pnl04_quadratic_flip():
    out = gen("PNL04", n=200, tau=100, sigma_y=0.0)
    x, y, z = out.data.x, out.data.y, out.data.z[:, 0]
    assert np.allclose(y[:100], 3.0 * x[:100] ** 2 + 0.5 * z[:100])
    assert np.allclose(y[100:], -3.0 * x[100:] ** 2 + 0.5 * z[100:])


def test_niv01_rescales_post_triple():
    plain = gen("NIV01", n=200, tau=100, force_pre=True).data
    scaled = gen("NIV01", n=200, tau=100).data
    assert np.array_equal(scaled.x[:100], plain.x[:100])
    assert np.array_equal(scaled.x[100:], 10.0 * plain.x[100:])
    assert np.array_equal(scaled.y[100:], 10.0 * plain.y[100:])
    assert np.array_equal(scaled.z[100:], 10.0 * plain.z[100:])


def test_niv02_monotone_transform_of_y():
    plain = gen("NIV02", n=200, tau=100, force_pre=True).data
    bent = gen("NIV02", n=200, tau=100).data
    assert np.array_equal(bent.y[:100], plain.y[:100])
    assert np.array_equal(bent.y[100:], np.arcsinh(plain.y[100:]))
    assert np.array_equal(bent.x, plain.x)


def test_nmd02_x_mean_shift_only():
    out = gen("NMD02", n=400, tau=200, seed=2)
    x = out.data.x
    assert abs(x[200:].mean() - x[:200].mean() - 2.0) < 0.35


def test_ncf05_binary_confounder():
    out = gen("NCF05", n=4000, tau=2000, seed=3)
    z = out.data.z[:, 0]
    assert set(np.unique(z)) == {0.0, 1.0}
    assert abs(z[:2000].mean() - 0.3) < 0.05
    assert abs(z[2000:].mean() - 0.7) < 0.05


def test_npo01_emits_only_observed_confounder():
    out = gen("NPO01", n=100)
    assert out.data.d == 1


def test_multix_layout_and_dimensions():
    out = gen("PMB03", n=100)
    assert out.data.d == 3  # z plus two non-driver candidates
    assert out.meta["z_columns"] == ["z", "x_2", "x_3"]
    assert gen("PEF03", n=100).data.d == 5
    assert gen("PEF04", n=100).data.d == 5
    assert gen("NCF02", n=100).data.d == 3


def test_ndr01_permutes_non_driver_columns_post_change():
    plain = gen("NDR01", n=200, tau=100, force_pre=True).data
    moved = gen("NDR01", n=200, tau=100).data
    assert np.array_equal(moved.x, plain.x)
    assert np.array_equal(moved.z[:100], plain.z[:100])
    assert np.array_equal(moved.z[:, 0], plain.z[:, 0])  # true confounder untouched
    assert np.array_equal(moved.z[100:, 1], plain.z[100:, 2])
    assert np.array_equal(moved.z[100:, 2], plain.z[100:, 1])


def test_pef07_driver_identity_changes():
    out = gen("PEF07", n=200, tau=100, sigma_y=0.0)
    x1 = out.data.x
    x2 = out.data.z[:, 1]
    z = out.data.z[:, 0]
    y = out.data.y
    assert np.allclose(y[:100], 0.5 * z[:100] + 0.6 * x1[:100])
    assert np.allclose(y[100:], 0.5 * z[100:] + 0.6 * x2[100:])


def test_pef08_poisson_coupling():
    out = gen("PEF08", n=3000, tau=1500, seed=4)
    zp = out.data.z[:, 0]
    assert np.allclose(zp, np.round(zp))  # integer-valued rates
    assert abs(zp[:1500].mean() - 0.5) < 0.12
    assert abs(zp[1500:].mean() - 5.0) < 0.30


def test_pnl03_gate_level_is_post_segment_quantile():
    out = gen("PNL03", n=400, tau=200, seed=5)
    theta = out.meta["theta_q"]
    assert theta == pytest.approx(np.quantile(np.abs(out.data.x[200:]), 0.6))


# --- moment-matching oracles ---------------------------------------------------


def test_pvr03_residual_sd_ratio():
    out = gen("PVR03", n=20000, tau=10000, seed=6)
    x, y, z = out.data.x, out.data.y, out.data.z[:, 0]
    resid = y - 0.5 * z - 0.6 * x
    ratio = resid[10000:].std() / resid[:10000].std()
    assert abs(ratio - 5.0) <= 0.5


def test_pnm01_standardized_skew_noise_moments():
    # The post-regime noise transform: for fixed shape s, the standardized
    # lognormal has mean 0 and variance sigma0^2 by the closed-form moments
    # mu(s) = exp(s^2/2), v(s) = (exp(s^2) - 1) exp(s^2).
    rng = np.random.default_rng(11)
    g = rng.normal(size=100_000)
    s, sigma0 = 0.3, 0.1
    mu = np.exp(s * s / 2.0)
    v = (np.exp(s * s) - 1.0) * np.exp(s * s)
    eps = sigma0 * (np.exp(s * g) - mu) / np.sqrt(v)
    assert abs(eps.mean()) <= 0.01 * sigma0
    assert abs(eps.var() - sigma0**2) <= 0.01 * sigma0**2


def test_pnm01_generator_matches_transform():
    # with sigma_x = 0 the driver equals the confounder and the noise shape
    # is a deterministic function of x, so the transform can be inverted
    out = gen("PNM01", n=300, tau=150, seed=7, sigma_x=0.0)
    x, y = out.data.x, out.data.y
    shape = 0.1 + 2.0 * np.abs(x[150:])
    mu = np.exp(shape**2 / 2.0)
    v = (np.exp(shape**2) - 1.0) * np.exp(shape**2)
    # recover the underlying gaussian draw from the pre-segment noise scale
    g = np.log(y[150:] / 0.1 * np.sqrt(v) + mu) / shape
    assert np.isfinite(g).all()
    assert abs(g.mean()) < 0.15
    assert abs(g.std() - 1.0) < 0.15


def test_pnm03_post_segment_globally_standardized():
    out = gen("PNM03", n=2000, tau=1000, seed=8)
    y_post = out.data.y[1000:]
    assert abs(y_post.mean()) < 1e-12
    assert abs(y_post.std() - 0.1) < 1e-12


def test_psm01_ramp():
    w = smooth_ramp(800, 400, 100)
    assert w[399] == 0.5  # t = tau exactly
    assert (np.diff(w) >= 0).all()
    assert w[0] < 1e-6 and w[-1] > 1 - 1e-6


def test_psm01_uses_ramp():
    out = gen("PSM01", n=200, tau=100, sigma_y=0.0, width=30)
    x, y, z = out.data.x, out.data.y, out.data.z[:, 0]
    w = smooth_ramp(200, 100, 30)
    assert np.allclose(y, np.sin(z) + w * 0.6 * np.tanh(x))


def test_pvr02_arch_recursion():
    out = gen("PVR02", n=300, tau=150, seed=9, sigma_x=0.0)
    # residual variance jumps after tau (0.2 floor vs 0.01 pre-variance)
    x, y, z = out.data.x, out.data.y, out.data.z[:, 0]
    resid = y - 0.5 * z - 0.6 * x
    assert resid[150:].std() > 3.0 * resid[:150].std()


# --- parameters -------------------------------------------------------------


def test_unknown_params_rejected():
    with pytest.raises(BadParams):
        gen("PMB01", banana=3)


def test_tau_out_of_range():
    with pytest.raises(BadParams):
        gen("PMB01", n=100, tau=100)
    with pytest.raises(BadParams):
        gen("PMB01", n=100, tau=0)


def test_param_override_applies():
    out = gen("PMB03", n=100, m=5)
    assert out.data.d == 5
    assert out.meta["params"]["m"] == 5
    assert "m" in out.meta["free_defaults"]


def test_forced_pre_mechanism_flag_recorded():
    out = gen("PEF01", n=100, force_pre=True)
    assert out.meta["forced_pre_mechanism"] is True
    x, y, z = out.data.x, out.data.y, out.data.z[:, 0]
    # no sign flip anywhere
    assert np.corrcoef(x, y)[0, 1] > 0.5
