import numpy as np
import pytest

from copulashift import (
    ConfigError,
    Dataset,
    EstimatorConfig,
    EtaOutOfRange,
    LengthMismatch,
    NonFinite,
    TooShort,
    split,
    validate,
)


def make(n=10, d=2, seed=0):
    rng = np.random.default_rng(seed)
    return Dataset(x=rng.normal(size=n), y=rng.normal(size=n), z=rng.normal(size=(n, d)))


def test_validate_ok():
    ds = make(10)
    assert validate(ds) is ds


def test_validate_idempotent():
    ds = make(12)
    assert validate(validate(ds)) is ds


def test_nan_in_y_reports_row_and_column():
    y = np.zeros(10)
    y[3] = np.nan
    ds = Dataset(x=np.arange(10.0), y=y, z=np.zeros((10, 1)))
    with pytest.raises(NonFinite) as err:
        validate(ds)
    assert err.value.row == 3
    assert err.value.column == "y"


def test_inf_in_z_reports_column_name():
    z = np.zeros((8, 3))
    z[5, 2] = np.inf
    ds = Dataset(x=np.zeros(8), y=np.zeros(8), z=z)
    with pytest.raises(NonFinite) as err:
        validate(ds)
    assert err.value.row == 5
    assert err.value.column == "z_3"


def test_length_mismatch():
    ds = Dataset(x=np.zeros(9), y=np.zeros(10), z=np.zeros((10, 1)))
    with pytest.raises(LengthMismatch):
        validate(ds)


def test_too_short():
    ds = Dataset(x=np.zeros(3), y=np.zeros(3), z=np.zeros((3, 1)))
    with pytest.raises(TooShort):
        validate(ds)


def test_split_sizes():
    view = split(make(10), 5)
    assert view.pre[0].shape[0] == 5
    assert view.post[0].shape[0] == 5


@pytest.mark.parametrize("eta", [0, 10, -1, 11])
def test_split_eta_out_of_range(eta):
    with pytest.raises(EtaOutOfRange):
        split(make(10), eta)


@pytest.mark.parametrize("eta", [1, 4, 9])
def test_split_concat_reproduces_rows(eta):
    ds = make(10, d=3, seed=7)
    view = split(ds, eta)
    for got, full in zip(
        (np.concatenate([view.pre[i], view.post[i]]) for i in range(3)),
        (ds.x, ds.y, ds.z),
    ):
        assert np.array_equal(got, full)


def test_dataset_arrays_are_frozen():
    ds = make(6)
    with pytest.raises(ValueError):
        ds.x[0] = 1.0
    with pytest.raises(ValueError):
        ds.z[0, 0] = 1.0


def test_dataset_copies_input():
    x = np.zeros(6)
    ds = Dataset(x=x, y=np.zeros(6), z=np.zeros((6, 1)))
    x[0] = 99.0
    assert ds.x[0] == 0.0


def test_scalar_z_promoted_to_matrix():
    ds = Dataset(x=np.zeros(5), y=np.zeros(5), z=np.zeros(5))
    assert ds.z.shape == (5, 1)
    assert ds.d == 1


@pytest.mark.parametrize("kwargs", [{"k": 1}, {"k": 0}, {"gamma": 0.0}, {"gamma": -1.0}, {"gamma": np.inf}, {"kernel": "laplacian"}])
def test_estimator_config_rejects_bad_values(kwargs):
    with pytest.raises(ConfigError):
        EstimatorConfig(**kwargs)


def test_estimator_config_defaults():
    cfg = EstimatorConfig()
    assert cfg.k == 30
    assert cfg.gamma is None
    assert cfg.kernel == "gaussian"
