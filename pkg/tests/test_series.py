import numpy as np
import pytest

from modules.DataFormatError import DataFormatError
from modules.SeriesConfig import SeriesConfig
from handlers.series import mackey_glass, gaussian_noise, alpha_stable_noise, load_series, write_series, normalize_series


def test_default_series():
    series = mackey_glass()
    assert series.shape == (1200,)
    assert np.all(np.isfinite(series))
    # The tau = 30 attractor stays within these bounds
    assert series.min() > 0.1 and series.max() < 1.6
    assert np.array_equal(series, mackey_glass())


def test_integrator_self_convergence():
    coarse = mackey_glass(SeriesConfig(dt=0.1, warmup=0, n=100))
    fine = mackey_glass(SeriesConfig(dt=0.05, warmup=0, n=100))
    assert np.max(np.abs(coarse - fine)) < 1e-4


def test_linear_interpolation_is_close_to_hermite():
    hermite = mackey_glass(SeriesConfig(warmup=0, n=100))
    linear = mackey_glass(SeriesConfig(warmup=0, n=100, interpolation="linear"))
    assert np.max(np.abs(hermite - linear)) < 1e-2


def test_constant_history_start():
    series = mackey_glass(SeriesConfig(warmup=0, n=5))
    assert series[0] == 1.2


@pytest.mark.parametrize("changes", [dict(tau=0.05), dict(dt=0.3), dict(dt=0.0), dict(n=0), dict(interpolation="cubic")])
def test_invalid_series_config(changes):
    with pytest.raises(ValueError):
        SeriesConfig(**changes)


def test_gaussian_noise_statistics():
    noise = gaussian_noise(100_000, 0.01, seed=1)
    assert abs(noise.mean()) < 2e-3
    assert noise.var() == pytest.approx(0.01, rel=0.03)
    assert np.array_equal(noise, gaussian_noise(100_000, 0.01, seed=1))


@pytest.mark.parametrize("alpha", [1.5, 1.0, 0.8])
def test_alpha_stable_characteristic_function(alpha):
    gamma = 0.1
    samples = alpha_stable_noise(100_000, alpha, gamma, seed=3)
    for omega in (0.5, 1.0, 2.0):
        empirical = np.mean(np.cos(omega * samples))
        assert abs(empirical - np.exp(-gamma * omega**alpha)) < 0.05


def test_alpha_two_is_gaussian():
    samples = alpha_stable_noise(100_000, 2.0, 0.1, seed=4)
    assert samples.var() == pytest.approx(0.2, rel=0.05)


def test_alpha_stable_is_reproducible():
    assert np.array_equal(alpha_stable_noise(50, 1.5, 0.1, seed=9), alpha_stable_noise(50, 1.5, 0.1, seed=9))
    assert not np.array_equal(alpha_stable_noise(50, 1.5, 0.1, seed=9), alpha_stable_noise(50, 1.5, 0.1, seed=10))


@pytest.mark.parametrize("args", [(0, 1.5, 0.1), (10, 0.0, 0.1), (10, 2.5, 0.1), (10, 1.5, 0.0)])
def test_alpha_stable_parameters(args):
    with pytest.raises(ValueError):
        alpha_stable_noise(*args, seed=0)


def test_series_files(tmp_path):
    values = np.array([0.5, 1.25, -3.0])
    write_series(values, tmp_path / "plain.txt")
    assert np.array_equal(load_series(tmp_path / "plain.txt"), values)
    write_series(values, tmp_path / "indexed.csv", with_index=True)
    assert np.array_equal(load_series(tmp_path / "indexed.csv"), values)

    (tmp_path / "header.csv").write_text("year,spots\n1700,5\n1701,11\n")
    assert load_series(tmp_path / "header.csv").tolist() == [5.0, 11.0]


def test_bad_series_files(tmp_path):
    (tmp_path / "empty.txt").write_text("")
    with pytest.raises(DataFormatError):
        load_series(tmp_path / "empty.txt")
    (tmp_path / "bad.txt").write_text("1.0\nabc\n")
    with pytest.raises(DataFormatError):
        load_series(tmp_path / "bad.txt")


def test_normalize_series():
    assert normalize_series([2.0, 4.0, 6.0]).tolist() == [0.0, 0.5, 1.0]
    with pytest.raises(ValueError):
        normalize_series([3.0, 3.0])
    with pytest.raises(ValueError):
        normalize_series([1.0, np.nan])


def test_zero_start_stays_at_zero():
    series = mackey_glass(SeriesConfig(x0=0.0, n=200))
    assert np.array_equal(series, np.zeros(200))
