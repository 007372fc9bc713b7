import warnings
import time
import numpy as np
import pytest

from modules.Contamination import Contamination
from modules.Dataset import Dataset
from modules.ExperimentConfig import ExperimentConfig
from modules.GridCell import GridCell
from modules.IncrementStep import IncrementStep
from modules.ReportEntry import ReportEntry
from modules.SeriesConfig import SeriesConfig
from modules.TrainConfig import TrainConfig
from handlers.cbls import train_cbls, cbls_add_samples
from handlers.datasets import normalize, sinc_dataset
from handlers.harness import (rmse, accuracy, aggregate, apply_contamination, monte_carlo, grid_search,
                              run_increment_study, robustness_curve, curve_rows, series_datasets,
                              time_series_study, _selection_key)


@pytest.fixture
def sinc_sets():
    full = normalize(sinc_dataset(240, noise_std=0.01, seed=1), "regression_unit")
    return full.subset(slice(0, 160)), full.subset(slice(160, None))


def small_experiment(**changes) -> ExperimentConfig:
    settings = dict(model="bls", nf_grid=(3,), nw_grid=(3,), ne_grid=(20,), sigmas=(0.5,), runs=3, seed=7, workers=2)
    settings.update(changes)
    return ExperimentConfig(**settings)


def test_rmse_and_accuracy():
    assert rmse([[1.0], [3.0]], [[1.0], [1.0]]) == pytest.approx(np.sqrt(2))
    assert accuracy([0, 1, 1, 0], [0, 1, 0, 0]) == 75.0
    with pytest.raises(ValueError):
        rmse(np.zeros((0, 1)), np.zeros((0, 1)))


def test_aggregate_statistics():
    runs = [{"seed": 1, "test_metric": 1.0}, {"seed": 2, "test_metric": 3.0}, {"seed": 3, "error": "singular"},
            {"seed": 4, "test_metric": 5.0}]
    mean, std, median = aggregate(runs)
    assert mean == {"test_metric": 3.0}
    assert std["test_metric"] == pytest.approx(2.0)
    assert median["test_metric"] == 3.0
    assert "seed" not in mean


def test_single_run_has_zero_spread():
    _, std, _ = aggregate([{"test_metric": 0.25}])
    assert std == {"test_metric": 0.0}


def test_grid_cell_and_config():
    cell = GridCell(nf=10, nw=10, ne=100)
    assert cell.L == 200
    assert cell.architecture(4, 1).L == 200
    expt = ExperimentConfig(model="cbls", nf_grid=(1, 3), nw_grid=(2,), ne_grid=(5,), sigmas=(0.5, 1.0, 2.0))
    assert len(expt.cells()) == 6
    assert [cell.sigma_index for cell in expt.cells()[:3]] == [0, 1, 2]
    assert len(small_experiment().cells()) == 1
    with pytest.raises(ValueError):
        ExperimentConfig(runs=0)
    with pytest.raises(ValueError):
        ExperimentConfig(nf_grid=())


def test_contamination_validation():
    with pytest.raises(ValueError):
        Contamination(kind="spikes")
    with pytest.raises(ValueError):
        Contamination(kind="outliers", p=1.5)
    with pytest.raises(ValueError):
        IncrementStep(kind="samples", amount=0)


def test_apply_contamination(sinc_sets):
    train, _ = sinc_sets
    assert apply_contamination(train, Contamination(), seed=1) is train

    noisy = apply_contamination(train, Contamination(kind="gaussian", p=0.5, variance=0.1, on="inputs"), seed=1)
    assert np.array_equal(noisy.Y, train.Y)
    assert np.sum(np.any(noisy.X != train.X, axis=1)) == 80

    heavy = apply_contamination(train, Contamination(kind="alpha_stable", p=1.0), seed=1)
    assert np.all(heavy.Y != train.Y)
    assert np.array_equal(heavy.X, train.X)


def test_monte_carlo_is_reproducible(sinc_sets):
    train, test = sinc_sets
    expt = small_experiment(contamination=Contamination(kind="outliers", p=0.2))
    cell = expt.cells()[0]
    first = monte_carlo(expt, cell, train, test)
    second = monte_carlo(expt, cell, train, test)
    assert first.to_dict(timing=False) == second.to_dict(timing=False)
    assert len(first.per_run) == 3 and first.failures == 0
    assert len({run["seed"] for run in first.per_run}) == 3


def test_runs_share_seeds_across_models(sinc_sets):
    train, test = sinc_sets
    bls = monte_carlo(small_experiment(), GridCell(3, 3, 20), train, test)
    cbls = monte_carlo(small_experiment(model="cbls"), GridCell(3, 3, 20, sigma=0.5), train, test)
    assert [run["seed"] for run in bls.per_run] == [run["seed"] for run in cbls.per_run]
    assert all("converged" in run for run in cbls.per_run)


def test_failed_runs_are_recorded(sinc_sets):
    train, test = sinc_sets
    duplicate = Dataset(np.repeat(train.X[:1], len(train), axis=0), train.Y, mode=train.mode,
                        feature_ranges=train.feature_ranges, target_ranges=train.target_ranges)
    entry = monte_carlo(small_experiment(model="cbls", runs=2, workers=1), GridCell(3, 3, 20, gamma=0.0, sigma=0.5),
                        duplicate, test)
    assert entry.failures == 2
    assert all("error" in run for run in entry.per_run)
    assert entry.mean == {}


def test_grid_search_singleton(sinc_sets):
    train, test = sinc_sets
    expt = small_experiment()
    best, report = grid_search(expt, train, test)
    assert best == expt.cells()[0]
    assert len(report.entries) == 1
    document = report.to_dict()
    assert document["config"]["nf_grid"] == [3]
    assert document["best"]["L"] == 29
    assert len(document["per_run"][0]) == 3
    assert "wall_ms" in document and "wall_ms" not in report.to_dict(timing=False)


def test_grid_search_prefers_better_cell(sinc_sets):
    train, test = sinc_sets
    expt = small_experiment(nf_grid=(1, 3), nw_grid=(1, 3), ne_grid=(1, 30), runs=2, select_on="test")
    best, report = grid_search(expt, train, test)
    assert len(report.entries) == 8
    scores = {entry.cell: entry.mean["test_metric"] for entry in report.entries}
    assert scores[best] == min(scores.values())


def test_ties_go_to_smaller_network_then_sigma():
    small = ReportEntry(cell=GridCell(1, 1, 5, sigma=1.0, sigma_index=2), mean={"test_metric": 0.1})
    large = ReportEntry(cell=GridCell(2, 2, 5, sigma=0.5, sigma_index=0), mean={"test_metric": 0.1})
    other = ReportEntry(cell=GridCell(1, 1, 5, sigma=0.5, sigma_index=0), mean={"test_metric": 0.1})
    entries = [large, small, other]
    best = min(entries, key=lambda e: _selection_key(e, "test_metric", "regression"))
    assert best is other
    failed = ReportEntry(cell=GridCell(1, 1, 1), mean={})
    assert min([failed, large], key=lambda e: _selection_key(e, "test_metric", "regression")) is large


def test_accuracy_is_maximized():
    worse = ReportEntry(cell=GridCell(1, 1, 5), mean={"test_metric": 80.0})
    better = ReportEntry(cell=GridCell(2, 2, 5), mean={"test_metric": 90.0})
    assert min([worse, better], key=lambda e: _selection_key(e, "test_metric", "classification")) is better


@pytest.mark.parametrize("model", ["bls", "cbls"])
def test_increment_study_tracks_batch_refit(regression_data, model):
    X, Y = regression_data
    train, test = Dataset(X[:50], Y[:50]), Dataset(X[50:], Y[50:])
    expt = small_experiment(model=model, nf_grid=(3,), nw_grid=(2,), ne_grid=(8,),
                            gammas=(1e-2 if model == "cbls" else 0.0,))
    schedule = [IncrementStep("samples", 10), IncrementStep("enhancement", 5), IncrementStep("features"),
                IncrementStep("samples", 5)]
    report = run_increment_study(expt, expt.cells()[0], train, test, schedule, strict=True)
    rows = [entry.per_run[0] for entry in report.entries]
    assert [row["kind"] for row in rows] == ["initial", "samples", "enhancement", "features", "samples"]
    assert rows[0]["n_samples"] == 35
    assert rows[-1]["n_samples"] == 50
    assert rows[-1]["L"] == 14 + 5 + 3 + 8
    assert max(row["oracle_gap"] for row in rows) < 1e-8


def test_increment_study_needs_enough_samples(sinc_sets):
    train, test = sinc_sets
    with pytest.raises(ValueError):
        run_increment_study(small_experiment(), GridCell(3, 3, 20), train, test, [IncrementStep("samples", 500)])


def test_robustness_curve_rows(sinc_sets):
    train, test = sinc_sets
    expt = small_experiment(runs=2, contamination=Contamination(kind="outliers"))
    report = robustness_curve(expt, GridCell(3, 3, 20, sigma=0.5), train, test, [0.0, 0.2])
    assert len(report.entries) == 4
    rows = curve_rows(report)
    assert [row["p"] for row in rows] == [0.0, 0.2]
    assert {"bls_mean", "bls_std", "bls_median", "cbls_mean", "cbls_std", "cbls_median"} <= set(rows[0])


def test_series_datasets():
    train, test = series_datasets(np.arange(1200.0), dim=7, delay=1, n_train=1000)
    assert len(train) == 993 and len(test) == 200
    assert train.Y[0, 0] == 7.0 and test.Y[0, 0] == 1000.0


def test_time_series_study_on_recorded_series():
    recorded = 50.0 + 40.0 * np.sin(0.25 * np.arange(140.0))
    expt = small_experiment(runs=2, contamination=Contamination(kind="gaussian", p=1.0))
    report = time_series_study(expt, GridCell(1, 4, 6, gamma=1e-3, sigma=1.0), dim=4, delay=1, n_train=100,
                               series=recorded)
    assert [entry.label["model"] for entry in report.entries] == ["bls", "cbls"]
    assert report.config["series"] == {"source": "recorded", "length": 140}
    assert all(np.isfinite(entry.median["test_metric"]) for entry in report.entries)
    assert all(entry.median["test_metric"] < 1.0 for entry in report.entries)


def sinc_benchmark(seed: int = 0):
    train = normalize(sinc_dataset(500, noise_std=0.01, seed=seed), "regression_unit")
    test = normalize(sinc_dataset(500, seed=seed + 1), "regression_unit", reference=train)
    return train, test


@pytest.mark.slow
def test_correntropy_resists_target_outliers():
    train, test = sinc_benchmark()
    expt = ExperimentConfig(task="regression", runs=20, seed=3, contamination=Contamination(kind="outliers"))
    report = robustness_curve(expt, GridCell(5, 5, 40), train, test, [0.0, 0.3])
    median = {(e.label["model"], e.label["p"]): e.median["test_metric"] for e in report.entries}

    assert median[("cbls", 0.3)] < median[("bls", 0.3)]
    assert median[("cbls", 0.3)] < 1.5 * median[("cbls", 0.0)]
    assert median[("bls", 0.3)] > 2.0 * median[("bls", 0.0)]


@pytest.mark.slow
def test_correntropy_resists_alpha_stable_noise():
    expt = ExperimentConfig(runs=20, seed=5, contamination=Contamination(kind="alpha_stable", p=1.0, alpha=1.5, scale=0.1))
    report = time_series_study(expt, GridCell(5, 5, 40), SeriesConfig(n=1200), dim=7, n_train=1000)
    median = {e.label["model"]: e.median["test_metric"] for e in report.entries}
    assert median["cbls"] <= 0.8 * median["bls"]


@pytest.mark.slow
def test_sample_increment_is_faster_than_retraining():
    data = sinc_dataset(5500, noise_std=0.01, seed=2)
    cell = GridCell(10, 10, 1400)
    arch = cell.architecture(1, 1)
    config = TrainConfig(gamma=1e-3, sigma=0.5, max_iter=5)
    model = train_cbls(data.X[:5000], data.Y[:5000], arch, config)

    start = time.perf_counter()
    cbls_add_samples(model, data.X[5000:], data.Y[5000:])
    step = time.perf_counter() - start
    start = time.perf_counter()
    train_cbls(data.X, data.Y, arch, config)
    retrain = time.perf_counter() - start

    if step >= 0.5 * retrain:
        warnings.warn(f"500-sample increment took {step:.2f} s, cold retrain {retrain:.2f} s")
