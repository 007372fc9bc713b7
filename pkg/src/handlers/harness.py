import concurrent.futures as cf
import dataclasses
import logging as log
import platform
import time
from typing import Optional, Sequence
import numpy as np
import scipy
from tqdm import tqdm

from modules.Contamination import Contamination
from modules.Dataset import Dataset
from modules.ExperimentConfig import ExperimentConfig
from modules.GridCell import GridCell
from modules.IncrementStep import IncrementStep
from modules.NumericalError import NumericalError
from modules.Report import Report
from modules.ReportEntry import ReportEntry
from modules.SeriesConfig import SeriesConfig
from modules.ShapeError import ShapeError
from modules.TrainConfig import TrainConfig
from handlers.bls import (train_bls, predict, decode_labels, bls_add_samples, bls_add_enhancement,
                          bls_add_features, batch_refit)
from handlers.cbls import (train_cbls, cbls_add_samples, cbls_add_enhancement, cbls_add_features,
                           frozen_weight_refit)
from handlers.datasets import (inject_target_outliers, flip_labels, contamination_rows, embed_series,
                               shuffle_split)
from handlers.series import mackey_glass, gaussian_noise, alpha_stable_noise, normalize_series
from handlers.seeding import derive_seed, RUN, CONTAMINATION, SPLIT, INCREMENT

#Config
import broadlearn.config as cfg

# samples, enhancement, features, batch oracle
INCREMENTS = {
    "bls": (bls_add_samples, bls_add_enhancement, bls_add_features, batch_refit),
    "cbls": (cbls_add_samples, cbls_add_enhancement, cbls_add_features, frozen_weight_refit),
}
STATS_EXCLUDED = ("seed", "run", "step", "converged")


def rmse(pred, target) -> float:
    """Root mean squared elementwise error."""
    pred, target = np.asarray(pred, dtype=float), np.asarray(target, dtype=float)
    if pred.shape != target.shape:
        raise ShapeError(f"Predictions {pred.shape} and targets {target.shape} differ in shape")
    if pred.size == 0:
        raise ValueError("RMSE of an empty set is undefined")
    return float(np.sqrt(np.mean((pred - target) ** 2)))


def accuracy(pred_labels, target_labels) -> float:
    """Percentage of matching labels."""
    pred_labels, target_labels = np.ravel(pred_labels), np.ravel(target_labels)
    if pred_labels.shape != target_labels.shape:
        raise ShapeError(f"{pred_labels.size} predicted labels for {target_labels.size} targets")
    if pred_labels.size == 0:
        raise ValueError("Accuracy of an empty set is undefined")
    return float(100.0 * np.mean(pred_labels == target_labels))


def score(model, ds: Dataset) -> float:
    """RMSE for regression, accuracy (%) for classification."""
    Yhat = predict(model, ds.X)
    if ds.task == "classification":
        return accuracy(decode_labels(Yhat), ds.labels)
    return rmse(Yhat, ds.Y)


def environment() -> dict:
    return {
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "platform": platform.platform(),
    }


def threadpool_execute(worker_function, items, max_workers: Optional[int] = None, desc: Optional[str] = None) -> list:
    """
    Run worker_function(*args) for every args tuple in a thread pool.
    Results come back in the order of `items`, whatever the completion order.
    """
    max_workers = cfg.MAX_THREADS if max_workers is None else max_workers
    results = [None] * len(items)
    with cf.ThreadPoolExecutor(max_workers=max(1, max_workers)) as pool:
        futures = {pool.submit(worker_function, *args): index for index, args in enumerate(items)}
        with tqdm(total=len(items), desc=desc, disable=True if desc is None else None, leave=False) as pbar:
            for future in cf.as_completed(futures):
                results[futures[future]] = future.result()
                pbar.update(1)
    return results


def apply_contamination(ds: Dataset, contamination: Contamination, seed: int) -> Dataset:
    """Corrupt a training set as described by `contamination`. The input is not modified."""
    kind = contamination.kind
    if kind == "none" or contamination.p == 0:
        return ds
    if kind == "outliers":
        return inject_target_outliers(ds, contamination.p, contamination.lo, contamination.hi, seed)
    if kind == "flip":
        return flip_labels(ds, contamination.p, seed)

    rows = contamination_rows(len(ds), contamination.p, seed)
    on_targets = contamination.on == "targets"
    width = ds.Y.shape[1] if on_targets else ds.X.shape[1]
    count = max(1, rows.size * width)
    noise_seed = derive_seed(seed, CONTAMINATION, 2)
    if kind == "gaussian":
        noise = gaussian_noise(count, contamination.variance, noise_seed)
    else:
        noise = alpha_stable_noise(count, contamination.alpha, contamination.scale, noise_seed)
    noise = noise[:rows.size * width].reshape(rows.size, width)
    if on_targets:
        Y = ds.Y.copy()
        Y[rows] += noise
        return dataclasses.replace(ds, Y=Y)
    X = ds.X.copy()
    X[rows] += noise
    return dataclasses.replace(ds, X=X)


def fit(kind: str, ds: Dataset, cell: GridCell, expt: ExperimentConfig, seed: int):
    """Train a BLS or C-BLS model for one grid cell."""
    arch = cell.architecture(ds.X.shape[1], ds.Y.shape[1], expt.feature_activation, expt.enhancement_activation)
    if kind == "bls":
        return train_bls(ds.X, ds.Y, arch, cell.gamma, seed, ds.task)
    if cell.sigma is None:
        raise ValueError("C-BLS needs a kernel size")
    config = TrainConfig(gamma=cell.gamma, sigma=cell.sigma, epsilon=expt.epsilon, max_iter=expt.max_iter, seed=seed)
    return train_cbls(ds.X, ds.Y, arch, config, ds.task)


def evaluate_run(expt: ExperimentConfig, cell: GridCell, train: Dataset, test: Dataset, seed: int,
                 valid: Optional[Dataset] = None) -> dict:
    """
    One Monte-Carlo run: contaminate the training set, train with a fresh basis, score.

    Returns:
        dict: seed, train_time_ms, train_metric, test_metric (and validation_metric,
        converged, n_iter where they apply).
    """
    contaminated = apply_contamination(train, expt.contamination, derive_seed(seed, CONTAMINATION))
    start = time.perf_counter()
    model = fit(expt.model, contaminated, cell, expt, seed)
    elapsed = (time.perf_counter() - start) * 1000

    result = {
        "seed": seed,
        "train_time_ms": elapsed,
        "train_metric": score(model, contaminated),
        "test_metric": score(model, test),
    }
    if valid is not None:
        result["validation_metric"] = score(model, valid)
    if expt.model == "cbls":
        result["converged"] = model.converged
        result["n_iter"] = model.n_iter
    return result


def _run_safe(expt, cell, train, test, seed, valid=None) -> dict:
    try:
        return evaluate_run(expt, cell, train, test, seed, valid)
    except (NumericalError, ValueError, np.linalg.LinAlgError) as e:
        log.warning(f"Run with seed {seed} failed for {cell}: {e}")
        return {"seed": seed, "error": str(e)}


def aggregate(per_run: Sequence[dict]) -> tuple:
    """Mean, sample standard deviation (0 for one run) and median of every numeric metric of the successful runs."""
    ok = [run for run in per_run if "error" not in run]
    keys = [k for k in (ok[0] if ok else {}) if k not in STATS_EXCLUDED]
    mean, std, median = {}, {}, {}
    for key in keys:
        values = np.array([run[key] for run in ok], dtype=float)
        mean[key] = float(values.mean())
        std[key] = float(values.std(ddof=1)) if values.size > 1 else 0.0
        median[key] = float(np.median(values))
    return mean, std, median


def _entry(cell, label, per_run) -> ReportEntry:
    per_run = tuple(dict(run, run=i) for i, run in enumerate(per_run))
    mean, std, median = aggregate(per_run)
    return ReportEntry(cell=cell, label=label, per_run=per_run, mean=mean, std=std, median=median)


def run_seeds(seed: int, runs: int) -> list:
    return [derive_seed(seed, RUN, i) for i in range(runs)]


def monte_carlo(expt: ExperimentConfig, cell: GridCell, train: Dataset, test: Dataset, runs: Optional[int] = None,
                seed: Optional[int] = None, valid: Optional[Dataset] = None, label: Optional[dict] = None,
                desc: Optional[str] = None) -> ReportEntry:
    """
    Repeat evaluate_run with per-run seeds derived from the master seed.
    Failed runs are kept in the entry with their error message.
    """
    runs = expt.runs if runs is None else runs
    if runs < 1:
        raise ValueError(f"runs must be at least 1, got {runs}")
    seed = expt.seed if seed is None else seed
    items = [(expt, cell, train, test, s, valid) for s in run_seeds(seed, runs)]
    entry = _entry(cell, label or {}, threadpool_execute(_run_safe, items, expt.workers, desc))
    if entry.failures:
        log.warning(f"{entry.failures} of {runs} runs failed for {cell}")
    return entry


def _selection_key(entry: ReportEntry, metric: str, task: str):
    value = entry.mean.get(metric)
    if value is None or not np.isfinite(value):
        value = np.inf
    elif task == "classification":
        value = -value
    return (value, entry.cell.L, entry.cell.sigma_index)


def grid_search(expt: ExperimentConfig, train: Dataset, test: Dataset, desc: Optional[str] = None):
    """
    Evaluate every grid cell with expt.runs Monte-Carlo runs and pick the best one.

    The best cell has the lowest mean RMSE (regression) or highest mean accuracy
    (classification) on the selection set, ties going to the smaller network and then to
    the smaller sigma index. Every cell sees the same run seeds.

    Returns:
        tuple: (best GridCell, Report)
    """
    start = time.perf_counter()
    if expt.select_on == "validation":
        fit_set, valid = shuffle_split(train, expt.validation_fraction, derive_seed(expt.seed, SPLIT))
        metric = "validation_metric"
    else:
        fit_set, valid = train, None
        metric = "test_metric"

    cells = expt.cells()
    seeds = run_seeds(expt.seed, expt.runs)
    items = [(expt, cell, fit_set, test, s, valid) for cell in cells for s in seeds]
    log.info(f"Grid search over {len(cells)} cells x {expt.runs} runs")
    results = threadpool_execute(_run_safe, items, expt.workers, desc)

    entries = tuple(_entry(cell, {"model": expt.model}, results[i * expt.runs:(i + 1) * expt.runs])
                    for i, cell in enumerate(cells))
    best = min(entries, key=lambda entry: _selection_key(entry, metric, expt.task)).cell
    log.info(f"Best cell: {best}")
    report = Report(kind="grid", config=expt.to_dict(), entries=entries, metric=_metric_name(expt.task),
                    best=best, environment=environment(), wall_ms=(time.perf_counter() - start) * 1000)
    return best, report


def _metric_name(task: str) -> str:
    return "accuracy" if task == "classification" else "rmse"


def run_increment_study(expt: ExperimentConfig, cell: GridCell, train: Dataset, test: Dataset,
                        schedule: Sequence[IncrementStep], strict: bool = False) -> Report:
    """
    Train on the head of the training set, then apply the schedule step by step.

    Sample steps consume the following rows of the training set. After every step the
    output weights are compared with a batch refit on the same data and basis (pseudoinverse
    for BLS, frozen-weight weighted solve for C-BLS).

    Args:
        strict (bool): Raise when a step drifts further than ORACLE_TOLERANCE from its batch refit.
    """
    start = time.perf_counter()
    add_samples, add_enhancement, add_features, oracle = INCREMENTS[expt.model]
    n_added = sum(step.amount for step in schedule if step.kind == "samples")
    if n_added >= len(train):
        raise ValueError(f"Schedule adds {n_added} samples but the training set has {len(train)}")

    data = apply_contamination(train, expt.contamination, derive_seed(expt.seed, CONTAMINATION))
    cursor = len(data) - n_added
    tick = time.perf_counter()
    model = fit(expt.model, data.subset(slice(0, cursor)), cell, expt, expt.seed)
    rows = [_step_row(0, "initial", cursor, tick, model, test, 0.0)]

    for index, step in enumerate(schedule, start=1):
        seed = step.seed if step.seed is not None else derive_seed(expt.seed, INCREMENT, index)
        tick = time.perf_counter()
        if step.kind == "samples":
            chunk = data.subset(slice(cursor, cursor + step.amount))
            model = add_samples(model, chunk.X, chunk.Y)
            cursor += step.amount
        elif step.kind == "enhancement":
            model = add_enhancement(model, step.amount, seed)
        else:
            model = add_features(model, seed)
        elapsed = time.perf_counter()
        gap = float(np.max(np.abs(model.W - oracle(model))))
        if gap > cfg.ORACLE_TOLERANCE:
            log.warning(f"Step {index} ({step.kind}) is {gap:.3e} away from its batch refit")
            if strict:
                raise NumericalError(f"Incremental step {index} deviates from batch refit by {gap:.3e}")
        rows.append(_step_row(index, step.kind, step.amount, tick, model, test, gap, elapsed))

    entries = tuple(ReportEntry(cell=cell, label={"step": row["step"], "kind": row["kind"]}, per_run=(row,),
                                mean=_numeric(row), std={k: 0.0 for k in _numeric(row)}, median=_numeric(row))
                    for row in rows)
    return Report(kind="increment", config=dict(expt.to_dict(), schedule=[dataclasses.asdict(s) for s in schedule]),
                  entries=entries, metric=_metric_name(expt.task), best=cell, environment=environment(),
                  wall_ms=(time.perf_counter() - start) * 1000)


def _step_row(index, kind, amount, tick, model, test, gap, elapsed=None) -> dict:
    elapsed = time.perf_counter() if elapsed is None else elapsed
    return {"step": index, "kind": kind, "amount": amount, "time_ms": (elapsed - tick) * 1000,
            "test_metric": score(model, test), "L": model.L, "n_samples": model.n_samples, "oracle_gap": gap}


def _numeric(row: dict) -> dict:
    return {k: float(v) for k, v in row.items() if k not in STATS_EXCLUDED and isinstance(v, (int, float))}


def tune_sigma(expt: ExperimentConfig, cell: GridCell, train: Dataset, test: Dataset) -> GridCell:
    """Pick the C-BLS kernel size for a fixed architecture by grid search over expt.sigmas."""
    tuning = dataclasses.replace(expt, model="cbls", nf_grid=(cell.nf,), nw_grid=(cell.nw,), ne_grid=(cell.ne,),
                                 gammas=(cell.gamma,))
    best, _ = grid_search(tuning, train, test)
    return best


def robustness_curve(expt: ExperimentConfig, cell: GridCell, train: Dataset, test: Dataset,
                     p_list: Sequence[float], models: Sequence[str] = ("bls", "cbls"),
                     desc: Optional[str] = None) -> Report:
    """
    Sweep the contamination level p and run the Monte-Carlo protocol for every model.
    A C-BLS cell without sigma gets its kernel size tuned at every level.
    """
    start = time.perf_counter()
    entries = []
    for p in p_list:
        contamination = dataclasses.replace(expt.contamination, p=float(p))
        for kind in models:
            level = dataclasses.replace(expt, model=kind, contamination=contamination)
            model_cell = cell
            if kind == "cbls" and cell.sigma is None:
                model_cell = tune_sigma(level, cell, train, test)
            entries.append(monte_carlo(level, model_cell, train, test, label={"model": kind, "p": float(p)},
                                       desc=desc and f"{desc} {kind} p={p:g}"))
            log.info(f"{kind} at p={p:g}: median test {entries[-1].median.get('test_metric')}")
    return Report(kind="robustness", config=dict(expt.to_dict(), p_list=[float(p) for p in p_list]),
                  entries=tuple(entries), metric=_metric_name(expt.task), best=cell,
                  environment=environment(), wall_ms=(time.perf_counter() - start) * 1000)


def curve_rows(report: Report) -> list:
    """One row per contamination level with mean, std and median test metric of every model."""
    rows = {}
    for entry in report.entries:
        p, kind = entry.label["p"], entry.label["model"]
        row = rows.setdefault(p, {"p": p})
        for stat in ("mean", "std", "median"):
            row[f"{kind}_{stat}"] = getattr(entry, stat).get("test_metric")
    return [rows[p] for p in sorted(rows)]


def series_datasets(series, dim: int = 7, delay: int = 1, n_train: int = 1000):
    """Embed a series and split it so that training targets are the first n_train points."""
    X, y = embed_series(series, dim, delay)
    cut = n_train - dim * delay
    if not 0 < cut < X.shape[0]:
        raise ValueError(f"Cannot train on the first {n_train} of {len(series)} points")
    full = Dataset(X, y.reshape(-1, 1), "regression")
    return full.subset(slice(0, cut)), full.subset(slice(cut, None))


def time_series_study(expt: ExperimentConfig, cell: GridCell, series_config: SeriesConfig = SeriesConfig(),
                      models: Sequence[str] = ("bls", "cbls"), dim: int = 7, delay: int = 1,
                      n_train: int = 1000, desc: Optional[str] = None, series=None) -> Report:
    """
    Series prediction under noise: embed a series, corrupt the training part with
    expt.contamination (alpha-stable or Gaussian noise) and run the Monte-Carlo protocol
    for every model.

    Args:
        series_config (SeriesConfig): Mackey-Glass parameters, used when no series is given.
        series: A recorded series (e.g. sunspot numbers). It is scaled to [0, 1] before embedding.
    """
    start = time.perf_counter()
    if series is None:
        values, source = mackey_glass(series_config), dict(dataclasses.asdict(series_config), source="mackey_glass")
    else:
        values = normalize_series(series)
        source = {"source": "recorded", "length": int(values.size)}
    train, test = series_datasets(values, dim, delay, n_train)
    entries = []
    for kind in models:
        study = dataclasses.replace(expt, model=kind, task="regression")
        model_cell = tune_sigma(study, cell, train, test) if kind == "cbls" and cell.sigma is None else cell
        entries.append(monte_carlo(study, model_cell, train, test, label={"model": kind},
                                   desc=desc and f"{desc} {kind}"))
    config = dict(expt.to_dict(), series=source, dim=dim, delay=delay, n_train=n_train)
    return Report(kind="time_series", config=config, entries=tuple(entries), metric="rmse", best=cell,
                  environment=environment(), wall_ms=(time.perf_counter() - start) * 1000)
