#Import
from contextlib import contextmanager
import dataclasses
from enum import Enum
from pathlib import Path
import logging as log
import sys
import time
import numpy as np
import typer
from typing_extensions import Annotated
from typing import List, Optional

#Config
import broadlearn.config as cfg

# Local modules
from modules.BlsModel import BlsModel
from modules.Contamination import Contamination
from modules.DataFormatError import DataFormatError
from modules.ExperimentConfig import ExperimentConfig
from modules.GridCell import GridCell
from modules.NumericalError import NumericalError
from modules.SeriesConfig import SeriesConfig
from modules.ShapeError import ShapeError

# Local functions
from handlers.bls import predict as network_output, decode_labels
from handlers.cbls import refresh_weights
from handlers.datasets import load_csv, normalize, denormalize_targets, sinc_dataset, write_csv, shuffle_split
from handlers.series import mackey_glass, alpha_stable_noise, gaussian_noise, load_series, write_series
from handlers.harness import INCREMENTS, fit, score, grid_search, robustness_curve, curve_rows, time_series_study
from handlers.model_handler import save_model, load_model, preprocessing_from, apply_preprocessing
from handlers.report_handler import stash_report, commit_reports, discard_reports, write_rows_csv
from handlers.print_handler import console, print_progress, human_readable_duration, echo_pairs
from handlers.exit_handler import ExitHandler, exit_code_for, SUCCESS, USAGE

"""
broadlearn
Broad learning systems trained by least squares (BLS) or under the maximum correntropy
criterion (C-BLS), with closed-form incremental updates for new samples, new enhancement
nodes and new feature groups, and a benchmark harness for contaminated data.

Every command writes its machine-readable results to stdout as key=value lines, with the
path of the file it wrote on the last line. Progress and errors go to stderr.
"""

__version__ = "1.0.0"

app = typer.Typer(add_completion=False, pretty_exceptions_show_locals=False)


class ModelKind(str, Enum):
    bls = "bls"
    cbls = "cbls"


class Task(str, Enum):
    regression = "regression"
    classification = "classification"


class IncrementMode(str, Enum):
    samples = "samples"
    enhancement = "enhancement"
    features = "features"


class GenKind(str, Enum):
    mackey_glass = "mackey-glass"
    sinc = "sinc"
    alpha_stable = "alpha-stable"
    gaussian = "gaussian"


class NoiseKind(str, Enum):
    alpha_stable = "alpha-stable"
    gaussian = "gaussian"


class Selection(str, Enum):
    validation = "validation"
    test = "test"


def version_callback(value: bool):
    if value:
        typer.echo(f"broadlearn version {__version__}")
        raise ExitHandler(SUCCESS)


@app.callback()
def main(
        version: Annotated[Optional[bool], typer.Option("-v", "--version", help=__version__, callback=version_callback, is_eager=True)] = None,
    ):
    """Broad learning systems (BLS) and their correntropy-based robust variant (C-BLS)."""


@app.command()
def train(
        train: Annotated[Path, typer.Option("--train", help="Training CSV (features, then targets or the class label).", show_default=False)],
        test: Annotated[Optional[Path], typer.Option("--test", help="Test CSV with the same layout.", show_default=False)] = None,
        model: Annotated[ModelKind, typer.Option("--model", help="Least squares or correntropy training.")] = ModelKind.bls,
        task: Annotated[Task, typer.Option("--task")] = Task.regression,
        nf: Annotated[int, typer.Option("--nf", help="Feature nodes per group.")] = 10,
        nw: Annotated[int, typer.Option("--nw", help="Feature groups.")] = 10,
        ne: Annotated[int, typer.Option("--ne", help="Enhancement nodes.")] = 100,
        gamma: Annotated[float, typer.Option("--gamma", help="Regularizer.")] = cfg.DEFAULT_GAMMA,
        sigma: Annotated[float, typer.Option("--sigma", help="Kernel size (C-BLS).")] = cfg.DEFAULT_SIGMA,
        eps: Annotated[float, typer.Option("--eps", help="Termination tolerance (C-BLS).")] = cfg.DEFAULT_EPSILON,
        max_iter: Annotated[int, typer.Option("--max-iter", help="Iteration cap (C-BLS).")] = cfg.DEFAULT_MAX_ITER,
        seed: Annotated[int, typer.Option("--seed")] = 0,
        out: Annotated[Path, typer.Option("--out", help="Model file to write.")] = Path("model.json"),
        header: Annotated[bool, typer.Option("--header", help="The CSV files start with a header row.")] = False,
        strict: Annotated[bool, typer.Option("--strict", help="Fail with exit code 2 when C-BLS does not converge.")] = False,
        debug: Annotated[bool, typer.Option("-d", "--debug", help="Writes a debug.log file.", hidden=True)] = False,
    ):
    """Trains a model on a CSV file and writes it as JSON."""
    set_log_level(debug)
    with handle_errors():
        print_progress(1, "Loading data...", 3)
        train_set, test_set = prepare(train, test, task.value, header)

        print_progress(2, f"Training {model.value.upper()}...", 3)
        cell = GridCell(nf, nw, ne, gamma, sigma if model == ModelKind.cbls else None)
        expt = ExperimentConfig(model=model.value, task=task.value, epsilon=eps, max_iter=max_iter, seed=seed, runs=1)
        start = time.perf_counter()
        fitted = fit(model.value, train_set, cell, expt, seed)
        console.print(f"Trained in [dim cyan bold]{human_readable_duration((time.perf_counter() - start) * 1000)}[/dim cyan bold]")

        if model == ModelKind.cbls and not fitted.converged and strict:
            raise NumericalError(f"C-BLS did not converge within {max_iter} iterations")

        results = summary(fitted, train_set, test_set)
        save_model(fitted, out, preprocessing_from(train_set, header))
        print_progress(3, "Done.", 3)

    echo_pairs(results)
    typer.echo(str(out))
    raise ExitHandler(SUCCESS)


@app.command()
def predict(
        model_file: Annotated[Path, typer.Argument(help="A model written by train or increment.", show_default=False)],
        test: Annotated[Path, typer.Option("--test", help="CSV with the training layout.", show_default=False)],
        out: Annotated[Path, typer.Option("--out", help="Predictions CSV to write.")] = Path("predictions.csv"),
        header: Annotated[bool, typer.Option("--header", help="The CSV file starts with a header row.")] = False,
        debug: Annotated[bool, typer.Option("-d", "--debug", help="Writes a debug.log file.", hidden=True)] = False,
    ):
    """Predicts a CSV file with a saved model, in the original target scale."""
    set_log_level(debug)
    with handle_errors():
        fitted, preprocessing = load_model(model_file)
        data = apply_preprocessing(load_dataset(test, fitted.task, header), preprocessing)
        Yhat = network_output(fitted, data.X)
        if fitted.task == "classification":
            labels = (preprocessing or {}).get("class_labels")
            rows = [{"prediction": labels[i] if labels else int(i)} for i in decode_labels(Yhat)]
        else:
            rows = [{f"y{j}": repr(float(v)) for j, v in enumerate(row)} for row in denormalize_targets(Yhat, data)]
        write_rows_csv(rows, out)
        results = {"n": len(data), metric_key("test", fitted.task): score(fitted, data)}

    echo_pairs(results)
    typer.echo(str(out))
    raise ExitHandler(SUCCESS)


@app.command()
def increment(
        model_file: Annotated[Path, typer.Argument(help="A model written by train or increment.", show_default=False)],
        mode: Annotated[IncrementMode, typer.Option("--mode", help="What to add.", show_default=False)],
        train: Annotated[Optional[Path], typer.Option("--train", help="CSV of new samples (samples mode).", show_default=False)] = None,
        test: Annotated[Optional[Path], typer.Option("--test", help="Test CSV to score the updated model.", show_default=False)] = None,
        ne: Annotated[int, typer.Option("--ne", help="Enhancement nodes to add (enhancement mode).")] = 10,
        seed: Annotated[int, typer.Option("--seed", help="Seed of the new nodes.")] = 0,
        refresh: Annotated[bool, typer.Option("--refresh", help="Recompute every sample weight afterwards (C-BLS).")] = False,
        out: Annotated[Optional[Path], typer.Option("--out", help="Model file to write. Defaults to MODEL_FILE.", show_default=False)] = None,
        header: Annotated[bool, typer.Option("--header", help="The CSV files start with a header row.")] = False,
        debug: Annotated[bool, typer.Option("-d", "--debug", help="Writes a debug.log file.", hidden=True)] = False,
    ):
    """Updates a saved model with new samples or nodes, without retraining."""
    set_log_level(debug)
    out = model_file if out is None else out
    with handle_errors():
        fitted, preprocessing = load_model(model_file)
        kind = "bls" if isinstance(fitted, BlsModel) else "cbls"
        add_samples, add_enhancement, add_features, oracle = INCREMENTS[kind]
        if refresh and kind == "bls":
            raise ValueError("--refresh only applies to C-BLS models")

        start = time.perf_counter()
        if mode == IncrementMode.samples:
            if train is None:
                raise ValueError("--train is required to add samples")
            new = apply_preprocessing(load_dataset(train, fitted.task, header), preprocessing)
            updated = add_samples(fitted, new.X, new.Y)
        elif mode == IncrementMode.enhancement:
            updated = add_enhancement(fitted, ne, seed)
        else:
            updated = add_features(fitted, seed)
        if refresh:
            updated = refresh_weights(updated)
        console.print(f"Updated in [dim cyan bold]{human_readable_duration((time.perf_counter() - start) * 1000)}[/dim cyan bold]")

        results = {"model": kind, "mode": mode.value, "n_train": updated.n_samples, "L": updated.L,
                   "oracle_gap": float(np.max(np.abs(updated.W - oracle(updated))))}
        if test is not None:
            test_set = apply_preprocessing(load_dataset(test, fitted.task, header), preprocessing)
            results[metric_key("test", fitted.task)] = score(updated, test_set)
        save_model(updated, out, preprocessing)

    echo_pairs(results)
    typer.echo(str(out))
    raise ExitHandler(SUCCESS)


@app.command()
def gen(
        kind: Annotated[GenKind, typer.Argument(help="What to generate.", show_default=False)],
        out: Annotated[Path, typer.Option("--out", help="File to write.", show_default=False)],
        n: Annotated[Optional[int], typer.Option("--n", help="Number of values (rows for sinc). [default: 1200, 500 for sinc]", show_default=False)] = None,
        seed: Annotated[int, typer.Option("--seed")] = 0,
        tau: Annotated[float, typer.Option("--tau", help="Mackey-Glass delay.")] = 30.0,
        alpha: Annotated[float, typer.Option("--alpha", help="Stability index of alpha-stable noise.")] = 1.5,
        scale: Annotated[float, typer.Option("--scale", help="Dispersion of alpha-stable noise.")] = 0.1,
        variance: Annotated[float, typer.Option("--variance", help="Variance of Gaussian noise.")] = 0.01,
        noise_std: Annotated[float, typer.Option("--noise-std", help="Target noise of the sinc data set.")] = 0.0,
        with_index: Annotated[bool, typer.Option("--with-index", help="Write series as index,value lines.")] = False,
        debug: Annotated[bool, typer.Option("-d", "--debug", help="Writes a debug.log file.", hidden=True)] = False,
    ):
    """Generates a series (Mackey-Glass, noise) or the sinc regression data set."""
    set_log_level(debug)
    with handle_errors():
        if kind == GenKind.sinc:
            data = sinc_dataset(500 if n is None else n, noise_std, seed)
            write_csv(data, out)
            count = len(data)
        else:
            n = 1200 if n is None else n
            if kind == GenKind.mackey_glass:
                values = mackey_glass(SeriesConfig(tau=tau, n=n))
            elif kind == GenKind.alpha_stable:
                values = alpha_stable_noise(n, alpha, scale, seed)
            else:
                values = gaussian_noise(n, variance, seed)
            write_series(values, out, with_index)
            count = values.size

    echo_pairs({"kind": kind.value, "n": count})
    typer.echo(str(out))
    raise ExitHandler(SUCCESS)


@app.command()
def bench(
        train: Annotated[Optional[Path], typer.Option("--train", help="Training CSV. Defaults to a synthetic sinc set.", show_default=False)] = None,
        test: Annotated[Optional[Path], typer.Option("--test", help="Test CSV. Defaults to a held-out part of the training set.", show_default=False)] = None,
        model: Annotated[Optional[ModelKind], typer.Option("--model", help="Only this model. [default: both]", show_default=False)] = None,
        task: Annotated[Task, typer.Option("--task")] = Task.regression,
        p_list: Annotated[str, typer.Option("--p-list", help="Comma-separated contamination levels.")] = "0,0.1,0.2,0.3,0.4",
        series: Annotated[Optional[str], typer.Option("--series", help="Run the noisy series study instead: a series file (one value per line) or mackey-glass.", show_default=False)] = None,
        noise: Annotated[NoiseKind, typer.Option("--noise", help="Training noise of the series study.")] = NoiseKind.alpha_stable,
        dim: Annotated[int, typer.Option("--dim", help="Embedding dimension of the series study.")] = 7,
        delay: Annotated[int, typer.Option("--delay", help="Embedding delay of the series study.")] = 1,
        n_train: Annotated[Optional[int], typer.Option("--n-train", help="Series points used for training. [default: 1000 for mackey-glass, 80% of a file]", show_default=False)] = None,
        nf: Annotated[int, typer.Option("--nf")] = 10,
        nw: Annotated[int, typer.Option("--nw")] = 10,
        ne: Annotated[int, typer.Option("--ne")] = 100,
        gamma: Annotated[float, typer.Option("--gamma")] = cfg.DEFAULT_GAMMA,
        sigma: Annotated[Optional[float], typer.Option("--sigma", help="C-BLS kernel size. Tuned over the default grid when omitted.", show_default=False)] = None,
        eps: Annotated[float, typer.Option("--eps")] = cfg.DEFAULT_EPSILON,
        max_iter: Annotated[int, typer.Option("--max-iter")] = cfg.DEFAULT_MAX_ITER,
        runs: Annotated[int, typer.Option("--runs", help="Monte-Carlo runs per level.")] = cfg.MONTE_CARLO_RUNS,
        seed: Annotated[int, typer.Option("--seed")] = 0,
        out: Annotated[Path, typer.Option("--out", help="Report JSON; the curve CSV is written next to it.")] = Path("bench.json"),
        header: Annotated[bool, typer.Option("--header")] = False,
        debug: Annotated[bool, typer.Option("-d", "--debug", help="Writes a debug.log file.", hidden=True)] = False,
    ):
    """Sweeps the training contamination level and compares BLS with C-BLS, or runs the noisy series study."""
    set_log_level(debug)
    if series is not None:
        return bench_series(series, noise, dim, delay, n_train, model, GridCell(nf, nw, ne, gamma, sigma),
                            ExperimentConfig(epsilon=eps, max_iter=max_iter, runs=runs, seed=seed), out)
    with handle_errors():
        levels = parse_floats(p_list, "--p-list")
        train_set, test_set = prepare_bench(train, test, task.value, header, seed)
        kind = "outliers" if task == Task.regression else "flip"
        expt = ExperimentConfig(task=task.value, epsilon=eps, max_iter=max_iter, runs=runs, seed=seed,
                                contamination=Contamination(kind=kind))
        cell = GridCell(nf, nw, ne, gamma, sigma)
        models = (model.value,) if model is not None else ("bls", "cbls")

        report = robustness_curve(expt, cell, train_set, test_set, levels, models, desc="bench")
        rows = curve_rows(report)
        stash_report(report, out, rows=rows)
        commit_reports()

    echo_pairs({"levels": len(levels), "curve": out.with_suffix(".csv")})
    typer.echo(str(out))
    raise ExitHandler(SUCCESS)



def bench_series(source: str, noise: NoiseKind, dim: int, delay: int, n_train: Optional[int],
                 model: Optional[ModelKind], cell: GridCell, expt: ExperimentConfig, out: Path):
    with handle_errors():
        if source == "mackey-glass":
            values = None
            n_train = 1000 if n_train is None else n_train
        else:
            values = load_series(Path(source))
            n_train = int(0.8 * values.size) if n_train is None else n_train
        contamination = Contamination(kind=noise.value.replace("-", "_"), p=1.0)
        expt = dataclasses.replace(expt, task="regression", contamination=contamination)
        models = (model.value,) if model is not None else ("bls", "cbls")
        report = time_series_study(expt, cell, models=models, dim=dim, delay=delay, n_train=n_train,
                                   desc="series", series=values)
        stash_report(report, out)
        commit_reports()

    echo_pairs({"models": len(report.entries), **{f"{entry.label['model']}_median": entry.median.get("test_metric")
                                                   for entry in report.entries}})
    typer.echo(str(out))
    raise ExitHandler(SUCCESS)


@app.command()
def grid(
        train: Annotated[Path, typer.Option("--train", help="Training CSV.", show_default=False)],
        test: Annotated[Path, typer.Option("--test", help="Test CSV.", show_default=False)],
        model: Annotated[ModelKind, typer.Option("--model")] = ModelKind.cbls,
        task: Annotated[Task, typer.Option("--task")] = Task.regression,
        nf: Annotated[Optional[List[int]], typer.Option("--nf", help="Repeat to search several values.", show_default=False)] = None,
        nw: Annotated[Optional[List[int]], typer.Option("--nw", help="Repeat to search several values.", show_default=False)] = None,
        ne: Annotated[Optional[List[int]], typer.Option("--ne", help="Repeat to search several values.", show_default=False)] = None,
        gamma: Annotated[Optional[List[float]], typer.Option("--gamma", help="Repeat to search several values.", show_default=False)] = None,
        sigma: Annotated[Optional[List[float]], typer.Option("--sigma", help="Repeat to search several values.", show_default=False)] = None,
        eps: Annotated[float, typer.Option("--eps")] = cfg.DEFAULT_EPSILON,
        max_iter: Annotated[int, typer.Option("--max-iter")] = cfg.DEFAULT_MAX_ITER,
        runs: Annotated[int, typer.Option("--runs", help="Monte-Carlo runs per cell.")] = cfg.MONTE_CARLO_RUNS,
        seed: Annotated[int, typer.Option("--seed")] = 0,
        select: Annotated[Selection, typer.Option("--select", help="Pick the best cell on a validation split or on the test set.")] = Selection.validation,
        out: Annotated[Path, typer.Option("--out", help="Report JSON; a CSV summary is written next to it.")] = Path("grid.json"),
        header: Annotated[bool, typer.Option("--header")] = False,
        debug: Annotated[bool, typer.Option("-d", "--debug", help="Writes a debug.log file.", hidden=True)] = False,
    ):
    """Exhaustive grid search with Monte-Carlo averaging. Omitted grids use the default search ranges."""
    set_log_level(debug)
    with handle_errors():
        train_set, test_set = prepare(train, test, task.value, header)
        expt = ExperimentConfig(
            model=model.value, task=task.value,
            nf_grid=tuple(nf) if nf else cfg.NF_GRID,
            nw_grid=tuple(nw) if nw else cfg.NW_GRID,
            ne_grid=tuple(ne) if ne else cfg.NE_GRID,
            gammas=tuple(gamma) if gamma else (cfg.DEFAULT_GAMMA,),
            sigmas=tuple(sigma) if sigma else cfg.SIGMA_GRID,
            epsilon=eps, max_iter=max_iter, runs=runs, seed=seed, select_on=select.value,
        )
        best, report = grid_search(expt, train_set, test_set, desc="grid")
        stash_report(report, out)
        commit_reports()
        entry = next(e for e in report.entries if e.cell == best)

    results = {f"best_{key}": value for key, value in best.to_dict().items() if value is not None}
    results["cells"] = len(report.entries)
    results[f"mean_{metric_key('test', task.value)}"] = entry.mean.get("test_metric")
    echo_pairs(results)
    typer.echo(str(out))
    raise ExitHandler(SUCCESS)


@contextmanager
def handle_errors():
    """Turns failures into a message on stderr and the matching exit code."""
    try:
        yield
    except (NumericalError, ShapeError, DataFormatError, ValueError, OSError) as e:
        discard_reports()
        console.print(f"[bold red]Error:[/bold red] {e}", highlight=False)
        log.debug("Failure details", exc_info=True)
        raise ExitHandler(exit_code_for(e))


def metric_key(prefix: str, task: str) -> str:
    return f"{prefix}_{'accuracy' if task == 'classification' else 'rmse'}"


def summary(fitted, train_set, test_set) -> dict:
    results = {
        "model": "bls" if isinstance(fitted, BlsModel) else "cbls",
        "task": fitted.task,
        "n_train": fitted.n_samples,
        "L": fitted.L,
        metric_key("train", fitted.task): score(fitted, train_set),
    }
    if test_set is not None:
        results[metric_key("test", fitted.task)] = score(fitted, test_set)
    if not isinstance(fitted, BlsModel):
        results["converged"] = fitted.converged
        results["n_iter"] = fitted.n_iter
    return results


def parse_floats(text: str, flag: str) -> list:
    try:
        values = [float(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise typer.BadParameter(f"expected comma-separated numbers, got {text!r}", param_hint=flag)
    if not values:
        raise typer.BadParameter("at least one value is required", param_hint=flag)
    return values


def load_dataset(path: Path, task: str, header: bool):
    return load_csv(path, label_column=-1 if task == "classification" else None, header=header)


def prepare(train_path: Path, test_path: Optional[Path], task: str, header: bool):
    """Loads and normalizes the training set, and maps the test set with the training ranges."""
    mode = "regression_unit" if task == "regression" else "classification_sym"
    train_set = normalize(load_dataset(train_path, task, header), mode)
    if test_path is None:
        return train_set, None
    test_set = apply_preprocessing(load_dataset(test_path, task, header), preprocessing_from(train_set))
    return train_set, test_set


def prepare_bench(train_path: Optional[Path], test_path: Optional[Path], task: str, header: bool, seed: int):
    """Benchmark data: the given files, a held-out part of the training file, or the sinc set."""
    if train_path is None:
        if task != "regression":
            raise ValueError("The synthetic benchmark set is a regression task; give --train for classification")
        full = normalize(sinc_dataset(600, 0.0, seed), "regression_unit")
        return full.subset(slice(0, 500)), full.subset(slice(500, None))
    if test_path is not None:
        return prepare(train_path, test_path, task, header)
    train_set, _ = prepare(train_path, None, task, header)
    fit_set, held_out = shuffle_split(train_set, 0.2, seed)
    return fit_set, held_out


def set_log_level(debug: bool = False):
    logger = log.getLogger()
    logger.handlers.clear() #clear default logger
    logger.setLevel(log.DEBUG if debug else log.WARNING)

    #Console log
    console_formatter = log.Formatter('[%(levelname)s] %(message)s')
    console_logging = log.StreamHandler()
    console_logging.setLevel(log.DEBUG if debug else log.WARNING)
    console_logging.setFormatter(console_formatter)
    logger.addHandler(console_logging)

    #File log
    if debug:
        formatter = log.Formatter(
            '%(asctime)s.%(msecs)03d [%(levelname)s] %(module)s - %(funcName)s [%(lineno)s]: %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S',
        )
        file_logging = log.FileHandler('debug.log')
        file_logging.setLevel(log.DEBUG)
        file_logging.setFormatter(formatter)
        logger.addHandler(file_logging)


# typer may bundle its own click, so the exception class comes from what it raises
ClickException = next(cls for cls in typer.BadParameter.__mro__ if cls.__name__ == "ClickException")


def run():
    """
    Console entry point. Runs the app outside click's standalone mode so usage errors
    exit with 1, like I/O errors. Exit code 2 stays reserved for numerical failures.
    """
    try:
        code = app(prog_name="broadlearn", standalone_mode=False)
    except ClickException as e:
        e.show()
        code = USAGE
    except typer.Abort:
        console.print("Aborted!")
        code = USAGE
    sys.exit(code if isinstance(code, int) else SUCCESS)


if __name__ == "__main__":
    run()
