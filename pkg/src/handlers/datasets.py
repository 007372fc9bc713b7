import csv
import dataclasses
import logging as log
import math
from pathlib import Path
from typing import Optional, Sequence
import numpy as np

from modules.Dataset import Dataset, MODES
from modules.DataFormatError import DataFormatError
from modules.ShapeError import ShapeError
from handlers.broadnet import as_matrix
from handlers.seeding import child_rng, CONTAMINATION, SPLIT


def load_csv(path: Path, target_columns: Optional[Sequence[int]] = None, label_column: Optional[int] = None,
             header: bool = False) -> Dataset:
    """
    Read a comma-separated file into a Dataset.

    Give target_columns for regression or label_column for classification (negative indices
    count from the end). With neither, the last column is the regression target.
    Classification labels may be strings; they get class indices in order of first appearance.

    Args:
        path (Path): The file to read.
        target_columns (list): Columns holding regression targets.
        label_column (int): Column holding class labels.
        header (bool): Skip the first non-blank row.

    Raises:
        DataFormatError: Empty file, ragged rows or non-numeric cells.
    """
    if target_columns is not None and label_column is not None:
        raise ValueError("Give either target columns or a label column, not both")
    task = "classification" if label_column is not None else "regression"

    with open(path, newline="") as csv_file:
        rows = [(number, [cell.strip() for cell in row])
                for number, row in enumerate(csv.reader(csv_file), start=1)
                if row and any(cell.strip() for cell in row)]
    if header and rows:
        rows = rows[1:]
    if not rows:
        raise DataFormatError(f"No data rows in {path}")

    width = len(rows[0][1])
    target_set = _resolve_columns([label_column] if task == "classification" else
                                  (target_columns if target_columns is not None else [-1]), width)
    feature_columns = [c for c in range(width) if c not in target_set]
    if not feature_columns:
        raise DataFormatError(f"No feature columns left in {path}")

    X, targets, labels = [], [], []
    for number, row in rows:
        if len(row) != width:
            raise DataFormatError(f"Expected {width} cells, found {len(row)}", line=number)
        X.append([_parse_float(row[c], number) for c in feature_columns])
        if task == "classification":
            labels.append(row[target_set[0]])
        else:
            targets.append([_parse_float(row[c], number) for c in target_set])

    X = np.array(X, dtype=float)
    if task == "classification":
        class_labels = tuple(dict.fromkeys(labels))
        index = {label: i for i, label in enumerate(class_labels)}
        Y = one_hot(np.array([index[label] for label in labels]), len(class_labels))
        log.info(f"Loaded {X.shape[0]} samples, {X.shape[1]} features, {len(class_labels)} classes from {path}")
        return Dataset(X, Y, "classification", class_labels=class_labels)

    log.info(f"Loaded {X.shape[0]} samples, {X.shape[1]} features, {len(target_set)} targets from {path}")
    return Dataset(X, np.array(targets, dtype=float), "regression")


def _resolve_columns(columns, width: int) -> list:
    resolved = []
    for column in columns:
        if not -width <= column < width:
            raise DataFormatError(f"Column {column} does not exist in a {width}-column file")
        resolved.append(column % width)
    return resolved


def _parse_float(cell: str, line: int) -> float:
    try:
        return float(cell)
    except ValueError:
        raise DataFormatError(f"Non-numeric value {cell!r}", line=line)


def write_csv(ds: Dataset, path: Path, header: bool = False):
    """
    Write features then targets (or the original class label) as CSV. Floats are written with
    repr, so reading the file back gives the same values.
    """
    with open(path, "w", newline="") as csv_file:
        writer = csv.writer(csv_file)
        if header:
            names = [f"x{i}" for i in range(ds.X.shape[1])]
            names += ["label"] if ds.task == "classification" else [f"y{i}" for i in range(ds.Y.shape[1])]
            writer.writerow(names)
        for i in range(len(ds)):
            row = [repr(float(v)) for v in ds.X[i]]
            if ds.task == "classification":
                label = int(np.argmax(ds.Y[i]))
                row.append(ds.class_labels[label] if ds.class_labels else str(label))
            else:
                row += [repr(float(v)) for v in ds.Y[i]]
            writer.writerow(row)
    log.debug(f"Wrote {len(ds)} rows to {path}")


def _column_ranges(A: np.ndarray) -> np.ndarray:
    if A.shape[0] == 0:
        raise ValueError("Cannot compute ranges of an empty data set")
    return np.column_stack([A.min(axis=0), A.max(axis=0)])


def _affine(ranges: np.ndarray, low: float, high: float):
    """Per-column scale and offset mapping [min, max] onto [low, high]; constant columns go to the midpoint."""
    span = ranges[:, 1] - ranges[:, 0]
    constant = span == 0
    scale = np.where(constant, 0.0, (high - low) / np.where(constant, 1.0, span))
    offset = np.where(constant, (low + high) / 2, low)
    return scale, offset


def _forward(A: np.ndarray, ranges: np.ndarray, low: float, high: float) -> np.ndarray:
    scale, offset = _affine(ranges, low, high)
    return (A - ranges[:, 0]) * scale + offset


def _inverse(A: np.ndarray, ranges: np.ndarray, low: float, high: float) -> np.ndarray:
    scale, offset = _affine(ranges, low, high)
    safe = np.where(scale == 0, 1.0, scale)
    return np.where(scale == 0, ranges[:, 0], (A - offset) / safe + ranges[:, 0])


def _bounds(mode: str):
    return (0.0, 1.0) if mode == "regression_unit" else (-1.0, 1.0)


def normalize(ds: Dataset, mode: str, reference: Optional[Dataset] = None) -> Dataset:
    """
    Affine per-column normalization.

    regression_unit maps inputs and (regression) targets to [0, 1]. classification_sym maps
    inputs to [-1, 1] and leaves targets alone. Ranges come from `reference` when given, so a
    test set can be mapped with its training set's ranges; values outside them land outside
    the target interval.

    Args:
        ds (Dataset): The raw data set.
        mode (str): "regression_unit" or "classification_sym".
        reference (Dataset): A normalized data set whose ranges are reused.
    """
    if mode not in MODES:
        raise ValueError(f"Unknown normalization mode {mode!r}")
    low, high = _bounds(mode)
    scale_targets = mode == "regression_unit" and ds.task == "regression"

    if reference is not None:
        if reference.mode != mode or reference.feature_ranges is None:
            raise ValueError("Reference data set was not normalized with the same mode")
        feature_ranges = reference.feature_ranges
        target_ranges = reference.target_ranges if scale_targets else None
        if feature_ranges.shape[0] != ds.X.shape[1] or (scale_targets and target_ranges.shape[0] != ds.Y.shape[1]):
            raise ShapeError("Reference ranges do not match the data set's columns")
    else:
        feature_ranges = _column_ranges(ds.X)
        target_ranges = _column_ranges(ds.Y) if scale_targets else None

    X = _forward(ds.X, feature_ranges, low, high)
    Y = _forward(ds.Y, target_ranges, low, high) if scale_targets else ds.Y.copy()
    return dataclasses.replace(ds, X=X, Y=Y, feature_ranges=feature_ranges,
                               target_ranges=target_ranges, mode=mode)


def denormalize_targets(Y, ds: Dataset) -> np.ndarray:
    """Map normalized targets (or predictions) back to the original scale of `ds`."""
    Y = as_matrix(Y, "Y")
    if ds.target_ranges is None:
        return Y
    return _inverse(Y, ds.target_ranges, *_bounds(ds.mode))


def denormalize(ds: Dataset) -> Dataset:
    """Undo normalize() using the ranges recorded in the data set."""
    if ds.mode is None:
        return ds
    low, high = _bounds(ds.mode)
    return dataclasses.replace(ds, X=_inverse(ds.X, ds.feature_ranges, low, high),
                               Y=denormalize_targets(ds.Y, ds), feature_ranges=None,
                               target_ranges=None, mode=None)


def one_hot(labels, C: int) -> np.ndarray:
    """N x C indicator matrix of integer labels in [0, C)."""
    labels = np.asarray(labels)
    if labels.ndim != 1:
        raise ShapeError(f"Labels must be a vector, got shape {labels.shape}")
    if labels.size and (labels.min() < 0 or labels.max() >= C or np.any(labels != np.round(labels))):
        raise ValueError(f"Labels must be integers in [0, {C})")
    Y = np.zeros((labels.size, C))
    Y[np.arange(labels.size), labels.astype(int)] = 1.0
    return Y


def contamination_rows(n: int, p: float, seed: int) -> np.ndarray:
    """The ceil(p n) distinct rows, in increasing order, that a contamination with (p, seed) touches."""
    if not 0 <= p <= 1:
        raise ValueError(f"Contamination level must be in [0, 1], got {p!r}")
    count = math.ceil(p * n - 1e-9)
    rng = child_rng(seed, CONTAMINATION, 0)
    return np.sort(rng.choice(n, size=count, replace=False))


def inject_target_outliers(ds: Dataset, p: float, lo: float, hi: float, seed: int) -> Dataset:
    """
    Add uniform [lo, hi] draws to the targets of ceil(p N) randomly chosen rows.

    Raises:
        ValueError: The data set is not a regression task.
    """
    if ds.task != "regression":
        raise ValueError("Target outliers only apply to regression data sets")
    if lo > hi:
        raise ValueError(f"Empty outlier interval [{lo}, {hi}]")
    rows = contamination_rows(len(ds), p, seed)
    Y = ds.Y.copy()
    Y[rows] += child_rng(seed, CONTAMINATION, 1).uniform(lo, hi, size=(rows.size, Y.shape[1]))
    log.debug(f"Added outliers to {rows.size} of {len(ds)} targets")
    return dataclasses.replace(ds, Y=Y)


def flip_labels(ds: Dataset, p: float, seed: int) -> Dataset:
    """
    Give ceil(p N) randomly chosen rows the opposite class of a binary problem.

    Raises:
        ValueError: The data set is not a binary classification task.
    """
    if ds.task != "classification" or ds.Y.shape[1] != 2:
        raise ValueError("Label flipping only applies to binary classification data sets")
    rows = contamination_rows(len(ds), p, seed)
    Y = ds.Y.copy()
    Y[rows] = Y[rows, ::-1]
    log.debug(f"Flipped {rows.size} of {len(ds)} labels")
    return dataclasses.replace(ds, Y=Y)


def embed_series(series, dim: int, delay: int):
    """
    Time-delay embedding: row t is [x(t - dim delay), ..., x(t - delay)] with target x(t).

    Returns:
        tuple: (X with len - dim * delay rows, y vector)
    """
    series = np.ravel(np.asarray(series, dtype=float))
    if dim < 1 or delay < 1:
        raise ValueError("Embedding dimension and delay must be positive")
    span = dim * delay
    if series.size <= span:
        raise ValueError(f"Series of length {series.size} is too short for dim={dim}, delay={delay}")
    t = np.arange(span, series.size)
    X = series[t[:, None] - span + delay * np.arange(dim)[None, :]]
    return X, series[t]


def split(ds: Dataset, n_train: int):
    """First n_train rows for training, the rest for testing."""
    if not 0 < n_train < len(ds):
        raise ValueError(f"Cannot split {len(ds)} rows at {n_train}")
    return ds.subset(slice(0, n_train)), ds.subset(slice(n_train, None))


def shuffle_split(ds: Dataset, test_fraction: float, seed: int):
    """Random (train, test) partition with round(test_fraction N) test rows."""
    if not 0 < test_fraction < 1:
        raise ValueError(f"Test fraction must be in (0, 1), got {test_fraction!r}")
    order = child_rng(seed, SPLIT).permutation(len(ds))
    n_test = max(1, int(round(test_fraction * len(ds))))
    if n_test >= len(ds):
        raise ValueError(f"Cannot hold out {n_test} of {len(ds)} rows")
    return ds.subset(np.sort(order[n_test:])), ds.subset(np.sort(order[:n_test]))


def sinc_dataset(n: int, noise_std: float = 0.0, seed: int = 0, low: float = -10.0, high: float = 10.0) -> Dataset:
    """Samples of y = sin(x) / x with x uniform on [low, high] and optional Gaussian target noise."""
    rng = child_rng(seed, SPLIT, 1)
    x = rng.uniform(low, high, size=(n, 1))
    y = np.sinc(x / np.pi)
    if noise_std:
        y = y + rng.normal(0.0, noise_std, size=y.shape)
    return Dataset(x, y, "regression")
