from dataclasses import dataclass
from typing import Optional
import numpy as np

from .BlsModel import TASKS
from .ShapeError import ShapeError

MODES = ("regression_unit", "classification_sym")


@dataclass(frozen=True, eq=False)
class Dataset:
    """
    A supervised data set. Classification targets are one-hot rows.

    Args:
        X (np.ndarray): N x M inputs.
        Y (np.ndarray): N x C targets.
        task (str): "regression" or "classification".
        feature_ranges (np.ndarray): M x 2 per-column (min, max) used by normalize, if normalized.
        target_ranges (np.ndarray): C x 2 per-column (min, max) of the targets, if they were scaled.
        class_labels (tuple): Original label of every class index (classification).
        mode (str): The normalization applied, if any.
    """
    X: np.ndarray
    Y: np.ndarray
    task: str = "regression"
    feature_ranges: Optional[np.ndarray] = None
    target_ranges: Optional[np.ndarray] = None
    class_labels: Optional[tuple] = None
    mode: Optional[str] = None

    def __post_init__(self):
        if self.task not in TASKS:
            raise ValueError(f"Unknown task {self.task!r}")
        if self.mode is not None and self.mode not in MODES:
            raise ValueError(f"Unknown normalization mode {self.mode!r}")
        if self.X.ndim != 2 or self.Y.ndim != 2 or self.X.shape[0] != self.Y.shape[0]:
            raise ShapeError(f"Inputs {self.X.shape} and targets {self.Y.shape} do not pair up")
        if self.feature_ranges is not None and self.feature_ranges.shape != (self.X.shape[1], 2):
            raise ShapeError(f"Feature ranges have shape {self.feature_ranges.shape}")
        if self.target_ranges is not None and self.target_ranges.shape != (self.Y.shape[1], 2):
            raise ShapeError(f"Target ranges have shape {self.target_ranges.shape}")

    def __len__(self):
        return self.X.shape[0]

    @property
    def labels(self) -> np.ndarray:
        """Class index per row (classification)."""
        return np.argmax(self.Y, axis=1)

    def subset(self, rows) -> "Dataset":
        return Dataset(self.X[rows], self.Y[rows], self.task, self.feature_ranges,
                       self.target_ranges, self.class_labels, self.mode)
