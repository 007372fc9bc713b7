from dataclasses import dataclass
import numpy as np

from .ShapeError import ShapeError


@dataclass(frozen=True)
class StateMatrix:
    """
    The hidden representation U of a batch of inputs.

    Args:
        values (np.ndarray): The N x L matrix.
        feature_block_width (int): Total width of the feature-node columns.
        enhancement_block_width (int): Total width of the enhancement-node columns
            (including extension blocks added with new feature groups).
    """
    values: np.ndarray
    feature_block_width: int
    enhancement_block_width: int

    def __post_init__(self):
        if self.values.ndim != 2 or self.values.shape[1] != self.feature_block_width + self.enhancement_block_width:
            raise ShapeError(f"State matrix has shape {self.values.shape}, expected "
                             f"{self.feature_block_width + self.enhancement_block_width} columns")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("State matrix contains NaN or Inf entries")
        self.values.setflags(write=False)

    @property
    def shape(self):
        return self.values.shape
