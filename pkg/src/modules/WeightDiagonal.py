from dataclasses import dataclass
import numpy as np


@dataclass(frozen=True, eq=False)
class WeightDiagonal:
    """
    Diagonal of the per-sample correntropy weights exp(-||e_i||^2 / (2 sigma^2)).
    Entries are in (0, 1]; an entry is exactly 0 only when its exponent underflowed.

    Args:
        entries (np.ndarray): The N weights.
    """
    entries: np.ndarray

    def __post_init__(self):
        if self.entries.ndim != 1:
            raise ValueError(f"Weight diagonal must be a vector, got shape {self.entries.shape}")
        if np.any(self.entries < 0) or np.any(self.entries > 1) or not np.all(np.isfinite(self.entries)):
            raise ValueError("Correntropy weights must lie in [0, 1]")
        self.entries.setflags(write=False)

    def __len__(self):
        return self.entries.shape[0]
