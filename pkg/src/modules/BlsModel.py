from dataclasses import dataclass
from typing import Optional
import numpy as np

from .Architecture import Architecture
from .RandomBasis import RandomBasis
from .BlsUpdateWorkspace import BlsUpdateWorkspace
from .ShapeError import ShapeError

TASKS = ("regression", "classification")


@dataclass(frozen=True, eq=False)
class BlsModel:
    """
    A trained broad network with the caches the pseudoinverse increments need.

    Models are immutable. Increments return a new model, sharing whatever did not change.

    Args:
        basis (RandomBasis): The random hidden mapping (extended by node increments).
        W (np.ndarray): L x C output weights.
        U (np.ndarray): N x L state matrix of the training data.
        U_pinv (np.ndarray): L x N pseudoinverse of U.
        lam (float): The regularizer the model was trained with.
        task (str): "regression" or "classification".
        X (np.ndarray): N x M training inputs (node increments map them through the new nodes).
        Y (np.ndarray): N x C training targets.
        last_update (BlsUpdateWorkspace): Intermediates of the latest increment, if any.
    """
    basis: RandomBasis
    W: np.ndarray
    U: np.ndarray
    U_pinv: np.ndarray
    lam: float
    task: str
    X: np.ndarray
    Y: np.ndarray
    last_update: Optional[BlsUpdateWorkspace] = None

    def __post_init__(self):
        if self.task not in TASKS:
            raise ValueError(f"Unknown task {self.task!r}")
        if self.lam < 0:
            raise ValueError(f"Regularizer must be non-negative, got {self.lam!r}")
        N, L = self.U.shape
        if self.W.shape[0] != L or L != self.basis.width:
            raise ShapeError(f"Output weights have {self.W.shape[0]} rows, state matrix {L} columns, "
                             f"basis {self.basis.width} nodes")
        if self.U_pinv.shape != (L, N) or self.X.shape[0] != N or self.Y.shape[0] != N:
            raise ShapeError("Cached matrices disagree on the number of samples")
        for array in (self.W, self.U, self.U_pinv, self.X, self.Y):
            array.setflags(write=False)

    @property
    def arch(self) -> Architecture:
        return self.basis.arch

    @property
    def L(self) -> int:
        return self.W.shape[0]

    @property
    def n_samples(self) -> int:
        return self.U.shape[0]
