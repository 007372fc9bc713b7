from dataclasses import dataclass
from typing import Optional
import numpy as np

from .Architecture import Architecture
from .RandomBasis import RandomBasis
from .TrainConfig import TrainConfig
from .CblsUpdateWorkspace import CblsUpdateWorkspace
from .BlsModel import TASKS
from .ShapeError import ShapeError


@dataclass(frozen=True, eq=False)
class CblsModel:
    """
    A correntropy-trained broad network with the caches of the weighted increments.

    The caches hold the per-sample weights that produced W, so W = C_w U_w^T Y_w exactly.
    Sample weights are frozen once cached; refresh_weights recomputes them.

    Args:
        basis (RandomBasis): The random hidden mapping.
        W (np.ndarray): L x C output weights.
        C_w (np.ndarray): L x L inverse of U_w^T U_w + gamma I.
        U_w (np.ndarray): N x L weighted state matrix sqrt(Lambda) U.
        Y_w (np.ndarray): N x C weighted targets sqrt(Lambda) Y.
        weights (np.ndarray): The N cached weights (diagonal of Lambda).
        config (TrainConfig): The training hyperparameters.
        task (str): "regression" or "classification".
        X (np.ndarray): N x M raw training inputs.
        Y (np.ndarray): N x C raw training targets.
        converged (bool): Whether the last fixed-point run met the tolerance.
        n_iter (int): Iterations of the last fixed-point run.
        history (tuple): Normalized objective J/N of every iterate, W(0) included.
        last_update (CblsUpdateWorkspace): Intermediates of the latest increment, if any.
    """
    basis: RandomBasis
    W: np.ndarray
    C_w: np.ndarray
    U_w: np.ndarray
    Y_w: np.ndarray
    weights: np.ndarray
    config: TrainConfig
    task: str
    X: np.ndarray
    Y: np.ndarray
    converged: bool = True
    n_iter: int = 0
    history: tuple = ()
    last_update: Optional[CblsUpdateWorkspace] = None

    def __post_init__(self):
        if self.task not in TASKS:
            raise ValueError(f"Unknown task {self.task!r}")
        N, L = self.U_w.shape
        if self.W.shape[0] != L or self.C_w.shape != (L, L) or L != self.basis.width:
            raise ShapeError(f"Weighted caches disagree with {L} hidden nodes")
        if self.Y_w.shape[0] != N or self.weights.shape != (N,) or self.X.shape[0] != N or self.Y.shape[0] != N:
            raise ShapeError("Weighted caches disagree on the number of samples")
        for array in (self.W, self.C_w, self.U_w, self.Y_w, self.weights, self.X, self.Y):
            array.setflags(write=False)

    @property
    def arch(self) -> Architecture:
        return self.basis.arch

    @property
    def L(self) -> int:
        return self.W.shape[0]

    @property
    def n_samples(self) -> int:
        return self.U_w.shape[0]
