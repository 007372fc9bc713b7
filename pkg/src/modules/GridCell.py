from dataclasses import dataclass
from typing import Optional

from .Architecture import Architecture

#Config
import broadlearn.config as cfg


@dataclass(frozen=True)
class GridCell:
    """
    One point of the hyperparameter grid: nf feature nodes per group, nw groups and ne
    enhancement nodes in a single enhancement group.

    Args:
        nf (int): Feature nodes per group (q).
        nw (int): Feature groups (k).
        ne (int): Enhancement nodes (r, with m = 1).
        gamma (float): Regularizer (lambda for BLS, gamma for C-BLS).
        sigma (float): Kernel size, C-BLS only.
        sigma_index (int): Position of sigma in the searched set, used to break ties.
    """
    nf: int
    nw: int
    ne: int
    gamma: float = cfg.DEFAULT_GAMMA
    sigma: Optional[float] = None
    sigma_index: int = 0

    @property
    def L(self) -> int:
        return self.nf * self.nw + self.ne

    def architecture(self, input_dim: int, output_dim: int, feature_activation: str = "identity",
                     enhancement_activation: str = "tanh") -> Architecture:
        return Architecture(k=self.nw, q=self.nf, m=1, r=self.ne, input_dim=input_dim, output_dim=output_dim,
                            feature_activation=feature_activation, enhancement_activation=enhancement_activation)

    def to_dict(self) -> dict:
        return {"nf": self.nf, "nw": self.nw, "ne": self.ne, "gamma": self.gamma,
                "sigma": self.sigma, "sigma_index": self.sigma_index, "L": self.L}
