from dataclasses import dataclass
import math

#Config
import broadlearn.config as cfg


@dataclass(frozen=True)
class TrainConfig:
    """
    Hyperparameters of the correntropy trainer.

    Args:
        gamma (float): Regularizer of the weighted solve (gamma = lambda * sigma^2).
        sigma (float): Kernel size.
        epsilon (float): Stop when ||W(t+1) - W(t)||_F^2 falls below this.
        max_iter (int): Iteration cap T.
        seed (int): Seed of the random basis.
    """
    gamma: float = cfg.DEFAULT_GAMMA
    sigma: float = cfg.DEFAULT_SIGMA
    epsilon: float = cfg.DEFAULT_EPSILON
    max_iter: int = cfg.DEFAULT_MAX_ITER
    seed: int = 0

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise ValueError(f"sigma must be positive, got {self.sigma!r}")
        if not (math.isfinite(self.epsilon) and self.epsilon > 0):
            raise ValueError(f"epsilon must be positive, got {self.epsilon!r}")
        if not (math.isfinite(self.gamma) and self.gamma >= 0):
            raise ValueError(f"gamma must be non-negative, got {self.gamma!r}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ValueError(f"max_iter must be a positive integer, got {self.max_iter!r}")

    @property
    def lam(self) -> float:
        """Objective regularizer lambda = gamma / sigma^2."""
        return self.gamma / self.sigma**2

    def to_dict(self) -> dict:
        return {"gamma": self.gamma, "sigma": self.sigma, "epsilon": self.epsilon,
                "max_iter": self.max_iter, "seed": self.seed}
