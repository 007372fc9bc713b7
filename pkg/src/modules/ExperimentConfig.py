from dataclasses import dataclass, field
import itertools

from .BlsModel import TASKS
from .Contamination import Contamination
from .GridCell import GridCell

#Config
import broadlearn.config as cfg

MODELS = ("bls", "cbls")
SELECTIONS = ("validation", "test")


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Everything a benchmark needs besides the data.

    Args:
        model (str): "bls" or "cbls".
        task (str): "regression" or "classification".
        nf_grid (tuple): Searched feature nodes per group.
        nw_grid (tuple): Searched feature groups.
        ne_grid (tuple): Searched enhancement nodes.
        gammas (tuple): Searched regularizers.
        sigmas (tuple): Searched kernel sizes (C-BLS only).
        epsilon (float): C-BLS termination tolerance.
        max_iter (int): C-BLS iteration cap.
        runs (int): Monte-Carlo repetitions per grid cell.
        contamination (Contamination): Training-set corruption.
        seed (int): Master seed; every run and cell derives its own.
        select_on (str): Grid selection on a held-out "validation" split or on the "test" set.
        validation_fraction (float): Share of the training set held out for selection.
        feature_activation (str): phi.
        enhancement_activation (str): xi.
        workers (int): Thread pool size.
    """
    model: str = "cbls"
    task: str = "regression"
    nf_grid: tuple = cfg.NF_GRID
    nw_grid: tuple = cfg.NW_GRID
    ne_grid: tuple = cfg.NE_GRID
    gammas: tuple = (cfg.DEFAULT_GAMMA,)
    sigmas: tuple = cfg.SIGMA_GRID
    epsilon: float = cfg.DEFAULT_EPSILON
    max_iter: int = cfg.DEFAULT_MAX_ITER
    runs: int = cfg.MONTE_CARLO_RUNS
    contamination: Contamination = field(default_factory=Contamination)
    seed: int = 0
    select_on: str = "validation"
    validation_fraction: float = 0.2
    feature_activation: str = "identity"
    enhancement_activation: str = "tanh"
    workers: int = cfg.MAX_THREADS

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"Unknown model {self.model!r}")
        if self.task not in TASKS:
            raise ValueError(f"Unknown task {self.task!r}")
        if self.select_on not in SELECTIONS:
            raise ValueError(f"Unknown selection set {self.select_on!r}")
        for name in ("nf_grid", "nw_grid", "ne_grid", "gammas"):
            if len(getattr(self, name)) == 0:
                raise ValueError(f"{name} must not be empty")
        if self.model == "cbls" and len(self.sigmas) == 0:
            raise ValueError("sigmas must not be empty for C-BLS")
        if int(self.runs) != self.runs or self.runs < 1:
            raise ValueError(f"runs must be a positive integer, got {self.runs!r}")
        if not 0 < self.validation_fraction < 1:
            raise ValueError(f"validation_fraction must be in (0, 1), got {self.validation_fraction!r}")

    def cells(self) -> list:
        """The grid in canonical order: nf, nw, ne, gamma, sigma."""
        sigmas = list(enumerate(self.sigmas)) if self.model == "cbls" else [(0, None)]
        return [GridCell(nf, nw, ne, gamma, sigma, index)
                for nf, nw, ne, gamma, (index, sigma)
                in itertools.product(self.nf_grid, self.nw_grid, self.ne_grid, self.gammas, sigmas)]

    def to_dict(self) -> dict:
        return {
            "model": self.model, "task": self.task,
            "nf_grid": list(self.nf_grid), "nw_grid": list(self.nw_grid), "ne_grid": list(self.ne_grid),
            "gammas": list(self.gammas), "sigmas": list(self.sigmas),
            "epsilon": self.epsilon, "max_iter": self.max_iter, "runs": self.runs,
            "contamination": self.contamination.to_dict(), "seed": self.seed,
            "select_on": self.select_on, "validation_fraction": self.validation_fraction,
            "feature_activation": self.feature_activation,
            "enhancement_activation": self.enhancement_activation,
        }
