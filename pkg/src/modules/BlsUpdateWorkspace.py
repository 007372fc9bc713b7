from dataclasses import dataclass
import numpy as np

BRANCHES = ("zero", "full", "mixed")


@dataclass(frozen=True)
class BlsUpdateWorkspace:
    """
    Intermediates of one pseudoinverse increment, kept for inspection and logging.

    For a sample increment D = U_a U^+, C = U_a - D U and B is the L x N_a block appended to
    the pseudoinverse. For a column increment D = U^+ V, C = V - U D and B is the p x N block
    appended below it.

    Args:
        D (np.ndarray): Projection of the new block on the old pseudoinverse.
        B (np.ndarray): Block appended to the pseudoinverse.
        C (np.ndarray): Residual of the new block outside the old range.
        branch (str): "zero" when C vanished, "full" when C had full rank, "mixed" otherwise.
        rank (int): Numerical rank of C.
    """
    D: np.ndarray
    B: np.ndarray
    C: np.ndarray
    branch: str
    rank: int

    def __post_init__(self):
        if self.branch not in BRANCHES:
            raise ValueError(f"Unknown update branch {self.branch!r}")
