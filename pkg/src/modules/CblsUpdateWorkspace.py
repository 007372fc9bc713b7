from dataclasses import dataclass
from typing import Optional
import numpy as np


@dataclass(frozen=True, eq=False)
class CblsUpdateWorkspace:
    """
    Intermediates of one weighted increment. Sample increments fill the first four fields,
    column increments the last three.
    """
    Lambda_alpha: Optional[np.ndarray] = None
    U_w_alpha: Optional[np.ndarray] = None
    Y_w_alpha: Optional[np.ndarray] = None
    S_w_alpha: Optional[np.ndarray] = None
    Z_w: Optional[np.ndarray] = None
    Q_w: Optional[np.ndarray] = None
    xi_w: Optional[np.ndarray] = None
