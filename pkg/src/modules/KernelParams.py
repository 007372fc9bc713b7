from dataclasses import dataclass
import math


@dataclass(frozen=True)
class KernelParams:
    """
    Gaussian kernel size. Large values recover least-squares behaviour, small values
    suppress large-error samples.

    Args:
        sigma (float): Kernel size, strictly positive and finite.
    """
    sigma: float

    def __post_init__(self):
        try:
            sigma = float(self.sigma)
        except (TypeError, ValueError):
            raise ValueError(f"Kernel size must be a number, got {self.sigma!r}")
        if not (math.isfinite(sigma) and sigma > 0):
            raise ValueError(f"Kernel size must be a positive finite number, got {self.sigma!r}")
        object.__setattr__(self, "sigma", sigma)
