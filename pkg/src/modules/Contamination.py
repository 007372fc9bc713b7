from dataclasses import dataclass

KINDS = ("none", "outliers", "flip", "gaussian", "alpha_stable")
TARGETS = ("targets", "inputs")


@dataclass(frozen=True)
class Contamination:
    """
    How training data is corrupted before fitting. Test data is never contaminated.

    Args:
        kind (str): none, outliers (additive uniform [lo, hi] on targets), flip (binary labels),
            gaussian or alpha_stable (additive noise).
        p (float): Fraction of training rows touched.
        lo (float): Lower end of the outlier interval.
        hi (float): Upper end of the outlier interval.
        alpha (float): Stability index of alpha-stable noise.
        scale (float): Dispersion gamma of alpha-stable noise.
        variance (float): Variance of Gaussian noise.
        on (str): Where additive noise goes, "targets" or "inputs".
    """
    kind: str = "none"
    p: float = 0.0
    lo: float = 0.0
    hi: float = 1.0
    alpha: float = 1.5
    scale: float = 0.1
    variance: float = 0.01
    on: str = "targets"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"Unknown contamination kind {self.kind!r}")
        if not 0 <= self.p <= 1:
            raise ValueError(f"Contamination level must be in [0, 1], got {self.p!r}")
        if self.lo > self.hi:
            raise ValueError(f"Empty outlier interval [{self.lo}, {self.hi}]")
        if not 0 < self.alpha <= 2:
            raise ValueError(f"alpha must be in (0, 2], got {self.alpha!r}")
        if self.scale <= 0 or self.variance < 0:
            raise ValueError("Noise scale must be positive and variance non-negative")
        if self.on not in TARGETS:
            raise ValueError(f"Noise can go on targets or inputs, got {self.on!r}")

    def to_dict(self) -> dict:
        return {"kind": self.kind, "p": self.p, "lo": self.lo, "hi": self.hi, "alpha": self.alpha,
                "scale": self.scale, "variance": self.variance, "on": self.on}
