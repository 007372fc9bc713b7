from dataclasses import dataclass

INTERPOLATIONS = ("hermite", "linear")


@dataclass(frozen=True)
class SeriesConfig:
    """
    Parameters of the Mackey-Glass generator dx/dt = -b x(t) + a x(t - tau) / (1 + x(t - tau)^10).

    The series is integrated from a constant history x0, the first `warmup` time units are
    discarded and `n` samples are emitted at unit intervals.

    The defaults are the classic chaotic setting, production a = 0.2 and decay b = 0.1.
    With the two rates the other way round (a = 0.1, b = 0.2) decay dominates production,
    the series falls toward zero (about 1e-20 after the warmup) and there is nothing left
    to predict. Hermite interpolation is the default because linear lookups of the delayed
    value drop the integrator to second order; "linear" stays available.

    Args:
        a (float): Production rate.
        b (float): Decay rate.
        tau (float): Delay, at least one integration step.
        dt (float): Integration step; 1 / dt must be an integer.
        warmup (int): Discarded time units.
        n (int): Emitted samples.
        x0 (float): Constant initial history.
        interpolation (str): Delay lookup between grid points, "hermite" or "linear".
    """
    a: float = 0.2
    b: float = 0.1
    tau: float = 30.0
    dt: float = 0.1
    warmup: int = 1000
    n: int = 1200
    x0: float = 1.2
    interpolation: str = "hermite"

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt!r}")
        if abs(round(1 / self.dt) * self.dt - 1) > 1e-9:
            raise ValueError(f"1 / dt must be an integer, got dt={self.dt!r}")
        if not self.tau > 0:
            raise ValueError(f"tau must be positive, got {self.tau!r}")
        if self.tau < self.dt:
            raise ValueError(f"tau ({self.tau}) must be at least one step dt ({self.dt})")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        if int(self.warmup) != self.warmup or self.warmup < 0:
            raise ValueError(f"warmup must be a non-negative integer, got {self.warmup!r}")
        if self.interpolation not in INTERPOLATIONS:
            raise ValueError(f"Unknown interpolation {self.interpolation!r}")

    @property
    def steps_per_unit(self) -> int:
        return int(round(1 / self.dt))
