import logging as log
from pathlib import Path
import numpy as np

from modules.SeriesConfig import SeriesConfig
from modules.DataFormatError import DataFormatError


def _rhs(a: float, b: float, x: float, delayed: float) -> float:
    return -b * x + a * delayed / (1 + delayed**10)


def mackey_glass(config: SeriesConfig = SeriesConfig()) -> np.ndarray:
    """
    Integrate the Mackey-Glass delay differential equation with fourth-order Runge-Kutta.

    Delayed values between grid points are interpolated from the stored trajectory: cubic
    Hermite (using the stored derivatives) keeps the scheme fourth order, linear is available
    for comparison. The history before t = 0 is the constant x0.

    Args:
        config (SeriesConfig): The parameters.

    Returns:
        np.ndarray: config.n samples at unit times warmup, warmup + 1, ...
    """
    a, b, tau, dt = config.a, config.b, config.tau, config.dt
    spu = config.steps_per_unit
    steps = (config.warmup + config.n - 1) * spu
    x = np.empty(steps + 1)
    slope = np.empty(steps + 1)
    x[0] = config.x0
    hermite = config.interpolation == "hermite"

    def delayed(s: float) -> float:
        if s <= 0:
            return config.x0
        j = int(s // dt)
        theta = s / dt - j
        if theta < 1e-12:
            return x[j]
        if theta > 1 - 1e-12:
            return x[j + 1]
        if hermite:
            t2, t3 = theta * theta, theta * theta * theta
            return ((2 * t3 - 3 * t2 + 1) * x[j] + (t3 - 2 * t2 + theta) * dt * slope[j]
                    + (-2 * t3 + 3 * t2) * x[j + 1] + (t3 - t2) * dt * slope[j + 1])
        return (1 - theta) * x[j] + theta * x[j + 1]

    for i in range(steps):
        t = i * dt
        k1 = _rhs(a, b, x[i], delayed(t - tau))
        slope[i] = k1
        dh, d1 = delayed(t + dt / 2 - tau), delayed(t + dt - tau)
        k2 = _rhs(a, b, x[i] + dt / 2 * k1, dh)
        k3 = _rhs(a, b, x[i] + dt / 2 * k2, dh)
        k4 = _rhs(a, b, x[i] + dt * k3, d1)
        x[i + 1] = x[i] + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)

    samples = x[config.warmup * spu::spu]
    log.debug(f"Mackey-Glass: {steps} RK4 steps, {samples.size} samples in [{samples.min():.4f}, {samples.max():.4f}]")
    return samples.copy()


def gaussian_noise(n: int, variance: float, seed: int) -> np.ndarray:
    """n zero-mean Gaussian samples with the given variance."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n!r}")
    if variance < 0:
        raise ValueError(f"Variance must be non-negative, got {variance!r}")
    return np.random.default_rng(seed).normal(0.0, np.sqrt(variance), size=n)


def alpha_stable_noise(n: int, alpha: float, gamma_scale: float, seed: int) -> np.ndarray:
    """
    Symmetric alpha-stable samples with characteristic function exp(-gamma |w|^alpha),
    by the Chambers-Mallows-Stuck transform.

    Args:
        n (int): Number of samples.
        alpha (float): Stability index in (0, 2]. alpha = 2 is Gaussian with variance 2 gamma.
        gamma_scale (float): Dispersion gamma > 0.
        seed (int): The seed.
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n!r}")
    if not 0 < alpha <= 2:
        raise ValueError(f"alpha must be in (0, 2], got {alpha!r}")
    if not gamma_scale > 0:
        raise ValueError(f"gamma must be positive, got {gamma_scale!r}")

    rng = np.random.default_rng(seed)
    V = rng.uniform(-np.pi / 2, np.pi / 2, size=n)
    W = rng.exponential(1.0, size=n)
    if alpha == 1:
        X = np.tan(V)
    else:
        X = (np.sin(alpha * V) / np.cos(V) ** (1 / alpha)
             * (np.cos((1 - alpha) * V) / W) ** ((1 - alpha) / alpha))
    return gamma_scale ** (1 / alpha) * X


def load_series(path: Path) -> np.ndarray:
    """
    Read a series written one value per line, or as CSV with the value in the last column.
    A non-numeric first line is taken as a header.

    Raises:
        DataFormatError: Empty file or non-numeric values.
    """
    values = []
    with open(path) as series_file:
        for number, line in enumerate(series_file, start=1):
            line = line.strip()
            if not line:
                continue
            cell = line.split(",")[-1].strip()
            try:
                values.append(float(cell))
            except ValueError:
                if values or number > 1:
                    raise DataFormatError(f"Non-numeric value {cell!r}", line=number)
    if not values:
        raise DataFormatError(f"No values in {path}")
    return np.array(values)


def normalize_series(series) -> np.ndarray:
    """Min-max scale a series to [0, 1]."""
    series = np.ravel(np.asarray(series, dtype=float))
    if series.size == 0 or not np.all(np.isfinite(series)):
        raise ValueError("Cannot normalize an empty or non-finite series")
    low, high = series.min(), series.max()
    if high == low:
        raise ValueError(f"Series is constant at {low!r}")
    return (series - low) / (high - low)


def write_series(series, path: Path, with_index: bool = False):
    """Write one value per line, or `index,value` lines."""
    series = np.ravel(np.asarray(series, dtype=float))
    with open(path, "w") as series_file:
        for i, value in enumerate(series):
            series_file.write(f"{i},{float(value)!r}\n" if with_index else f"{float(value)!r}\n")
    log.debug(f"Wrote {series.size} values to {path}")
