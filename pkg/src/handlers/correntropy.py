import logging as log
import math
import numpy as np

from modules.KernelParams import KernelParams
from modules.WeightDiagonal import WeightDiagonal
from modules.ShapeError import ShapeError
from handlers.broadnet import as_matrix

#Config
import broadlearn.config as cfg

SQRT_2PI = math.sqrt(2 * math.pi)


def gaussian_kernel(x, y, sigma: float) -> float:
    """
    Normalized Gaussian kernel (1 / (sqrt(2 pi) sigma)) exp(-||x - y||^2 / (2 sigma^2)).

    Args:
        x: A vector (or scalar).
        y: A vector of the same length.
        sigma (float): Kernel size.
    """
    sigma = KernelParams(sigma).sigma
    x, y = np.ravel(np.asarray(x, dtype=float)), np.ravel(np.asarray(y, dtype=float))
    if x.shape != y.shape:
        raise ShapeError(f"Kernel arguments have lengths {x.size} and {y.size}")
    return float(np.exp(-np.sum((x - y) ** 2) / (2 * sigma**2)) / (SQRT_2PI * sigma))


def correntropy_estimate(xs, ys, sigma: float) -> float:
    """
    Sample correntropy: the mean of gaussian_kernel over paired samples.
    1-D inputs are read as N scalar samples.

    Raises:
        ValueError: No samples.
    """
    sigma = KernelParams(sigma).sigma
    xs, ys = as_matrix(xs, "xs"), as_matrix(ys, "ys")
    if xs.shape != ys.shape:
        raise ShapeError(f"Sample sets have shapes {xs.shape} and {ys.shape}")
    if xs.shape[0] == 0:
        raise ValueError("Correntropy of an empty sample set is undefined")
    distances = np.sum((xs - ys) ** 2, axis=1)
    return float(np.mean(np.exp(-distances / (2 * sigma**2))) / (SQRT_2PI * sigma))


def _residuals(U, W, Y):
    U, W, Y = as_matrix(U, "U"), as_matrix(W, "W"), as_matrix(Y, "Y")
    if U.shape[1] != W.shape[0] or U.shape[0] != Y.shape[0] or W.shape[1] != Y.shape[1]:
        raise ShapeError(f"Incompatible shapes U{U.shape}, W{W.shape}, Y{Y.shape}")
    return U, W, Y, U @ W - Y


def _weights_from_errors(E: np.ndarray, sigma: float) -> np.ndarray:
    exponent = -np.sum(E**2, axis=1) / (2 * sigma**2)
    return np.where(exponent < cfg.EXP_FLOOR, 0.0, np.exp(np.maximum(exponent, cfg.EXP_FLOOR)))


def error_weights(U, W, Y, sigma: float) -> WeightDiagonal:
    """
    Per-sample weights exp(-||u_i W - y_i||^2 / (2 sigma^2)), without the kernel's
    normalizing factor. Exponents below EXP_FLOOR give a weight of exactly 0.
    """
    sigma = KernelParams(sigma).sigma
    _, _, _, E = _residuals(U, W, Y)
    weights = _weights_from_errors(E, sigma)
    if np.any(weights == 0):
        log.debug(f"{int(np.sum(weights == 0))} samples have an underflowed weight")
    return WeightDiagonal(weights)


def objective(U, W, Y, sigma: float, lam: float) -> float:
    """J(W) = sum_i exp(-||u_i W - y_i||^2 / (2 sigma^2)) - (lam / 2) ||W||_F^2."""
    sigma = KernelParams(sigma).sigma
    _, W, _, E = _residuals(U, W, Y)
    return float(np.sum(_weights_from_errors(E, sigma)) - lam / 2 * np.sum(W**2))


def objective_gradient(U, W, Y, sigma: float, lam: float) -> np.ndarray:
    """Gradient of J: -(1 / sigma^2) U^T Lambda (U W - Y) - lam W."""
    sigma = KernelParams(sigma).sigma
    U, W, _, E = _residuals(U, W, Y)
    weights = _weights_from_errors(E, sigma)
    return -(U.T @ (weights[:, None] * E)) / sigma**2 - lam * W


def normalized_objective(U, W, Y, sigma: float, lam: float) -> float:
    """J(W) / N, the quantity tracked along the fixed-point iterations."""
    n = as_matrix(U, "U").shape[0]
    if n == 0:
        raise ValueError("Normalized objective of an empty sample set is undefined")
    return objective(U, W, Y, sigma, lam) / n
