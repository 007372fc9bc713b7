import math
import numpy as np
import pytest

from modules.KernelParams import KernelParams
from modules.ShapeError import ShapeError
from handlers.correntropy import (gaussian_kernel, correntropy_estimate, error_weights, objective,
                                  objective_gradient, normalized_objective)


def test_kernel_peak():
    assert gaussian_kernel([1.0, 2.0], [1.0, 2.0], 2.0) == pytest.approx(1 / (math.sqrt(2 * math.pi) * 2.0))


def test_kernel_value():
    expected = math.exp(-25 / 2) / math.sqrt(2 * math.pi)
    assert gaussian_kernel([0.0, 0.0], [3.0, 4.0], 1.0) == pytest.approx(expected)


@pytest.mark.parametrize("sigma", [0.0, -1.0, float("nan"), float("inf"), "wide"])
def test_invalid_kernel_size(sigma):
    with pytest.raises(ValueError):
        KernelParams(sigma)


def test_estimate_matches_loop():
    rng = np.random.default_rng(0)
    xs, ys = rng.normal(size=(15, 3)), rng.normal(size=(15, 3))
    expected = sum(gaussian_kernel(x, y, 0.7) for x, y in zip(xs, ys)) / 15
    assert correntropy_estimate(xs, ys, 0.7) == pytest.approx(expected, rel=1e-12)


def test_estimate_of_scalar_samples():
    assert correntropy_estimate(np.zeros(4), np.zeros(4), 1.0) == pytest.approx(1 / math.sqrt(2 * math.pi))


def test_estimate_errors():
    with pytest.raises(ValueError):
        correntropy_estimate(np.zeros((0, 2)), np.zeros((0, 2)), 1.0)
    with pytest.raises(ShapeError):
        correntropy_estimate(np.zeros((3, 2)), np.zeros((4, 2)), 1.0)


def test_error_weights():
    U = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    W = np.array([[1.0], [2.0]])
    Y = np.array([[1.0], [0.0], [1.0]])
    weights = error_weights(U, W, Y, 1.0).entries
    assert weights == pytest.approx([1.0, math.exp(-2.0), math.exp(-2.0)])


def test_error_weights_underflow_to_zero():
    weights = error_weights(np.ones((2, 1)), np.zeros((1, 1)), np.array([[0.0], [1e3]]), 1e-2).entries
    assert weights[0] == 1.0
    assert weights[1] == 0.0


def test_error_weights_shape_mismatch():
    with pytest.raises(ShapeError):
        error_weights(np.ones((3, 2)), np.ones((3, 1)), np.ones((3, 1)), 1.0)


def test_objective_at_exact_fit():
    rng = np.random.default_rng(1)
    U, W = rng.normal(size=(10, 4)), rng.normal(size=(4, 2))
    lam = 0.3
    assert objective(U, W, U @ W, 1.0, lam) == pytest.approx(10 - lam / 2 * np.sum(W**2))
    assert normalized_objective(U, W, U @ W, 1.0, lam) == pytest.approx(objective(U, W, U @ W, 1.0, lam) / 10)


def test_gradient_matches_central_differences():
    rng = np.random.default_rng(42)
    h = 1e-5
    for _ in range(20):
        N, L, C = rng.integers(4, 33), rng.integers(1, 9), rng.integers(1, 4)
        sigma = rng.choice([0.5, 1.0, 2.0])
        lam = rng.uniform(0, 0.1)
        U = rng.uniform(-1, 1, size=(N, L))
        W = rng.normal(scale=0.3, size=(L, C))
        Y = rng.normal(scale=0.5, size=(N, C))

        grad = objective_gradient(U, W, Y, sigma, lam)
        numeric = np.zeros_like(W)
        for i in range(L):
            for j in range(C):
                step = np.zeros_like(W)
                step[i, j] = h
                numeric[i, j] = (objective(U, W + step, Y, sigma, lam) - objective(U, W - step, Y, sigma, lam)) / (2 * h)
        assert np.max(np.abs(grad - numeric)) / max(np.max(np.abs(grad)), 1e-12) < 1e-5


def test_gradient_vanishes_at_exact_fit_without_regularizer():
    rng = np.random.default_rng(2)
    U, W = rng.normal(size=(12, 3)), rng.normal(size=(3, 1))
    assert np.allclose(objective_gradient(U, W, U @ W, 0.5, 0.0), 0.0)


def test_weights_fall_with_error_and_rise_with_kernel_size():
    U, W = np.ones((50, 1)), np.zeros((1, 1))
    Y = np.linspace(0.0, 5.0, 50)[:, None]
    assert np.all(np.diff(error_weights(U, W, Y, 1.0).entries) <= 0)
    by_sigma = [error_weights(U, W, Y, sigma).entries for sigma in (0.25, 0.5, 1.0, 2.0)]
    assert np.all(np.diff(np.array(by_sigma), axis=0) >= 0)


def test_errors_beyond_five_kernel_widths_are_negligible():
    rng = np.random.default_rng(2)
    sigma = 0.3
    U, W = rng.normal(size=(40, 3)), rng.normal(size=(3, 2))
    Y = U @ W + rng.normal(scale=1.5 * sigma, size=(40, 2))
    Y[::5] += 2.0
    errors = np.linalg.norm(U @ W - Y, axis=1)
    weights = error_weights(U, W, Y, sigma).entries
    far = errors > 5 * sigma
    assert far.sum() >= 8
    assert weights[far].max() < math.exp(-12.5)
