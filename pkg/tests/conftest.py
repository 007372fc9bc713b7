import logging
from pathlib import Path
import numpy as np
import pytest

from modules.Architecture import Architecture

DATA = Path(__file__).parent / "data"


@pytest.fixture
def data_dir() -> Path:
    return DATA


@pytest.fixture
def arch() -> Architecture:
    # kq <= M keeps the identity feature block at full column rank
    return Architecture(k=2, q=3, m=1, r=8, input_dim=8, output_dim=2)


@pytest.fixture
def narrow_arch() -> Architecture:
    # kq > M: the twelve identity feature columns span only the affine functions of three inputs
    return Architecture(k=4, q=3, m=1, r=6, input_dim=3, output_dim=1)


@pytest.fixture
def narrow_data():
    """Inputs on [-1, 1]^3 with one smooth target."""
    rng = np.random.default_rng(4321)
    X = rng.uniform(-1, 1, size=(60, 3))
    return X, (np.sin(2 * X[:, 0]) + X[:, 1] * X[:, 2])[:, None]


@pytest.fixture
def regression_data():
    """Inputs on [-1, 1]^8 with two smooth targets."""
    rng = np.random.default_rng(1234)
    X = rng.uniform(-1, 1, size=(60, 8))
    Y = np.column_stack([np.sin(X[:, 0]) + X[:, 1] * X[:, 2], np.cos(X[:, 3]) - 0.5 * X[:, 4]])
    return X, Y


@pytest.fixture
def restore_logging():
    """Commands install their own root handlers; put the previous ones back afterwards."""
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)
