import numpy as np
import pytest

from modules.RegimeError import RegimeError
from modules.ShapeError import ShapeError
from handlers.broadnet import state_matrix, extend_basis_enhancement
from handlers.bls import (ridge_solve, train_bls, predict, decode_labels, bls_add_samples, bls_add_columns,
                          bls_add_enhancement, bls_add_features, batch_refit)

TOLERANCE = 1e-8


def max_gap(model) -> float:
    return float(np.max(np.abs(model.W - batch_refit(model))))


def test_ridge_solve_closed_form():
    rng = np.random.default_rng(0)
    U, Y = rng.normal(size=(30, 6)), rng.normal(size=(30, 2))
    expected = np.linalg.solve(U.T @ U + 0.1 * np.eye(6), U.T @ Y)
    assert np.allclose(ridge_solve(U, Y, 0.1), expected)


def test_ridge_solve_rejects_negative_regularizer():
    with pytest.raises(ValueError):
        ridge_solve(np.eye(2), np.ones((2, 1)), -1.0)


def test_train_pseudoinverse_regime(arch, regression_data):
    X, Y = regression_data
    model = train_bls(X, Y, arch, lam=0.0, seed=3)
    U = state_matrix(X, model.basis).values
    assert np.allclose(model.W, np.linalg.pinv(U) @ Y, atol=1e-10)
    assert np.allclose(predict(model, X), U @ model.W)
    assert model.L == arch.L and model.n_samples == 60


def test_train_ridge_regime(arch, regression_data):
    X, Y = regression_data
    model = train_bls(X, Y, arch, lam=0.5, seed=3)
    U = state_matrix(X, model.basis).values
    assert np.allclose(model.W, np.linalg.solve(U.T @ U + 0.5 * np.eye(arch.L), U.T @ Y))


def test_train_does_not_alias_inputs(arch, regression_data):
    X, Y = regression_data
    model = train_bls(X, Y, arch, lam=0.0, seed=3)
    X[0, 0] += 100.0
    assert model.X[0, 0] != X[0, 0]


def test_train_shape_errors(arch, regression_data):
    X, Y = regression_data
    with pytest.raises(ShapeError):
        train_bls(X[:10], Y, arch, lam=0.0, seed=0)
    with pytest.raises(ShapeError):
        train_bls(X, Y[:, :1], arch, lam=0.0, seed=0)


def test_decode_labels_ties_go_to_lowest_index():
    assert list(decode_labels(np.array([[0.2, 0.7], [0.5, 0.5], [0.9, -1.0]]))) == [1, 0, 0]


def test_add_samples_overdetermined(arch, regression_data):
    X, Y = regression_data
    model = bls_add_samples(train_bls(X[:40], Y[:40], arch, lam=0.0, seed=1), X[40:], Y[40:])
    assert model.last_update.branch == "zero"
    assert model.n_samples == 60
    assert max_gap(model) < TOLERANCE


def test_add_samples_underdetermined(arch, regression_data):
    X, Y = regression_data
    model = bls_add_samples(train_bls(X[:8], Y[:8], arch, lam=0.0, seed=1), X[8:11], Y[8:11])
    assert model.last_update.branch == "full"
    assert max_gap(model) < TOLERANCE


def test_add_samples_keeps_original(arch, regression_data):
    X, Y = regression_data
    model = train_bls(X[:40], Y[:40], arch, lam=0.0, seed=1)
    W = model.W.copy()
    bls_add_samples(model, X[40:], Y[40:])
    assert np.array_equal(model.W, W)
    assert model.n_samples == 40


def test_add_enhancement(arch, regression_data):
    X, Y = regression_data
    model = bls_add_enhancement(train_bls(X, Y, arch, lam=0.0, seed=1), 6, seed=2)
    assert model.L == arch.L + 6
    assert max_gap(model) < TOLERANCE


def test_add_features(arch, regression_data):
    X, Y = regression_data
    model = bls_add_features(train_bls(X, Y, arch, lam=0.0, seed=1), seed=2)
    assert model.L == arch.L + arch.q + arch.m * arch.r
    assert max_gap(model) < TOLERANCE


def test_chained_increments(arch, regression_data):
    X, Y = regression_data
    model = train_bls(X[:45], Y[:45], arch, lam=0.0, seed=1)
    model = bls_add_samples(model, X[45:], Y[45:])
    model = bls_add_enhancement(model, 4, seed=7)
    model = bls_add_features(model, seed=8)
    assert max_gap(model) < TOLERANCE


def test_dependent_column_block(arch, regression_data):
    X, Y = regression_data
    model = train_bls(X, Y, arch, lam=0.0, seed=1)
    block = model.U @ np.random.default_rng(9).normal(size=(arch.L, 3))
    grown = bls_add_columns(model, block, extend_basis_enhancement(model.basis, 3, seed=4))
    assert grown.last_update.branch == "zero"
    expected = np.linalg.pinv(np.hstack([model.U, block]), rcond=1e-10) @ Y
    assert np.max(np.abs(grown.W - expected)) < TOLERANCE


def test_column_block_must_match_basis(arch, regression_data):
    X, Y = regression_data
    model = train_bls(X, Y, arch, lam=0.0, seed=1)
    with pytest.raises(ShapeError):
        bls_add_columns(model, np.ones((60, 2)), extend_basis_enhancement(model.basis, 3, seed=4))
    with pytest.raises(ShapeError):
        bls_add_columns(model, np.ones((59, 3)), extend_basis_enhancement(model.basis, 3, seed=4))


def test_increments_need_pseudoinverse_regime(arch, regression_data):
    X, Y = regression_data
    model = train_bls(X, Y, arch, lam=1e-3, seed=1)
    with pytest.raises(RegimeError, match="tend to zero"):
        bls_add_samples(model, X[:2], Y[:2])
    with pytest.raises(RegimeError):
        bls_add_enhancement(model, 2, seed=0)
    with pytest.raises(RegimeError):
        bls_add_features(model, seed=0)


def test_add_samples_rejects_empty_batch(arch, regression_data):
    X, Y = regression_data
    model = train_bls(X, Y, arch, lam=0.0, seed=1)
    with pytest.raises(ValueError):
        bls_add_samples(model, X[:0], Y[:0])


def penrose_gaps(A, A_pinv) -> list:
    return [np.max(np.abs(A @ A_pinv @ A - A)), np.max(np.abs(A_pinv @ A @ A_pinv - A_pinv)),
            np.max(np.abs((A @ A_pinv).T - A @ A_pinv)), np.max(np.abs((A_pinv @ A).T - A_pinv @ A))]


def test_ridge_solve_is_optimal():
    rng = np.random.default_rng(4)
    U, Y = rng.normal(size=(30, 6)), rng.normal(size=(30, 2))
    W = ridge_solve(U, Y, 0.1)

    def cost(V):
        return np.sum((U @ V - Y)**2) + 0.1 * np.sum(V**2)

    for _ in range(20):
        step = rng.normal(size=W.shape)
        assert cost(W + 1e-3 * step / np.linalg.norm(step)) >= cost(W)


def test_cached_pseudoinverse_after_increments(arch, regression_data):
    X, Y = regression_data
    model = bls_add_samples(train_bls(X[:45], Y[:45], arch, lam=0.0, seed=1), X[45:], Y[45:])
    model = bls_add_enhancement(model, 4, seed=7)
    assert max(penrose_gaps(model.U, model.U_pinv)) < 1e-9


@pytest.mark.parametrize("n_train, n_new, branch", [(40, 10, "zero"), (8, 3, "full")])
def test_samples_on_the_fit_leave_weights_unchanged(arch, regression_data, n_train, n_new, branch):
    X, Y = regression_data
    model = train_bls(X[:n_train], Y[:n_train], arch, lam=0.0, seed=1)
    X_a = X[n_train:n_train + n_new]
    grown = bls_add_samples(model, X_a, predict(model, X_a))
    assert grown.last_update.branch == branch
    assert np.max(np.abs(grown.W - model.W)) < 1e-12


def test_rank_deficient_chained_increments(narrow_arch, narrow_data):
    X, Y = narrow_data
    model = train_bls(X[:45], Y[:45], narrow_arch, lam=0.0, seed=1)
    model = bls_add_samples(model, X[45:], Y[45:])
    assert model.last_update.branch == "zero"
    assert max_gap(model) < TOLERANCE

    model = bls_add_enhancement(model, 4, seed=7)
    assert model.last_update.branch == "full"
    assert max_gap(model) < TOLERANCE

    model = bls_add_features(model, seed=8)
    assert model.last_update.branch == "mixed"
    assert model.last_update.rank == narrow_arch.m * narrow_arch.r
    assert max_gap(model) < TOLERANCE
