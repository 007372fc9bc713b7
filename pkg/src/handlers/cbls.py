import dataclasses
import logging as log
import numpy as np

from modules.Architecture import Architecture
from modules.CblsModel import CblsModel
from modules.CblsUpdateWorkspace import CblsUpdateWorkspace
from modules.RandomBasis import RandomBasis
from modules.TrainConfig import TrainConfig
from modules.ShapeError import ShapeError
from modules.IllConditionedError import IllConditionedError
from handlers.broadnet import (as_matrix, init_basis, state_matrix, tail_columns,
                               extend_basis_enhancement, extend_basis_feature)
from handlers.linalg import spd_solve, symmetrize
from handlers.bls import ridge_solve
from handlers.correntropy import error_weights, normalized_objective

#Config
import broadlearn.config as cfg


def _weighted_solve(U: np.ndarray, Y: np.ndarray, weights: np.ndarray, gamma: float) -> np.ndarray:
    LU = weights[:, None] * U
    return spd_solve(U.T @ LU, LU.T @ Y, ridge=gamma)


def fixed_point_step(U, Y, W, gamma: float, sigma: float) -> np.ndarray:
    """
    One fixed-point update W' = (U^T Lambda U + gamma I)^-1 U^T Lambda Y,
    with Lambda the correntropy weights of the residuals of W.

    Raises:
        IllConditionedError: gamma = 0 and the weighted Gram matrix is singular.
    """
    if gamma < 0:
        raise ValueError(f"gamma must be non-negative, got {gamma!r}")
    U, Y, W = as_matrix(U, "U"), as_matrix(Y, "Y"), as_matrix(W, "W")
    weights = error_weights(U, W, Y, sigma).entries
    return _weighted_solve(U, Y, weights, gamma)


def _iterate(U: np.ndarray, Y: np.ndarray, W: np.ndarray, config: TrainConfig):
    """Run fixed-point steps from W. Returns the last iterate and the weights that produced it."""
    history = [normalized_objective(U, W, Y, config.sigma, config.lam)]
    converged = False
    for n_iter in range(1, config.max_iter + 1):
        weights = error_weights(U, W, Y, config.sigma).entries
        W_next = _weighted_solve(U, Y, weights, config.gamma)
        delta = float(np.sum((W_next - W) ** 2))
        W = W_next
        history.append(normalized_objective(U, W, Y, config.sigma, config.lam))
        log.debug(f"Iteration {n_iter}: ||dW||^2={delta:.3e} L(t)={history[-1]:.10f}")
        if delta < config.epsilon:
            converged = True
            break
    return W, weights, tuple(history), converged, n_iter


def _inverse(U_w: np.ndarray, gamma: float) -> np.ndarray:
    return symmetrize(spd_solve(U_w.T @ U_w, np.eye(U_w.shape[1]), ridge=gamma))


def _caches(U: np.ndarray, Y: np.ndarray, weights: np.ndarray, gamma: float):
    root = np.sqrt(weights)[:, None]
    U_w, Y_w = root * U, root * Y
    return _inverse(U_w, gamma), U_w, Y_w


def cache_drift(U_w: np.ndarray, C_w: np.ndarray, gamma: float) -> float:
    """
    Estimate of the largest entry of C_w R_w - I, with R_w = U_w^T U_w + gamma I.

    Applies both sides to a few fixed random directions, so the cost stays O(N L)
    instead of forming R_w.
    """
    V = np.random.default_rng(0).standard_normal((U_w.shape[1], cfg.CACHE_CHECK_DIRECTIONS))
    R_V = U_w.T @ (U_w @ V) + gamma * V
    return float(np.max(np.abs(C_w @ R_V - V)) / np.max(np.abs(V)))


def _checked(W: np.ndarray, C_w: np.ndarray, U_w: np.ndarray, Y_w: np.ndarray, gamma: float):
    """Rebuild C_w and W from the weighted caches when the updated inverse has drifted."""
    drift = cache_drift(U_w, C_w, gamma)
    if drift <= cfg.CACHE_TOLERANCE:
        return W, C_w
    C_w = _inverse(U_w, gamma)
    W = spd_solve(U_w.T @ U_w, U_w.T @ Y_w, ridge=gamma)
    log.warning(f"Cached inverse drifted by {drift:.2e} during the update and was rebuilt "
                f"(now {cache_drift(U_w, C_w, gamma):.2e}). A larger gamma keeps the updates exact")
    return W, C_w


def train_cbls(X, Y, arch: Architecture, config: TrainConfig, task: str = "regression",
               weight_range=None, bias_range=None) -> CblsModel:
    """
    Train a broad network under the maximum correntropy criterion.

    Starts from the ridge solution with the same gamma and alternates weight computation
    and weighted ridge solves until ||W(t+1) - W(t)||_F^2 < epsilon or max_iter steps.
    A model that hits max_iter is returned with converged=False.

    Args:
        X: N x M training inputs.
        Y: N x C training targets.
        arch (Architecture): The network shape.
        config (TrainConfig): gamma, sigma, epsilon, max_iter and the basis seed.
        task (str): "regression" or "classification".

    Returns:
        CblsModel: The model with C_w, U_w, Y_w cached at the weights of the final solve.
    """
    X, Y = as_matrix(X, "X").copy(), as_matrix(Y, "Y").copy()
    if X.shape[0] != Y.shape[0]:
        raise ShapeError(f"Inputs have {X.shape[0]} rows but targets have {Y.shape[0]}")
    if Y.shape[1] != arch.output_dim:
        raise ShapeError(f"Targets have {Y.shape[1]} columns, architecture expects {arch.output_dim}")

    basis = init_basis(arch, config.seed, weight_range, bias_range)
    U = state_matrix(X, basis).values
    W0 = ridge_solve(U, Y, config.gamma)
    W, weights, history, converged, n_iter = _iterate(U, Y, W0, config)
    C_w, U_w, Y_w = _caches(U, Y, weights, config.gamma)

    if converged:
        log.info(f"C-BLS converged in {n_iter} iterations (N={X.shape[0]}, L={U.shape[1]}, sigma={config.sigma:g})")
    else:
        log.warning(f"C-BLS did not converge within {config.max_iter} iterations, returning the last iterate")
    return CblsModel(basis=basis, W=W, C_w=C_w, U_w=U_w, Y_w=Y_w, weights=weights, config=config,
                     task=task, X=X, Y=Y, converged=converged, n_iter=n_iter, history=history)


def cbls_add_samples(model: CblsModel, X_a, Y_a) -> CblsModel:
    """
    Add samples with the matrix inversion lemma.

    The new samples are weighted with the residuals of the current W; previously cached
    weights stay frozen.

    Args:
        model (CblsModel): The model to update.
        X_a: N_a x M new inputs.
        Y_a: N_a x C new targets.
    """
    X_a, Y_a = as_matrix(X_a, "X_a"), as_matrix(Y_a, "Y_a")
    if X_a.shape[0] != Y_a.shape[0]:
        raise ShapeError(f"New inputs have {X_a.shape[0]} rows but targets have {Y_a.shape[0]}")
    if X_a.shape[0] == 0:
        raise ValueError("At least one new sample is required")
    if Y_a.shape[1] != model.Y.shape[1]:
        raise ShapeError(f"New targets have {Y_a.shape[1]} columns, expected {model.Y.shape[1]}")
    if not model.converged:
        log.warning("Adding samples to a model that did not converge")

    U_a = state_matrix(X_a, model.basis).values
    weights_a = error_weights(U_a, model.W, Y_a, model.config.sigma).entries
    root = np.sqrt(weights_a)[:, None]
    U_wa, Y_wa = root * U_a, root * Y_a

    K = model.C_w @ U_wa.T
    S = spd_solve(U_wa @ K, np.eye(U_wa.shape[0]), ridge=1.0)
    W = model.W + K @ (S @ (Y_wa - U_wa @ model.W))
    C_w = symmetrize(model.C_w - K @ S @ K.T)
    U_w, Y_w = np.vstack([model.U_w, U_wa]), np.vstack([model.Y_w, Y_wa])
    W, C_w = _checked(W, C_w, U_w, Y_w, model.config.gamma)

    log.debug(f"Added {X_a.shape[0]} samples, mean new weight {weights_a.mean():.4f}")
    return dataclasses.replace(
        model,
        W=W,
        C_w=C_w,
        U_w=U_w,
        Y_w=Y_w,
        weights=np.concatenate([model.weights, weights_a]),
        X=np.vstack([model.X, X_a]),
        Y=np.vstack([model.Y, Y_a]),
        last_update=CblsUpdateWorkspace(Lambda_alpha=weights_a, U_w_alpha=U_wa, Y_w_alpha=Y_wa, S_w_alpha=S),
    )


def cbls_add_columns(model: CblsModel, block, basis: RandomBasis) -> CblsModel:
    """
    Append a raw column block with the block matrix inversion lemma.

    The block is weighted with the frozen sample weights, xi_w = sqrt(Lambda) block.
    Z_w solves R_w Z_w = U_w^T xi_w with R_w = U_w^T U_w + gamma I (the cached inverse
    plus one refinement step). The Schur complement is formed from the residual
    r = xi_w - U_w Z_w as r^T r + gamma Z_w^T Z_w, which equals xi_w^T r but stays
    positive semidefinite when R_w is badly conditioned. Then Q_w = (gamma I + schur)^-1
    and W <- [W - Z_w Q_w xi_w^T E ; Q_w xi_w^T E] with E = Y_w - U_w W.

    Args:
        model (CblsModel): The model to update.
        block: N x p new columns, evaluated on the cached training inputs.
        basis (RandomBasis): The extended basis the block belongs to.

    Raises:
        IllConditionedError: Q_w is singular (gamma = 0 with a dependent block).
    """
    block = as_matrix(block, "block")
    if block.shape[0] != model.n_samples:
        raise ShapeError(f"New block has {block.shape[0]} rows, model holds {model.n_samples} samples")
    if basis.width != model.L + block.shape[1]:
        raise ShapeError(f"Basis has {basis.width} nodes, expected {model.L + block.shape[1]}")

    gamma, U_w, C_w = model.config.gamma, model.U_w, model.C_w
    xi_w = np.sqrt(model.weights)[:, None] * block
    G = U_w.T @ xi_w
    Z_w = C_w @ G
    Z_w = Z_w + C_w @ (G - U_w.T @ (U_w @ Z_w) - gamma * Z_w)
    residual = xi_w - U_w @ Z_w
    schur = symmetrize(residual.T @ residual + gamma * (Z_w.T @ Z_w))
    if gamma == 0 and np.linalg.eigvalsh(schur).min() < cfg.ZETA_REL * max(1.0, float(np.sum(xi_w**2))):
        raise IllConditionedError("The new block depends on the existing nodes and gamma = 0, Q_w is singular")
    Q_w = symmetrize(spd_solve(schur, np.eye(block.shape[1]), ridge=gamma))

    E = model.Y_w - U_w @ model.W
    bottom = Q_w @ (xi_w.T @ E)
    W = np.vstack([model.W - Z_w @ bottom, bottom])
    ZQ = Z_w @ Q_w
    C_w = symmetrize(np.block([[C_w + ZQ @ Z_w.T, -ZQ], [-ZQ.T, Q_w]]))
    U_w = np.hstack([U_w, xi_w])
    W, C_w = _checked(W, C_w, U_w, model.Y_w, gamma)

    log.debug(f"Added {block.shape[1]} nodes to the weighted model")
    return dataclasses.replace(
        model,
        basis=basis,
        W=W,
        C_w=C_w,
        U_w=U_w,
        last_update=CblsUpdateWorkspace(Z_w=Z_w, Q_w=Q_w, xi_w=xi_w),
    )


def cbls_add_enhancement(model: CblsModel, p: int, seed: int) -> CblsModel:
    """Insert p enhancement nodes fed by every current feature group."""
    basis = extend_basis_enhancement(model.basis, p, seed)
    return cbls_add_columns(model, tail_columns(model.X, basis, 1), basis)


def cbls_add_features(model: CblsModel, seed: int) -> CblsModel:
    """Insert feature group k+1 together with its extension enhancement block."""
    basis = extend_basis_feature(model.basis, seed)
    return cbls_add_columns(model, tail_columns(model.X, basis, 2), basis)


def refresh_weights(model: CblsModel) -> CblsModel:
    """
    Recompute every sample weight from the current W and iterate to convergence again.
    Removes the drift the frozen weights accumulate over increments.
    """
    U = state_matrix(model.X, model.basis).values
    W, weights, history, converged, n_iter = _iterate(U, model.Y, model.W, model.config)
    C_w, U_w, Y_w = _caches(U, model.Y, weights, model.config.gamma)
    drift = float(np.max(np.abs(weights - model.weights))) if weights.size else 0.0
    log.info(f"Refreshed weights in {n_iter} iterations, largest weight change {drift:.3e}")
    if not converged:
        log.warning(f"Weight refresh did not converge within {model.config.max_iter} iterations")
    return dataclasses.replace(model, W=W, C_w=C_w, U_w=U_w, Y_w=Y_w, weights=weights,
                               converged=converged, n_iter=n_iter, history=history, last_update=None)


def frozen_weight_refit(model: CblsModel) -> np.ndarray:
    """
    Output weights of a direct weighted solve on the model's data and current basis,
    with the cached (frozen) sample weights.
    """
    U = state_matrix(model.X, model.basis).values
    return _weighted_solve(U, model.Y, model.weights, model.config.gamma)
