import dataclasses
import logging as log
import numpy as np

from modules.Architecture import Architecture
from modules.BlsModel import BlsModel
from modules.BlsUpdateWorkspace import BlsUpdateWorkspace
from modules.RandomBasis import RandomBasis
from modules.RegimeError import RegimeError
from modules.ShapeError import ShapeError
from handlers.broadnet import (as_matrix, init_basis, state_matrix, tail_columns,
                               extend_basis_enhancement, extend_basis_feature)
from handlers.linalg import spd_solve, pseudoinverse, extend_pinv_columns

#Config
import broadlearn.config as cfg


def _check_pair(X: np.ndarray, Y: np.ndarray):
    if X.shape[0] != Y.shape[0]:
        raise ShapeError(f"Inputs have {X.shape[0]} rows but targets have {Y.shape[0]}")


def ridge_solve(U, Y, lam: float) -> np.ndarray:
    """
    Regularized least squares W = (U^T U + lam I)^-1 U^T Y, solved as an SPD system.

    Args:
        U: The N x L state matrix.
        Y: The N x C targets.
        lam (float): The regularizer, >= 0.

    Raises:
        IllConditionedError: lam = 0 and U^T U is singular.
    """
    if lam < 0:
        raise ValueError(f"Regularizer must be non-negative, got {lam!r}")
    U, Y = as_matrix(U, "U"), as_matrix(Y, "Y")
    _check_pair(U, Y)
    return spd_solve(U.T @ U, U.T @ Y, ridge=lam)


def train_bls(X, Y, arch: Architecture, lam: float, seed: int, task: str = "regression",
              weight_range=None, bias_range=None) -> BlsModel:
    """
    Train a broad network in one batch.

    Uses the pseudoinverse when lam <= PINV_THRESHOLD and the ridge solution otherwise.
    U and its pseudoinverse are cached in both cases.

    Args:
        X: N x M training inputs.
        Y: N x C training targets.
        arch (Architecture): The network shape.
        lam (float): The regularizer.
        seed (int): Seed of the random basis.
        task (str): "regression" or "classification".
    """
    X, Y = as_matrix(X, "X").copy(), as_matrix(Y, "Y").copy()
    _check_pair(X, Y)
    if Y.shape[1] != arch.output_dim:
        raise ShapeError(f"Targets have {Y.shape[1]} columns, architecture expects {arch.output_dim}")

    basis = init_basis(arch, seed, weight_range, bias_range)
    U = np.array(state_matrix(X, basis).values)
    U_pinv = pseudoinverse(U)
    if lam <= cfg.PINV_THRESHOLD:
        W = U_pinv @ Y
        solver = "pseudoinverse"
    else:
        W = ridge_solve(U, Y, lam)
        solver = "ridge"

    log.info(f"BLS trained on {X.shape[0]} samples with {U.shape[1]} nodes ({solver}, lambda={lam:g})")
    return BlsModel(basis=basis, W=W, U=U, U_pinv=U_pinv, lam=float(lam), task=task, X=X, Y=Y)


def predict(model, X) -> np.ndarray:
    """Network output U(X) W. Works for any trained model holding a basis and output weights."""
    return state_matrix(X, model.basis).values @ model.W


def decode_labels(Yhat) -> np.ndarray:
    """Class index per row: argmax, ties going to the lowest index."""
    return np.argmax(as_matrix(Yhat, "Yhat"), axis=1)


def _check_regime(model: BlsModel):
    if model.lam > cfg.PINV_THRESHOLD:
        raise RegimeError(model.lam, cfg.PINV_THRESHOLD)


def bls_add_samples(model: BlsModel, X_a, Y_a) -> BlsModel:
    """
    Add training samples without retraining.

    Works on the transposed problem: the new rows of U are new columns of U^T. With
    D = U_a U^+ and C = U_a - D U, the pseudoinverse becomes [U^+ - B D, B] and
    W <- W + B (Y_a - U_a W).

    Args:
        model (BlsModel): A model trained in the pseudoinverse regime.
        X_a: N_a x M new inputs.
        Y_a: N_a x C new targets.

    Raises:
        RegimeError: The model was trained with lam above PINV_THRESHOLD.
    """
    _check_regime(model)
    X_a, Y_a = as_matrix(X_a, "X_a"), as_matrix(Y_a, "Y_a")
    _check_pair(X_a, Y_a)
    if X_a.shape[0] == 0:
        raise ValueError("At least one new sample is required")
    if Y_a.shape[1] != model.Y.shape[1]:
        raise ShapeError(f"New targets have {Y_a.shape[1]} columns, expected {model.Y.shape[1]}")

    U_a = state_matrix(X_a, model.basis).values
    pinv_t, D_t, K, C_t, branch, rank = extend_pinv_columns(model.U.T, model.U_pinv.T, U_a.T)
    B = K.T
    W = model.W + B @ (Y_a - U_a @ model.W)

    log.debug(f"Added {X_a.shape[0]} samples ({branch} branch)")
    return dataclasses.replace(
        model,
        W=W,
        U=np.vstack([model.U, U_a]),
        U_pinv=pinv_t.T,
        X=np.vstack([model.X, X_a]),
        Y=np.vstack([model.Y, Y_a]),
        last_update=BlsUpdateWorkspace(D=D_t.T, B=B, C=C_t.T, branch=branch, rank=rank),
    )


def bls_add_columns(model: BlsModel, block, basis: RandomBasis) -> BlsModel:
    """
    Append a raw column block to the state matrix and update W and U^+.

    With D = U^+ V and C = V - U D, the pseudoinverse becomes [U^+ - D B ; B] and
    W <- [W - D B Y ; B Y].

    Args:
        model (BlsModel): A model trained in the pseudoinverse regime.
        block: N x p new columns, evaluated on the cached training inputs.
        basis (RandomBasis): The extended basis the block belongs to.
    """
    _check_regime(model)
    block = as_matrix(block, "block")
    if block.shape[0] != model.n_samples:
        raise ShapeError(f"New block has {block.shape[0]} rows, model holds {model.n_samples} samples")
    if basis.width != model.L + block.shape[1]:
        raise ShapeError(f"Basis has {basis.width} nodes, expected {model.L + block.shape[1]}")

    U_pinv, D, B, C, branch, rank = extend_pinv_columns(model.U, model.U_pinv, block)
    BY = B @ model.Y
    W = np.vstack([model.W - D @ BY, BY])

    log.debug(f"Added {block.shape[1]} nodes ({branch} branch)")
    return dataclasses.replace(
        model,
        basis=basis,
        W=W,
        U=np.hstack([model.U, block]),
        U_pinv=U_pinv,
        last_update=BlsUpdateWorkspace(D=D, B=B, C=C, branch=branch, rank=rank),
    )


def bls_add_enhancement(model: BlsModel, p: int, seed: int) -> BlsModel:
    """Insert p enhancement nodes fed by every current feature group."""
    _check_regime(model)
    basis = extend_basis_enhancement(model.basis, p, seed)
    return bls_add_columns(model, tail_columns(model.X, basis, 1), basis)


def bls_add_features(model: BlsModel, seed: int) -> BlsModel:
    """Insert feature group k+1 together with its extension enhancement block."""
    _check_regime(model)
    basis = extend_basis_feature(model.basis, seed)
    return bls_add_columns(model, tail_columns(model.X, basis, 2), basis)


def batch_refit(model: BlsModel) -> np.ndarray:
    """
    Output weights of a cold retrain on the model's data and current basis (the random
    tensors are reused, not redrawn).
    """
    U = state_matrix(model.X, model.basis).values
    if model.lam <= cfg.PINV_THRESHOLD:
        return pseudoinverse(U) @ model.Y
    return ridge_solve(U, model.Y, model.lam)
