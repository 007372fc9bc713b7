import logging as log
import warnings
import numpy as np
import scipy.linalg as sla

from modules.IllConditionedError import IllConditionedError
from modules.ShapeError import ShapeError

#Config
import broadlearn.config as cfg

EPS = np.finfo(float).eps


def symmetrize(A: np.ndarray) -> np.ndarray:
    return (A + A.T) / 2


def spd_solve(A: np.ndarray, B: np.ndarray, ridge: float = 0.0) -> np.ndarray:
    """
    Solve (A + ridge I) X = B for a symmetric positive (semi)definite A, without forming an inverse.

    A Cholesky factorization is tried first. If it fails, a symmetric pivoted solve is used.
    With ridge = 0 a numerically singular A is an error; with ridge > 0 the system is
    positive definite by construction and only non-finite results are rejected.

    Args:
        A (np.ndarray): The n x n symmetric matrix.
        B (np.ndarray): The n x c right-hand side.
        ridge (float): Added to the diagonal.

    Raises:
        IllConditionedError: The system is singular or the result is not finite.
    """
    A = symmetrize(np.asarray(A, dtype=float))
    B = np.asarray(B, dtype=float)
    if A.shape[0] != A.shape[1] or A.shape[0] != B.shape[0]:
        raise ShapeError(f"Cannot solve a {A.shape} system with a {B.shape} right-hand side")
    n = A.shape[0]
    if n == 0:
        return np.zeros_like(B)
    if ridge:
        A = A + ridge * np.eye(n)

    X = None
    try:
        factor, lower = sla.cho_factor(A, lower=False)
        pivots = np.abs(np.diag(factor))
        if ridge or (pivots.min() / pivots.max()) ** 2 > n * EPS:
            X = sla.cho_solve((factor, lower), B)
        else:
            log.debug(f"Cholesky pivots span {pivots.min():.3e}..{pivots.max():.3e}, system is singular")
    except (np.linalg.LinAlgError, ValueError) as e:
        log.debug(f"Cholesky factorization failed ({e}), trying a pivoted symmetric solve")

    if X is None:
        with warnings.catch_warnings():
            if not ridge:
                warnings.simplefilter("error", sla.LinAlgWarning)
            else:
                warnings.simplefilter("ignore", sla.LinAlgWarning)
            try:
                X = sla.solve(A, B, assume_a="sym")
            except (np.linalg.LinAlgError, sla.LinAlgWarning, ValueError) as e:
                raise IllConditionedError() from e

    if not np.all(np.isfinite(X)):
        raise IllConditionedError()
    return X


def pseudoinverse(U: np.ndarray) -> np.ndarray:
    """
    Moore-Penrose pseudoinverse by SVD. Singular values below max(N, L) * eps * s_max are zeroed.

    Args:
        U (np.ndarray): The N x L matrix.

    Returns:
        np.ndarray: The L x N pseudoinverse.
    """
    U = np.asarray(U, dtype=float)
    if U.ndim != 2:
        raise ShapeError(f"Expected a matrix, got shape {U.shape}")
    if U.size == 0:
        return np.zeros((U.shape[1], U.shape[0]))
    return sla.pinv(U, atol=0.0, rtol=max(U.shape) * EPS)


def _truncated_pinv(C: np.ndarray, zeta: float):
    left, s, right = sla.svd(C, full_matrices=False)
    if s.size == 0:
        return np.zeros(C.T.shape), 0
    keep = s > max(zeta, max(C.shape) * EPS * s[0])
    rank = int(np.count_nonzero(keep))
    return (right[keep].T / s[keep]) @ left[:, keep].T, rank


def extend_pinv_columns(A: np.ndarray, A_pinv: np.ndarray, V: np.ndarray):
    """
    Pseudoinverse of [A, V] from the known pseudoinverse of A (partitioned column update).

    With D = A^+ V and C = V - A D, the result is [A^+ - D K ; K] where
        K = C^+                                      if C has full column rank,
        K = (I + D^T D)^-1 D^T A^+                   if C = 0,
        K = C^+ + P M D^T A^+ (I - V C^+)            otherwise,
    with P = I - C^+ C and M = (I + P D^T D P)^-1. C counts as zero when
    ||C||_F < ZETA_REL * max(1, ||V||_F). C is projected off range(A) twice, so rounding
    left over from the first projection does not pass for new directions.

    Args:
        A (np.ndarray): The n x l matrix.
        A_pinv (np.ndarray): Its l x n pseudoinverse.
        V (np.ndarray): The n x p block to append.

    Returns:
        tuple: (new pseudoinverse, D, K, C, branch, rank)
    """
    if V.shape[0] != A.shape[0]:
        raise ShapeError(f"Appended block has {V.shape[0]} rows, expected {A.shape[0]}")
    p = V.shape[1]
    D = A_pinv @ V
    C = V - A @ D
    D_extra = A_pinv @ C
    C = C - A @ D_extra
    D = D + D_extra
    zeta = cfg.ZETA_REL * max(1.0, float(np.linalg.norm(V)))

    if np.linalg.norm(C) < zeta:
        branch, rank = "zero", 0
        K = spd_solve(D.T @ D, D.T @ A_pinv, ridge=1.0)
    else:
        C_pinv, rank = _truncated_pinv(C, zeta)
        if rank == p:
            branch = "full"
            K = C_pinv
        else:
            branch = "mixed"
            P = np.eye(p) - C_pinv @ C
            DtD = D.T @ D
            rhs = D.T @ A_pinv - DtD @ C_pinv
            K = C_pinv + P @ spd_solve(P @ DtD @ P, rhs, ridge=1.0)

    log.debug(f"Pseudoinverse column update: {p} columns, branch={branch}, rank(C)={rank}")
    return np.vstack([A_pinv - D @ K, K]), D, K, C, branch, rank
