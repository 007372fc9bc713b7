import dataclasses
import logging as log
import numpy as np
from scipy.special import expit

from modules.Architecture import Architecture
from modules.RandomBasis import RandomBasis
from modules.StateMatrix import StateMatrix
from modules.ShapeError import ShapeError
from handlers.seeding import child_rng, FEATURE, ENHANCEMENT, EXTENSION

#Config
import broadlearn.config as cfg

ACTIVATIONS = {
    "identity": lambda x: x,
    "tanh": np.tanh,
    "sigmoid": expit,
}


def as_matrix(A, name: str = "matrix") -> np.ndarray:
    """
    Convert an array-like to a float 2-D matrix. A 1-D input is read as a single column.

    Args:
        A: The array-like to convert.
        name (str): Used in error messages.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim == 1:
        A = A.reshape(-1, 1)
    if A.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got shape {A.shape}")
    return A


def _check_columns(A: np.ndarray, expected: int, name: str):
    if A.shape[1] != expected:
        raise ShapeError(f"{name} has {A.shape[1]} columns, expected {expected}")


def _draw(rng: np.random.Generator, rows: int, cols: int, weight_range, bias_range):
    weights = rng.uniform(weight_range[0], weight_range[1], size=(rows, cols))
    biases = rng.uniform(bias_range[0], bias_range[1], size=(1, cols))
    return weights, biases


def init_basis(arch: Architecture, seed: int, weight_range=None, bias_range=None) -> RandomBasis:
    """
    Draw the frozen random basis of a broad network.

    Weights are uniform on WEIGHT_RANGE, biases uniform on BIAS_RANGE (both configurable).
    Every tensor has its own child stream derived from (seed, tensor index), so identical
    (arch, seed) pairs give bit-identical bases.

    Args:
        arch (Architecture): The network shape.
        seed (int): The master seed.
        weight_range (tuple): Overrides cfg.WEIGHT_RANGE.
        bias_range (tuple): Overrides cfg.BIAS_RANGE.

    Returns:
        RandomBasis: The basis, with layout [Z_1..Z_k, H_1..H_m].
    """
    weight_range = tuple(float(v) for v in (cfg.WEIGHT_RANGE if weight_range is None else weight_range))
    bias_range = tuple(float(v) for v in (cfg.BIAS_RANGE if bias_range is None else bias_range))

    features = [_draw(child_rng(seed, FEATURE, i), arch.input_dim, arch.q, weight_range, bias_range)
                for i in range(arch.k)]
    enhancements = [_draw(child_rng(seed, ENHANCEMENT, j), arch.k * arch.q, arch.r, weight_range, bias_range)
                    for j in range(arch.m)]

    log.debug(f"New basis: k={arch.k} q={arch.q} m={arch.m} r={arch.r} M={arch.input_dim} seed={seed}")
    return RandomBasis(
        arch=arch,
        seed=int(seed),
        weight_range=weight_range,
        bias_range=bias_range,
        feature_weights=tuple(w for w, _ in features),
        feature_biases=tuple(b for _, b in features),
        enhancement_weights=tuple(w for w, _ in enhancements),
        enhancement_biases=tuple(b for _, b in enhancements),
        enhancement_inputs=(arch.k,) * arch.m,
        layout=tuple(("feature", i) for i in range(arch.k)) + tuple(("enhancement", j) for j in range(arch.m)),
    )


def extend_basis_enhancement(basis: RandomBasis, p: int, seed: int) -> RandomBasis:
    """
    Append a group of p enhancement nodes reading every current feature group.

    Args:
        basis (RandomBasis): The basis to extend. It is not modified.
        p (int): Number of new enhancement nodes.
        seed (int): Seed of the new group's tensors.
    """
    if int(p) != p or p < 1:
        raise ValueError(f"Number of new enhancement nodes must be >= 1, got {p!r}")
    j = len(basis.enhancement_weights)
    weights, biases = _draw(child_rng(seed, ENHANCEMENT, j), basis.feature_width, int(p),
                            basis.weight_range, basis.bias_range)
    log.debug(f"Enhancement group {j} added: {basis.feature_width}x{p}")
    return dataclasses.replace(
        basis,
        enhancement_weights=basis.enhancement_weights + (weights,),
        enhancement_biases=basis.enhancement_biases + (biases,),
        enhancement_inputs=basis.enhancement_inputs + (basis.n_feature_groups,),
        layout=basis.layout + (("enhancement", j),),
        history=basis.history + (("enhancement", int(p), int(seed)),),
    )


def extend_basis_feature(basis: RandomBasis, seed: int) -> RandomBasis:
    """
    Append feature group k+1 and its extension enhancement block.

    The extension block holds one r-wide group per original enhancement group, and reads the
    new feature group only.

    Args:
        basis (RandomBasis): The basis to extend. It is not modified.
        seed (int): Seed of the new tensors.
    """
    arch = basis.arch
    g = basis.n_feature_groups
    weights, biases = _draw(child_rng(seed, FEATURE, g), arch.input_dim, arch.q, basis.weight_range, basis.bias_range)
    pairs = [_draw(child_rng(seed, EXTENSION, g, i), arch.q, arch.r, basis.weight_range, basis.bias_range)
             for i in range(arch.m)]
    log.debug(f"Feature group {g} added with {arch.m} extension blocks")
    return dataclasses.replace(
        basis,
        feature_weights=basis.feature_weights + (weights,),
        feature_biases=basis.feature_biases + (biases,),
        extension_weights=basis.extension_weights + (tuple(w for w, _ in pairs),),
        extension_biases=basis.extension_biases + (tuple(b for _, b in pairs),),
        layout=basis.layout + (("feature", g), ("extension", g)),
        history=basis.history + (("feature", int(seed)),),
    )


def replay_basis(arch: Architecture, seed: int, history, weight_range=None, bias_range=None) -> RandomBasis:
    """Rebuild a basis from its initial seed and the recorded increments."""
    basis = init_basis(arch, seed, weight_range, bias_range)
    for step in history:
        if step[0] == "enhancement":
            basis = extend_basis_enhancement(basis, step[1], step[2])
        elif step[0] == "feature":
            basis = extend_basis_feature(basis, step[1])
        else:
            raise ValueError(f"Unknown basis increment {step!r}")
    return basis


def feature_nodes(X, basis: RandomBasis) -> np.ndarray:
    """
    Map inputs to the concatenated feature nodes [phi(X W_e1 + b_e1), ..., phi(X W_ek + b_ek)].

    Args:
        X: The N x M input matrix.
        basis (RandomBasis): The basis.

    Returns:
        np.ndarray: N x (k q) matrix, groups in group order.
    """
    X = as_matrix(X, "X")
    _check_columns(X, basis.arch.input_dim, "X")
    phi = ACTIVATIONS[basis.arch.feature_activation]
    blocks = [phi(X @ w + b) for w, b in zip(basis.feature_weights, basis.feature_biases)]
    return np.hstack(blocks)


def enhancement_nodes(Z, basis: RandomBasis) -> np.ndarray:
    """
    Map feature nodes to the concatenated enhancement nodes [xi(Z W_h1 + b_h1), ...].

    Args:
        Z: The N x (k q) feature-node matrix.
        basis (RandomBasis): The basis.

    Returns:
        np.ndarray: N x (sum of enhancement group widths) matrix.
    """
    Z = as_matrix(Z, "Z")
    _check_columns(Z, basis.feature_width, "Z")
    blocks = [_enhancement_group(Z, basis, j) for j in range(len(basis.enhancement_weights))]
    return np.hstack(blocks) if blocks else np.zeros((Z.shape[0], 0))


def _enhancement_group(Z: np.ndarray, basis: RandomBasis, j: int) -> np.ndarray:
    xi = ACTIVATIONS[basis.arch.enhancement_activation]
    fan_in = basis.enhancement_inputs[j] * basis.arch.q
    return xi(Z[:, :fan_in] @ basis.enhancement_weights[j] + basis.enhancement_biases[j])


def _extension_group(Z: np.ndarray, basis: RandomBasis, g: int) -> np.ndarray:
    xi = ACTIVATIONS[basis.arch.enhancement_activation]
    q = basis.arch.q
    Zg = Z[:, g * q:(g + 1) * q]
    e = g - basis.arch.k
    return np.hstack([xi(Zg @ w + b) for w, b in zip(basis.extension_weights[e], basis.extension_biases[e])])


def _render(Z: np.ndarray, basis: RandomBasis, entries) -> np.ndarray:
    q = basis.arch.q
    blocks = []
    for kind, index in entries:
        if kind == "feature":
            blocks.append(Z[:, index * q:(index + 1) * q])
        elif kind == "enhancement":
            blocks.append(_enhancement_group(Z, basis, index))
        else:
            blocks.append(_extension_group(Z, basis, index))
    return np.hstack(blocks) if blocks else np.zeros((Z.shape[0], 0))


def state_matrix(X, basis: RandomBasis) -> StateMatrix:
    """
    Build the state matrix U of a batch of inputs, blocks in the basis layout order.

    Args:
        X: The N x M input matrix. N may be zero.
        basis (RandomBasis): The basis.

    Returns:
        StateMatrix: N x L values.
    """
    Z = feature_nodes(X, basis)
    values = _render(Z, basis, basis.layout)
    return StateMatrix(values, basis.feature_width, values.shape[1] - basis.feature_width)


def tail_columns(X, basis: RandomBasis, n_blocks: int) -> np.ndarray:
    """
    Compute only the last n_blocks layout blocks of the state matrix.
    Used by the node increments, which only need the columns they add.

    Args:
        X: The N x M input matrix.
        basis (RandomBasis): The (already extended) basis.
        n_blocks (int): How many trailing layout entries to render.
    """
    Z = feature_nodes(X, basis)
    return _render(Z, basis, basis.layout[-n_blocks:])
