from dataclasses import dataclass, field
from typing import Tuple
import hashlib
import numpy as np

from .Architecture import Architecture


@dataclass(frozen=True)
class RandomBasis:
    """
    All frozen random weights and biases that define a broad network's hidden mapping.

    Biases are stored per node (1 x width rows) and broadcast over samples.
    Tensors are read-only; extending a basis builds a new RandomBasis that shares them.

    Args:
        arch (Architecture): The initial architecture.
        seed (int): The master seed the initial tensors were drawn from.
        weight_range (tuple): Uniform range of the weights.
        bias_range (tuple): Uniform range of the biases.
        feature_weights (tuple): One M x q matrix per feature group.
        feature_biases (tuple): One 1 x q row per feature group.
        enhancement_weights (tuple): One (fan-in) x width matrix per enhancement group.
        enhancement_biases (tuple): One 1 x width row per enhancement group.
        enhancement_inputs (tuple): Number of leading feature groups each enhancement group reads.
        extension_weights (tuple): For every feature group added after training, one tuple of
            m cross weights (q x r) connecting it to its extension enhancement block.
        extension_biases (tuple): Matching 1 x r biases.
        layout (tuple): Column blocks in state-matrix order, as (kind, index) pairs with kind in
            {"feature", "enhancement", "extension"}.
        history (tuple): Increments applied since init, replayable from the seeds they carry.

    Usage:
        basis = init_basis(arch, seed=7)
        basis.width  # arch.L until the basis is extended
    """
    arch: Architecture
    seed: int
    weight_range: Tuple[float, float]
    bias_range: Tuple[float, float]
    feature_weights: tuple
    feature_biases: tuple
    enhancement_weights: tuple
    enhancement_biases: tuple
    enhancement_inputs: tuple
    extension_weights: tuple = ()
    extension_biases: tuple = ()
    layout: tuple = ()
    history: tuple = field(default=())

    def __post_init__(self):
        for group in (self.feature_weights, self.feature_biases, self.enhancement_weights, self.enhancement_biases):
            for tensor in group:
                tensor.setflags(write=False)
        for group in (self.extension_weights, self.extension_biases):
            for tensors in group:
                for tensor in tensors:
                    tensor.setflags(write=False)

    @property
    def n_feature_groups(self) -> int:
        return len(self.feature_weights)

    @property
    def feature_width(self) -> int:
        return sum(w.shape[1] for w in self.feature_weights)

    def block_width(self, kind: str, index: int) -> int:
        if kind == "feature":
            return self.feature_weights[index].shape[1]
        if kind == "enhancement":
            return self.enhancement_weights[index].shape[1]
        return sum(w.shape[1] for w in self.extension_weights[index - self.arch.k])

    @property
    def width(self) -> int:
        return sum(self.block_width(kind, index) for kind, index in self.layout)

    def fingerprint(self) -> str:
        """SHA-256 over every tensor, in layout order. Used to check that extension never mutates."""
        digest = hashlib.sha256()
        for group in (self.feature_weights, self.feature_biases, self.enhancement_weights, self.enhancement_biases):
            for tensor in group:
                digest.update(np.ascontiguousarray(tensor).tobytes())
        for group in (self.extension_weights, self.extension_biases):
            for tensors in group:
                for tensor in tensors:
                    digest.update(np.ascontiguousarray(tensor).tobytes())
        return digest.hexdigest()
