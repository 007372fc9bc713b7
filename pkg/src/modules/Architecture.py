from dataclasses import dataclass

FEATURE_ACTIVATIONS = ("identity", "tanh", "sigmoid")
ENHANCEMENT_ACTIVATIONS = ("tanh", "sigmoid")


@dataclass(frozen=True)
class Architecture:
    """
    Shape of a broad network: k groups of q feature nodes and m groups of r enhancement nodes.

    Args:
        k (int): Number of feature-mapping groups.
        q (int): Feature nodes per group.
        m (int): Number of enhancement groups.
        r (int): Enhancement nodes per group.
        input_dim (int): Input dimension M.
        output_dim (int): Output dimension C.
        feature_activation (str): One of identity, tanh, sigmoid.
        enhancement_activation (str): One of tanh, sigmoid.

    Usage:
        arch = Architecture(k=2, q=5, m=1, r=40, input_dim=3, output_dim=1)
        arch.L  # 2*5 + 1*40
    """
    k: int
    q: int
    m: int
    r: int
    input_dim: int
    output_dim: int
    feature_activation: str = "identity"
    enhancement_activation: str = "tanh"

    def __post_init__(self):
        for name in ("k", "q", "m", "r", "input_dim", "output_dim"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ValueError(f"Architecture.{name} must be a positive integer, got {value!r}")
        if self.feature_activation not in FEATURE_ACTIVATIONS:
            raise ValueError(f"Unknown feature activation {self.feature_activation!r}")
        if self.enhancement_activation not in ENHANCEMENT_ACTIVATIONS:
            raise ValueError(f"Unknown enhancement activation {self.enhancement_activation!r}")

    @property
    def L(self) -> int:
        return self.k * self.q + self.m * self.r

    def to_dict(self) -> dict:
        return {
            "k": self.k, "q": self.q, "m": self.m, "r": self.r,
            "input_dim": self.input_dim, "output_dim": self.output_dim,
            "feature_activation": self.feature_activation,
            "enhancement_activation": self.enhancement_activation,
        }

    @classmethod
    def from_dict(cls, data: dict):
        return cls(**{key: data[key] for key in cls.__dataclass_fields__ if key in data})
