from dataclasses import dataclass
from typing import Optional

KINDS = ("samples", "enhancement", "features")


@dataclass(frozen=True)
class IncrementStep:
    """
    One step of an incremental schedule.

    Args:
        kind (str): samples, enhancement or features.
        amount (int): New samples, or new enhancement nodes. Ignored for features.
        seed (int): Seed of the new nodes. Derived from the experiment seed when omitted.
    """
    kind: str
    amount: int = 1
    seed: Optional[int] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"Unknown increment kind {self.kind!r}")
        if int(self.amount) != self.amount or self.amount < 1:
            raise ValueError(f"Increment amount must be a positive integer, got {self.amount!r}")
