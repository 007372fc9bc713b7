import numpy as np

# Stream tags, so that the same index in different roles never shares a stream
FEATURE = 0
ENHANCEMENT = 1
EXTENSION = 2
RUN = 3
CONTAMINATION = 4
SPLIT = 5
INCREMENT = 6


def child_rng(seed: int, *key: int) -> np.random.Generator:
    """
    Build an independent generator for one tensor or one run.

    The stream depends only on (seed, key), so generating the tensors in another order,
    or extending a basis later, yields the same draws.

    Args:
        seed (int): The master seed.
        *key (int): The spawn key, e.g. (FEATURE, group index).
    """
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key)))


def derive_seed(seed: int, *key: int) -> int:
    """Derive a plain integer child seed (for records and for handing to other operations)."""
    state = np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key)).generate_state(1, dtype=np.uint32)
    return int(state[0])
