# Deterministic per-replica random streams split from a root seed
import numpy as np


def replica_seed(seed: int, index: int, *tags: int) -> np.random.SeedSequence:
    """Seed sequence for replica `index`; independent of how replicas are grouped."""
    return np.random.SeedSequence(int(seed), spawn_key=(int(index),) + tuple(int(t) for t in tags))


def replica_rng(seed: int, index: int, *tags: int) -> np.random.Generator:
    return np.random.default_rng(replica_seed(seed, index, *tags))


def derived_seed(seed: int, *tags: int) -> int:
    """A 63-bit integer seed derived from (seed, tags), for APIs that take plain ints."""
    return int(replica_seed(seed, *tags).generate_state(2, np.uint64)[0] >> np.uint64(1))
