# Deterministic fan-out of replica chunks to a process pool
import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, List, Sequence

from .. import config as env

logger = logging.getLogger(__name__)


def chunk_bounds(replicas: int, chunk: int) -> List[tuple]:
    """[start, stop) ranges of fixed size; independent of the worker count."""
    chunk = max(1, int(chunk))
    return [(start, min(start + chunk, replicas)) for start in range(0, replicas, chunk)]


def map_replicas(func: Callable[[int, int, int], Sequence], replicas: int, seed: int,
                 workers: int = 1, chunk: int = None) -> list:
    """Runs func(seed, start, stop) over replica chunks and concatenates the results in order.

    Every replica draws from its own stream keyed by (seed, index), so the output does not
    depend on `workers` or on how chunks are scheduled. `func` must be picklable.
    """
    bounds = chunk_bounds(replicas, chunk or env.CHUNK)
    if workers <= 1 or len(bounds) == 1:
        parts = [func(seed, start, stop) for start, stop in bounds]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(func, seed, start, stop) for start, stop in bounds]
            parts = [f.result() for f in futures]
    logger.debug("mapped %d replicas in %d chunks on %d workers", replicas, len(bounds), workers)
    return [item for part in parts for item in part]
