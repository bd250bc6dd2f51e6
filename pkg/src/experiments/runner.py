"""
Replication harness

Replications are cut into fixed chunks, evaluated in worker processes and
joined in chunk order, so the assembled result does not depend on the
worker count.
"""

import os
import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, List, Optional, Tuple

import numpy as np

logger = logging.getLogger(__name__)


def default_workers() -> int:
    return max(1, int(os.getenv('SDLAB_WORKERS', '1')))


def default_chunk_size() -> int:
    return max(1, int(os.getenv('SDLAB_CHUNK_SIZE', '256')))


def abort_fraction() -> float:
    return float(os.getenv('SDLAB_ABORT_FRACTION', '0.01'))


def chunk_bounds(reps: int, chunk_size: int) -> List[Tuple[int, int]]:
    return [(start, min(start + chunk_size, reps)) for start in range(0, reps, chunk_size)]


def _call(task: Callable, bounds: Tuple[int, int]) -> np.ndarray:
    return task(*bounds)


def run_replications(task: Callable[[int, int], np.ndarray], reps: int,
                     workers: Optional[int] = None,
                     chunk_size: Optional[int] = None) -> np.ndarray:
    """
    Evaluate task(start, stop) over all replications

    Args:
        task: Picklable callable returning one row per replication in [start, stop)
        reps: Number of replications
        workers: Worker processes (SDLAB_WORKERS when omitted)
        chunk_size: Replications per call (SDLAB_CHUNK_SIZE when omitted)

    Returns:
        Rows of all chunks concatenated in replication order
    """
    workers = workers or default_workers()
    chunk_size = chunk_size or default_chunk_size()
    bounds = chunk_bounds(reps, chunk_size)
    logger.info("Running %d replications in %d chunks on %d worker(s)", reps, len(bounds), workers)

    if workers == 1 or len(bounds) == 1:
        parts = [task(*b) for b in bounds]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_call, [task] * len(bounds), bounds))
    return np.concatenate(parts, axis=0)
