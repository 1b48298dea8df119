"""
Seeded replicate execution

Every replicate index owns an independent numpy Generator spawned from the
root seed, so results depend on (seed, index) only and not on the number of
worker threads or on scheduling order.
"""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, TypeVar

import numpy as np

from .config import load_settings
from .error_handler import ParameterError, validate_positive_int

logger = logging.getLogger(__name__)

T = TypeVar("T")

MAX_SEED = 2**64 - 1


def validate_seed(seed: Optional[int]) -> int:
    """Validate a 64-bit unsigned root seed"""
    if seed is None:
        raise ParameterError("An explicit seed is required for stochastic computations")
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or not 0 <= seed <= MAX_SEED:
        raise ParameterError(f"Invalid seed: {seed!r}. Must be an integer in [0, 2**64 - 1].")
    return int(seed)


def spawn_generators(seed: int, count: int) -> List[np.random.Generator]:
    """One independent Generator per replicate index"""
    children = np.random.SeedSequence(validate_seed(seed)).spawn(count)
    return [np.random.default_rng(child) for child in children]


def resolve_threads(threads: Optional[int]) -> int:
    """Worker count: explicit value, else SMMD_THREADS, else all cores"""
    if threads is None:
        threads = load_settings().threads or os.cpu_count() or 1
    return validate_positive_int(threads, "threads")


def run_replicates(
    func: Callable[[int, np.random.Generator], T],
    seed: int,
    replicates: int,
    threads: Optional[int] = None,
) -> List[T]:
    """
    Evaluate func(index, rng) for every replicate index

    Args:
        func: Replicate body; must only draw randomness from the given rng
        seed: Root seed
        replicates: Number of replicates
        threads: Worker threads (None = SMMD_THREADS or all cores)

    Returns:
        Results ordered by replicate index
    """
    replicates = validate_positive_int(replicates, "replicates")
    generators = spawn_generators(seed, replicates)
    threads = min(resolve_threads(threads), replicates)

    if threads == 1:
        return [func(i, rng) for i, rng in enumerate(generators)]

    blocks = _index_blocks(replicates, threads)
    logger.debug("Running %d replicates on %d threads", replicates, threads)

    def run_block(block: Sequence[int]) -> List[T]:
        return [func(i, generators[i]) for i in block]

    results: List[T] = []
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for block_result in pool.map(run_block, blocks):
            results.extend(block_result)
    return results


def _index_blocks(total: int, workers: int) -> List[range]:
    # about four blocks per worker
    n_blocks = min(total, workers * 4)
    edges = np.linspace(0, total, n_blocks + 1).astype(int)
    return [range(lo, hi) for lo, hi in zip(edges[:-1], edges[1:]) if hi > lo]
