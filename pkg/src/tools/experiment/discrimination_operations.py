"""
Discrimination and outlier experiments
"""

from typing import List, Optional, Sequence

from mcp.types import TextContent

from ...mmd.experiments import (
    DEFAULT_TAU_REPLICATES,
    DIMENSIONS,
    AlternativeKind,
    Method,
    as_method,
    mark_best,
    outlier_experiment,
    tau_table,
)
from ..helpers import run_blocking, table_reply


class DiscriminationOperations:
    """Effect-size experiments"""

    def __init__(self, threads: Optional[int] = None):
        self.threads = threads

    async def discrimination_tau(self, seed: int, methods: Optional[Sequence[str]] = None,
                                 alternative: str = AlternativeKind.UNIFORM_CUBE.value,
                                 csv_path: Optional[str] = None, dims: Sequence[int] = DIMENSIONS,
                                 scales: Optional[Sequence[str]] = None, n: int = 100,
                                 replicates: int = DEFAULT_TAU_REPLICATES,
                                 whiten: bool = False) -> List[TextContent]:
        """tau over a (method, d, scale) grid"""
        chosen = [as_method(m) for m in (methods or [m.value for m in Method])]
        grid = {m: list(scales) for m in chosen} if scales else None
        results = await run_blocking(tau_table, chosen, alternative, list(dims), n,
                                     replicates, seed, grid, 100.0, csv_path, self.threads, whiten)
        return table_reply(f"tau for {len(results)} cells", mark_best(results))

    async def outlier_experiment(self, seed: int, methods: Optional[Sequence[str]] = None, d: int = 4,
                                 n: int = 100, magnitude: float = 100.0, scales: Optional[Sequence[str]] = None,
                                 replicates: int = DEFAULT_TAU_REPLICATES) -> List[TextContent]:
        """Clean versus outlier-injected batches"""
        chosen = [as_method(m) for m in (methods or [m.value for m in Method])]
        grid = {m: list(scales) for m in chosen} if scales else None
        rows = await run_blocking(outlier_experiment, chosen, d, n, magnitude, replicates, seed, grid, self.threads)
        return table_reply(f"Outlier experiment (d={d}, magnitude={magnitude:g})", rows)
