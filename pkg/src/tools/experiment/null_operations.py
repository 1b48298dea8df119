"""
Null validation and threshold tables
"""

from typing import List, Optional, Sequence

from mcp.types import TextContent

from ...mmd.experiments import (
    DEFAULT_THRESHOLD_REPLICATES,
    DEFAULT_VALIDATION_REPLICATES,
    DIMENSIONS,
    RBF_SCALES,
    threshold_table,
    validate_null,
)
from ..helpers import run_blocking, table_reply


class NullOperations:
    """Monte-Carlo studies of the null distribution"""

    def __init__(self, threads: Optional[int] = None):
        self.threads = threads

    async def validate_null(self, seed: int, dims: Sequence[int] = DIMENSIONS,
                            scales: Optional[Sequence[str]] = None, n: int = 100,
                            replicates: int = DEFAULT_VALIDATION_REPLICATES) -> List[TextContent]:
        """SMMD mean and SD under the null"""
        scales = list(scales or RBF_SCALES[:-1])

        def run():
            rows = []
            for d in dims:
                rows.extend(validate_null(d, scales, n, replicates, seed, self.threads))
            return rows

        rows = await run_blocking(run)
        return table_reply(f"Null validation ({replicates} replicates)", rows)

    async def threshold_table(self, seed: int, dims: Sequence[int] = DIMENSIONS,
                              scales: Optional[Sequence[str]] = None, n: int = 100, alpha: float = 0.05,
                              replicates: int = DEFAULT_THRESHOLD_REPLICATES) -> List[TextContent]:
        """Thresholds per (d, sample type, scale)"""
        scales = list(scales or RBF_SCALES)
        rows = await run_blocking(threshold_table, list(dims), scales, n, alpha, replicates, seed,
                                  threads=self.threads)
        return table_reply(f"Thresholds at alpha={alpha:g}", rows)
