"""
Main ExperimentTools class that integrates all experiment operations
"""

from typing import List, Optional

from mcp.types import TextContent, Tool

from .discrimination_operations import DiscriminationOperations
from .null_operations import NullOperations
from .schemas import get_experiment_tool_schemas


class ExperimentTools:
    """Experiment tools class - Modular version"""

    def __init__(self, threads: Optional[int] = None):
        self.discrimination_ops = DiscriminationOperations(threads)
        self.null_ops = NullOperations(threads)

    def get_tools(self) -> List[Tool]:
        """Get all experiment tools"""
        return get_experiment_tool_schemas()

    # Discrimination
    async def discrimination_tau(self, seed: int, **kwargs) -> List[TextContent]:
        return await self.discrimination_ops.discrimination_tau(seed, **kwargs)

    async def outlier_experiment(self, seed: int, **kwargs) -> List[TextContent]:
        return await self.discrimination_ops.outlier_experiment(seed, **kwargs)

    # Null distribution
    async def validate_null(self, seed: int, **kwargs) -> List[TextContent]:
        return await self.null_ops.validate_null(seed, **kwargs)

    async def threshold_table(self, seed: int, **kwargs) -> List[TextContent]:
        return await self.null_ops.threshold_table(seed, **kwargs)
