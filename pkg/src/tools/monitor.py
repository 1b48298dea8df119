"""
Convergence monitor tool
"""

from typing import List, Optional

from mcp.types import TextContent, Tool

from ..mmd.estimators import smmd
from ..mmd.monitoring import BMonitor, EMonitor, b_update, e_update, flag
from ..utils.csv_io import SampleReader
from ..utils.error_handler import ParameterError, validate_positive_int
from ..utils.tables import dumps_fixed
from .estimators import KERNEL_PROPERTIES
from .helpers import kernel_from_arguments, run_blocking


class MonitorTools:
    """B/E statistic monitor tools class"""

    def get_tools(self) -> List[Tool]:
        """Get all monitor tools"""
        return [
            Tool(
                name="monitor_batches",
                description="📈 CONVERGENCE MONITOR: Compute SMMD per batch over a CSV of latent codes (every batch_size consecutive rows form one batch) and track the B statistic (running mean) or E statistic (exponential moving average) against its three-sigma interval.",
                inputSchema={
                    "type": "object",
                    "properties": {
                        "csv_path": {
                            "type": "string",
                            "description": "CSV file of codes, batches stored consecutively"
                        },
                        "batch_size": {
                            "type": "integer",
                            "description": "Rows per batch",
                            "minimum": 2
                        },
                        "monitor": {
                            "type": "string",
                            "enum": ["b", "e"],
                            "default": "b"
                        },
                        "momentum": {
                            "type": "number",
                            "description": "EMA momentum for the E statistic",
                            "default": 0.99
                        },
                        "min_batches": {
                            "type": "integer",
                            "description": "Batches required before a verdict",
                            "default": 30
                        },
                        **KERNEL_PROPERTIES
                    },
                    "required": ["csv_path", "batch_size"],
                    "additionalProperties": False
                }
            )
        ]

    async def monitor_batches(self, csv_path: str, batch_size: int, monitor: str = "b", momentum: float = 0.99,
                              min_batches: int = 30, gamma: Optional[float] = None,
                              scale: Optional[str] = None) -> List[TextContent]:
        """Per-batch monitor lines plus a verdict"""
        batch_size = validate_positive_int(batch_size, "batch_size", minimum=2)
        if monitor not in ("b", "e"):
            raise ParameterError(f"Unknown monitor {monitor!r}; use 'b' or 'e'")
        reader = SampleReader()
        data = await reader.read_file_async(csv_path)
        kernel = kernel_from_arguments(gamma, scale, data.shape[1], batch_size)

        def run() -> List[str]:
            state = BMonitor() if monitor == "b" else EMonitor(momentum)
            key = f"{monitor}_stat"
            lines = []
            for index, batch in enumerate(reader.iter_batches(data, batch_size)):
                value = smmd(batch, kernel.gamma)
                state = b_update(state, value) if monitor == "b" else e_update(state, value)
                lo, hi = state.interval()
                lines.append(dumps_fixed({
                    "batch_index": index,
                    "smmd": value,
                    key: state.statistic,
                    "interval_lo": lo,
                    "interval_hi": hi,
                    "flag": flag(state, min_batches).value,
                }))
            lines.append(dumps_fixed({"verdict": flag(state, min_batches).value, "batches": state.m,
                                      key: state.statistic}))
            return lines

        lines = await run_blocking(run)
        return [TextContent(type="text", text="✅ Monitor finished\n" + "\n".join(lines))]
